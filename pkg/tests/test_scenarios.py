import numpy as np
import pytest

from ahtsim.ledger import CORRELATION_INTRA, INTERACTION, TEMPERATURE_INHOMOGENEITY
from ahtsim.pauli import PauliSum, term, to_matrix, uniform_exchange
from ahtsim.scenarios import (
    SCENARIO_NAMES,
    matched_terms,
    random_htc_scenario,
    random_local_equilibrium_state,
    random_two_body,
    scenario,
)
from ahtsim.states import beta_omega_from_si, is_diagonal, local_equilibrium_residual


@pytest.mark.parametrize("name", SCENARIO_NAMES)
def test_htc_unless_declared(name):
    s = scenario(name)
    res = s.htc()
    assert res.ok != s.violates_htc
    assert local_equilibrium_residual(s.initial_state, s.spec) < 1e-12


def test_unknown_name():
    with pytest.raises(KeyError):
        scenario("fig3z")


def test_fig1_parameters():
    b = scenario("fig1b")
    assert b.metadata["temperatures_k"] == {"A": [1.0, 0.5], "B": 1.2}
    assert b.spec.omega("A1") == 2.0 and b.spec.omega("A2") == 1.0 and b.spec.omega("B") == 1.0
    assert b.spec.beta("A2") == pytest.approx(beta_omega_from_si(0.5, 4.0))
    assert b.expected_mechanism == TEMPERATURE_INHOMOGENEITY
    assert b.metadata["c"] == 0.005
    assert scenario("fig1c").expected_mechanism == INTERACTION
    assert scenario("fig1d").expected_mechanism == CORRELATION_INTRA


def test_fig1c_intra():
    s = scenario("fig1c")
    ex = PauliSum.of(term(0.5, A1="-", A2="+"), term(0.5, A1="+", A2="-"))
    assert np.allclose(to_matrix(s.h_intra, s.spec), to_matrix(ex, s.spec))


def test_fig1d_chi():
    s = scenario("fig1d")
    assert s.metadata["chi_amplitude"] == 0.24
    assert s.recipe == "product+coherence"
    assert s.initial_state.reduced([0, 1])[1, 2] == pytest.approx(0.24)


def test_fig2b_perturbation():
    s = scenario("fig2b")
    assert s.violates_htc
    j = 0.2 * 0.005
    assert np.allclose(to_matrix(s.h_perturb, s.spec), to_matrix(uniform_exchange(["A1", "A2", "B"], j), s.spec))


def test_theorem1_random_seeded():
    a, b = scenario("theorem1-random", seed=7), scenario("theorem1-random", seed=7)
    assert np.array_equal(a.initial_state.matrix, b.initial_state.matrix)
    assert is_diagonal(a.initial_state, range(a.spec.n_qubits))
    assert all(bk > a.spec.beta_b for _, _, bk in a.spec.a_subsystems)


def test_random_state_keeps_marginals():
    rng = np.random.default_rng(11)
    for _ in range(20):
        spec, _ = random_two_body(rng)
        rho = random_local_equilibrium_state(spec, rng, coherent=True)
        assert local_equilibrium_residual(rho, spec) < 1e-12
        assert rho.eigenvalues()[0] > -1e-12


def test_matched_terms_commute():
    rng = np.random.default_rng(2)
    for _ in range(10):
        s = random_htc_scenario(rng)
        assert s.htc().ok
    spec = scenario("fig1b").spec
    labels = {tuple(op for _, op in t.factors) for t in matched_terms(spec) if len(t.factors) == 3}
    assert ("+", "-", "-") in labels
