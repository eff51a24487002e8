import numpy as np
import pytest

from ahtsim import linalg
from ahtsim.analysis import convexity_closed_form, three_body_convexity, three_body_rate
from ahtsim.dynamics import (
    Propagator,
    convexity_decomposition,
    evolve,
    heat_series,
    q_derivative,
    theorem1_witness,
)
from ahtsim.pauli import ZERO, PauliSum, PauliTerm, SystemSpec, flip_flop, free_hamiltonian, term, three_body, to_matrix
from ahtsim.scenarios import scenario
from ahtsim.states import add_classical_correlation, add_coherence, gibbs_qubit, product_state


def pair_spec(ba=0.9, bb=0.3, w=1.3):
    return SystemSpec((("A", w, ba),), (("B", w),), bb)


def test_evolve_trivial_cases():
    s = scenario("fig1d")
    rho = s.initial_state
    assert evolve(rho, s.h_total, s.spec, 0.0) is rho
    assert evolve(rho, ZERO, s.spec, 5.0) is rho
    prod = product_state(s.spec)
    out = evolve(prod, free_hamiltonian(s.spec), s.spec, 123.4)
    assert np.abs(out.matrix - prod.matrix).max() < 1e-14


def test_evolve_preserves_state_properties():
    s = scenario("fig1d")
    out = evolve(s.initial_state, s.h_total, s.spec, 777.0)
    assert np.allclose(np.linalg.eigvalsh(out.matrix), s.initial_state.eigenvalues(), atol=1e-12)
    assert abs(np.trace(out.matrix) - 1) < 1e-12


def test_propagator_delta_matches_direct():
    s = scenario("fig1c")
    prop = Propagator(to_matrix(s.h_total, s.spec))
    hb = to_matrix(s.h_b, s.spec)
    rho = s.initial_state.matrix
    times = [0.0, 3.0, 500.0]
    direct = [linalg.expectation(prop.evolve_matrix(rho, t) - rho, hb).real for t in times]
    assert np.allclose(prop.delta_expectation(rho, hb, times), direct, atol=1e-14)


def test_heat_series_zero_time():
    s = scenario("fig1b")
    ts = heat_series(s.initial_state, s.h_total, None, s.spec, [0.0])
    assert ts.q.tolist() == [0.0] and ts.lhs.tolist() == [0.0]


def test_clausius_homogeneous_fig1b():
    s = scenario("fig1b")
    b = s.spec.beta("A1")
    spec = s.spec.with_betas([b, b], s.spec.beta_b)
    ts = heat_series(product_state(spec), s.h_total, None, spec, np.linspace(0, 2000, 2001))
    assert ts.lhs.min() >= -1e-10


def test_order_guard():
    s = scenario("fig1b")
    with pytest.raises(ValueError):
        q_derivative(s.initial_state, s.h_inter, None, s.spec, 0)
    with pytest.raises(ValueError):
        q_derivative(s.initial_state, s.h_inter, None, s.spec, 7)


def test_imaginary_residue_raises():
    s = scenario("fig1b")
    # an anti-Hermitian generator on a coherent state gives an imaginary rate
    h = 1j * three_body("A1", "A2", "B", 0.3)
    h = PauliSum(h.terms)
    rng = np.random.default_rng(4)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = g @ g.conj().T
    with pytest.raises(ValueError, match="imaginary"):
        q_derivative(m / np.trace(m), h, None, s.spec, 1)


def test_first_derivative_vanishes_without_coherence():
    spec = pair_spec()
    d = q_derivative(product_state(spec), flip_flop("A", "B", 0.2), None, spec, 1)
    assert d.value == 0


def test_single_pair_convexity_formula():
    spec = pair_spec()
    c, w = 0.2, 1.3
    d = q_derivative(product_state(spec), flip_flop("A", "B", c), None, spec, 2).value
    expected = c**2 * w * (np.tanh(0.3 * w / 2) - np.tanh(0.9 * w / 2))
    assert d == pytest.approx(expected, rel=1e-12)
    # sign rule of a single pair
    assert (spec.beta_b - spec.beta_a) * d >= 0


def test_three_body_closed_forms():
    s = scenario("fig1b")
    c = 0.005
    rho = s.initial_state
    assert q_derivative(rho, s.h_inter, None, s.spec, 1).value == 0
    d2 = q_derivative(rho, s.h_inter, None, s.spec, 2).value
    assert d2 == pytest.approx(convexity_closed_form(s.spec, c), rel=1e-9)
    # any state: rate and convexity closed forms against the nested commutator
    rng = np.random.default_rng(3)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = g @ g.conj().T
    m /= np.trace(m)
    for n, fn in ((1, three_body_rate), (2, three_body_convexity)):
        num = 1j**n * linalg.expectation(m, linalg.nested_commutator(to_matrix(s.h_inter, s.spec), to_matrix(s.h_b, s.spec), n))
        assert fn(m, s.spec, c) == pytest.approx(num.real, rel=1e-10, abs=1e-16)


def test_full_generator_equals_coupling_under_htc():
    s = scenario("fig1c")
    for n in (1, 2, 3, 4):
        a = q_derivative(s.initial_state, s.h_inter, None, s.spec, n).value
        b = q_derivative(s.initial_state, s.h_inter, None, s.spec, n, h_total=s.h_total).value
        assert a == pytest.approx(b, rel=1e-9, abs=1e-18)


def test_decomposition_product_state():
    s = scenario("fig1d")
    rep = convexity_decomposition(product_state(s.spec), s.h_inter, s.spec)
    assert rep.value == pytest.approx(q_derivative(product_state(s.spec), s.h_inter, None, s.spec, 2).value, abs=1e-15)
    assert abs(rep.total("intra")) < 1e-18 and abs(rep.total("cross")) < 1e-18
    for k, v in rep.decomposition.items():
        if k.startswith("pair:"):
            assert (s.spec.beta_b - s.spec.beta_a) * v >= 0


def test_decomposition_fig1d():
    s = scenario("fig1d")
    rep = convexity_decomposition(s.initial_state, s.h_inter, s.spec)
    full = q_derivative(s.initial_state, s.h_inter, None, s.spec, 2).value
    assert abs(rep.value - full) < 1e-10
    assert rep.decomposition["intra:A1,A2|B"] > 0
    assert abs(rep.decomposition["cross:A1,A2|B"]) < 1e-18


def test_decomposition_rejects_three_body():
    s = scenario("fig1b")
    with pytest.raises(ValueError, match="two-body"):
        convexity_decomposition(s.initial_state, s.h_inter, s.spec)


def test_decomposition_cross_term_with_b_pairs():
    # one A, two B qubits: triplet is B1 B2 | A; collective correlation between A and B1 B2
    spec = SystemSpec((("A", 1.0, 0.8),), (("B1", 1.0), ("B2", 1.0)), 0.2)
    h = flip_flop("A", "B1", 0.1) + flip_flop("A", "B2", 0.07)
    corr = PauliSum.of(PauliTerm(0.05, (("A", "z"), ("B1", "+"), ("B2", "-")))).plus_hc()
    rho = add_coherence(product_state(spec), corr, spec)
    rep = convexity_decomposition(rho, h, spec)
    assert rep.value == pytest.approx(q_derivative(rho, h, None, spec, 2).value, abs=1e-14)
    assert abs(rep.decomposition["cross:B1,B2|A"]) > 1e-6


def test_witness_examples():
    s = scenario("fig1d")
    assert theorem1_witness(product_state(s.spec), s.spec).theorem_applies
    w = theorem1_witness(s.initial_state, s.spec)
    assert not w.theorem_applies and not w.diagonal[("A1", "A2", "B")]
    diag = add_classical_correlation(product_state(s.spec), PauliSum.of(term(0.05, A1="z", A2="z"), hermitian=True), s.spec)
    assert theorem1_witness(diag, s.spec).theorem_applies


def test_witness_covers_both_orderings():
    spec = SystemSpec((("A1", 1.0, 1.0), ("A2", 1.0, 1.0)), (("B1", 1.0), ("B2", 1.0)), 0.5)
    keys = set(theorem1_witness(product_state(spec), spec).diagonal)
    assert ("A1", "A2", "B1") in keys and ("A1", "B1", "B2") in keys and ("A2", "B2") in keys
    assert len(keys) == 4 + 2 + 2
