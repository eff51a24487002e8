import numpy as np
from hypothesis import given, settings, strategies as st

from ahtsim import linalg
from ahtsim.dynamics import heat_series
from ahtsim.ledger import mutual_information, relative_entropy
from ahtsim.pauli import PauliSum, SystemSpec, term, to_matrix
from ahtsim.scenarios import random_htc_scenario, random_local_equilibrium_state, random_two_body
from ahtsim.states import DensityMatrix, add_coherence, product_state

seeds = st.integers(0, 2**32 - 1)
betas = st.floats(0.05, 2.0)


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    r = g @ g.conj().T
    return r / np.trace(r).real


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4))
def test_partial_trace_linear_and_trace_preserving(seed, n):
    rng = np.random.default_rng(seed)
    dims = [2] * n
    a, b = random_density(rng, 2**n), random_density(rng, 2**n)
    keep = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    w = rng.uniform()
    lhs = linalg.partial_trace(w * a + (1 - w) * b, keep, dims)
    rhs = w * linalg.partial_trace(a, keep, dims) + (1 - w) * linalg.partial_trace(b, keep, dims)
    assert np.allclose(lhs, rhs, atol=1e-13)
    assert abs(np.trace(lhs) - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(betas, min_size=3, max_size=4), seeds)
def test_product_marginals(bs, seed):
    rng = np.random.default_rng(seed)
    a = tuple((f"A{k + 1}", float(rng.uniform(0.5, 2)), b) for k, b in enumerate(bs[:-1]))
    spec = SystemSpec(a, (("B", 1.0),), bs[-1])
    rho = product_state(spec)
    keep = sorted(rng.choice(spec.n_qubits, size=2, replace=False).tolist())
    singles = [linalg.partial_trace(rho.matrix, [i], spec.dims) for i in keep]
    assert np.allclose(rho.reduced(keep), np.kron(*singles), atol=1e-14)
    assert abs(mutual_information(rho, [[0], list(range(1, spec.n_qubits))])) < 1e-12


@settings(max_examples=40, deadline=None)
@given(betas, betas, betas, st.floats(0.0, 0.9))
def test_coherence_keeps_diagonal(b1, b2, bb, frac):
    spec = SystemSpec((("A1", 1.0, b1), ("A2", 1.0, b2)), (("B", 1.0),), bb)
    base = product_state(spec)
    p = np.diag(base.reduced([0, 1])).real
    amp = frac * np.sqrt(p[1] * p[2])
    rho = add_coherence(base, PauliSum.of(term(amp, A1="+", A2="-"), term(amp, A1="-", A2="+")), spec)
    assert np.allclose(np.diag(rho.matrix), np.diag(base.matrix), atol=1e-15)
    assert np.allclose(rho.reduced([0]), base.reduced([0]), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3))
def test_relative_entropy_nonnegative(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, 2**n), random_density(rng, 2**n)
    assert relative_entropy(a, b) >= -1e-12
    assert abs(relative_entropy(a, a)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_ledger_identity(seed):
    rng = np.random.default_rng(seed)
    s = random_htc_scenario(rng)
    t = float(rng.uniform(0, 200))
    ts = heat_series(s.initial_state, s.h_total, s.h_b, s.spec, [t], h_ai=s.h_intra, with_ledger=True)
    assert ts.ledgers[0].identity_residual < 1e-8


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_states_valid(seed):
    rng = np.random.default_rng(seed)
    spec, h = random_two_body(rng)
    rho = random_local_equilibrium_state(spec, rng)
    assert isinstance(rho, DensityMatrix)
    assert np.allclose(to_matrix(h, spec), to_matrix(h, spec).conj().T)
    assert rho.eigenvalues()[0] > -1e-12
