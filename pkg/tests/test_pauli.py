import itertools

import numpy as np
import pytest

from ahtsim.pauli import (
    PauliSum,
    PauliTerm,
    SystemSpec,
    build_s19_interaction,
    flip_flop,
    frequency_match_check,
    free_hamiltonian,
    single,
    term,
    three_body,
    to_matrix,
    uniform_exchange,
    verify_heat_transfer_condition,
    zzz,
)


def spec3(w1=2.0, w2=1.0, wb=1.0):
    return SystemSpec((("A1", w1, 1.0), ("A2", w2, 1.0)), (("B", wb),), 0.5)


def htc(h_i, spec, h_ai=None):
    h_a = free_hamiltonian(spec, spec.a_labels)
    if h_ai is not None:
        h_a = h_a + h_ai
    return verify_heat_transfer_condition(h_i, h_a, free_hamiltonian(spec, spec.b_labels), spec)


def test_free_hamiltonian_one_qubit():
    spec = SystemSpec((("A", 1.0, 1.0),), (("B", 1.0),), 0.5)
    m = to_matrix(free_hamiltonian(spec, ["A"]), spec, ["A"])
    assert np.allclose(m, np.diag([-0.5, 0.5]))


def test_lower_raise_matrix_element():
    spec = SystemSpec((("A", 1.0, 1.0),), (("B", 1.0),), 0.5)
    m = to_matrix(PauliSum.of(term(1.0, A="-", B="+")), spec)
    expected = np.zeros((4, 4))
    expected[2, 1] = 1  # row |10>, column |01>
    assert np.allclose(m, expected)


def test_three_body_matrix_elements():
    spec = spec3()
    m = to_matrix(three_body("A1", "A2", "B", 1.0), spec)
    nz = np.argwhere(np.abs(m) > 0)
    assert sorted(map(tuple, nz)) == [(3, 4), (4, 3)]  # |011> <-> |100>


def test_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(1.0, (("A", "x"), ("A", "z")))
    with pytest.raises(ValueError):
        PauliTerm(1.0, (("A", "q"),))


def test_hermitian_flag_enforced():
    spec = spec3()
    bad = PauliSum(PauliSum.of(term(1.0, A1="+", B="-")).terms, hermitian=True)
    with pytest.raises(ValueError, match="Hermitian"):
        to_matrix(bad, spec)


def test_to_matrix_linear():
    spec = spec3()
    h1 = three_body("A1", "A2", "B", 0.3 + 0.2j)
    h2 = uniform_exchange(spec.labels, 0.7)
    alpha = 1.7
    lhs = to_matrix(alpha * h1 + h2, spec)
    assert np.abs(lhs - alpha * to_matrix(h1, spec) - to_matrix(h2, spec)).max() < 1e-13


def test_unknown_label():
    with pytest.raises(KeyError):
        to_matrix(single("Z", "x"), spec3())


def test_frequency_matching_examples():
    spec = SystemSpec((("A1", 1.0, 1.0),), (("B1", 1.0),), 0.5)
    assert frequency_match_check(term(1.0, A1="-", B1="+"), spec)
    assert frequency_match_check(term(1.0, A1="+", A2="-", B="-"), spec3())
    odd = SystemSpec((("A1", 1.3, 1.0), ("A2", 0.4, 1.0)), (("B", 2.9),), 0.5)
    assert frequency_match_check(term(1.0, A1="z", A2="z", B="z"), odd)
    assert not frequency_match_check(term(1.0, A1="-", B="+"), odd)


def test_htc_examples():
    assert htc(three_body("A1", "A2", "B", 0.01), spec3()).ok
    mism = SystemSpec((("A1", 1.0, 1.0),), (("B", 1.3),), 0.5)
    res = htc(flip_flop("A1", "B", 0.01), mism)
    assert not res.ok and res.residual > 0


def test_two_body_family_by_brute_force():
    # all products of x/y/z on an equal-frequency A-B pair: the commuting
    # span is flip-flop (xx+yy, xy-yx) plus zz
    spec = SystemSpec((("A", 1.0, 1.0),), (("B", 1.0),), 0.5)
    h0 = to_matrix(free_hamiltonian(spec), spec)
    mats = []
    for a, b in itertools.product("xyz", repeat=2):
        mats.append(to_matrix(PauliSum.of(PauliTerm(1.0, (("A", a), ("B", b)))), spec))
    # commutator superoperator restricted to the 9-dim span
    cols = np.array([(h0 @ m - m @ h0).ravel() for m in mats]).T
    _, s, vh = np.linalg.svd(cols)
    null = vh[np.sum(s > 1e-10):]
    assert null.shape[0] == 3
    ff = to_matrix(flip_flop("A", "B", 1.0), spec)
    ff_i = to_matrix(flip_flop("A", "B", 1j), spec)
    zz = to_matrix(PauliSum.of(PauliTerm(1.0, (("A", "z"), ("B", "z")))), spec)
    basis = np.array([m.ravel() for m in mats]).T
    for target in (ff, ff_i, zz):
        coeffs = np.linalg.lstsq(basis, target.ravel(), rcond=None)[0]
        # target lies in the null space of the commutator
        assert np.allclose(coeffs - null.conj().T @ (null @ coeffs), 0, atol=1e-12)


def test_mixed_family_fig1c_hamiltonian():
    spec = spec3(1.0, 1.0, 1.0)
    h_i, h_ai = build_s19_interaction(1.0, 1, 0.005, 0.0, spec)
    assert htc(h_i, spec, h_ai).ok
    ex = PauliSum.of(term(1.0, A1="-", A2="+"), term(1.0, A1="+", A2="-"))
    assert np.allclose(to_matrix(h_ai, spec), 0.5 * to_matrix(ex, spec))
    cur = PauliSum.of(term(2j, A1="-", A2="+", B="y"), term(-2j, A1="+", A2="-", B="y"))
    zx = PauliSum.of(term(1.0, A1="z", B="x"), term(-1.0, A2="z", B="x"))
    assert np.allclose(to_matrix(h_i, spec), 0.005 * to_matrix(cur + zx, spec))


def test_mixed_family_r1_two_has_no_intra_exchange():
    spec = spec3(2.0, 1.0, 1.0)
    h_i, h_ai = build_s19_interaction(2.0, 1, 0.01, 0.02, spec)
    assert np.allclose(to_matrix(h_ai, spec), 0)
    assert htc(h_i, spec, h_ai).ok


@pytest.mark.parametrize("r1", [0.3, 0.8, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("sign", [1, -1])
def test_mixed_family_passes_htc(r1, sign):
    spec = spec3(r1, 1.0, 1.0)
    h_i, h_ai = build_s19_interaction(r1, sign, 0.01, -0.03, spec)
    res = htc(h_i, spec, h_ai)
    assert res.ok and res.residual < 1e-10


def test_mixed_family_rejects_bad_frequencies():
    with pytest.raises(ValueError):
        build_s19_interaction(1.0, 1, 0.01, 0.0, spec3(2.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        build_s19_interaction(2.5, 1, 0.01, 0.0, spec3(2.5, 1.0, 1.0))


def test_uniform_exchange_counts_unordered_pairs():
    assert len(uniform_exchange(["A1", "A2", "B"], 0.1)) == 9
    assert zzz("A1", "A2", "B", 0.2).hermitian


def test_spec_validation():
    with pytest.raises(ValueError):
        SystemSpec((("A", -1.0, 1.0),), (("B", 1.0),), 0.5)
    with pytest.raises(ValueError):
        SystemSpec((("A", 1.0, 0.0),), (("B", 1.0),), 0.5)
    with pytest.raises(ValueError):
        SystemSpec((("A", 1.0, 1.0),), (("A", 1.0),), 0.5)
    s = spec3()
    assert s.beta_a == 1.0 and s.dims == [2, 2, 2] and s.labels == ("A1", "A2", "B")
