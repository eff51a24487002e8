"""Exact unitary dynamics, heat flow and its instantaneous derivatives.

Time is measured in units of ``1/omega_0`` whenever frequencies are given in
units of ``omega_0``. Heat ``Q(t) = tr[H_B (rho(t) - rho(0))]`` is the energy
gained by B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .ledger import HeatLedger, LedgerContext
from .pauli import PauliSum, SystemSpec, free_hamiltonian, to_matrix
from .states import DensityMatrix

MAX_ORDER = 6
IMAG_TOL = 1e-8
DIAGONAL_TOL = 1e-12


class Propagator:
    """``exp(-iHt)`` through one eigendecomposition of ``H``."""

    def __init__(self, h: np.ndarray):
        self.energies, self.vectors = linalg.herm_eig(h)

    def to_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        v = self.vectors
        return v.conj().T @ op @ v

    def evolve_matrix(self, rho: np.ndarray, t: float) -> np.ndarray:
        phase = np.exp(-1j * self.energies * t)
        rt = self.to_eigenbasis(rho) * np.outer(phase, phase.conj())
        out = self.vectors @ rt @ self.vectors.conj().T
        return 0.5 * (out + out.conj().T)

    def delta_expectation(self, rho: np.ndarray, op: np.ndarray, times) -> np.ndarray:
        """``tr[op (rho(t) - rho(0))]`` for each ``t``, free of cancellation at small ``t``.

        In the eigenbasis the change is ``sum_ij op_ji rho_ij (exp(-i w_ij t) - 1)``
        and ``expm1`` keeps every term accurate.
        """
        w = self.to_eigenbasis(op).T * self.to_eigenbasis(rho)
        gaps = self.energies[:, None] - self.energies[None, :]
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(times.shape)
        for i, t in enumerate(times):
            out[i] = np.real(np.sum(w * np.expm1(-1j * gaps * t)))
        return out


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else linalg.as_matrix(rho)


def evolve(rho: DensityMatrix, h: PauliSum, spec: SystemSpec, t: float) -> DensityMatrix:
    """``exp(-iHt) rho exp(iHt)``."""
    if t == 0 or h.is_zero():
        return rho
    prop = Propagator(to_matrix(h, spec))
    return DensityMatrix(prop.evolve_matrix(rho.matrix, t), rho.dims)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    q: np.ndarray
    lhs: np.ndarray
    ledgers: tuple[HeatLedger, ...] | None = None

    def argmin_lhs(self) -> int:
        return int(np.argmin(self.lhs))


def default_times(t_max: float = 2000.0, steps: int = 2001) -> np.ndarray:
    return np.linspace(0.0, t_max, steps)


def heat_series(
    rho0: DensityMatrix,
    h_total: PauliSum,
    h_b: PauliSum | None,
    spec: SystemSpec,
    times: Sequence[float],
    h_ai: PauliSum | None = None,
    with_ledger: bool = False,
) -> TimeSeries:
    """Heat into B along the exact trajectory, optionally with a ledger per time."""
    if h_b is None:
        h_b = free_hamiltonian(spec, spec.b_labels)
    times = np.asarray(times, dtype=float)
    prop = Propagator(to_matrix(h_total, spec))
    q = prop.delta_expectation(rho0.matrix, to_matrix(h_b, spec), times)
    q[times == 0] = 0.0
    lhs = (spec.beta_b - spec.beta_a) * q + 0.0  # no negative zeros
    ledgers = None
    if with_ledger:
        ctx = LedgerContext(rho0, spec, h_ai, h_b)
        ledgers = tuple(ctx.ledger(prop.evolve_matrix(rho0.matrix, t)) for t in times)
    return TimeSeries(times, q, lhs, ledgers)


@dataclass(frozen=True)
class DerivativeReport:
    order_n: int
    value: float
    decomposition: dict[str, float] = field(default_factory=dict)

    def total(self, kind: str) -> float:
        """Sum of decomposition entries whose key starts with ``kind``."""
        return float(sum(v for k, v in self.decomposition.items() if k.startswith(kind + ":")))


def _real_or_raise(z: complex, what: str) -> float:
    scale = max(1.0, abs(z.real))
    if abs(z.imag) > IMAG_TOL * scale:
        raise ValueError(f"{what} has imaginary part {z.imag:.3e}; the operators are not Hermitian")
    return float(z.real)


def q_derivative(
    rho: DensityMatrix,
    h_i: PauliSum,
    h_b: PauliSum | None,
    spec: SystemSpec,
    n: int,
    h_total: PauliSum | None = None,
) -> DerivativeReport:
    """``d^n Q/dt^n`` at the state ``rho``: ``i^n <[H, H_B]_n>``.

    Under the heat-transfer condition the nested commutator may use ``H_I``
    alone. Pass ``h_total`` when the condition fails (e.g. with an
    intrasystem perturbation) so the full generator is used.
    """
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"derivative order must be in 1..{MAX_ORDER}, got {n}")
    if h_b is None:
        h_b = free_hamiltonian(spec, spec.b_labels)
    gen = to_matrix(h_total if h_total is not None else h_i, spec)
    nested = linalg.nested_commutator(gen, to_matrix(h_b, spec), n)
    z = (1j**n) * linalg.expectation(_matrix(rho), nested)
    return DerivativeReport(n, _real_or_raise(z, f"order-{n} heat derivative"))


def _cross_pairs(h_i: PauliSum, spec: SystemSpec) -> dict[tuple[str, str], PauliSum]:
    """Group a two-body A-B coupling by (A label, B label)."""
    groups: dict[tuple[str, str], list] = {}
    for t in h_i.terms:
        labels = t.labels
        if len(labels) != 2 or spec.is_a(labels[0]) == spec.is_a(labels[1]):
            raise ValueError(f"term {t} is not a two-body A-B coupling")
        key = tuple(sorted(labels, key=spec.index))
        groups.setdefault(key, []).append(t)
    return {k: PauliSum(tuple(v), hermitian=True) for k, v in groups.items()}


def convexity_decomposition(rho: DensityMatrix, h_i: PauliSum, spec: SystemSpec) -> DerivativeReport:
    """Split ``d^2 Q/dt^2`` for a two-body coupling into pair and triplet pieces.

    Keys are ``pair:<A>-<B>`` for same-pair terms, and for every triplet of
    two same-side qubits ``X X`` plus a shared qubit ``Y``:

    * ``intra:<X>,<X>|<Y>``, coherence inside the ``X X`` doublet weighted by
      the local Bloch vector of ``Y``,
    * ``cross:<X>,<X>|<Y>``, the collective correlation between the doublet
      and ``Y``.

    The entries sum to the order-2 derivative.
    """
    pairs = _cross_pairs(h_i, spec)
    m = _matrix(rho)
    dims = spec.dims
    hb = to_matrix(free_hamiltonian(spec, spec.b_labels), spec)
    mats = {k: to_matrix(v, spec) for k, v in pairs.items()}
    inner = {k: linalg.commutator(h, hb) for k, h in mats.items()}
    out: dict[str, float] = {}

    for k, h in mats.items():
        z = -linalg.expectation(m, linalg.commutator(h, inner[k]))
        out[f"pair:{k[0]}-{k[1]}"] = _real_or_raise(z, "pair convexity")

    paulis = [linalg.IDENTITY_2, linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z]
    keys = list(mats)
    triplets: dict[tuple[tuple[str, str], str], np.ndarray] = {}
    for p, q in itertools.permutations(keys, 2):
        shared = set(p) & set(q)
        if len(shared) != 1:
            continue
        (y,) = shared
        xx = tuple(sorted((set(p) | set(q)) - shared, key=spec.index))
        o = linalg.commutator(mats[p], inner[q])
        key = (xx, y)
        triplets[key] = triplets.get(key, 0) + o

    for (xx, y), o in sorted(triplets.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        idx_xx = [spec.index(l) for l in xx]
        idx_y = spec.index(y)
        keep = sorted(idx_xx + [idx_y])
        # reorder so the triplet is (X, X, Y) with Y last
        perm_pos = [keep.index(i) for i in idx_xx] + [keep.index(idx_y)]
        rho3 = linalg.permute_subsystems(linalg.partial_trace(m, keep, dims), perm_pos, [2, 2, 2])
        o3 = _restrict(o, keep, dims)
        o3 = linalg.permute_subsystems(o3, perm_pos, [2, 2, 2])
        rho_xx = linalg.partial_trace(rho3, [0, 1], [2, 2, 2])
        rho_y = linalg.partial_trace(rho3, [2], [2, 2, 2])
        intra = 0.0
        cross = 0.0
        for b, s in enumerate(paulis):
            ob = linalg.partial_trace(o3 @ np.kron(np.eye(4), s), [0, 1], [2, 2, 2]) / 2
            bloch = linalg.expectation(rho_y, s)
            intra -= bloch * linalg.expectation(rho_xx, ob)
            if b:
                chi = (linalg.partial_trace(rho3 @ np.kron(np.eye(4), s), [0, 1], [2, 2, 2]) - bloch * rho_xx) / 2
                cross -= 2 * linalg.expectation(chi, ob)
        tag = f"{xx[0]},{xx[1]}|{y}"
        out[f"intra:{tag}"] = _real_or_raise(complex(intra), "intra-coherence convexity")
        out[f"cross:{tag}"] = _real_or_raise(complex(cross), "cross-coherence convexity")

    value = sum(out.values())
    return DerivativeReport(2, float(value), out)


def _restrict(op: np.ndarray, keep: list[int], dims: list[int]) -> np.ndarray:
    """The factor of ``op`` on ``keep``, given ``op`` is identity elsewhere."""
    rest = len(dims) - len(keep)
    return linalg.partial_trace(op, keep, dims) / 2**rest


@dataclass(frozen=True)
class WitnessReport:
    diagonal: dict[tuple[str, ...], bool]
    theorem_applies: bool


def theorem1_witness(rho: DensityMatrix, spec: SystemSpec, tol: float = DIAGONAL_TOL) -> WitnessReport:
    """Check the coherence premise of the no-instantaneous-AHT theorem.

    Covers every cross doublet ``A_k B_l`` and every triplet of two qubits
    from one side with one from the other. The theorem applies when all of
    them are diagonal in the product energy basis.
    """
    a = [spec.index(l) for l in spec.a_labels]
    b = [spec.index(l) for l in spec.b_labels]
    groups: list[tuple[int, ...]] = [(i, j) for i in a for j in b]
    for xs, ys in ((a, b), (b, a)):
        for pair in itertools.combinations(xs, 2):
            for y in ys:
                groups.append(tuple(sorted(pair + (y,))))
    diag = {}
    for g in groups:
        reduced = rho.reduced(g)
        off = reduced - np.diag(np.diag(reduced))
        diag[tuple(spec.labels[i] for i in g)] = bool(np.linalg.norm(off) < tol)
    return WitnessReport(diag, all(diag.values()))
