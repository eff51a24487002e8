"""Entropy functionals and the heat-transfer entropy ledger.

For a joint state evolving unitarily from a local-equilibrium state ``rho``
to ``rho'``, the effective entropy flux ``(beta_B - beta_A) Q`` splits into

* relative entropies ``S(rho'_Ak || rho_Ak)`` and ``S(rho'_B || rho_B)``,
* the change of multipartite mutual information among ``A_1..A_N, B``,
* a temperature-inhomogeneity flux ``sum_k (beta_A - beta_Ak) d<H_Ak>``,
* an interaction flux ``beta_A d<H_AI>``,

with ``beta_A`` the smallest A inverse temperature. Entropies are in nats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .pauli import ZERO, PauliSum, SystemSpec, free_hamiltonian, to_matrix
from .states import DensityMatrix, local_equilibrium_residual

EIGENVALUE_FLOOR = 1e-14
LOCAL_EQUILIBRIUM_TOL = 1e-9

NONE = "none"
CORRELATION_INTRA = "correlation-intra"
CORRELATION_CROSS = "correlation-cross"
TEMPERATURE_INHOMOGENEITY = "temperature-inhomogeneity"
INTERACTION = "interaction"
MIXED = "mixed"
MECHANISMS = (NONE, CORRELATION_INTRA, CORRELATION_CROSS, TEMPERATURE_INHOMOGENEITY, INTERACTION, MIXED)


class SupportWarning(RuntimeWarning):
    pass


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return linalg.as_matrix(rho)


def von_neumann_entropy(rho) -> float:
    lam = np.linalg.eigvalsh(_matrix(rho))
    lam = lam[lam > EIGENVALUE_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma) = -tr(rho ln sigma) - S(rho)``.

    Returns ``inf`` (with a :class:`SupportWarning`) when ``rho`` has weight
    outside the support of ``sigma``.
    """
    r = _matrix(rho)
    w, v = linalg.herm_eig(_matrix(sigma))
    # weight of rho on each eigenvector of sigma
    weights = np.real(np.einsum("ji,jk,ki->i", v.conj(), r, v))
    small = w < EIGENVALUE_FLOOR
    if np.any(small & (weights > EIGENVALUE_FLOOR)):
        leak = float(weights[small].sum())
        warnings.warn(
            f"support of rho not contained in support of sigma (weight {leak:.3e} "
            f"on eigenvalues below {EIGENVALUE_FLOOR})",
            SupportWarning,
            stacklevel=2,
        )
        return math.inf
    keep = ~small
    cross = -float(np.sum(weights[keep] * np.log(w[keep])))
    return cross - von_neumann_entropy(r)


def mutual_information(rho, partition: Sequence[Sequence[int]], dims: Sequence[int] | None = None) -> float:
    """``sum_parts S(marginal) - S(joint)`` for a disjoint cover of the subsystems."""
    m = _matrix(rho)
    if dims is None:
        if not isinstance(rho, DensityMatrix):
            raise ValueError("dims are required for a bare matrix")
        dims = rho.dims
    dims = list(dims)
    flat = sorted(i for part in partition for i in part)
    if flat != list(range(len(dims))):
        raise ValueError(f"partition {partition} does not cover {len(dims)} subsystems disjointly")
    total = sum(von_neumann_entropy(linalg.partial_trace(m, part, dims)) for part in partition)
    return total - von_neumann_entropy(m)


@dataclass(frozen=True)
class HeatLedger:
    q: float
    lhs: float
    rel_entropy_a: tuple[float, ...]
    rel_entropy_b: float
    delta_mutual_ab: float
    delta_temp_inhom: float
    delta_interaction: float
    delta_mutual_intra: float
    delta_mutual_cross: float
    q_from_a: float = field(default=math.nan)

    @property
    def rhs(self) -> float:
        return (
            sum(self.rel_entropy_a)
            + self.rel_entropy_b
            + self.delta_mutual_ab
            + self.delta_temp_inhom
            + self.delta_interaction
        )

    @property
    def identity_residual(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), 1e-6)

    @property
    def entropy_production(self) -> float:
        """``dI_{A:B} + S(rho'_B || rho_B)``."""
        return self.delta_mutual_cross + self.rel_entropy_b

    @property
    def is_aht(self) -> bool:
        return self.lhs < 0

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "lhs": self.lhs,
            "rel_entropy_a": list(self.rel_entropy_a),
            "rel_entropy_b": self.rel_entropy_b,
            "delta_mutual_ab": self.delta_mutual_ab,
            "delta_mutual_intra": self.delta_mutual_intra,
            "delta_mutual_cross": self.delta_mutual_cross,
            "delta_temp_inhom": self.delta_temp_inhom,
            "delta_interaction": self.delta_interaction,
            "rhs": self.rhs,
            "entropy_production": self.entropy_production,
        }


class LedgerContext:
    """Precomputed operators and initial-state quantities for repeated ledgers.

    Build once per (initial state, Hamiltonian split) and call
    :meth:`ledger` for each final state.
    """

    def __init__(
        self,
        rho_initial: DensityMatrix,
        spec: SystemSpec,
        h_ai: PauliSum | None = None,
        h_b: PauliSum | None = None,
        tol: float = LOCAL_EQUILIBRIUM_TOL,
    ):
        if h_b is None:
            h_b = free_hamiltonian(spec, spec.b_labels)
        if h_ai is None:
            h_ai = ZERO
        residual = local_equilibrium_residual(rho_initial, spec, h_b)
        if residual > tol:
            raise ValueError(
                f"initial state is not in local equilibrium (marginal deviation {residual:.3e} > {tol:.1e})"
            )
        self.spec = spec
        self.rho = rho_initial
        self.dims = list(spec.dims)
        n_a = len(spec.a_subsystems)
        self.a_idx = list(range(n_a))
        self.b_idx = list(range(n_a, spec.n_qubits))
        self.h_ak = [to_matrix(free_hamiltonian(spec, [l]), spec) for l in spec.a_labels]
        self.h_ai = to_matrix(h_ai, spec)
        self.h_b = to_matrix(h_b, spec)
        self.beta_a = spec.beta_a
        self.beta_ak = [b for _, _, b in spec.a_subsystems]
        self.beta_b = spec.beta_b

        r = rho_initial.matrix
        self.marg_a = [linalg.partial_trace(r, [k], self.dims) for k in self.a_idx]
        self.marg_b = linalg.partial_trace(r, self.b_idx, self.dims)
        self.mi0 = self._mutual(r)

    def _mutual(self, r: np.ndarray) -> tuple[float, float, float]:
        """(I_AB multipartite, I_A within A, I_{A:B}) with each state's own marginals."""
        s_ak = [von_neumann_entropy(linalg.partial_trace(r, [k], self.dims)) for k in self.a_idx]
        s_a = von_neumann_entropy(linalg.partial_trace(r, self.a_idx, self.dims))
        s_b = von_neumann_entropy(linalg.partial_trace(r, self.b_idx, self.dims))
        s = von_neumann_entropy(r)
        return sum(s_ak) + s_b - s, sum(s_ak) - s_a, s_a + s_b - s

    def ledger(self, rho_final) -> HeatLedger:
        r1 = _matrix(rho_final)
        delta = r1 - self.rho.matrix
        q = float(np.real(linalg.expectation(delta, self.h_b)))
        d_hak = [float(np.real(linalg.expectation(delta, h))) for h in self.h_ak]
        d_hai = float(np.real(linalg.expectation(delta, self.h_ai)))
        rel_a = tuple(
            relative_entropy(linalg.partial_trace(r1, [k], self.dims), self.marg_a[k]) for k in self.a_idx
        )
        rel_b = relative_entropy(linalg.partial_trace(r1, self.b_idx, self.dims), self.marg_b)
        mi1 = self._mutual(r1)
        return HeatLedger(
            q=q,
            lhs=(self.beta_b - self.beta_a) * q,
            rel_entropy_a=rel_a,
            rel_entropy_b=rel_b,
            delta_mutual_ab=mi1[0] - self.mi0[0],
            delta_temp_inhom=sum((self.beta_a - b) * d for b, d in zip(self.beta_ak, d_hak)),
            delta_interaction=self.beta_a * d_hai,
            delta_mutual_intra=mi1[1] - self.mi0[1],
            delta_mutual_cross=mi1[2] - self.mi0[2],
            q_from_a=-(sum(d_hak) + d_hai),
        )


def compute_ledger(
    rho_initial: DensityMatrix,
    rho_final,
    spec: SystemSpec,
    h_ai: PauliSum | None = None,
    h_b: PauliSum | None = None,
) -> HeatLedger:
    """Ledger for one final state; ``H_Ak`` are the free qubit Hamiltonians."""
    return LedgerContext(rho_initial, spec, h_ai, h_b).ledger(rho_final)


def classify_aht(ledger: HeatLedger, threshold: float = 1e-12) -> str:
    """Name the dominant AHT mechanism, or ``none`` if the flow is normal.

    The dominant mechanism is the most negative of the intra-A correlation,
    A:B correlation, temperature-inhomogeneity and interaction terms. If the
    runner-up is also negative and within ``threshold`` of it, the result is
    ``mixed``.
    """
    if not ledger.lhs < 0:
        return NONE
    candidates = sorted(
        [
            (ledger.delta_mutual_intra, CORRELATION_INTRA),
            (ledger.delta_mutual_cross, CORRELATION_CROSS),
            (ledger.delta_temp_inhom, TEMPERATURE_INHOMOGENEITY),
            (ledger.delta_interaction, INTERACTION),
        ]
    )
    (v0, label0), (v1, _) = candidates[0], candidates[1]
    if v0 >= 0:
        # negative flux with no negative mechanism term cannot come from the identity
        return NONE
    if v1 < 0 and v1 - v0 <= threshold:
        return MIXED
    return label0
