"""Local-equilibrium initial states of qubit systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import constants

from . import linalg
from .pauli import PauliSum, SystemSpec, free_hamiltonian, to_matrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
MAX_BETA_OMEGA = 700.0


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid density matrix."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix with subsystem dims.

    Validated on construction; the wrapped array is read-only.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.array(linalg.as_matrix(self.matrix), dtype=complex, copy=True)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != m.shape[0]:
            raise InvalidStateError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
        herm = np.linalg.norm(m - m.conj().T)
        if herm > HERMITIAN_TOL * max(1.0, np.linalg.norm(m)):
            raise InvalidStateError(f"density matrix not Hermitian (residual {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace is {tr.real:.15g}, expected 1")
        lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if lam_min < PSD_TOL:
            raise InvalidStateError(
                f"density matrix not positive semidefinite: minimum eigenvalue {lam_min:.6e}",
                lam_min,
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def reduced(self, keep: Sequence[int]) -> np.ndarray:
        return linalg.partial_trace(self.matrix, keep, self.dims)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def beta_omega_from_si(temperature_k: float, frequency_ghz: float) -> float:
    """``hbar*omega / (k_B T)`` for a qubit with ``omega/2pi`` in GHz."""
    if temperature_k <= 0:
        raise ValueError("temperature must be positive")
    return constants.h * frequency_ghz * 1e9 / (constants.k * temperature_k)


def gibbs_populations(beta_omega: float) -> tuple[float, float]:
    x = min(float(beta_omega), MAX_BETA_OMEGA)
    if not x >= 0:
        raise ValueError(f"beta*omega must be >= 0, got {beta_omega}")
    p1 = 1.0 / (1.0 + math.exp(x))
    return 1.0 - p1, p1


def gibbs_qubit(beta_omega: float) -> DensityMatrix:
    """Thermal state of ``-omega/2 sigma_z``: ``diag(p0, p1)``, ``p0 = 1/(1+exp(-beta omega))``."""
    p0, p1 = gibbs_populations(beta_omega)
    return DensityMatrix(np.diag([p0, p1]).astype(complex), (2,))


def gibbs_state(h: np.ndarray, beta: float, dims: Sequence[int]) -> DensityMatrix:
    h = linalg.as_matrix(h)
    w, v = linalg.herm_eig(h)
    weights = np.exp(-beta * (w - w[0]))
    weights /= weights.sum()
    return DensityMatrix((v * weights) @ v.conj().T, tuple(dims))


def product_state(spec: SystemSpec) -> DensityMatrix:
    """Tensor product of every qubit's Gibbs state at its own temperature."""
    factors = [gibbs_qubit(q.beta * q.omega).matrix for q in spec.qubits]
    return DensityMatrix(linalg.kron_all(factors), tuple(spec.dims))


def embed_correlation(rho: DensityMatrix, chi: PauliSum, spec: SystemSpec) -> np.ndarray:
    """Matrix of ``chi`` on its own qubits, tensored with ``rho``'s marginal elsewhere.

    A term ``chi_S`` on the qubit set ``S`` enters as ``chi_S (x) rho_rest``, so
    adding it leaves every marginal disjoint from ``S`` untouched.
    """
    support = sorted((spec.index(l) for l in chi.labels), key=int)
    if not support or len(support) == spec.n_qubits:
        return to_matrix(chi, spec)
    rest = [i for i in range(spec.n_qubits) if i not in support]
    c = to_matrix(chi, spec, [spec.labels[i] for i in support])
    full = np.kron(c, rho.reduced(rest))
    order = support + rest
    perm = [order.index(i) for i in range(spec.n_qubits)]
    return linalg.permute_subsystems(full, perm, spec.dims)


def add_coherence(rho: DensityMatrix, chi: PauliSum, spec: SystemSpec) -> DensityMatrix:
    """Add a strictly off-diagonal Hermitian correlation term to ``rho``.

    ``chi`` is embedded with :func:`embed_correlation`. Raises
    :class:`InvalidStateError` (carrying the most negative eigenvalue) when
    the result is not positive semidefinite.
    """
    return _add_correlation(rho, embed_correlation(rho, chi, spec), diagonal=False)


def add_classical_correlation(rho: DensityMatrix, d: PauliSum, spec: SystemSpec) -> DensityMatrix:
    """Add a diagonal, traceless correlation term (e.g. ``sigma_z sigma_z`` strings)."""
    return _add_correlation(rho, embed_correlation(rho, d, spec), diagonal=True)


def _add_correlation(rho: DensityMatrix, c: np.ndarray, diagonal: bool) -> DensityMatrix:
    if c.shape != rho.matrix.shape:
        raise ValueError(f"correlation term shape {c.shape} does not match state {rho.matrix.shape}")
    if linalg.hermiticity_residual(c) > HERMITIAN_TOL:
        raise ValueError("correlation term must be Hermitian")
    diag = np.diag(c)
    if diagonal:
        if np.max(np.abs(c - np.diag(diag)), initial=0.0) > 0:
            raise ValueError("classical correlation term must be diagonal")
        if abs(diag.sum()) > TRACE_TOL:
            raise ValueError("classical correlation term must be traceless")
    elif np.max(np.abs(diag), initial=0.0) > 0:
        raise ValueError("coherence term must be strictly off-diagonal (zero diagonal)")
    m = rho.matrix + c
    lam_min = float(np.linalg.eigvalsh(m)[0])
    if lam_min < PSD_TOL:
        raise InvalidStateError(
            f"state with injected correlation is not positive semidefinite: "
            f"minimum eigenvalue {lam_min:.6e}",
            lam_min,
        )
    return DensityMatrix(m, rho.dims)


def offdiagonal_mass(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - np.diag(np.diag(m))))


def is_diagonal(rho: DensityMatrix, subsystems: Sequence[int], tol: float = 1e-12) -> bool:
    """True iff the reduced state on ``subsystems`` has no coherence in the product energy basis."""
    return offdiagonal_mass(rho.reduced(subsystems)) < tol


def local_equilibrium_residual(rho: DensityMatrix, spec: SystemSpec, h_b: PauliSum | None = None) -> float:
    """Largest deviation of any A-marginal or the B-marginal from its Gibbs state."""
    worst = 0.0
    for k, (label, omega, beta) in enumerate(spec.a_subsystems):
        target = gibbs_qubit(beta * omega).matrix
        worst = max(worst, float(np.max(np.abs(rho.reduced([k]) - target))))
    b_idx = [spec.index(l) for l in spec.b_labels]
    if h_b is None:
        h_b = free_hamiltonian(spec, spec.b_labels)
    hb = to_matrix(h_b, spec, spec.b_labels)
    target = gibbs_state(hb, spec.beta_b, [2] * len(b_idx)).matrix
    worst = max(worst, float(np.max(np.abs(rho.reduced(b_idx) - target))))
    return worst
