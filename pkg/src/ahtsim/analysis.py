"""Closed-form initial convexity of the three-body model and phase scans.

The model couples ``A_1, A_2, B`` through ``c sigma_+^A1 sigma_-^A2 sigma_-^B + h.c.``
with ``omega_A1 = (1 + a) omega_B`` and ``omega_A2 = a omega_B``, starting from a
product of Gibbs states. Temperatures enter through ``x_i = beta_i omega_i`` or
through the ratios ``r_k = beta_Ak / beta_B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from . import linalg
from .dynamics import q_derivative
from .pauli import PauliSum, PauliTerm, SystemSpec, free_hamiltonian, three_body, to_matrix, uniform_exchange
from .states import beta_omega_from_si, product_state

DEFAULT_BETA_B_OMEGA_B = beta_omega_from_si(1.2, 4.0)
BISECTION_TOL = 1e-6
ZERO_TOL = 1e-12  # relative to (|c|^2 + J^2) omega_B
DEFAULT_GRID = (0.0, 5.0, 201)
LABELS = ("A1", "A2", "B")


def _sigma(x):
    """Ground-state population ``e^x / (1 + e^x)`` of a qubit with ``x = beta omega``."""
    return expit(x)


def _convexity_single(x1, x2, xb, c2, omega_b):
    # 2|c|^2 w_B (e^{x2+xB} - e^{x1}) / prod(1 + e^{xi}), written with logistic factors
    s1, s2, sb = _sigma(x1), _sigma(x2), _sigma(xb)
    return 2.0 * c2 * omega_b * (s2 * sb * (1 - s1) - s1 * (1 - s2) * (1 - sb))


def _perturbation(x1, x2, xb, j, omega_b):
    # -8 J^2 w_B / (1 + e^{xB}) * sum_k (e^{xk} - e^{xB}) / (1 + e^{xk})
    sb = _sigma(xb)
    return -8.0 * j**2 * omega_b * ((_sigma(x1) - sb) + (_sigma(x2) - sb))


def _convexity_double(x1, x2, xb, c2, omega_b):
    # same expression with every exponent doubled; kept for calibration only
    return _convexity_single(2 * x1, 2 * x2, 2 * xb, c2, omega_b)


def _three_body_layout(spec: SystemSpec) -> tuple[float, float, float, float]:
    if len(spec.a_subsystems) != 2 or len(spec.b_qubits) != 1:
        raise ValueError("three-body model needs exactly (A1, A2, B)")
    (_, w1, b1), (_, w2, b2) = spec.a_subsystems
    (_, wb), = spec.b_qubits
    scale = max(1.0, w1)
    if abs(w1 - w2 - wb) > 1e-9 * scale:
        raise ValueError(f"frequencies must satisfy omega_A1 = omega_A2 + omega_B, got {w1}, {w2}, {wb}")
    return b1 * w1, b2 * w2, spec.beta_b * wb, wb


def convexity_closed_form(spec: SystemSpec, c: complex) -> float:
    """Initial ``d^2 Q/dt^2`` of the three-body model from a product Gibbs state."""
    x1, x2, xb, wb = _three_body_layout(spec)
    return float(_convexity_single(x1, x2, xb, abs(c) ** 2, wb))


def perturbed_convexity(spec: SystemSpec, c: complex, j: float) -> float:
    """Initial convexity with the extra exchange ``J sum_{u<v} sum_a sigma_a^u sigma_a^v``."""
    x1, x2, xb, wb = _three_body_layout(spec)
    return float(_convexity_single(x1, x2, xb, abs(c) ** 2, wb) + _perturbation(x1, x2, xb, j, wb))


def convexity_from_ratios(r1, r2, a: float, beta_b_omega_b: float, c: complex = 1.0, j: float = 0.0, omega_b: float = 1.0):
    """Vectorized perturbed convexity over ``r_k = beta_Ak / beta_B``."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    xb = beta_b_omega_b
    x1 = r1 * xb * (1 + a)
    x2 = r2 * xb * a
    return _convexity_single(x1, x2, xb, abs(c) ** 2, omega_b) + _perturbation(x1, x2, xb, j, omega_b)


def phase_boundary(a: float, beta_a2_over_beta_b):
    """``beta_A1 / beta_B`` on the zero-convexity line, ``(1 + a x) / (1 + a)``."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    return (1 + a * np.asarray(beta_a2_over_beta_b, dtype=float)) / (1 + a)


def three_body_rate(rho, spec: SystemSpec, c: complex) -> float:
    """``dQ/dt = -i omega_B <c s+ s- s- - h.c.>`` for any state of ``(A1, A2, B)``."""
    _, _, _, wb = _three_body_layout(spec)
    a1, a2 = spec.a_labels
    (b,) = spec.b_labels
    op = to_matrix(PauliSum.of(_term(c, a1, a2, b)), spec)
    m = rho.matrix if hasattr(rho, "matrix") else rho
    z = -1j * wb * linalg.expectation(m, op - op.conj().T)
    return float(z.real)


def three_body_convexity(rho, spec: SystemSpec, c: complex) -> float:
    """``-|c|^2 omega_B / 2 <z1 - z2 - zB + z1 z2 zB>`` for any state of ``(A1, A2, B)``."""
    _, _, _, wb = _three_body_layout(spec)
    a1, a2 = spec.a_labels
    (b,) = spec.b_labels
    z = np.diag([1.0, -1.0])
    i2 = np.eye(2)
    op = (
        linalg.kron_all([z, i2, i2])
        - linalg.kron_all([i2, z, i2])
        - linalg.kron_all([i2, i2, z])
        + linalg.kron_all([z, z, z])
    )
    m = rho.matrix if hasattr(rho, "matrix") else rho
    order = [spec.index(l) for l in (a1, a2, b)]
    if order != [0, 1, 2]:
        m = linalg.permute_subsystems(m, order, [2, 2, 2])
    return float(-0.5 * abs(c) ** 2 * wb * linalg.expectation(m, op).real)


def _term(c, a1, a2, b):
    return PauliTerm(c, ((a1, "+"), (a2, "-"), (b, "-")))


def three_body_spec(a: float, r1: float, r2: float, beta_b_omega_b: float = DEFAULT_BETA_B_OMEGA_B, omega_b: float = 1.0) -> SystemSpec:
    beta_b = beta_b_omega_b / omega_b
    return SystemSpec(
        (("A1", (1 + a) * omega_b, r1 * beta_b), ("A2", a * omega_b, r2 * beta_b)),
        (("B", omega_b),),
        beta_b,
    )


def three_body_hamiltonians(spec: SystemSpec, c: complex, j: float = 0.0) -> tuple[PauliSum, PauliSum, PauliSum]:
    """``(H_total, H_I, H_perturb)`` of the three-body model."""
    h_i = three_body(*spec.a_labels, *spec.b_labels, c)
    h_p = uniform_exchange(spec.labels, j)
    return free_hamiltonian(spec) + h_i + h_p, h_i, h_p


@lru_cache(maxsize=64)
def _oracle_diagonal(a: float, c: complex, j: float, omega_b: float) -> np.ndarray:
    """Diagonal of ``-[H, [H, H_B]]`` in the product basis; temperature independent."""
    spec = three_body_spec(a, 1.0, 1.0, 1.0, omega_b)
    h, _, _ = three_body_hamiltonians(spec, c, j)
    hm = to_matrix(h, spec)
    hb = to_matrix(free_hamiltonian(spec, spec.b_labels), spec)
    return -np.real(np.diag(linalg.nested_commutator(hm, hb, 2)))


def oracle_convexity_from_ratios(r1, r2, a: float, beta_b_omega_b: float, c: complex = 1.0, j: float = 0.0, omega_b: float = 1.0):
    """Numerical ``d^2 Q/dt^2`` on product Gibbs states, vectorized over the ratios.

    The state is diagonal, so only the diagonal of the nested commutator of
    the full Hamiltonian enters.
    """
    d = _oracle_diagonal(float(a), complex(c), float(j), float(omega_b))
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    xb = beta_b_omega_b
    pops = []
    for x in (r1 * xb * (1 + a), r2 * xb * a, np.full(np.broadcast(r1, r2).shape, xb)):
        g = _sigma(x)
        pops.append((g, 1 - g))
    out = np.zeros(np.broadcast(r1, r2).shape)
    for idx in range(8):
        bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1]
        w = pops[0][bits[0]] * pops[1][bits[1]] * pops[2][bits[2]]
        out = out + w * d[idx]
    return out


def calibrate_convention(a: float = 1.0, r1: float = 1.2, r2: float = 2.4, beta_b_omega_b: float = 0.5) -> dict:
    """Compare single- and doubled-exponent closed forms with the numerical derivative.

    Returns the adopted convention and both relative errors at the probe point.
    """
    spec = three_body_spec(a, r1, r2, beta_b_omega_b)
    h, h_i, h_p = three_body_hamiltonians(spec, 1.0, 0.3)
    oracle = q_derivative(product_state(spec), h_i, None, spec, 2, h_total=h).value
    x1, x2, xb, wb = _three_body_layout(spec)
    single = _convexity_single(x1, x2, xb, 1.0, wb) + _perturbation(x1, x2, xb, 0.3, wb)
    double = _convexity_double(x1, x2, xb, 1.0, wb) + _perturbation(2 * x1, 2 * x2, 2 * xb, 0.3, wb)
    err_single = abs(single - oracle) / abs(oracle)
    err_double = abs(double - oracle) / abs(oracle)
    return {
        "convention": "single" if err_single <= err_double else "double",
        "rel_error_single": float(err_single),
        "rel_error_double": float(err_double),
        "oracle": float(oracle),
    }


@dataclass(frozen=True)
class PhasePoint:
    beta_a1_over_beta_b: float
    beta_a2_over_beta_b: float
    a: float
    j_over_c: float
    convexity: float
    aht: bool


@dataclass(frozen=True)
class ScanResult:
    r1_axis: np.ndarray
    r2_axis: np.ndarray
    a: float
    j_over_c: float
    convexity: np.ndarray  # indexed [i_r1, i_r2]
    aht: np.ndarray
    boundary: tuple[tuple[float, float], ...]  # (r1, r2) zero-convexity points
    metadata: dict = field(default_factory=dict)

    @property
    def cell_area(self) -> float:
        return float((self.r1_axis[1] - self.r1_axis[0]) * (self.r2_axis[1] - self.r2_axis[0]))

    @property
    def aht_count(self) -> int:
        return int(self.aht.sum())

    @property
    def aht_area(self) -> float:
        return self.aht_count * self.cell_area

    def points(self) -> list[PhasePoint]:
        out = []
        for i, r1 in enumerate(self.r1_axis):
            for k, r2 in enumerate(self.r2_axis):
                out.append(
                    PhasePoint(float(r1), float(r2), self.a, self.j_over_c, float(self.convexity[i, k]), bool(self.aht[i, k]))
                )
        return out


def aht_mask(r1, r2, convexity, tol: float = 0.0) -> np.ndarray:
    """AHT from rest: both A qubits colder than B and heat pushed into B.

    ``tol`` keeps round-off on the zero line from flipping the flag.
    """
    return (np.asarray(convexity) > tol) & (np.minimum(r1, r2) > 1)


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_scan(
    a: float,
    j_over_c: float = 0.0,
    grid: tuple[float, float, int] = DEFAULT_GRID,
    beta_b_omega_b: float = DEFAULT_BETA_B_OMEGA_B,
    c: complex = 1.0,
    oracle: bool = False,
) -> ScanResult:
    """Initial convexity over ``(beta_A1/beta_B, beta_A2/beta_B)`` and its zero line.

    ``oracle=True`` evaluates the numerical nested-commutator derivative at
    every node instead of the closed form. The boundary is found per column
    of fixed ``beta_A2/beta_B`` by bisection along ``beta_A1/beta_B``.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    lo, hi, n = grid
    axis = np.linspace(lo, hi, int(n))
    r1, r2 = np.meshgrid(axis, axis, indexing="ij")
    j = j_over_c * abs(c)
    fn = oracle_convexity_from_ratios if oracle else convexity_from_ratios
    conv = np.asarray(fn(r1, r2, a, beta_b_omega_b, c, j))
    boundary = []
    for k, y in enumerate(axis):
        col = conv[:, k]
        for i in np.nonzero(np.sign(col[:-1]) * np.sign(col[1:]) < 0)[0]:
            f = lambda x, y=y: float(fn(x, y, a, beta_b_omega_b, c, j))
            boundary.append((_bisect(f, axis[i], axis[i + 1], BISECTION_TOL), float(y)))
        for i in np.nonzero(col == 0)[0]:
            boundary.append((float(axis[i]), float(y)))
    meta = {
        "a": a,
        "j_over_c": j_over_c,
        "beta_b_omega_b": beta_b_omega_b,
        "grid": [lo, hi, int(n)],
        "mode": "oracle" if oracle else "closed-form",
        "exponent_convention": "single",
        "aht_rule": "convexity > 1e-12 (|c|^2 + J^2) and min(beta_A1, beta_A2) > beta_B",
    }
    tol = ZERO_TOL * (abs(c) ** 2 + j**2)
    return ScanResult(axis, axis.copy(), a, j_over_c, conv, aht_mask(r1, r2, conv, tol), tuple(boundary), meta)


def initial_rate_check_on_boundary(spec: SystemSpec, c: complex = 1.0) -> float:
    """``max(|dQ/dt|, |d^2Q/dt^2|)`` at t=0 for the product state of ``spec``."""
    rho = product_state(spec)
    h_i = three_body(*spec.a_labels, *spec.b_labels, c)
    d1 = q_derivative(rho, h_i, None, spec, 1).value
    d2 = q_derivative(rho, h_i, None, spec, 2).value
    return max(abs(d1), abs(d2))


def boundary_deviation(scan: ScanResult) -> float:
    """Largest ``|r1 - phase_boundary(a, r2)|`` over the scanned zero line."""
    if not scan.boundary:
        return math.inf
    pts = np.array(scan.boundary)
    return float(np.max(np.abs(pts[:, 0] - phase_boundary(scan.a, pts[:, 1]))))


def scan_rows(scan: ScanResult) -> list[Sequence[float]]:
    return [
        (p.beta_a1_over_beta_b, p.beta_a2_over_beta_b, p.a, p.j_over_c, p.convexity, int(p.aht))
        for p in scan.points()
    ]
