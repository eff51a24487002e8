"""Symbolic Pauli-string Hamiltonians on labelled qubits.

A qubit system is split into cold subsystems ``A_1..A_N`` (one qubit each)
and a hot system ``B`` made of one or more qubits sharing one temperature.
Free qubit Hamiltonians are ``-omega/2 * sigma_z``, so ``|0>`` is the ground
state and ``sigma_+ = |0><1|`` lowers the energy of its qubit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .linalg import (
    IDENTITY_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
)

OPERATORS = {
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "+": SIGMA_PLUS,
    "-": SIGMA_MINUS,
}
_ADJOINT_OP = {"x": "x", "y": "y", "z": "z", "+": "-", "-": "+"}

FREQUENCY_TOL = 1e-9
HTC_TOL = 1e-10


@dataclass(frozen=True)
class PauliTerm:
    """``coeff`` times a product of single-qubit operators on distinct qubits."""

    coeff: complex
    factors: tuple[tuple[str, str], ...]

    def __post_init__(self):
        factors = tuple((str(label), str(op)) for label, op in self.factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"repeated qubit label in term: {labels}")
        for label, op in factors:
            if op not in OPERATORS:
                raise ValueError(f"unknown operator {op!r} on qubit {label!r}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    def ops_on(self, label: str) -> str | None:
        for lab, op in self.factors:
            if lab == label:
                return op
        return None

    def adjoint(self) -> "PauliTerm":
        return PauliTerm(
            self.coeff.conjugate(),
            tuple((label, _ADJOINT_OP[op]) for label, op in self.factors),
        )

    def scaled(self, alpha: complex) -> "PauliTerm":
        return PauliTerm(alpha * self.coeff, self.factors)

    def __str__(self) -> str:
        ops = " ".join(f"s{op}[{label}]" for label, op in self.factors) or "I"
        return f"({self.coeff.real:+.6g}{self.coeff.imag:+.6g}j) {ops}"


def term(coeff: complex, **ops: str) -> PauliTerm:
    """Shorthand, e.g. ``term(0.5, A1="+", A2="-", B="-")``."""
    return PauliTerm(coeff, tuple(ops.items()))


@dataclass(frozen=True)
class PauliSum:
    terms: tuple[PauliTerm, ...] = ()
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def of(cls, *terms: PauliTerm, hermitian: bool = False) -> "PauliSum":
        return cls(tuple(terms), hermitian)

    @property
    def labels(self) -> set[str]:
        return {label for t in self.terms for label in t.labels}

    def is_zero(self) -> bool:
        return all(t.coeff == 0 for t in self.terms)

    def adjoint(self) -> "PauliSum":
        return PauliSum(tuple(t.adjoint() for t in self.terms), self.hermitian)

    def plus_hc(self) -> "PauliSum":
        """The sum plus its Hermitian conjugate, flagged Hermitian."""
        return PauliSum(self.terms + self.adjoint().terms, hermitian=True)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        return PauliSum(self.terms + other.terms, self.hermitian and other.hermitian)

    def __neg__(self) -> "PauliSum":
        return PauliSum(tuple(t.scaled(-1) for t in self.terms), self.hermitian)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def __mul__(self, alpha) -> "PauliSum":
        if isinstance(alpha, PauliSum):
            return NotImplemented
        alpha = complex(alpha)
        return PauliSum(
            tuple(t.scaled(alpha) for t in self.terms),
            self.hermitian and alpha.imag == 0,
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        # product of operators with disjoint qubit supports only
        out = []
        for s, o in itertools.product(self.terms, other.terms):
            if set(s.labels) & set(o.labels):
                raise ValueError("operator product on a shared qubit is not supported")
            out.append(PauliTerm(s.coeff * o.coeff, s.factors + o.factors))
        return PauliSum(tuple(out))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


ZERO = PauliSum((), hermitian=True)


def single(label: str, op: str, coeff: complex = 1.0) -> PauliSum:
    return PauliSum((PauliTerm(coeff, ((label, op),)),), hermitian=op in "xyz" and complex(coeff).imag == 0)


@dataclass(frozen=True)
class Qubit:
    label: str
    omega: float
    beta: float


@dataclass(frozen=True)
class SystemSpec:
    """Qubit partition, frequencies and inverse temperatures.

    ``a_subsystems`` are ``(label, omega, beta)`` triples, ``b_qubits`` are
    ``(label, omega)`` pairs sharing ``beta_b``. Joint basis order is
    ``A_1 .. A_N, B_1 .. B_M``.
    """

    a_subsystems: tuple[tuple[str, float, float], ...]
    b_qubits: tuple[tuple[str, float], ...]
    beta_b: float
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        a = tuple((str(l), float(w), float(b)) for l, w, b in self.a_subsystems)
        bq = tuple((str(l), float(w)) for l, w in self.b_qubits)
        object.__setattr__(self, "a_subsystems", a)
        object.__setattr__(self, "b_qubits", bq)
        object.__setattr__(self, "beta_b", float(self.beta_b))
        if not a or not bq:
            raise ValueError("need at least one A subsystem and one B qubit")
        labels = [q[0] for q in a] + [q[0] for q in bq]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels: {labels}")
        for label, omega in [(q[0], q[1]) for q in a] + list(bq):
            if not (math.isfinite(omega) and omega >= 0):
                raise ValueError(f"frequency of {label} must be finite and >= 0, got {omega}")
        for beta in [q[2] for q in a] + [self.beta_b]:
            if not (math.isfinite(beta) and beta > 0):
                raise ValueError(f"inverse temperatures must be finite and > 0, got {beta}")
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(labels)})

    @property
    def qubits(self) -> tuple[Qubit, ...]:
        return tuple(Qubit(*q) for q in self.a_subsystems) + tuple(
            Qubit(l, w, self.beta_b) for l, w in self.b_qubits
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.qubits)

    @property
    def a_labels(self) -> tuple[str, ...]:
        return tuple(q[0] for q in self.a_subsystems)

    @property
    def b_labels(self) -> tuple[str, ...]:
        return tuple(q[0] for q in self.b_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self._index)

    @property
    def dims(self) -> list[int]:
        return [2] * self.n_qubits

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def beta_a(self) -> float:
        """Reference inverse temperature of A: the hottest A subsystem."""
        return min(q[2] for q in self.a_subsystems)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown qubit label {label!r}; known: {self.labels}") from None

    def omega(self, label: str) -> float:
        return self.qubits[self.index(label)].omega

    def beta(self, label: str) -> float:
        return self.qubits[self.index(label)].beta

    def is_a(self, label: str) -> bool:
        return self.index(label) < len(self.a_subsystems)

    def with_betas(self, beta_a: Sequence[float], beta_b: float) -> "SystemSpec":
        a = tuple((l, w, b) for (l, w, _), b in zip(self.a_subsystems, beta_a))
        return SystemSpec(a, self.b_qubits, beta_b)


def to_matrix(h: PauliSum, spec: SystemSpec, labels: Sequence[str] | None = None) -> np.ndarray:
    """Dense matrix of ``h`` on the qubits ``labels`` (default: the whole system).

    ``labels`` fixes the tensor-factor order of the result.
    """
    if labels is None:
        labels = spec.labels
    labels = list(labels)
    for lab in labels:
        spec.index(lab)
    position = {lab: i for i, lab in enumerate(labels)}
    dim = 2 ** len(labels)
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        if t.coeff == 0:
            continue
        factors = [IDENTITY_2] * len(labels)
        for lab, op in t.factors:
            if lab not in position:
                raise KeyError(f"term acts on qubit {lab!r} outside {labels}")
            factors[position[lab]] = OPERATORS[op]
        out += t.coeff * linalg.kron_all(factors)
    if h.hermitian:
        residual = linalg.hermiticity_residual(out)
        if residual > 1e-12:
            raise ValueError(f"sum flagged Hermitian has relative anti-Hermitian part {residual:.3e}")
    return out


def free_hamiltonian(spec: SystemSpec, labels: Iterable[str] | None = None) -> PauliSum:
    """``sum_i -omega_i/2 sigma_z`` over the named qubits (default: all)."""
    if labels is None:
        labels = spec.labels
    return PauliSum(
        tuple(PauliTerm(-0.5 * spec.omega(l), ((l, "z"),)) for l in labels),
        hermitian=True,
    )


def _raising_lowering_expansion(t: PauliTerm):
    """Split x/y factors into sigma_+/sigma_- and yield each (S+, S-) label pair.

    Components whose coefficient cancels are irrelevant here: every x or y
    factor contributes both a ``+`` and a ``-`` piece with nonzero weight.
    """
    fixed_plus = [l for l, op in t.factors if op == "+"]
    fixed_minus = [l for l, op in t.factors if op == "-"]
    free = [l for l, op in t.factors if op in "xy"]
    for choice in itertools.product("+-", repeat=len(free)):
        plus = fixed_plus + [l for l, c in zip(free, choice) if c == "+"]
        minus = fixed_minus + [l for l, c in zip(free, choice) if c == "-"]
        yield plus, minus


def frequency_match_check(t: PauliTerm, spec: SystemSpec, tol: float = FREQUENCY_TOL) -> bool:
    """True iff the term commutes with the free Hamiltonian.

    That happens when the frequencies of its raising and lowering factors
    balance; ``z`` factors are unconstrained. ``tol`` is relative to the
    largest frequency in the system.
    """
    scale = max(1.0, max(q.omega for q in spec.qubits))
    for plus, minus in _raising_lowering_expansion(t):
        mismatch = sum(spec.omega(l) for l in plus) - sum(spec.omega(l) for l in minus)
        if abs(mismatch) > tol * scale:
            return False
    return True


class HTCResult(NamedTuple):
    ok: bool
    residual: float


def verify_heat_transfer_condition(
    h_i: PauliSum, h_a: PauliSum, h_b: PauliSum, spec: SystemSpec
) -> HTCResult:
    """Check ``[H_I, H_A + H_B] = 0`` numerically (relative Frobenius residual)."""
    hi = to_matrix(h_i, spec)
    h0 = to_matrix(h_a, spec) + to_matrix(h_b, spec)
    scale = max(linalg.frob_norm(hi) * linalg.frob_norm(h0), np.finfo(float).tiny)
    residual = linalg.frob_norm(linalg.commutator(hi, h0)) / scale
    return HTCResult(bool(residual < HTC_TOL), float(residual))


# ---------------------------------------------------------------------------
# interaction families


def flip_flop(a_label: str, b_label: str, c: complex) -> PauliSum:
    """``c sigma_-^a sigma_+^b + h.c.``: the surviving two-body exchange."""
    return PauliSum.of(PauliTerm(c, ((a_label, "-"), (b_label, "+")))).plus_hc()


def three_body(u: str, v: str, w: str, c: complex) -> PauliSum:
    """``c sigma_+^u sigma_-^v sigma_-^w + h.c.``; needs omega_u = omega_v + omega_w."""
    return PauliSum.of(PauliTerm(c, ((u, "+"), (v, "-"), (w, "-")))).plus_hc()


def z_flip_flop(u: str, v: str, w: str, c: complex) -> PauliSum:
    """``c sigma_z^u sigma_-^v sigma_+^w + h.c.``; needs omega_v = omega_w."""
    return PauliSum.of(PauliTerm(c, ((u, "z"), (v, "-"), (w, "+")))).plus_hc()


def zzz(k: str, l: str, m: str, c: float) -> PauliSum:
    return PauliSum.of(PauliTerm(float(c), ((k, "z"), (l, "z"), (m, "z"))), hermitian=True)


def uniform_exchange(labels: Sequence[str], j: float) -> PauliSum:
    """``J sum_{u<v} sum_a sigma_a^u sigma_a^v`` over unordered pairs."""
    terms = []
    for u, v in itertools.combinations(labels, 2):
        for a in "xyz":
            terms.append(PauliTerm(float(j), ((u, a), (v, a))))
    return PauliSum(tuple(terms), hermitian=True)


def build_s19_interaction(
    r1: float, sign: int, c_xyy: float, c_xyx: float, spec: SystemSpec
) -> tuple[PauliSum, PauliSum]:
    """Mixed two/three-body coupling of ``(A_1, A_2, B)`` with an intra-A exchange.

    Frequencies must be ``omega_A1 = r1 * omega`` and ``omega_A2 = omega_B = omega``.
    Returns ``(H_I, H_AI)`` with ``r2 = sign * sqrt(r1 (2 - r1)) / 2`` and
    ``H_AI = omega (r2 sigma_+^A1 sigma_-^A2 + h.c.)``.
    """
    if not (0 < r1 <= 2):
        raise ValueError(f"r1 must lie in (0, 2], got {r1}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if len(spec.a_subsystems) != 2 or len(spec.b_qubits) != 1:
        raise ValueError("layout must be exactly (A1, A2, B)")
    a1, a2 = spec.a_labels
    (b,) = spec.b_labels
    omega = spec.omega(b)
    scale = max(1.0, omega)
    if abs(spec.omega(a2) - omega) > FREQUENCY_TOL * scale or abs(
        spec.omega(a1) - r1 * omega
    ) > FREQUENCY_TOL * scale:
        raise ValueError("frequencies must satisfy omega_A1 = r1*omega, omega_A2 = omega_B = omega")
    r2 = sign * 0.5 * math.sqrt(max(r1 * (2.0 - r1), 0.0))

    lower_raise = PauliSum.of(term(1.0, **{a1: "-", a2: "+"}))
    raise_lower = PauliSum.of(term(1.0, **{a1: "+", a2: "-"}))
    exchange = lower_raise + raise_lower
    current = lower_raise - raise_lower
    z_diff = single(a1, "z") - single(a2, "z")

    b_first = c_xyy * single(b, "y") + c_xyx * single(b, "x")
    b_second = c_xyy * single(b, "x") - c_xyx * single(b, "y")
    # Relative sign of the second bracket is fixed by [H_I, H_A + H_B] = 0
    # under H_X = -omega/2 sigma_z; the other choice fails the condition.
    h_i = (2j * current) @ b_first + (2 * (r1 - 1) * exchange + 2 * r2 * z_diff) @ b_second
    h_i = PauliSum(h_i.terms, hermitian=True)
    h_ai = (omega * PauliSum.of(term(r2, **{a1: "+", a2: "-"}))).plus_hc()
    return h_i, h_ai
