"""Named configurations and seeded random generators.

Energies are in units of ``omega_0`` with ``omega_0 / 2pi = 4 GHz``; times are
in units of ``1/omega_0``. Kelvin temperatures are kept verbatim in
``metadata`` and converted with :func:`beta_omega_from_si`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .ledger import CORRELATION_INTRA, INTERACTION, NONE, TEMPERATURE_INHOMOGENEITY
from .pauli import (
    ZERO,
    PauliSum,
    PauliTerm,
    SystemSpec,
    build_s19_interaction,
    flip_flop,
    frequency_match_check,
    free_hamiltonian,
    three_body,
    uniform_exchange,
    verify_heat_transfer_condition,
)
from .states import DensityMatrix, add_coherence, beta_omega_from_si, product_state

OMEGA0_GHZ = 4.0
DEFAULT_COUPLING = 0.005
FIG1D_CHI = 0.24
FIG2B_J_OVER_C = 0.2


@dataclass(frozen=True)
class Scenario:
    name: str
    spec: SystemSpec
    h_free: PauliSum
    h_intra: PauliSum
    h_inter: PauliSum
    h_perturb: PauliSum
    initial_state: DensityMatrix
    recipe: str
    expected_mechanism: str | None
    violates_htc: bool = False
    metadata: dict = field(default_factory=dict)
    coherence: PauliSum = ZERO
    correlation: PauliSum = ZERO

    @property
    def h_total(self) -> PauliSum:
        return self.h_free + self.h_intra + self.h_inter + self.h_perturb

    @property
    def h_b(self) -> PauliSum:
        return free_hamiltonian(self.spec, self.spec.b_labels)

    @property
    def h_a(self) -> PauliSum:
        return free_hamiltonian(self.spec, self.spec.a_labels) + self.h_intra

    def htc(self):
        """Heat-transfer check of ``H_I`` (coupling plus any perturbation) against ``H_A + H_B``."""
        return verify_heat_transfer_condition(self.h_inter + self.h_perturb, self.h_a, self.h_b, self.spec)


def _spec_from_si(omegas_a, temps_a, omegas_b, temp_b, labels_a=("A1", "A2"), labels_b=("B",)) -> SystemSpec:
    beta0 = lambda t: beta_omega_from_si(t, OMEGA0_GHZ)
    return SystemSpec(
        tuple((l, w, beta0(t)) for l, w, t in zip(labels_a, omegas_a, temps_a)),
        tuple((l, w) for l, w in zip(labels_b, omegas_b)),
        beta0(temp_b),
    )


def _si_meta(temps_a, temp_b, **extra) -> dict:
    meta = {"temperatures_k": {"A": list(temps_a), "B": temp_b}, "omega0_ghz": OMEGA0_GHZ, "units": "omega_0"}
    meta.update(extra)
    return meta


def _three_body_scenario(name: str, j_over_c: float = 0.0) -> Scenario:
    temps_a, temp_b = (1.0, 0.5), 1.2
    spec = _spec_from_si((2.0, 1.0), temps_a, (1.0,), temp_b)
    c = DEFAULT_COUPLING
    h_p = uniform_exchange(spec.labels, j_over_c * c) if j_over_c else ZERO
    return Scenario(
        name=name,
        spec=spec,
        h_free=free_hamiltonian(spec),
        h_intra=ZERO,
        h_inter=three_body("A1", "A2", "B", c),
        h_perturb=h_p,
        initial_state=product_state(spec),
        recipe="product",
        expected_mechanism=None if j_over_c else TEMPERATURE_INHOMOGENEITY,
        violates_htc=bool(j_over_c),
        metadata=_si_meta(
            temps_a,
            temp_b,
            c=c,
            c_note="coupling magnitude not stated for this figure; chosen to match the other panels",
            a=1.0,
            j_over_c=j_over_c,
        ),
    )


def _fig1c() -> Scenario:
    temps_a, temp_b = (1.0, 1.0), 1.2
    spec = _spec_from_si((1.0, 1.0), temps_a, (1.0,), temp_b)
    h_i, h_ai = build_s19_interaction(1.0, 1, DEFAULT_COUPLING, 0.0, spec)
    return Scenario(
        "fig1c",
        spec,
        free_hamiltonian(spec),
        h_ai,
        h_i,
        ZERO,
        product_state(spec),
        "product",
        INTERACTION,
        metadata=_si_meta(temps_a, temp_b, c=DEFAULT_COUPLING, r1=1.0, r2=0.5),
    )


def fig1d_coherence(amplitude: float = FIG1D_CHI) -> PauliSum:
    return PauliSum.of(PauliTerm(amplitude, (("A1", "+"), ("A2", "-")))).plus_hc()


def _fig1d() -> Scenario:
    temps_a, temp_b = (1.0, 1.0), 1.2
    spec = _spec_from_si((1.0, 1.0), temps_a, (1.0,), temp_b)
    c = DEFAULT_COUPLING
    chi = fig1d_coherence()
    rho = add_coherence(product_state(spec), chi, spec)
    return Scenario(
        "fig1d",
        spec,
        free_hamiltonian(spec),
        ZERO,
        flip_flop("A1", "B", c) + flip_flop("A2", "B", c),
        ZERO,
        rho,
        "product+coherence",
        CORRELATION_INTRA,
        metadata=_si_meta(temps_a, temp_b, c=c, chi_amplitude=FIG1D_CHI, min_eigenvalue=float(rho.eigenvalues()[0])),
        coherence=chi,
    )


def _theorem1_random(seed: int) -> Scenario:
    rng = np.random.default_rng(seed)
    spec, h_i = random_two_body(rng, cold_a=True)
    rho = random_local_equilibrium_state(spec, rng, coherent=False)
    return Scenario(
        "theorem1-random",
        spec,
        free_hamiltonian(spec),
        ZERO,
        h_i,
        ZERO,
        rho,
        "product+diagonal-correlation",
        NONE,
        metadata={"seed": seed, "units": "omega_0"},
    )


SCENARIO_NAMES = ("fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "theorem1-random")


def scenario(name: str, seed: int = 0) -> Scenario:
    if name == "fig1b":
        return _three_body_scenario("fig1b")
    if name == "fig2a":
        return _three_body_scenario("fig2a")
    if name == "fig2b":
        return _three_body_scenario("fig2b", FIG2B_J_OVER_C)
    if name == "fig1c":
        return _fig1c()
    if name == "fig1d":
        return _fig1d()
    if name == "theorem1-random":
        return _theorem1_random(seed)
    raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}")


# ---------------------------------------------------------------------------
# random generators


def _pauli_string_matrix(ops: dict[int, str], n: int) -> np.ndarray:
    mats = {"x": linalg.SIGMA_X, "y": linalg.SIGMA_Y, "z": linalg.SIGMA_Z}
    return linalg.kron_all([mats[ops[i]] if i in ops else linalg.IDENTITY_2 for i in range(n)])


def random_local_equilibrium_state(
    spec: SystemSpec,
    rng: np.random.Generator,
    coherent: bool = True,
    n_strings: int = 4,
) -> DensityMatrix:
    """Product Gibbs state plus random correlations that keep every marginal fixed.

    The correlations are Pauli strings of weight two or more, never supported
    on B alone, so every ``A_k`` marginal and the B marginal stay Gibbs. With
    ``coherent=False`` only ``z`` strings are used and the state stays diagonal.
    The amplitude is a random fraction of the largest one keeping the state PSD.
    """
    base = product_state(spec)
    n = spec.n_qubits
    n_a = len(spec.a_subsystems)
    letters = "xyz" if coherent else "z"
    corr = np.zeros((spec.dim, spec.dim), dtype=complex)
    for _ in range(n_strings):
        weight = int(rng.integers(2, n + 1))
        support = sorted(rng.choice(n, size=weight, replace=False).tolist())
        if all(i >= n_a for i in support):
            support[0] = int(rng.integers(0, n_a))
            support = sorted(set(support))
            if len(support) < 2:
                continue
        ops = {i: letters[int(rng.integers(len(letters)))] for i in support}
        corr += rng.normal() * _pauli_string_matrix(ops, n)
    if not np.any(corr):
        return base
    # largest s with base + s*corr >= 0
    w, v = np.linalg.eigh(base.matrix)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    lam = np.linalg.eigvalsh(inv_sqrt @ corr @ inv_sqrt)
    s_max = 1.0 / max(-lam[0], lam[-1])
    s = rng.uniform(0.1, 0.9) * s_max
    return DensityMatrix(base.matrix + s * corr, base.dims)


def _random_spec(rng: np.random.Generator, n_a: int, n_b: int, omegas, beta_a, beta_b) -> SystemSpec:
    a = tuple((f"A{k + 1}", float(omegas[k]), float(beta_a[k])) for k in range(n_a))
    b = tuple((f"B{l + 1}" if n_b > 1 else "B", float(omegas[n_a + l])) for l in range(n_b))
    return SystemSpec(a, b, float(beta_b))


def random_two_body(
    rng: np.random.Generator,
    cold_a: bool = True,
    homogeneous_a: bool = False,
    n_qubits: int | None = None,
) -> tuple[SystemSpec, PauliSum]:
    """Random flip-flop couplings between equal-frequency A and B qubits.

    Every A qubit shares a frequency with at least one B qubit so the coupling
    is never empty. ``cold_a`` makes each ``beta_Ak`` exceed ``beta_B``.
    """
    n = int(n_qubits or rng.integers(2, 5))
    n_a = int(rng.integers(1, n))
    n_b = n - n_a
    b_omegas = rng.choice([1.0, 2.0], size=n_b)
    a_omegas = rng.choice(b_omegas, size=n_a)
    omegas = list(a_omegas) + list(b_omegas)
    beta_b = rng.uniform(0.1, 1.5)
    draws = rng.uniform(0.05, 1.5, size=n_a)
    if homogeneous_a:
        draws[:] = draws[0]
    beta_a = beta_b + draws if cold_a else draws
    spec = _random_spec(rng, n_a, n_b, omegas, beta_a, beta_b)
    h = ZERO
    for k, a in enumerate(spec.a_labels):
        for l, b in enumerate(spec.b_labels):
            if a_omegas[k] == b_omegas[l]:
                c = complex(rng.normal(), rng.normal()) * rng.uniform(0.01, 0.1)
                h = h + flip_flop(a, b, c)
    return spec, h


def matched_terms(spec: SystemSpec, max_weight: int = 3) -> list[PauliTerm]:
    """All ``+``/``-``/``z`` strings coupling A and B that commute with the free Hamiltonian."""
    out = []
    labels = spec.labels
    for weight in range(2, max_weight + 1):
        for support in itertools.combinations(labels, weight):
            if all(spec.is_a(l) for l in support) or not any(spec.is_a(l) for l in support):
                continue
            for ops in itertools.product("+-z", repeat=weight):
                if weight == 2 and set(ops) == {"z"}:
                    continue  # zz carries no heat
                t = PauliTerm(1.0, tuple(zip(support, ops)))
                if frequency_match_check(t, spec):
                    out.append(t)
    return out


def random_htc_scenario(rng: np.random.Generator, coherent: bool = True) -> Scenario:
    """Random 2-4 qubit system with a coupling satisfying the heat-transfer condition.

    Either frequency-matched couplings from integer frequencies, or (one time
    in four) the mixed two/three-body family with an intra-A exchange.
    """
    if rng.uniform() < 0.25:
        r1 = float(rng.uniform(0.2, 2.0))
        sign = int(rng.choice([-1, 1]))
        beta_b = rng.uniform(0.1, 1.5)
        spec = SystemSpec(
            (("A1", r1, rng.uniform(0.1, 1.5)), ("A2", 1.0, rng.uniform(0.1, 1.5))), (("B", 1.0),), beta_b
        )
        h_i, h_ai = build_s19_interaction(r1, sign, rng.uniform(0.01, 0.1), rng.uniform(-0.1, 0.1), spec)
    else:
        while True:
            n = int(rng.integers(2, 5))
            n_a = int(rng.integers(1, n))
            omegas = rng.integers(1, 4, size=n).astype(float)
            spec = _random_spec(rng, n_a, n - n_a, omegas, rng.uniform(0.1, 1.5, size=n_a), rng.uniform(0.1, 1.5))
            pool = matched_terms(spec)
            if pool:
                break
        picks = rng.choice(len(pool), size=min(len(pool), int(rng.integers(1, 5))), replace=False)
        h_i = ZERO
        for p in picks:
            t = pool[int(p)]
            c = complex(rng.normal(), rng.normal()) * rng.uniform(0.01, 0.1)
            h_i = h_i + PauliSum.of(t.scaled(c)).plus_hc()
        h_ai = ZERO
    rho = random_local_equilibrium_state(spec, rng, coherent=coherent) if rng.uniform() < 0.8 else product_state(spec)
    return Scenario("random-htc", spec, free_hamiltonian(spec), h_ai, h_i, ZERO, rho, "random", None)
