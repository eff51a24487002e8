"""JSON run configurations.

A config is one document with four top-level keys::

    {
      "system": {
        "omega0_ghz": 4.0,
        "a": [{"label": "A1", "omega": 2.0, "temperature_k": 1.0}, ...],
        "b": [{"label": "B", "omega": 1.0}],
        "b_temperature_k": 1.2
      },
      "hamiltonian": {
        "inter": [TERM, ...], "intra": [TERM, ...], "perturb": [TERM, ...],
        "violates_htc": false
      },
      "initial_state": {"recipe": "product", "coherence": [TERM, ...], "correlation": [TERM, ...]},
      "run": {"t_max": 2000.0, "t_steps": 2001, "expected_mechanism": "interaction"}
    }

with ``TERM = {"coeff": [re, im], "ops": [[label, op], ...], "hc": bool}`` and
``op`` one of ``x y z + -``. ``"hc": true`` adds the Hermitian conjugate.
Frequencies are in units of ``omega_0``. Inverse temperatures may be given
directly as ``"beta"`` / ``"b_beta"`` (units ``1/omega_0``) instead of kelvin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .pauli import OPERATORS, ZERO, PauliSum, PauliTerm, SystemSpec, free_hamiltonian, to_matrix
from .scenarios import OMEGA0_GHZ, Scenario
from .states import InvalidStateError, add_classical_correlation, add_coherence, beta_omega_from_si, product_state

TOP_LEVEL_KEYS = ("system", "hamiltonian", "initial_state", "run")
RECIPES = ("product", "product+coherence", "product+correlation", "product+coherence+correlation")


class ConfigError(ValueError):
    """Malformed configuration document."""


@dataclass(frozen=True)
class RunSettings:
    t_max: float = 2000.0
    t_steps: int = 2001


def _require(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict) or key not in d:
        raise ConfigError(f"missing key {key!r} in {where}")
    return d[key]


def parse_term(doc: Any, where: str = "term") -> PauliSum:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    coeff = _require(doc, "coeff", where)
    if isinstance(coeff, (int, float)):
        coeff = [coeff, 0.0]
    if not (isinstance(coeff, list) and len(coeff) == 2 and all(isinstance(v, (int, float)) for v in coeff)):
        raise ConfigError(f"{where}.coeff must be [re, im]")
    ops = _require(doc, "ops", where)
    if not isinstance(ops, list) or not ops:
        raise ConfigError(f"{where}.ops must be a non-empty list of [label, op]")
    factors = []
    for item in ops:
        if not (isinstance(item, list) and len(item) == 2 and item[1] in OPERATORS):
            raise ConfigError(f"{where}.ops entry {item!r} must be [label, one of {sorted(OPERATORS)}]")
        factors.append((str(item[0]), str(item[1])))
    try:
        t = PauliTerm(complex(coeff[0], coeff[1]), tuple(factors))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    s = PauliSum.of(t)
    return s.plus_hc() if doc.get("hc", False) else s


def parse_terms(docs: Any, where: str) -> PauliSum:
    if docs is None:
        return ZERO
    if not isinstance(docs, list):
        raise ConfigError(f"{where} must be a list of terms")
    out = ZERO
    for i, d in enumerate(docs):
        out = out + parse_term(d, f"{where}[{i}]")
    return PauliSum(out.terms, hermitian=True)


def _beta(entry: dict, omega0_ghz: float, beta_key: str, temp_key: str, where: str) -> float:
    if beta_key in entry:
        return float(entry[beta_key])
    if temp_key in entry:
        return beta_omega_from_si(float(entry[temp_key]), omega0_ghz)
    raise ConfigError(f"{where} needs {beta_key!r} or {temp_key!r}")


def parse_system(doc: dict) -> SystemSpec:
    omega0 = float(doc.get("omega0_ghz", OMEGA0_GHZ))
    a_docs = _require(doc, "a", "system")
    b_docs = _require(doc, "b", "system")
    if not isinstance(a_docs, list) or not isinstance(b_docs, list):
        raise ConfigError("system.a and system.b must be lists")
    try:
        a = tuple(
            (str(_require(e, "label", "system.a")), float(_require(e, "omega", "system.a")),
             _beta(e, omega0, "beta", "temperature_k", "system.a entry"))
            for e in a_docs
        )
        b = tuple((str(_require(e, "label", "system.b")), float(_require(e, "omega", "system.b"))) for e in b_docs)
        beta_b = _beta(doc, omega0, "b_beta", "b_temperature_k", "system")
        return SystemSpec(a, b, beta_b)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid system: {exc}") from None


def scenario_from_config(doc: dict, name: str = "config") -> tuple[Scenario, RunSettings]:
    """Build a scenario; raises :class:`ConfigError` or :class:`InvalidStateError`."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - set(TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}; expected {list(TOP_LEVEL_KEYS)}")
    spec = parse_system(_require(doc, "system", "config"))
    ham = _require(doc, "hamiltonian", "config")
    init = doc.get("initial_state", {"recipe": "product"})
    run = doc.get("run", {})
    h_inter = parse_terms(ham.get("inter"), "hamiltonian.inter")
    h_intra = parse_terms(ham.get("intra"), "hamiltonian.intra")
    h_perturb = parse_terms(ham.get("perturb"), "hamiltonian.perturb")
    for h in (h_inter, h_intra, h_perturb):
        for label in h.labels:
            if label not in spec.labels:
                raise ConfigError(f"hamiltonian refers to unknown qubit {label!r}")
    for label in h_intra.labels:
        if not spec.is_a(label):
            raise ConfigError(f"hamiltonian.intra may act on A qubits only, got {label!r}")
    for key, h in (("inter", h_inter), ("intra", h_intra), ("perturb", h_perturb)):
        try:
            to_matrix(h, spec)
        except ValueError as exc:
            raise ConfigError(f"hamiltonian.{key} is not Hermitian ({exc}); set \"hc\": true where needed") from None

    recipe = init.get("recipe", "product")
    if recipe not in RECIPES:
        raise ConfigError(f"initial_state.recipe must be one of {RECIPES}")
    rho = product_state(spec)
    for key, add in (("coherence", add_coherence), ("correlation", add_classical_correlation)):
        if key in recipe:
            terms = parse_terms(init.get(key), f"initial_state.{key}")
            for label in terms.labels:
                if label not in spec.labels:
                    raise ConfigError(f"initial_state.{key} refers to unknown qubit {label!r}")
            try:
                rho = add(rho, terms, spec)
            except InvalidStateError:
                raise
            except ValueError as exc:
                raise ConfigError(f"initial_state.{key}: {exc}") from None

    settings = RunSettings(float(run.get("t_max", 2000.0)), int(run.get("t_steps", 2001)))
    if settings.t_steps < 1 or settings.t_max < 0:
        raise ConfigError("run.t_steps must be >= 1 and run.t_max >= 0")
    scen = Scenario(
        name=str(run.get("name", name)),
        spec=spec,
        h_free=free_hamiltonian(spec),
        h_intra=h_intra,
        h_inter=h_inter,
        h_perturb=h_perturb,
        initial_state=rho,
        recipe=recipe,
        expected_mechanism=run.get("expected_mechanism"),
        violates_htc=bool(ham.get("violates_htc", False)),
        metadata=dict(run.get("metadata", {})),
        coherence=parse_terms(init.get("coherence"), "initial_state.coherence"),
        correlation=parse_terms(init.get("correlation"), "initial_state.correlation"),
    )
    return scen, settings


def load_config(path: str | Path) -> tuple[Scenario, RunSettings]:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p} is not valid JSON: {exc}") from None
    return scenario_from_config(doc, p.stem)


def bundled_config(name: str) -> dict:
    """One of the shipped example documents (``fig1b``, ``fig1c``, ``fig1d``)."""
    text = resources.files("ahtsim").joinpath("configs", f"{name}.json").read_text()
    return json.loads(text)


def term_to_doc(t: PauliTerm) -> dict:
    c = complex(t.coeff)
    return {"coeff": [c.real, c.imag], "ops": [[l, o] for l, o in t.factors], "hc": False}


def scenario_to_config(scen: Scenario, settings: RunSettings = RunSettings()) -> dict:
    """Serialize a scenario; kelvin values are used when recorded in its metadata."""
    spec = scen.spec
    temps = scen.metadata.get("temperatures_k")
    omega0 = scen.metadata.get("omega0_ghz", OMEGA0_GHZ)
    system: dict[str, Any] = {"omega0_ghz": omega0, "a": [], "b": []}
    for k, (label, omega, beta) in enumerate(spec.a_subsystems):
        entry: dict[str, Any] = {"label": label, "omega": omega}
        if temps:
            entry["temperature_k"] = temps["A"][k]
        else:
            entry["beta"] = beta
        system["a"].append(entry)
    system["b"] = [{"label": l, "omega": w} for l, w in spec.b_qubits]
    if temps:
        system["b_temperature_k"] = temps["B"]
    else:
        system["b_beta"] = spec.beta_b

    if scen.recipe not in RECIPES:
        raise ConfigError(f"initial state recipe {scen.recipe!r} of {scen.name!r} cannot be expressed as a config")
    init: dict[str, Any] = {"recipe": scen.recipe}
    if not scen.coherence.is_zero():
        init["coherence"] = [term_to_doc(t) for t in scen.coherence.terms]
    if not scen.correlation.is_zero():
        init["correlation"] = [term_to_doc(t) for t in scen.correlation.terms]
    run = {"name": scen.name, "t_max": settings.t_max, "t_steps": settings.t_steps}
    if scen.expected_mechanism:
        run["expected_mechanism"] = scen.expected_mechanism
    meta = {k: v for k, v in scen.metadata.items() if k not in ("temperatures_k", "omega0_ghz")}
    if meta:
        run["metadata"] = meta
    return {
        "system": system,
        "hamiltonian": {
            "inter": [term_to_doc(t) for t in scen.h_inter.terms],
            "intra": [term_to_doc(t) for t in scen.h_intra.terms],
            "perturb": [term_to_doc(t) for t in scen.h_perturb.terms],
            "violates_htc": scen.violates_htc,
        },
        "initial_state": init,
        "run": run,
    }


__all__ = [
    "ConfigError",
    "InvalidStateError",
    "RunSettings",
    "bundled_config",
    "load_config",
    "parse_term",
    "scenario_from_config",
    "scenario_to_config",
]
