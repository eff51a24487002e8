"""Command-line front end.

Subcommands ``validate``, ``evolve``, ``derivs``, ``phase-scan`` and
``ledger``. Exit codes: 0 ok, 1 validation failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis
from .config import ConfigError, RunSettings, load_config
from .dynamics import convexity_decomposition, heat_series, q_derivative, theorem1_witness
from .ledger import LOCAL_EQUILIBRIUM_TOL, classify_aht
from .pauli import frequency_match_check
from .scenarios import SCENARIO_NAMES, Scenario, scenario
from .states import InvalidStateError, local_equilibrium_residual

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(header: Sequence[str], rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _load(args) -> tuple[Scenario, RunSettings]:
    if args.scenario:
        scen = scenario(args.scenario, seed=args.seed)
        settings = RunSettings()
    else:
        scen, settings = load_config(args.config)
    t_max = args.t_max if args.t_max is not None else settings.t_max
    t_steps = args.t_steps if args.t_steps is not None else settings.t_steps
    if t_steps < 1 or t_max < 0:
        raise ConfigError("--t-steps must be >= 1 and --t-max >= 0")
    return scen, RunSettings(t_max, t_steps)


def _times(settings: RunSettings) -> np.ndarray:
    return np.linspace(0.0, settings.t_max, settings.t_steps)


def cmd_validate(args) -> int:
    scen, _ = _load(args)
    ok = True
    lines = [f"scenario: {scen.name}"]
    htc = scen.htc()
    if htc.ok:
        lines.append(f"heat-transfer condition: ok (residual {htc.residual:.3e})")
    elif scen.violates_htc:
        lines.append(f"heat-transfer condition: VIOLATED as declared (residual {htc.residual:.3e})")
    else:
        lines.append(f"heat-transfer condition: FAILED (residual {htc.residual:.3e})")
        ok = False
    for t in scen.h_inter.terms:
        match = frequency_match_check(t, scen.spec)
        lines.append(f"  term {t}: frequency-matched={match}")
    residual = local_equilibrium_residual(scen.initial_state, scen.spec)
    le_ok = residual <= LOCAL_EQUILIBRIUM_TOL
    ok &= le_ok
    lines.append(f"local equilibrium: {'ok' if le_ok else 'FAILED'} (marginal deviation {residual:.3e})")
    lam = float(scen.initial_state.eigenvalues()[0])
    lines.append(f"initial state: valid (minimum eigenvalue {lam:.6e})")
    w = theorem1_witness(scen.initial_state, scen.spec)
    lines.append(f"coherence-free doublets and triplets: {w.theorem_applies}")
    lines.append("result: " + ("PASS" if ok else "FAIL"))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def evolve_rows(scen: Scenario, times) -> tuple[list[str], list[list]]:
    ts = heat_series(scen.initial_state, scen.h_total, scen.h_b, scen.spec, times, h_ai=scen.h_intra, with_ledger=True)
    n_a = len(scen.spec.a_subsystems)
    header = ["t", "q", "lhs"] + [f"relA_{k + 1}" for k in range(n_a)]
    header += ["relB", "dI_AB", "dI_A", "dI_A:B", "dT_A", "dJ_A", "mechanism"]
    rows = []
    for t, q, lhs, led in zip(ts.times, ts.q, ts.lhs, ts.ledgers):
        rows.append(
            [t, q, lhs, *led.rel_entropy_a, led.rel_entropy_b, led.delta_mutual_ab, led.delta_mutual_intra,
             led.delta_mutual_cross, led.delta_temp_inhom, led.delta_interaction, classify_aht(led)]
        )
    return header, rows


def cmd_evolve(args) -> int:
    scen, settings = _load(args)
    header, rows = evolve_rows(scen, _times(settings))
    write_csv(header, rows, args.out)
    lhs = np.array([r[2] for r in rows])
    i = int(np.argmin(lhs))
    print(
        f"{scen.name}: min lhs {lhs[i]:.6e} at t={rows[i][0]:g}, mechanism {rows[i][-1]}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_derivs(args) -> int:
    scen, _ = _load(args)
    rows = []
    for n in range(1, args.n + 1):
        rep = q_derivative(scen.initial_state, scen.h_inter, scen.h_b, scen.spec, n, h_total=scen.h_total)
        rows.append([n, "total", rep.value])
    if args.n >= 2 and scen.h_intra.is_zero() and scen.h_perturb.is_zero():
        try:
            dec = convexity_decomposition(scen.initial_state, scen.h_inter, scen.spec)
        except ValueError:
            dec = None
        if dec is not None:
            rows.extend([2, k, v] for k, v in dec.decomposition.items())
    write_csv(["n", "component", "value"], rows, args.out)
    return EXIT_OK


def _scan_params(args) -> tuple[float, float]:
    a, j = 1.0, 0.0
    if args.scenario in ("fig2a", "fig2b"):
        meta = scenario(args.scenario).metadata
        a, j = meta["a"], meta["j_over_c"]
    elif args.scenario or args.config:
        raise ConfigError("phase-scan takes --scenario fig2a/fig2b or explicit --a/--j-over-c")
    if args.a is not None:
        a = args.a
    if args.j_over_c is not None:
        j = args.j_over_c
    if not a > 0 or j < 0:
        raise ConfigError("--a must be positive and --j-over-c non-negative")
    return a, j


def cmd_phase_scan(args) -> int:
    a, j = _scan_params(args)
    if args.grid < 2:
        raise ConfigError("--grid must be at least 2")
    scan = analysis.phase_scan(a, j, (0.0, 5.0, args.grid), oracle=args.oracle)
    header = ["beta_a1_rel", "beta_a2_rel", "a", "j_over_c", "convexity", "aht"]
    rows = analysis.scan_rows(scan)
    write_csv(header, rows, args.out)
    meta = dict(scan.metadata, aht_count=scan.aht_count, aht_area=scan.aht_area, calibration=analysis.calibrate_convention())
    if args.out:
        base = Path(args.out)
        write_csv(["beta_a1_rel", "beta_a2_rel"], scan.boundary, str(base.with_suffix(".boundary.csv")))
        base.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"a={a:g} J/c={j:g}: {scan.aht_count} AHT nodes, {len(scan.boundary)} boundary points", file=sys.stderr)
    return EXIT_OK


def cmd_ledger(args) -> int:
    scen, settings = _load(args)
    times = _times(settings) if args.t is None else np.array([0.0, args.t])
    ts = heat_series(scen.initial_state, scen.h_total, scen.h_b, scen.spec, times, h_ai=scen.h_intra, with_ledger=True)
    i = ts.argmin_lhs() if args.t is None else 1
    led = ts.ledgers[i]
    lines = [
        f"scenario: {scen.name}",
        f"t = {ts.times[i]:g}" + ("  (minimum of lhs over the grid)" if args.t is None else ""),
        f"Q (into B)                 {led.q: .10e}",
        f"Q from -d<H_A>             {led.q_from_a: .10e}",
        f"lhs (beta_B - beta_A) Q    {led.lhs: .10e}",
    ]
    for k, v in enumerate(led.rel_entropy_a):
        lines.append(f"S(rho'_A{k + 1} || rho_A{k + 1})     {v: .10e}")
    lines += [
        f"S(rho'_B || rho_B)         {led.rel_entropy_b: .10e}",
        f"dI_AB                      {led.delta_mutual_ab: .10e}",
        f"  dI_A                     {led.delta_mutual_intra: .10e}",
        f"  dI_A:B                   {led.delta_mutual_cross: .10e}",
        f"dT_A                       {led.delta_temp_inhom: .10e}",
        f"dJ_A                       {led.delta_interaction: .10e}",
        f"rhs                        {led.rhs: .10e}",
        f"identity residual          {led.identity_residual:.3e}",
        f"entropy production         {led.entropy_production: .10e}",
        f"mechanism                  {classify_aht(led)}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ahtsim", description="Anomalous heat transfer in few-qubit systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--scenario", choices=SCENARIO_NAMES)
        g.add_argument("--config", help="JSON config document")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized scenarios")
        sp.add_argument("--out", help="output path (default stdout)")

    def timegrid(sp):
        sp.add_argument("--t-max", type=float, dest="t_max")
        sp.add_argument("--t-steps", type=int, dest="t_steps")

    sp = sub.add_parser("validate", help="check heat-transfer condition and initial state")
    source(sp)
    timegrid(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("evolve", help="heat and ledger time series as CSV")
    source(sp)
    timegrid(sp)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("derivs", help="heat derivatives at t=0")
    source(sp)
    timegrid(sp)
    sp.add_argument("--n", type=int, default=3, help="highest order (1..6)")
    sp.set_defaults(func=cmd_derivs)

    sp = sub.add_parser("phase-scan", help="initial convexity over temperature ratios")
    source(sp, required=False)
    sp.add_argument("--grid", type=int, default=201, help="nodes per axis over [0, 5]")
    sp.add_argument("--oracle", action="store_true", help="use the numerical derivative at every node")
    sp.add_argument("--a", type=float)
    sp.add_argument("--j-over-c", type=float, dest="j_over_c")
    sp.set_defaults(func=cmd_phase_scan)

    sp = sub.add_parser("ledger", help="entropy ledger at one time")
    source(sp)
    timegrid(sp)
    sp.add_argument("--t", type=float, help="evaluation time (default: time of minimal lhs)")
    sp.set_defaults(func=cmd_ledger)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    if args.command == "derivs" and not 1 <= args.n <= 6:
        print("error: --n must be in 1..6", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidStateError as exc:
        print(f"invalid initial state: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
