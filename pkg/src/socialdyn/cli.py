"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 runtime or singularity error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import config, csvio
from .analytic import evaluate_solution, fit_oscillation
from .assessment_space import aggregate_assessment, classify_layer, leaves
from .core import SocialDynamicsError, ValidationError, distance
from .dynamics import linear_omega, simulate, validate_state
from .forces import ForceKind, stability_class
from .scenarios import TEMPLATES

log = logging.getLogger("socialdyn")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def known_periods(scenario: config.Scenario) -> list[float]:
    """Analytically known oscillation periods in a scenario."""
    periods = []
    if scenario.expected is not None:
        periods.append(scenario.expected.solution.period)
    for body in scenario.state.bodies:
        omega = linear_omega(scenario.state, body.id)
        if omega is not None:
            periods.append(2 * math.pi / omega)
    return periods


def warn_coarse_dt(scenario: config.Scenario) -> None:
    dt = scenario.integrator.dt
    for period in known_periods(scenario):
        if dt > period / 100:
            log.warning("%s: dt=%g is coarser than T/100 for an oscillator with period T=%g",
                        scenario.name, dt, period)
            return


def _simulate_to(scenario_path: str, out_dir: str) -> list[str]:
    scenario = config.load(scenario_path)
    warn_coarse_dt(scenario)
    trajectories = simulate(scenario.state, scenario.integrator)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for tr in trajectories:
        path = out / f"{tr.body_id}.csv"
        csvio.write_trajectory(tr, path)
        written.append(str(path))
    return written


def cmd_simulate(args) -> int:
    paths = args.scenario
    outs = [args.out] if len(paths) == 1 else [str(Path(args.out) / Path(p).stem) for p in paths]
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_simulate_to, paths, outs))
    else:
        results = [_simulate_to(p, o) for p, o in zip(paths, outs)]
    for written in results:
        for path in written:
            print(path)
    return EXIT_OK


def _column(names: list[str], spec: str) -> int:
    if spec in names:
        return names.index(spec)
    try:
        k = int(spec)
    except ValueError:
        raise ValidationError(f"no column {spec!r}; available: {', '.join(names)}") from None
    if not 0 <= k < len(names):
        raise ValidationError(f"column index {k} out of range 0..{len(names) - 1}")
    return k


def cmd_analyze(args) -> int:
    names, data = csvio.read_table(args.trajectory)
    if not names or names[0] != "t":
        raise ValidationError(f"{args.trajectory}: first column must be 't'")
    k = _column(names, args.column)
    fit = fit_oscillation(data[:, 0], data[:, k])
    sol = fit.solution
    print(f"column: {names[k]}")
    print(f"dominant_frequency: {fit.frequency_estimate:.10g}")
    print(f"A: {sol.A:.10g}")
    print(f"B: {sol.B:.10g}")
    print(f"omega: {sol.omega:.10g}")
    print(f"period: {sol.period:.10g}")
    print(f"offset: {fit.offset:.10g}")
    print(f"rms_residual: {fit.rms_residual:.3g}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = config.load(args.scenario)
    state = scenario.state
    validate_state(state, scenario.max_layer_ratio)
    polls = scenario.all_polls(Path(args.scenario).parent)
    print(f"scenario {scenario.name}: valid ({len(state.bodies)} bodies, dimension {state.dimension})")
    complexes = state.complex_map
    for c in state.complexes:
        for body in state.bodies:
            layer = classify_layer(distance(body.position, c.center), c, complexes)
            print(f"layer {body.id} in {c.id}: {layer.value}")
        members = set(leaves(c, complexes)) if c.members else set()
        subjects = sorted({p.subject_id for p in polls if p.evaluator_id in members})
        for subject in subjects:
            relevant = [p for p in polls if p.subject_id == subject and p.evaluator_id in members]
            total = aggregate_assessment(relevant, subject, c, complexes)
            layer = classify_layer(total.norm(), c, complexes)
            coords = ", ".join(f"{x:g}" for x in total.coords)
            print(f"assessment of {subject} by {c.id}: ({coords}) leos, {layer.value}")
    for body in state.bodies:
        k_e = sum(f.params.k_e for f in state.forces if f.kind is ForceKind.ELASTICITY and body.id in f.body_ids)
        k_c = sum(f.params.k_c for f in state.forces if f.kind is ForceKind.CHANGE and body.id in f.body_ids)
        if any(f.kind in (ForceKind.ELASTICITY, ForceKind.CHANGE) and body.id in f.body_ids for f in state.forces):
            print(f"stability {body.id}: {stability_class(k_e, k_c).value} (k_e={k_e:g}, k_c={k_c:g})")
    warn_coarse_dt(scenario)
    return EXIT_OK


def cmd_oracle(args) -> int:
    scenario = config.load(args.scenario)
    expected = scenario.expected
    if expected is None:
        raise ValidationError(f"scenario {scenario.name!r} has no closed-form solution")
    warn_coarse_dt(scenario)
    sol = expected.solution
    print(f"analytic: x(t) = {sol.A:.10g} sin({sol.omega:.10g} t) + {sol.B:.10g} cos({sol.omega:.10g} t)")
    print(f"period: {sol.period:.10g}")
    print(f"frequency: {sol.frequency:.10g}")
    trajectories = {tr.body_id: tr for tr in simulate(scenario.state, scenario.integrator)}
    tr = trajectories[expected.body_id]
    x_sim = expected.displacement(tr.positions)
    x_ref, _ = evaluate_solution(sol, tr.times - scenario.state.t)
    dev = float(np.max(np.abs(x_sim - x_ref)))
    print(f"max_deviation: {dev:.6g}")
    if sol.amplitude > 0:
        print(f"max_relative_deviation: {dev / sol.amplitude:.6g}")
    return EXIT_OK


def cmd_template(args) -> int:
    names = sorted(TEMPLATES) if args.name == "all" else [args.name]
    for name in names:
        if name not in TEMPLATES:
            raise ValidationError(f"unknown template {name!r}; choose from {', '.join(sorted(TEMPLATES))}")
    if args.name == "all":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name in names:
            config.save(TEMPLATES[name](), out / f"{name}.json")
            print(out / f"{name}.json")
    else:
        config.save(TEMPLATES[args.name](), args.out)
        print(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialdyn", description="Social dynamics in a space of assessments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run scenarios and write one trajectory CSV per body")
    p.add_argument("--scenario", action="append", required=True, help="scenario file (repeatable)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="dominant frequency and sinusoid fit of one CSV column")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--column", default="1", help="column name or index (default 1)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="check a scenario and report layers and stability")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="compare a fresh simulation with the closed-form solution")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("template", help="write a built-in scenario to a file")
    p.add_argument("name", help=f"one of {', '.join(sorted(TEMPLATES))}, or 'all'")
    p.add_argument("--out", required=True, help="file, or directory for 'all'")
    p.set_defaults(func=cmd_template)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SocialDynamicsError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
