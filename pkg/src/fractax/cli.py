"""Command-line entry point: classify | simulate | kernel | eigen.

Exit codes are a stable contract: 0 all checks pass, 1 config/validation
failure, 2 no boundedness case holds, 3 blow-up or failed checks.  Every
output file begins with the resolved configuration as '#' comment lines.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys

import numpy as np

from . import diagnostics, evolve, regimes, spectral
from .config import (
    RunSetup,
    build_setup,
    expand_sweep,
    is_swept,
    parse_config,
    setup_bounds,
)
from .eigen1d import sigma_sweep
from .errors import (
    BlowUpSuspected,
    ConfigError,
    FractaxError,
    NonFinite,
    PositivityBreach,
)
from .model import make_grid
from .regimes import Case

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CASE = 2
EXIT_FAILED = 3

SWEEP_COLUMNS = [
    "alpha", "gamma", "k", "chi1", "chi2", "lambda1", "lambda2", "mu1", "mu2", "dim",
    "a_inf", "a_sup", "b_inf", "b_sup", "u0_sup",
    "M", "case", "C0", "Mplus", "lower_limsup", "upper_liminf",
    "pointwise", "uniform", "m_tilde", "table1_row", "table1_threshold",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _echo_lines(entries) -> list[str]:
    return [f"# {key} = {value}" for key, value in entries]


def _write_csv(path, header_entries, columns, rows) -> None:
    lines = _echo_lines(header_entries)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _report_row(setup: RunSetup) -> list:
    p = setup.params
    cb = setup_bounds(setup)
    report = regimes.build_report(p, cb, setup.u0.sup)
    return [
        p.alpha, p.gamma, p.k, p.chi1, p.chi2, p.lambda1, p.lambda2, p.mu1, p.mu2, p.dim,
        cb.a_inf, cb.a_sup, cb.b_inf, cb.b_sup, setup.u0.sup,
        report.M, report.case.value, report.C0, report.Mplus, report.lower_limsup,
        report.upper_liminf, report.pointwise_persistence, report.uniform_persistence,
        report.m_tilde, report.table1_row, report.table1_threshold,
    ]


def _sweep_row(entries: dict) -> list:
    return _report_row(build_setup(entries))


def cmd_classify(args) -> int:
    entries = parse_config(args.config)
    tuples = expand_sweep(entries)
    if len(tuples) > 1:
        if args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_sweep_row, tuples))
        else:
            rows = [_sweep_row(t) for t in tuples]
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, "classify.csv")
            _write_csv(path, sorted(entries.items()), SWEEP_COLUMNS, rows)
            print(f"wrote {len(rows)} rows to {path}")
        else:
            print(",".join(SWEEP_COLUMNS))
            for row in rows:
                print(",".join(_fmt(v) for v in row))
        any_case = any(row[SWEEP_COLUMNS.index("case")] != Case.NONE.value for row in rows)
        return EXIT_OK if any_case else EXIT_NO_CASE

    setup = build_setup(tuples[0])
    cb = setup_bounds(setup)
    report = regimes.build_report(setup.params, cb, setup.u0.sup)
    print(f"case = {report.case.value}")
    print(f"satisfied cases = {[c.value for c in report.satisfied]}")
    print(f"M = {report.M:.10g}")
    if report.C0 is not None:
        print(f"C0 = {report.C0:.10g}")
    if report.band_defined:
        print(f"Mplus = {report.Mplus:.10g}")
        print(f"lower_limsup = {report.lower_limsup:.10g}")
        print(f"upper_liminf = {report.upper_liminf:.10g}")
    else:
        print("band constants: hypotheses unmet")
    print(f"pointwise persistence = {report.pointwise_persistence}")
    print(f"uniform persistence = {report.uniform_persistence}")
    if report.m_tilde is not None:
        print(f"m_tilde = {report.m_tilde:.10g}")
    print(f"table1 row {report.table1_row} column {report.table1_column}: "
          f"b_inf > {report.table1_threshold:.10g} "
          f"({'met' if cb.b_inf > report.table1_threshold else 'not met'})")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "classify.csv")
        _write_csv(path, setup.entries, SWEEP_COLUMNS, [_report_row(setup)])
        print(f"wrote {path}")
    return EXIT_OK if report.case != Case.NONE else EXIT_NO_CASE


def cmd_simulate(args) -> int:
    entries = parse_config(args.config)
    if is_swept(entries):
        raise ConfigError("simulate does not sweep; give scalar values")
    setup = build_setup(entries)
    cb = setup_bounds(setup)
    report = regimes.build_report(setup.params, cb, setup.u0.sup)
    if report.case == Case.NONE and not report.pure_diffusion and not args.force:
        print("no boundedness case holds; rerun with --force to simulate anyway")
        return EXIT_NO_CASE

    os.makedirs(args.out, exist_ok=True)
    c0_candidate = report.C0 if report.C0 is not None else max(1.0, setup.u0.sup)
    blew_up = False
    try:
        traj = evolve.integrate(setup.u0, setup.params, setup.a, setup.b,
                                setup.stepper, c0_candidate=c0_candidate)
    except BlowUpSuspected as exc:
        print(f"BlowUpSuspected: {exc}")
        traj = exc.trajectory
        blew_up = True
    except (PositivityBreach, NonFinite) as exc:
        # run failure, not a config failure: the solution left the regime
        print(f"run failed: {type(exc).__name__}: {exc}")
        with open(os.path.join(args.out, "summary.txt"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(_echo_lines(setup.entries)) + "\n"
                     f"run failed: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILED

    _write_csv(
        os.path.join(args.out, "trajectory.csv"),
        setup.entries,
        ["time", "sup_u", "inf_u", "clamp_mass", "drift_gap_max"],
        list(zip(traj.times, traj.sup_u, traj.inf_u, traj.clamp_mass, traj.drift_gap_max)),
    )
    for i, snap in enumerate(traj.snapshots):
        evolve.write_snapshot(os.path.join(args.out, f"snapshot_{i:06d}.bin"), snap)

    checks = []
    if not blew_up:
        if report.C0 is not None:
            checks.append(diagnostics.boundedness_check(traj, report))
            checks.append(diagnostics.drift_gap_check(traj, report, setup.params))
        band = diagnostics.band_check(traj, report, tol=args.tol, window_fraction=args.window)
        checks.extend(band)
        if not report.band_defined:
            print("band check skipped: hypotheses unmet")
    _write_csv(
        os.path.join(args.out, "checks.csv"),
        setup.entries,
        ["name", "lhs", "rhs", "margin", "pass"],
        [[c.name, c.lhs, c.rhs, c.margin, c.passed] for c in checks],
    )
    summary = diagnostics.format_summary(
        checks,
        header=f"case={report.case.value} window={args.window} tol={args.tol} seed={args.seed}",
    )
    with open(os.path.join(args.out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(_echo_lines(setup.entries)) + "\n" + summary + "\n")
    print(summary)
    if blew_up or any(not c.passed for c in checks):
        return EXIT_FAILED
    return EXIT_OK


def cmd_kernel(args) -> int:
    grid = make_grid(dim=1, extent=args.extent, points=args.points)
    times = [float(tok) for tok in args.times.split(",")]
    ws = spectral.workspace_for(grid)
    x = grid.axis(0)
    rows = []
    failures = 0
    for t in times:
        prof = spectral.heat_kernel_profile(args.alpha, t, grid, ws=ws)
        mass = prof.integral()
        peak = prof.sup
        boundary = abs(float(prof.values[0]))
        if abs(mass - 1.0) > 1e-8:
            failures += 1
        scaling_err = math.nan
        if t != 1.0:
            interior = np.abs(x) <= grid.extent[0] / 5.0
            scale = t ** (-1.0 / (2.0 * args.alpha))
            ref = scale * spectral.kernel_series_eval(args.alpha, 1.0, grid, scale * x[interior], ws=ws)
            scaling_err = float(np.max(np.abs(prof.values[interior] - ref)) / peak)
        rows.append([t, mass, peak, boundary / peak, scaling_err])
    header = [("alpha", repr(args.alpha)), ("extent", repr(grid.extent[0])),
              ("points", str(grid.points[0])), ("times", args.times), ("seed", str(args.seed))]
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "kernel.csv"), header,
               ["t", "mass", "peak", "tail_over_peak", "scaling_err"], rows)
    print(f"wrote {os.path.join(args.out, 'kernel.csv')}")

    if args.compare_gaussian:
        if args.alpha != 1.0:
            print("gaussian comparison needs --alpha 1")
            return EXIT_CONFIG
        worst = 0.0
        for t in times:
            prof = spectral.heat_kernel_profile(1.0, t, grid, ws=ws)
            exact = (4.0 * math.pi * t) ** -0.5 * np.exp(-x * x / (4.0 * t))
            worst = max(worst, float(np.max(np.abs(prof.values - exact))))
        print(f"gaussian max abs error = {worst:.3e}")
        if worst > 1e-6:
            failures += 1
    if args.fit_c1 > 0:
        c1 = spectral.fit_gradient_semigroup_constant(args.alpha, grid, args.fit_c1, seed=args.seed)
        print(f"gradient-semigroup constant (lower bound) = {c1:.6g}")
    return EXIT_OK if failures == 0 else EXIT_FAILED


def cmd_eigen(args) -> int:
    Ls = [float(tok) for tok in args.box_sizes.split(",")]
    sweep = sigma_sweep(Ls, args.alpha, args.a0, resolution=args.resolution)
    header = [("alpha", repr(args.alpha)), ("a0", repr(args.a0)),
              ("L", args.box_sizes), ("resolution", str(args.resolution))]
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "eigen.csv"), header,
               ["L", "kind", "resolution", "sigma_lower"],
               [[r.L, r.kind, r.resolution, r.sigma_lower] for r in sweep.rows])
    best = [b for _, b in sweep.best]
    monotone = all(b2 > b1 for b1, b2 in zip(best, best[1:]))
    below = all(b < args.a0 for b in best)
    print(f"best bounds: {[f'{b:.6f}' for b in best]}")
    print(f"monotone increasing: {monotone}; all below a0: {below}")
    if sweep.first_positive_L is not None:
        print(f"first positive bound at L = {sweep.first_positive_L}")
    print(f"wrote {os.path.join(args.out, 'eigen.csv')}")
    return EXIT_OK if monotone and below else EXIT_FAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractax",
        description="Spectral simulator and regime analysis for fractional "
                    "attraction-repulsion chemotaxis with logistic sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="evaluate the regime algebra for a config")
    p_classify.add_argument("--config", required=True)
    p_classify.add_argument("--out", default=None)
    p_classify.add_argument("--jobs", type=int, default=1)
    p_classify.set_defaults(func=cmd_classify)

    p_sim = sub.add_parser("simulate", help="integrate the system and check the claims")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--window", type=float, default=0.2)
    p_sim.add_argument("--tol", type=float, default=0.05)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--force", action="store_true")
    p_sim.set_defaults(func=cmd_simulate)

    p_kernel = sub.add_parser("kernel", help="fractional heat kernel diagnostics")
    p_kernel.add_argument("--alpha", type=float, required=True)
    p_kernel.add_argument("--times", default="0.5,1,2")
    p_kernel.add_argument("--extent", type=float, default=128.0)
    p_kernel.add_argument("--points", type=int, default=1024)
    p_kernel.add_argument("--out", default="kernel_out")
    p_kernel.add_argument("--seed", type=int, default=0)
    p_kernel.add_argument("--compare-gaussian", action="store_true")
    p_kernel.add_argument("--fit-c1", type=int, default=0,
                          help="trial count for the gradient-semigroup constant")
    p_kernel.set_defaults(func=cmd_kernel)

    p_eigen = sub.add_parser("eigen", help="variational eigenvalue lower bounds")
    p_eigen.add_argument("--alpha", type=float, required=True)
    p_eigen.add_argument("--a0", type=float, required=True)
    p_eigen.add_argument("--box-sizes", default="5,10,20,40")
    p_eigen.add_argument("--resolution", type=int, default=1500)
    p_eigen.add_argument("--out", default="eigen_out")
    p_eigen.set_defaults(func=cmd_eigen)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FractaxError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
