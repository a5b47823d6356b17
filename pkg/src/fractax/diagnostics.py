"""Estimators connecting simulation output to the theorem statements.

All checks are pure functions of recorded trajectory data; none re-simulate.
The asymptotic claims are estimated on a trailing time window whose fraction
is explicit in every report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RadiusTooLarge, WindowTooShort
from .model import Field, ModelParams
from .regimes import RegimeReport
from .evolve import Trajectory

MIN_WINDOW_SAMPLES = 50


@dataclass(frozen=True)
class TailStats:
    limsup_est: float
    liminf_est: float
    window_start: float


def tail_stats(traj: Trajectory, window_fraction: float = 0.2) -> TailStats:
    """Trailing-window surrogates for limsup sup u and liminf inf u."""
    if not (0.0 < window_fraction < 1.0):
        raise WindowTooShort(f"window_fraction must lie in (0, 1), got {window_fraction}")
    t_end = traj.times[-1]
    start = t_end - window_fraction * (t_end - traj.times[0])
    mask = traj.times >= start
    if int(mask.sum()) < MIN_WINDOW_SAMPLES:
        raise WindowTooShort(
            f"trailing window holds {int(mask.sum())} samples; need >= {MIN_WINDOW_SAMPLES}"
        )
    return TailStats(
        limsup_est=float(traj.sup_u[mask].max()),
        liminf_est=float(traj.inf_u[mask].min()),
        window_start=float(start),
    )


@dataclass(frozen=True)
class CheckResult:
    """One verdict row: name, both sides, signed slack relative to rhs."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


def _upper_check(name: str, lhs: float, rhs: float, tol: float) -> CheckResult:
    allowed = rhs * (1.0 + tol)
    denom = abs(rhs) if rhs != 0.0 else 1.0
    return CheckResult(name, lhs, rhs, (allowed - lhs) / denom, lhs <= allowed)


def _lower_check(name: str, lhs: float, rhs: float, tol: float) -> CheckResult:
    allowed = rhs * (1.0 - tol)
    denom = abs(rhs) if rhs != 0.0 else 1.0
    return CheckResult(name, lhs, rhs, (lhs - allowed) / denom, lhs >= allowed)


def band_check(
    traj: Trajectory,
    report: RegimeReport,
    tol: float = 0.05,
    window_fraction: float = 0.2,
) -> list[CheckResult]:
    """Verdicts for the three asymptotic-band inequalities.

    Empty when the report carries no band constants (hypotheses unmet);
    callers decide whether absence is acceptable.
    """
    if not report.band_defined:
        return []
    stats = tail_stats(traj, window_fraction)
    return [
        _upper_check("limsup_le_Mplus", stats.limsup_est, report.Mplus, tol),
        _lower_check("limsup_ge_lower", stats.limsup_est, report.lower_limsup, tol),
        _upper_check("liminf_le_upper", stats.liminf_est, report.upper_liminf, tol),
    ]


def drift_gap_check(traj: Trajectory, report: RegimeReport, p: ModelParams) -> CheckResult:
    """max over the run of (chi2 lam2 v2 - chi1 lam1 v1) against M * C0^k."""
    lhs = float(traj.drift_gap_max.max())
    rhs = report.M * (report.C0 ** p.k if report.C0 is not None else math.nan)
    return _upper_check("drift_gap_le_MC0k", lhs, rhs, 1e-6)


def boundedness_check(traj: Trajectory, report: RegimeReport, tol: float = 0.01) -> CheckResult:
    """max over the run of sup u against C0."""
    lhs = float(traj.sup_u.max())
    rhs = report.C0 if report.C0 is not None else math.inf
    return _upper_check("sup_u_le_C0", lhs, rhs, tol)


def kato_integral(f: Field, r: float, alpha: float) -> float:
    """Numeric Kato functional: sup over centers of the singular ball integral.

    The integrand near each center is regularized by freezing |f| at the
    center over the half-spacing cell and integrating the kernel there in
    closed form; remaining nodes carry piecewise-exact (1D) or midpoint (2D)
    radial weights.  Evaluated for every grid center at once as a circular
    convolution.
    """
    if not (0.5 < alpha < 1.0):
        raise RadiusTooLarge(f"Kato integral defined for alpha in (1/2, 1), got {alpha}")
    grid = f.grid
    if not r > 0.0:
        raise RadiusTooLarge(f"radius must be positive, got {r}")
    if any(r > ext for ext in grid.extent):
        raise RadiusTooLarge(f"radius {r} exceeds half the domain extent")
    power = 2.0 * alpha - 1.0
    absf = np.abs(f.values)
    if grid.dim == 1:
        n = grid.points[0]
        h = grid.spacing[0]
        # weights[j]: exact integral of |s|^(2a-2) over the cell of node j,
        # intersected with [0, r]; symmetric in +-j
        dist = np.minimum(np.arange(n), n - np.arange(n)) * h
        lo = np.maximum(dist - 0.5 * h, 0.0)
        hi = np.minimum(dist + 0.5 * h, r)
        w = np.where(hi > lo, (hi ** power - lo ** power) / power, 0.0)
        conv = np.fft.ifft(np.fft.fft(absf) * np.fft.fft(w)).real
        return float(conv.max())
    # 2D: closed-form disc around the center, midpoint weights elsewhere
    n0, n1 = grid.points
    h0, h1 = grid.spacing
    d0 = np.minimum(np.arange(n0), n0 - np.arange(n0)) * h0
    d1 = np.minimum(np.arange(n1), n1 - np.arange(n1)) * h1
    dd = np.sqrt(d0[:, None] ** 2 + d1[None, :] ** 2)
    cell = h0 * h1
    w = np.zeros((n0, n1))
    inside = (dd > 0.0) & (dd <= r)
    w[inside] = cell / dd[inside] ** (3.0 - 2.0 * alpha)
    r0 = 0.5 * min(h0, h1)
    w[0, 0] = 2.0 * math.pi * r0 ** power / power
    conv = np.fft.ifft2(np.fft.fft2(absf) * np.fft.fft2(w)).real
    return float(conv.max())


def kato_drift_bound(p: ModelParams, u_sup: float, r: float, alpha: float) -> float:
    """Closed-form ceiling for the Kato integral of the taxis drift."""
    factor = p.chi1 * p.mu1 / math.sqrt(p.lambda1) + p.chi2 * p.mu2 / math.sqrt(p.lambda2)
    return factor * math.sqrt(p.dim) * u_sup ** p.k * r ** (2.0 * alpha - 1.0) / (2.0 * alpha - 1.0)


def format_summary(checks: list[CheckResult], header: str = "") -> str:
    lines = []
    if header:
        lines.append(header)
    width = max((len(c.name) for c in checks), default=4)
    for c in checks:
        verdict = "PASS" if c.passed else "FAIL"
        lines.append(
            f"{c.name:<{width}}  lhs={c.lhs:.6g}  rhs={c.rhs:.6g}  "
            f"margin={c.margin:+.4f}  {verdict}"
        )
    return "\n".join(lines)
