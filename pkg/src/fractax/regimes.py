"""Closed-form regime algebra: boundedness cases, C0, bands, persistence.

Every quantity here is a pure function of the scalar parameters, the exact
coefficient bounds, and sup u0.  Equality premises (balanced couplings,
equal decay rates) mean exact floating-point equality.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BandHypothesesUnmet, CaseCHypothesisViolated
from .model import CoeffBounds, ModelParams


class Case(enum.Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    NONE = "none"


def compute_M(p: ModelParams) -> float:
    """Drift-gap constant: the minimum of the two positive-part combinations.

    M = min{ (1/lam1)[(chi2 mu2 lam2 - chi1 mu1 lam1)_+ + chi2 mu2 (lam1 - lam2)_+],
             (1/lam2)[(chi2 mu2 lam2 - chi1 mu1 lam1)_+ + chi1 mu1 (lam1 - lam2)_+] }.

    Always nonnegative, and a function of chi_i*mu_i and lam_i only.
    """
    cross = max(p.chi2 * p.mu2 * p.lambda2 - p.chi1 * p.mu1 * p.lambda1, 0.0)
    lam_gap = max(p.lambda1 - p.lambda2, 0.0)
    first = (cross + p.chi2 * p.mu2 * lam_gap) / p.lambda1
    second = (cross + p.chi1 * p.mu1 * lam_gap) / p.lambda2
    return min(first, second)


def is_pure_diffusion(p: ModelParams, cb: CoeffBounds) -> bool:
    """The sanctioned degenerate configuration: no taxis, no growth, no decay."""
    return p.chi1 == 0.0 and p.chi2 == 0.0 and cb.a_sup == 0.0 and cb.b_sup == 0.0


def case_residuals(p: ModelParams, cb: CoeffBounds, u0_sup: float) -> dict[str, float]:
    """Signed residual of every case hypothesis (positive = satisfied).

    The displayed residual per case is the minimum over its inequality
    chain; case (c) additionally keeps its strict damping part and its
    non-strict initial-data part under separate keys because they carry
    different boundary semantics.
    """
    M = compute_M(p)
    chi_gap = p.chi2 * p.mu2 - p.chi1 * p.mu1
    res_a = cb.b_inf + chi_gap - M if p.gamma >= p.k + 1.0 else -math.inf
    if p.gamma < p.k + 1.0:
        res_b = min(
            p.chi2 * p.lambda2 * p.mu2 - p.chi1 * p.lambda1 * p.mu1,
            p.lambda1 - p.lambda2,
        )
    else:
        res_b = -math.inf
    c_star = _case_c_ceiling(cb, M, p)
    if p.gamma < p.k + 1.0:
        res_c_damping = cb.b_inf - cb.a_sup - M - p.chi1 * p.mu1
        res_c_initial = c_star - u0_sup
    else:
        res_c_damping = -math.inf
        res_c_initial = -math.inf
    if p.gamma != p.k + 1.0:
        res_d = -max(abs(chi_gap), abs(p.lambda1 - p.lambda2))
    else:
        res_d = -math.inf
    return {
        "a": res_a,
        "b": res_b,
        "c": min(res_c_damping, res_c_initial),
        "c_damping": res_c_damping,
        "c_initial": res_c_initial,
        "d": res_d,
        "M": M,
        "c_star": c_star,
    }


def _case_c_ceiling(cb: CoeffBounds, M: float, p: ModelParams) -> float:
    denom = M + p.chi1 * p.mu1
    diff = cb.b_inf - cb.a_sup
    if denom == 0.0:
        return math.inf if diff > 0.0 else 0.0
    if diff <= 0.0:
        return 0.0
    return (diff / denom) ** (1.0 / p.k)


def _case_holds(name: str, residuals: dict[str, float]) -> bool:
    if name == "a":
        return residuals["a"] > 0.0
    if name == "b":
        return residuals["b"] >= 0.0
    if name == "c":
        # damping inequality is strict; the initial-data ceiling is not
        return residuals["c_damping"] > 0.0 and residuals["c_initial"] >= 0.0
    return residuals["d"] >= 0.0


def satisfied_cases(p: ModelParams, cb: CoeffBounds, u0_sup: float) -> tuple[Case, ...]:
    res = case_residuals(p, cb, u0_sup)
    return tuple(c for c in (Case.A, Case.B, Case.C, Case.D) if _case_holds(c.value, res))


def classify(p: ModelParams, cb: CoeffBounds, u0_sup: float) -> Case:
    """First satisfied case in the order (a), (b), (c), (d), else NONE.

    The alternatives overlap; first-match-wins is the documented precedence,
    and `case_residuals` exposes every satisfied hypothesis set alongside it.
    """
    res = case_residuals(p, cb, u0_sup)
    for case in (Case.A, Case.B, Case.C, Case.D):
        if _case_holds(case.value, res):
            return case
    return Case.NONE


def compute_C0(p: ModelParams, cb: CoeffBounds, u0_sup: float, case: Case) -> float:
    """Sup-norm bound C0 matched to the classified case.

    Pure diffusion degenerates to sup u0.  Case (c) uses the largest
    admissible self-consistent value C* = ((b_inf - a_sup)/(M + chi1 mu1))^(1/k)
    and rejects initial data above it.
    """
    if is_pure_diffusion(p, cb):
        return u0_sup
    if case == Case.NONE:
        raise CaseCHypothesisViolated("no boundedness case holds; C0 undefined")
    M = compute_M(p)
    if case == Case.A:
        denom = cb.b_inf + p.chi2 * p.mu2 - p.chi1 * p.mu1 - M
        return max(1.0, u0_sup, (cb.a_sup / denom) ** (1.0 / p.k))
    if case in (Case.B, Case.D):
        return max(1.0, u0_sup, (cb.a_sup / cb.b_inf) ** (1.0 / (p.gamma - 1.0)))
    c_star = _case_c_ceiling(cb, M, p)
    if u0_sup > c_star:
        raise CaseCHypothesisViolated(
            f"sup u0 = {u0_sup:.6g} exceeds the case-(c) ceiling {c_star:.6g}"
        )
    return max(1.0, u0_sup, c_star)


@dataclass(frozen=True)
class Table1Cell:
    """Matched threshold cell: row by coupling/decay signs, column by gamma."""

    row: int
    column: str           # "A" for gamma >= k+1, "C" for gamma < k+1
    threshold: float      # boundedness requires b_inf > threshold


def table1_threshold(p: ModelParams, cb: CoeffBounds) -> Table1Cell:
    """Row-wise closed form of the boundedness threshold on b_inf.

    Rows are selected by the signs of chi2 lam2 mu2 - chi1 lam1 mu1 and
    lam1 - lam2 (ties match the first row in order; the thresholds agree on
    ties).  Column A covers gamma >= k+1, column C covers gamma < k+1.
    """
    s1 = p.chi2 * p.lambda2 * p.mu2 - p.chi1 * p.lambda1 * p.mu1
    s2 = p.lambda1 - p.lambda2
    c1m1 = p.chi1 * p.mu1
    c2m2 = p.chi2 * p.mu2
    if s1 >= 0.0 and s2 >= 0.0:
        row = 1
        thr_a = 0.0
        thr_c = cb.a_sup + c2m2
    elif s1 >= 0.0 and s2 <= 0.0:
        row = 2
        thr_a = c1m1 * (1.0 - p.lambda1 / p.lambda2)
        thr_c = cb.a_sup + c1m1 * (1.0 - p.lambda1 / p.lambda2) + c2m2
    elif s1 <= 0.0 and s2 >= 0.0:
        row = 3
        thr_a = c1m1 - c2m2 * p.lambda2 / p.lambda1
        thr_c = cb.a_sup + c2m2 * (1.0 - p.lambda2 / p.lambda1) + c1m1
    else:
        row = 4
        thr_a = c1m1 - c2m2
        thr_c = cb.a_sup + c1m1
    if p.gamma >= p.k + 1.0:
        return Table1Cell(row=row, column="A", threshold=thr_a)
    return Table1Cell(row=row, column="C", threshold=thr_c)


def band_hypotheses_hold(p: ModelParams, cb: CoeffBounds) -> bool:
    if cb.a_inf <= 0.0 or cb.b_inf <= 0.0:
        return False
    if p.gamma == p.k + 1.0:
        return cb.b_inf + p.chi2 * p.mu2 - p.chi1 * p.mu1 - compute_M(p) > 0.0
    return p.chi2 * p.mu2 == p.chi1 * p.mu1 and p.lambda1 == p.lambda2


@dataclass(frozen=True)
class BandConstants:
    """Asymptotic-band constants: upper limsup, lower limsup, upper liminf."""

    Mplus: float
    lower_limsup: float
    upper_liminf: float


def asymptotic_band(p: ModelParams, cb: CoeffBounds, C0: float) -> BandConstants:
    """Evaluate the band constants on the branch selected by gamma vs k+1.

    For gamma = k+1 the liminf bound is the min of the general display and
    the balanced-coupling variant (denominator b_inf), which applies when
    chi2 mu2 >= chi1 mu1; the variant never improves on the general bound,
    so the min is taken for faithfulness, not effect.
    """
    if not band_hypotheses_hold(p, cb):
        raise BandHypothesesUnmet(
            "need gamma = k+1 with positive damping residual, or gamma != k+1 "
            "with chi2 mu2 = chi1 mu1 and lambda1 = lambda2"
        )
    M = compute_M(p)
    chi_gap = p.chi2 * p.mu2 - p.chi1 * p.mu1
    if p.gamma == p.k + 1.0:
        mplus = (cb.a_sup / (cb.b_inf + chi_gap - M)) ** (1.0 / p.k)
        lower = (cb.a_inf / (cb.b_sup + p.chi2 * p.mu2)) ** (1.0 / p.k)
        upper = ((cb.a_sup + M * C0 ** p.k) / (cb.b_inf + chi_gap)) ** (1.0 / p.k)
        if chi_gap >= 0.0:
            upper = min(upper, ((cb.a_sup + M * C0 ** p.k) / cb.b_inf) ** (1.0 / p.k))
        return BandConstants(Mplus=mplus, lower_limsup=lower, upper_liminf=upper)
    inv = 1.0 / (p.gamma - 1.0)
    return BandConstants(
        Mplus=(cb.a_sup / cb.b_inf) ** inv,
        lower_limsup=(cb.a_inf / cb.b_sup) ** inv,
        upper_liminf=(cb.a_sup / cb.b_inf) ** inv,
    )


@dataclass(frozen=True)
class PersistenceReport:
    pointwise: bool
    uniform: bool
    m_tilde: float | None


def persistence_check(p: ModelParams, cb: CoeffBounds) -> PersistenceReport:
    """Pointwise and uniform persistence with the explicit floor m_tilde.

    Pointwise needs the band hypotheses.  Uniform additionally needs the
    floor's numerator to be positive:

    * gamma = k+1:  b_inf - (1 + a_sup/a_inf) chi1 mu1 + chi2 mu2 - M > 0,
      giving m_tilde = (a_inf (b_inf - (1 + a_sup/a_inf) chi1 mu1 + chi2 mu2 - M)
      / ((b_sup - chi1 mu1 + chi2 mu2)(b_inf - chi1 mu1 + chi2 mu2 - M)))^(1/k).
    * gamma != k+1: b_inf^(k/(gamma-1)) > (a_sup^(k/(gamma-1)) / a_inf) chi1 mu1,
      giving m_tilde = (a_inf (b_inf^q - chi1 mu1 a_sup^q / a_inf)
      / (b_sup b_inf^q))^(1/(gamma-1)) with q = k/(gamma-1).

    The gamma = k+1 gate keeps the plus sign on M that the floor derivation
    requires (the minus-sign variant can leave the floor undefined); the
    residual below is therefore slightly stronger than the headline
    inequality and guarantees m_tilde > 0 whenever uniform is reported.
    """
    pointwise = band_hypotheses_hold(p, cb)
    if not pointwise:
        return PersistenceReport(pointwise=False, uniform=False, m_tilde=None)
    if cb.a_inf <= 0.0:
        return PersistenceReport(pointwise=pointwise, uniform=False, m_tilde=None)
    M = compute_M(p)
    c1m1 = p.chi1 * p.mu1
    c2m2 = p.chi2 * p.mu2
    if p.gamma == p.k + 1.0:
        numerator = cb.b_inf - (1.0 + cb.a_sup / cb.a_inf) * c1m1 + c2m2 - M
        if numerator <= 0.0:
            return PersistenceReport(pointwise=True, uniform=False, m_tilde=None)
        m_tilde = (
            cb.a_inf * numerator
            / ((cb.b_sup - c1m1 + c2m2) * (cb.b_inf - c1m1 + c2m2 - M))
        ) ** (1.0 / p.k)
        return PersistenceReport(pointwise=True, uniform=True, m_tilde=m_tilde)
    q = p.k / (p.gamma - 1.0)
    if cb.b_inf ** q <= (cb.a_sup ** q / cb.a_inf) * c1m1:
        return PersistenceReport(pointwise=True, uniform=False, m_tilde=None)
    m_tilde = (
        cb.a_inf * (cb.b_inf ** q - c1m1 * cb.a_sup ** q / cb.a_inf)
        / (cb.b_sup * cb.b_inf ** q)
    ) ** (1.0 / (p.gamma - 1.0))
    return PersistenceReport(pointwise=True, uniform=True, m_tilde=m_tilde)


@dataclass(frozen=True)
class RegimeReport:
    """Everything the theorems say about one parameter tuple."""

    M: float
    case: Case
    satisfied: tuple[Case, ...]
    residuals: tuple[tuple[str, float], ...]
    pure_diffusion: bool
    u0_sup: float
    C0: float | None
    Mplus: float | None
    lower_limsup: float | None
    upper_liminf: float | None
    band_defined: bool
    pointwise_persistence: bool
    uniform_persistence: bool
    m_tilde: float | None
    table1_row: int
    table1_column: str
    table1_threshold: float


def build_report(p: ModelParams, cb: CoeffBounds, u0_sup: float) -> RegimeReport:
    """Assemble the full regime report; pure with bit-identical output."""
    res = case_residuals(p, cb, u0_sup)
    case = classify(p, cb, u0_sup)
    pure = is_pure_diffusion(p, cb)
    C0 = None
    if case != Case.NONE or pure:
        try:
            C0 = compute_C0(p, cb, u0_sup, case)
        except CaseCHypothesisViolated:
            C0 = None
    band = None
    if C0 is not None and not pure and band_hypotheses_hold(p, cb):
        band = asymptotic_band(p, cb, C0)
    if pure or cb.a_inf <= 0.0 or cb.b_inf <= 0.0:
        persistence = PersistenceReport(pointwise=False, uniform=False, m_tilde=None)
    else:
        persistence = persistence_check(p, cb)
    cell = table1_threshold(p, cb)
    return RegimeReport(
        M=res["M"],
        case=case,
        satisfied=satisfied_cases(p, cb, u0_sup),
        residuals=tuple((k, res[k]) for k in ("a", "b", "c", "d")),
        pure_diffusion=pure,
        u0_sup=u0_sup,
        C0=C0,
        Mplus=band.Mplus if band else None,
        lower_limsup=band.lower_limsup if band else None,
        upper_liminf=band.upper_liminf if band else None,
        band_defined=band is not None,
        pointwise_persistence=persistence.pointwise,
        uniform_persistence=persistence.uniform,
        m_tilde=persistence.m_tilde,
        table1_row=cell.row,
        table1_column=cell.column,
        table1_threshold=cell.threshold,
    )
