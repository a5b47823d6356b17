import math

import numpy as np
import pytest

from fractax.errors import BandHypothesesUnmet, CaseCHypothesisViolated
from fractax.model import CoeffBounds, ModelParams, validate_params
from fractax.regimes import (
    Case,
    asymptotic_band,
    band_hypotheses_hold,
    build_report,
    case_residuals,
    classify,
    compute_C0,
    compute_M,
    is_pure_diffusion,
    persistence_check,
    satisfied_cases,
    table1_threshold,
)


def params(**kw):
    base = dict(alpha=0.75, gamma=2.0, k=1.0, chi1=1.0, chi2=1.0,
                lambda1=1.0, lambda2=1.0, mu1=1.0, mu2=1.0, dim=1)
    return validate_params(ModelParams(**{**base, **kw}))


def bounds(a_inf, a_sup=None, b_inf=1.0, b_sup=None):
    return CoeffBounds(a_inf, a_sup if a_sup is not None else a_inf,
                       b_inf, b_sup if b_sup is not None else b_inf)


def random_params(rng, gamma=None, k=None):
    k = k if k is not None else float(rng.uniform(1.0, 3.0))
    gamma = gamma if gamma is not None else float(rng.uniform(1.01, k + 2.5))
    return ModelParams(
        alpha=float(rng.uniform(0.51, 0.99)),
        gamma=gamma, k=k,
        chi1=float(rng.uniform(0.0, 2.0)),
        chi2=float(rng.uniform(0.0, 2.0)),
        lambda1=float(rng.uniform(0.1, 3.0)),
        lambda2=float(rng.uniform(0.1, 3.0)),
        mu1=float(rng.uniform(0.1, 3.0)),
        mu2=float(rng.uniform(0.1, 3.0)),
    )


def random_bounds(rng):
    a_inf = float(rng.uniform(0.05, 2.0))
    b_inf = float(rng.uniform(0.05, 3.0))
    return CoeffBounds(a_inf, a_inf * float(rng.uniform(1.0, 2.0)),
                       b_inf, b_inf * float(rng.uniform(1.0, 2.0)))


def random_band_eligible_params(rng):
    """Draw from the two band-hypothesis manifolds (they have measure zero
    in the full parameter space, so unconstrained sampling never hits them)."""
    if rng.uniform() < 0.5:
        k = float(rng.uniform(1.0, 3.0))
        return random_params(rng, gamma=k + 1.0, k=k)
    p = random_params(rng)
    chi1 = float(rng.uniform(0.0, 2.0))
    mu1 = float(rng.uniform(0.1, 3.0))
    lam = float(rng.uniform(0.1, 3.0))
    # power-of-two rescaling keeps chi2 mu2 == chi1 mu1 bit-exact
    scale = 2.0 ** int(rng.integers(-2, 3))
    gamma = p.gamma if p.gamma != p.k + 1.0 else p.k + 1.5
    return ModelParams(alpha=p.alpha, gamma=gamma, k=p.k,
                       chi1=chi1, chi2=chi1 / scale,
                       lambda1=lam, lambda2=lam, mu1=mu1, mu2=mu1 * scale)


class TestComputeM:
    def test_balanced_is_zero(self):
        p = params(chi1=2.0, mu1=0.5, chi2=1.0, mu2=1.0, lambda1=1.5, lambda2=1.5)
        assert compute_M(p) == 0.0

    def test_repulsion_dominant_closed_form(self):
        # chi2 lam2 mu2 >= chi1 lam1 mu1 and lam1 >= lam2 collapses to
        # chi2 mu2 - chi1 mu1
        p = params(chi1=1.0, mu1=1.0, lambda1=1.0, chi2=2.0, mu2=1.0, lambda2=1.0)
        assert compute_M(p) == 1.0

    def test_mixed_example(self):
        # both branch expressions evaluate to 1, so the min is 1
        p = params(chi1=1.0, mu1=1.0, lambda1=2.0, chi2=2.0, mu2=1.0, lambda2=1.0)
        assert compute_M(p) == 1.0

    def test_nonnegative_always(self):
        rng = np.random.default_rng(7)
        for _ in range(2000):
            assert compute_M(random_params(rng)) >= 0.0

    def test_depends_on_products_only(self):
        # rescale (chi, mu) -> (s chi, mu / s) with s a power of two: the
        # products are bit-identical, so M must be too
        rng = np.random.default_rng(8)
        for _ in range(200):
            p = random_params(rng)
            q = ModelParams(alpha=p.alpha, gamma=p.gamma, k=p.k,
                            chi1=p.chi1 * 4.0, chi2=p.chi2 * 0.5,
                            lambda1=p.lambda1, lambda2=p.lambda2,
                            mu1=p.mu1 / 4.0, mu2=p.mu2 / 0.5)
            assert compute_M(p) == compute_M(q)


class TestClassify:
    def test_case_a_example(self):
        p = params(gamma=3.0, k=2.0, chi1=0.0, chi2=1.0, mu2=1.0, lambda2=1.0)
        cb = bounds(0.5, 0.5, 1.0, 1.0)
        res = case_residuals(p, cb, 0.5)
        assert res["M"] == 1.0
        assert res["a"] == pytest.approx(1.0)
        assert classify(p, cb, 0.5) == Case.A

    def test_case_b_strict(self):
        p = params(gamma=2.0, k=2.0, chi1=0.3, lambda1=2.0, chi2=1.0, lambda2=1.0)
        assert classify(p, bounds(1.0, 1.0, 1.4, 1.4), 0.8) == Case.B

    def test_first_match_wins_on_overlap(self):
        # balanced couplings with gamma < k+1 satisfy both (b) and (d)
        p = params(gamma=2.0, k=2.0, chi1=0.8, chi2=0.8, lambda1=2.0, lambda2=2.0)
        cb = bounds(1.0, 1.2, 1.3, 1.7)
        assert classify(p, cb, 1.0) == Case.B
        assert Case.D in satisfied_cases(p, cb, 1.0)

    def test_case_c_reachable_when_b_fails(self):
        p = params(gamma=2.0, k=2.0, chi1=0.5, lambda1=1.0, chi2=0.25, lambda2=2.0)
        cb = bounds(0.4, 0.4, 1.0, 1.0)
        assert classify(p, cb, 0.6) == Case.C

    def test_none_when_nothing_holds(self):
        p = params(gamma=2.0, k=2.0, chi1=3.0, chi2=0.0)
        cb = bounds(1.0, 1.0, 0.1, 0.1)
        assert classify(p, cb, 2.0) == Case.NONE


class TestComputeC0:
    def test_pure_diffusion_returns_initial_sup(self):
        p = params(chi1=0.0, chi2=0.0)
        cb = CoeffBounds(0.0, 0.0, 0.0, 0.0)
        assert is_pure_diffusion(p, cb)
        assert compute_C0(p, cb, 0.37, Case.NONE) == 0.37

    def test_case_a_example(self):
        # a_sup = 1, damping denominator 2, k = 2: the third argument is
        # sqrt(1/2) < 1, so C0 = 1
        p = params(gamma=3.0, k=2.0, chi1=1.0, chi2=1.0)
        cb = bounds(1.0, 1.0, 2.0, 2.0)
        assert compute_M(p) == 0.0
        assert compute_C0(p, cb, 0.5, Case.A) == 1.0

    def test_case_b_equal_ratio(self):
        p = params(gamma=2.0, k=2.0, chi1=0.3, lambda1=2.0, chi2=1.0, lambda2=1.0)
        cb = bounds(1.3, 1.3, 1.3, 1.3)
        assert compute_C0(p, cb, 0.7, Case.B) == 1.0
        assert compute_C0(p, cb, 1.9, Case.B) == 1.9

    def test_case_c_ceiling_enforced(self):
        p = params(gamma=2.0, k=2.0, chi1=0.5, lambda1=1.0, chi2=0.25, lambda2=2.0)
        cb = bounds(0.4, 0.4, 1.0, 1.0)
        ceiling = math.sqrt((1.0 - 0.4) / 0.5)
        assert compute_C0(p, cb, 0.6, Case.C) == pytest.approx(max(1.0, ceiling))
        with pytest.raises(CaseCHypothesisViolated):
            compute_C0(p, cb, ceiling * 1.01, Case.C)


class TestTable1:
    def test_row1_thresholds(self):
        p = params(gamma=3.0, k=2.0, chi1=0.5, chi2=1.0)
        cell = table1_threshold(p, bounds(1.0, 1.0, 1.0, 1.0))
        assert (cell.row, cell.column, cell.threshold) == (1, "A", 0.0)
        p_lt = params(gamma=2.0, k=2.0, chi1=0.5, chi2=1.0)
        cell = table1_threshold(p_lt, bounds(1.0, 1.3, 1.0, 1.0))
        assert (cell.row, cell.column) == (1, "C")
        assert cell.threshold == pytest.approx(1.3 + 1.0)

    def test_row4_thresholds(self):
        p = params(gamma=3.0, k=2.0, chi1=1.0, mu1=1.0, lambda1=1.0,
                   chi2=0.4, mu2=1.0, lambda2=2.0)
        cell = table1_threshold(p, bounds(1.0, 1.0, 1.0, 1.0))
        assert (cell.row, cell.column) == (4, "A")
        assert cell.threshold == pytest.approx(1.0 - 0.4)

    def test_sign_ties_agree_across_rows(self):
        # chi2 lam2 mu2 == chi1 lam1 mu1 with lam1 <= lam2 matches row 2
        # first; its threshold equals row 4's on the tie
        p = params(gamma=3.0, k=2.0, chi1=1.0, mu1=1.0, lambda1=1.0,
                   chi2=0.5, mu2=1.0, lambda2=2.0)
        cell = table1_threshold(p, bounds(1.0, 1.0, 1.0, 1.0))
        assert cell.row == 2
        assert cell.threshold == pytest.approx(1.0 * (1.0 - 0.5))
        assert cell.threshold == pytest.approx(p.chi1 * p.mu1 - p.chi2 * p.mu2)

    @pytest.mark.parametrize("gamma,k", [(3.0, 2.0), (2.0, 2.0)])
    def test_cell_matches_theorem_inequality(self, gamma, k):
        # oracle: evaluate the theorem-side residual through compute_M and
        # compare the two boolean verdicts over a randomized sweep
        rng = np.random.default_rng(hash((gamma, k)) % 2 ** 32)
        for _ in range(20000):
            p = random_params(rng, gamma=gamma, k=k)
            cb = random_bounds(rng)
            cell = table1_threshold(p, cb)
            table_says = cb.b_inf > cell.threshold
            M = compute_M(p)
            if cell.column == "A":
                theorem_says = cb.b_inf + p.chi2 * p.mu2 - p.chi1 * p.mu1 - M > 0.0
            else:
                theorem_says = cb.b_inf - cb.a_sup - M - p.chi1 * p.mu1 > 0.0
            assert table_says == theorem_says


class TestAsymptoticBand:
    def test_gamma_equal_branch_example(self):
        p = params(gamma=3.0, k=2.0, chi1=1.0, chi2=1.0)
        cb = bounds(1.0, 1.0, 2.0, 2.0)
        band = asymptotic_band(p, cb, C0=1.0)
        assert band.Mplus == pytest.approx(math.sqrt(0.5))

    def test_gamma_neq_branch(self):
        p = params(gamma=2.0, k=2.0, chi1=0.8, chi2=0.8, lambda1=2.0, lambda2=2.0)
        cb = bounds(1.0, 1.2, 1.3, 1.7)
        band = asymptotic_band(p, cb, C0=1.0)
        assert band.Mplus == pytest.approx(1.2 / 1.3)
        assert band.lower_limsup == pytest.approx(1.0 / 1.7)
        assert band.upper_liminf == pytest.approx(1.2 / 1.3)

    def test_collapse_for_homogeneous_logistic(self):
        p = params(gamma=2.0, k=1.0, chi1=0.0, chi2=0.0)
        cb = bounds(1.0, 1.0, 2.0, 2.0)
        band = asymptotic_band(p, cb, C0=1.0)
        assert band.Mplus == band.lower_limsup == band.upper_liminf == 0.5

    def test_branches_agree_at_boundary(self):
        # balanced premises with gamma = k+1: both branch formulas coincide
        p = params(gamma=3.0, k=2.0, chi1=0.7, chi2=0.7)
        cb = bounds(0.9, 1.1, 1.2, 1.5)
        band = asymptotic_band(p, cb, C0=1.0)
        assert band.Mplus == pytest.approx((cb.a_sup / cb.b_inf) ** (1.0 / (p.gamma - 1.0)))

    def test_hypotheses_enforced(self):
        p = params(gamma=2.0, k=2.0, chi1=0.5, lambda1=1.0, chi2=0.25, lambda2=2.0)
        with pytest.raises(BandHypothesesUnmet):
            asymptotic_band(p, bounds(0.4, 0.4, 1.0, 1.0), C0=1.1)


class TestPersistence:
    def test_no_attraction_gamma_equal(self):
        # chi1 = 0 collapses the floor to (a_inf / (b_sup + chi2 mu2))^(1/k)
        p = params(gamma=2.0, k=1.0, chi1=0.0, chi2=0.5)
        cb = bounds(0.8, 1.2, 1.3, 1.7)
        rep = persistence_check(p, cb)
        assert rep.pointwise and rep.uniform
        assert rep.m_tilde == pytest.approx(0.8 / (1.7 + 0.5), rel=1e-12)

    def test_no_attraction_gamma_neq(self):
        p = params(gamma=3.0, k=1.0, chi1=0.0, chi2=0.0)
        cb = bounds(0.8, 1.2, 1.3, 1.7)
        rep = persistence_check(p, cb)
        assert rep.uniform
        assert rep.m_tilde == pytest.approx((0.8 / 1.7) ** 0.5, rel=1e-12)

    def test_floor_positive_whenever_uniform(self):
        rng = np.random.default_rng(11)
        seen = 0
        for _ in range(20000):
            p = random_band_eligible_params(rng)
            cb = random_bounds(rng)
            rep = persistence_check(p, cb)
            if rep.uniform:
                seen += 1
                assert rep.m_tilde is not None and rep.m_tilde > 0.0
            elif rep.m_tilde is not None:
                pytest.fail("floor reported without uniform persistence")
        assert seen > 100

    def test_floor_below_band_ceiling(self):
        # m_tilde <= Mplus whenever both are defined
        rng = np.random.default_rng(12)
        seen = 0
        for _ in range(10000):
            p = random_band_eligible_params(rng)
            cb = random_bounds(rng)
            if not band_hypotheses_hold(p, cb):
                continue
            rep = persistence_check(p, cb)
            if not rep.uniform:
                continue
            band = asymptotic_band(p, cb, C0=1.0)
            assert rep.m_tilde <= band.Mplus * (1 + 1e-12)
            seen += 1
        assert seen > 100

    def test_strong_attraction_blocks_uniform(self):
        p = params(gamma=2.0, k=1.0, chi1=5.0, chi2=0.0)
        cb = bounds(0.5, 1.5, 6.0, 6.0)
        rep = persistence_check(p, cb)
        assert rep.pointwise
        assert not rep.uniform and rep.m_tilde is None


class TestRegimeReport:
    def test_bit_identical_reports(self):
        p = params(gamma=3.0, k=2.0, chi1=0.5, chi2=1.0)
        cb = bounds(0.7, 1.3, 1.2, 1.2)
        r1 = build_report(p, cb, 1.0)
        r2 = build_report(p, cb, 1.0)
        assert r1 == r2

    def test_c0_dominates_initial_sup(self):
        rng = np.random.default_rng(13)
        for _ in range(3000):
            p = random_params(rng)
            cb = random_bounds(rng)
            u0_sup = float(rng.uniform(0.1, 1.5))
            rep = build_report(p, cb, u0_sup)
            if rep.case != Case.NONE and rep.C0 is not None and not rep.pure_diffusion:
                assert rep.C0 >= max(1.0, u0_sup)

    def test_band_ceiling_below_c0(self):
        rng = np.random.default_rng(14)
        for _ in range(3000):
            p = random_params(rng)
            cb = random_bounds(rng)
            rep = build_report(p, cb, float(rng.uniform(0.1, 1.5)))
            if rep.band_defined and rep.C0 is not None and rep.case == Case.A:
                assert rep.Mplus <= rep.C0 * (1 + 1e-12)

    def test_report_row_serializes(self):
        p = params(gamma=2.0, k=2.0, chi1=0.8, chi2=0.8, lambda1=2.0, lambda2=2.0)
        cb = bounds(1.0, 1.2, 1.3, 1.7)
        rep = build_report(p, cb, 1.0)
        assert rep.case == Case.B
        assert Case.D in rep.satisfied
        assert rep.M == 0.0
        assert rep.band_defined
