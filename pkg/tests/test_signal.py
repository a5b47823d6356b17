import numpy as np
import pytest

from helpers import random_smooth_field

from fractax.errors import NegativeInput
from fractax.evolve import make_state
from fractax.model import ModelParams, make_field, validate_params
from fractax.regimes import compute_M
from fractax.signal import drift_field, gradient_bound_check, solve_signal
from fractax.spectral import frac_laplacian, workspace_for


def params(**kw):
    base = dict(alpha=0.75, gamma=2.0, k=1.0, chi1=1.0, chi2=1.0,
                lambda1=1.0, lambda2=1.0, mu1=1.0, mu2=1.0, dim=1)
    return validate_params(ModelParams(**{**base, **kw}))


class TestSolveSignal:
    def test_constant_solution(self, grid1d):
        u = make_field(grid1d, np.full(grid1d.shape, 2.0))
        v = solve_signal(u, lam=4.0, mu=3.0, k=2.0)
        assert np.allclose(v.values, 3.0 * 4.0 / 4.0, atol=1e-12)

    def test_two_mode_solution(self, grid1d):
        # k = 1 makes u^k = 1 + cos directly
        xi0 = 4 * np.pi / grid1d.extent[0]
        x = grid1d.axis(0)
        u = make_field(grid1d, 1.0 + np.cos(xi0 * x))
        v = solve_signal(u, lam=2.0, mu=1.5, k=1.0)
        expect = 1.5 / 2.0 + 1.5 * np.cos(xi0 * x) / (2.0 + xi0 ** 2)
        assert np.abs(v.values - expect).max() < 1e-12

    def test_sup_bound(self, grid1d, rng):
        # lam * ||v|| <= mu * ||u||^k, the elliptic comparison bound
        for _ in range(30):
            u = random_smooth_field(grid1d, rng, nonneg=True)
            lam, mu, k = 1.7, 0.9, 2.0
            v = solve_signal(u, lam, mu, k)
            assert lam * v.sup <= mu * u.sup ** k * (1 + 1e-12)

    def test_residual(self, grid1d, rng):
        u = random_smooth_field(grid1d, rng, nonneg=True)
        lam, mu, k = 1.3, 2.0, 2.0
        v = solve_signal(u, lam, mu, k)
        lap_v = frac_laplacian(v, 1.0)
        residual = -lap_v.values - lam * v.values + mu * np.maximum(u.values, 0) ** k
        assert np.abs(residual).max() < 1e-8 * np.abs(mu * u.values ** k).max()

    def test_nonnegative_output(self, grid1d, rng):
        for _ in range(20):
            u = random_smooth_field(grid1d, rng, nonneg=True)
            v = solve_signal(u, 1.0, 1.0, 1.5)
            assert v.inf > -1e-10

    def test_negative_input_rejected(self, grid1d):
        u_vals = np.full(grid1d.shape, 1.0)
        u_vals[0] = -0.5
        u = make_field(grid1d, u_vals)
        with pytest.raises(NegativeInput):
            solve_signal(u, 1.0, 1.0, 2.0)

    def test_marginal_negativity_clamped(self, grid1d):
        u_vals = np.full(grid1d.shape, 1.0)
        u_vals[0] = -1e-12
        u = make_field(grid1d, u_vals)
        v = solve_signal(u, 1.0, 1.0, 1.5)
        assert np.isfinite(v.values).all()

    def test_monotone_in_u(self, grid1d, rng):
        # comparison principle of the elliptic solve
        for _ in range(10):
            u = random_smooth_field(grid1d, rng, nonneg=True)
            bump = random_smooth_field(grid1d, rng, nonneg=True, floor=0.0)
            bigger = make_field(grid1d, u.values + bump.values)
            v = solve_signal(u, 1.2, 1.0, 2.0)
            v_big = solve_signal(bigger, 1.2, 1.0, 2.0)
            assert (v_big.values - v.values).min() > -1e-10

    def test_linear_in_mu(self, grid1d, rng):
        u = random_smooth_field(grid1d, rng, nonneg=True)
        v1 = solve_signal(u, 1.0, 1.0, 2.0)
        v3 = solve_signal(u, 1.0, 3.0, 2.0)
        assert np.abs(v3.values - 3.0 * v1.values).max() < 1e-12

    def test_k_homogeneity(self, grid1d, rng):
        # scaling u by s scales v by s^k; s a power of two keeps it near-exact
        u = random_smooth_field(grid1d, rng, nonneg=True)
        scaled = make_field(grid1d, 4.0 * u.values)
        v = solve_signal(u, 1.0, 1.0, 2.0)
        v_scaled = solve_signal(scaled, 1.0, 1.0, 2.0)
        assert np.abs(v_scaled.values - 16.0 * v.values).max() < 1e-12 * v_scaled.sup


class TestGradientBound:
    def test_constant_has_zero_gradient(self, grid1d):
        u = make_field(grid1d, np.full(grid1d.shape, 3.0))
        rep = gradient_bound_check(u, 2.0, 1.0, 2.0)
        assert rep.lhs < 1e-12 and rep.holds

    def test_random_fields_never_violate(self, grid1d, rng):
        for i in range(200):
            u = random_smooth_field(grid1d, rng, nonneg=True)
            rep = gradient_bound_check(u, 0.5 + (i % 7) * 0.3, 1.0 + (i % 3), 1.0 + (i % 2))
            assert rep.holds

    def test_rhs_scales_as_inverse_sqrt_lambda(self, grid1d, rng):
        u = random_smooth_field(grid1d, rng, nonneg=True)
        r1 = gradient_bound_check(u, 1.0, 1.0, 2.0)
        r4 = gradient_bound_check(u, 4.0, 1.0, 2.0)
        assert r4.rhs == pytest.approx(r1.rhs / 2.0, rel=1e-14)

    def test_2d_fields(self, grid2d, rng):
        for _ in range(20):
            u = random_smooth_field(grid2d, rng, nonneg=True)
            assert gradient_bound_check(u, 1.0, 1.0, 1.0).holds


class TestDriftField:
    def test_balanced_case_vanishes_exactly(self, grid1d, rng):
        # chi1 mu1 = chi2 mu2 and equal decay rates: drift and gap are 0.0
        p = params(chi1=2.0, mu1=0.5, chi2=1.0, mu2=1.0, lambda1=1.5, lambda2=1.5)
        u = random_smooth_field(grid1d, rng, nonneg=True)
        st = make_state(u, p)
        drift, gap = drift_field(st, p)
        assert np.all(gap.values == 0.0)
        assert all(np.all(d.values == 0.0) for d in drift)

    def test_pure_attraction_gap_is_nonpositive(self, grid1d, rng):
        p = params(chi2=0.0, gamma=3.0, k=2.0)
        u = random_smooth_field(grid1d, rng, nonneg=True)
        st = make_state(u, p)
        _, gap = drift_field(st, p)
        assert gap.values.max() <= 1e-10

    def test_case_b_gap_bounded_by_M(self, grid1d, rng):
        # strict repulsion dominance: gap <= M ||u||^k
        p = params(gamma=2.0, k=2.0, chi1=0.3, mu1=1.0, lambda1=2.0,
                   chi2=1.0, mu2=1.0, lambda2=1.0)
        M = compute_M(p)
        for _ in range(20):
            u = random_smooth_field(grid1d, rng, nonneg=True)
            st = make_state(u, p)
            _, gap = drift_field(st, p)
            assert gap.values.max() <= M * u.sup ** p.k * (1 + 1e-8)
