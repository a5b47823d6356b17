"""Elliptic signal solves and the drift quantities derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeInput, NonPositiveLambda
from .model import Field, ModelParams, State, make_field
from .spectral import SpectralWorkspace, workspace_for

DEFAULT_POSITIVITY_TOL = 1e-10


def production_power(values: np.ndarray, k: float, positivity_tol: float = DEFAULT_POSITIVITY_TOL) -> np.ndarray:
    """Pointwise u^k with the positivity clamp applied first.

    Values in ``[-tol * ||u||_inf, 0)`` evaluate to 0 so real powers stay
    real; anything more negative is a genuine positivity violation.
    """
    floor = -positivity_tol * max(1.0, float(np.abs(values).max()))
    mn = float(values.min())
    if mn < floor:
        raise NegativeInput(f"min u = {mn:.3e} below positivity tolerance {floor:.3e}")
    clamped = np.maximum(values, 0.0)
    if k == 1.0:
        return clamped
    if k == int(k):
        return clamped ** int(k)
    return clamped ** k


def solve_signal(
    u: Field,
    lam: float,
    mu: float,
    k: float,
    ws: SpectralWorkspace | None = None,
    positivity_tol: float = DEFAULT_POSITIVITY_TOL,
) -> Field:
    """Solve 0 = Laplacian(v) - lam*v + mu*u^k, i.e. v = mu*(lam*I - Lap)^(-1) u^k."""
    if not lam > 0.0:
        raise NonPositiveLambda(f"signal decay rate must be positive, got {lam}")
    ws = ws or workspace_for(u.grid)
    uk = production_power(u.values, k, positivity_tol)
    vals = mu * ws.ifft(ws.fft(uk) * ws.multiplier("helmholtz", lam))
    return make_field(u.grid, vals)


@dataclass(frozen=True)
class GradientBoundReport:
    """Outcome of the elliptic gradient estimate on one input field."""

    lhs: float
    rhs: float
    holds: bool


def gradient_bound_check(
    u: Field,
    lam: float,
    mu: float,
    k: float,
    ws: SpectralWorkspace | None = None,
) -> GradientBoundReport:
    """Check ||grad v||_inf <= sqrt(dim) * mu / sqrt(lam) * ||u^k||_inf.

    lhs is the max over the grid of the Euclidean norm of grad v for the
    solved signal; rhs is the closed-form bound.
    """
    ws = ws or workspace_for(u.grid)
    uk = production_power(u.values, k)
    v_hat = mu * ws.fft(uk) * ws.multiplier("helmholtz", lam)
    grad_sq = np.zeros(u.grid.shape)
    for kmesh in ws.k_meshes:
        comp = ws.ifft(1j * kmesh * v_hat)
        grad_sq = grad_sq + comp * comp
    lhs = float(np.sqrt(grad_sq).max())
    rhs = math.sqrt(u.grid.dim) * mu / math.sqrt(lam) * float(uk.max())
    return GradientBoundReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs * (1.0 + 1e-8))


def drift_and_gap_arrays(
    u_values: np.ndarray,
    p: ModelParams,
    ws: SpectralWorkspace,
    positivity_tol: float = DEFAULT_POSITIVITY_TOL,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Drift grad(chi2 v2 - chi1 v1) and potential gap chi2 lam2 v2 - chi1 lam1 v1.

    When lambda1 == lambda2 both signals share one Helmholtz solve, so the
    combination is evaluated with the single prefactor chi2 mu2 - chi1 mu1;
    in the balanced regime (chi2 mu2 == chi1 mu1) drift and gap are then
    exactly zero, not zero up to roundoff.
    """
    uk = production_power(u_values, p.k, positivity_tol)
    if p.lambda1 == p.lambda2:
        g_hat = ws.fft(uk) * ws.multiplier("helmholtz", p.lambda1)
        c = p.chi2 * p.mu2 - p.chi1 * p.mu1
        gap = (c * p.lambda1) * ws.ifft(g_hat)
        drift = [c * ws.ifft(1j * k * g_hat) for k in ws.k_meshes]
        return drift, gap
    f_hat = ws.fft(uk)
    v1_hat = p.mu1 * f_hat * ws.multiplier("helmholtz", p.lambda1)
    v2_hat = p.mu2 * f_hat * ws.multiplier("helmholtz", p.lambda2)
    pot_hat = p.chi2 * v2_hat - p.chi1 * v1_hat
    gap = ws.ifft(p.chi2 * p.lambda2 * v2_hat - p.chi1 * p.lambda1 * v1_hat)
    drift = [ws.ifft(1j * k * pot_hat) for k in ws.k_meshes]
    return drift, gap


def drift_field(
    state: State,
    p: ModelParams,
    ws: SpectralWorkspace | None = None,
) -> tuple[list[Field], Field]:
    """Public wrapper returning the drift components and the potential gap."""
    ws = ws or workspace_for(state.u.grid)
    drift, gap = drift_and_gap_arrays(state.u.values, p, ws)
    grid = state.u.grid
    return [make_field(grid, d) for d in drift], make_field(grid, gap)
