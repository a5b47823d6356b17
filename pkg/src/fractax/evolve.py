"""Time integration: Lie splitting with exact exponential fractional diffusion.

Each step advances the non-diffusive part (drift advection plus reaction) by
one explicit Euler substep, clamps marginal negativity, then applies the
fractional heat semigroup exactly in Fourier space.  First order in dt,
unconditionally stable in the stiff diffusion, and positivity-preserving in
the diffusion substep.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BlowUpSuspected,
    ClampBudgetExceeded,
    GridSpecError,
    NonFinite,
    NonFiniteTendency,
    PositivityBreach,
)
from .model import CoefficientField, Field, Grid, ModelParams, State, make_field
from .signal import drift_and_gap_arrays, production_power, solve_signal
from .spectral import SpectralWorkspace, workspace_for

SNAPSHOT_MAGIC = b"FXS1"


@dataclass(frozen=True)
class StepperConfig:
    """Stepping controls; dealias applies the 2/3-rule filter to the tendency."""

    t_end: float = 50.0
    dt_max: float = 0.25
    cfl_safety: float = 0.8
    positivity_tol: float = 1e-10
    dealias: bool = True
    snapshot_every: int = 0
    max_steps: int = 1_000_000
    blowup_factor: float = 1e3
    clamp_budget_rate: float = 1e-6

    def __post_init__(self):
        if not self.dt_max > 0.0:
            raise GridSpecError("dt_max must be positive")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise GridSpecError("cfl_safety must lie in (0, 1]")


@dataclass
class Trajectory:
    """Per-step diagnostics plus optional field snapshots."""

    times: np.ndarray
    sup_u: np.ndarray
    inf_u: np.ndarray
    clamp_mass: np.ndarray
    drift_gap_max: np.ndarray
    snapshots: list[State] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)


def make_state(u: Field, p: ModelParams, t: float = 0.0,
               ws: SpectralWorkspace | None = None,
               positivity_tol: float = 1e-10) -> State:
    ws = ws or workspace_for(u.grid)
    v1 = solve_signal(u, p.lambda1, p.mu1, p.k, ws, positivity_tol)
    v2 = solve_signal(u, p.lambda2, p.mu2, p.k, ws, positivity_tol)
    return State(t=t, u=u, v1=v1, v2=v2)


def _tendency_arrays(
    u_values: np.ndarray,
    drift: list[np.ndarray],
    gap: np.ndarray,
    p: ModelParams,
    a_vals: np.ndarray,
    b_vals: np.ndarray,
    ws: SpectralWorkspace,
    positivity_tol: float,
) -> np.ndarray:
    u_hat = ws.fft(u_values)
    advect = np.zeros(u_values.shape)
    for d, k in zip(drift, ws.k_meshes):
        advect = advect + d * ws.ifft(1j * k * u_hat)
    clamped = np.maximum(u_values, 0.0)
    uk = production_power(u_values, p.k, positivity_tol)
    growth = a_vals + gap - b_vals * clamped ** (p.gamma - 1.0) \
        + (p.chi1 * p.mu1 - p.chi2 * p.mu2) * uk
    return advect + u_values * growth


def tendency(
    state: State,
    p: ModelParams,
    a: CoefficientField,
    b: CoefficientField,
    t: float | None = None,
    ws: SpectralWorkspace | None = None,
    dealias: bool = False,
    positivity_tol: float = 1e-10,
) -> Field:
    """Non-diffusive tendency in drift form.

    F(u) = drift . grad u + u (a + gap - b u^(gamma-1) + (chi1 mu1 - chi2 mu2) u^k),
    with drift = grad(chi2 v2 - chi1 v1) and gap = chi2 lam2 v2 - chi1 lam1 v1.
    Fractional diffusion is excluded: the stepper applies it exactly.
    """
    ws = ws or workspace_for(state.u.grid)
    if t is None:
        t = state.t
    coord = state.u.grid.coord_sum()
    drift, gap = drift_and_gap_arrays(state.u.values, p, ws, positivity_tol)
    vals = _tendency_arrays(state.u.values, drift, gap, p,
                            a.sample(coord, t), b.sample(coord, t), ws, positivity_tol)
    if dealias:
        vals = ws.ifft(ws.fft(vals) * ws.dealias_mask)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteTendency("tendency produced non-finite values")
    return make_field(state.u.grid, vals)


def _reaction_rate_bound(u_sup: float, p: ModelParams, a_sup: float, b_sup: float) -> float:
    # bounds |dF/du| for the zeroth-order terms; monotone in u_sup
    coupling = p.chi1 * p.mu1 + p.chi2 * p.mu2
    return (
        a_sup
        + coupling * u_sup ** p.k
        + p.gamma * b_sup * u_sup ** (p.gamma - 1.0)
        + (p.k + 1.0) * abs(p.chi1 * p.mu1 - p.chi2 * p.mu2) * u_sup ** p.k
    )


def _cfl_from_drift(
    drift: list[np.ndarray],
    u_sup: float,
    p: ModelParams,
    a_sup: float,
    b_sup: float,
    cfg: StepperConfig,
    grid: Grid,
) -> float:
    dt = cfg.dt_max
    for d, h in zip(drift, grid.spacing):
        dmax = float(np.abs(d).max())
        if dmax > 0.0:
            dt = min(dt, h / dmax)
    rate = _reaction_rate_bound(u_sup, p, a_sup, b_sup)
    if rate > 0.0:
        dt = min(dt, 1.0 / rate)
    return cfg.cfl_safety * dt


def cfl_dt(
    state: State,
    p: ModelParams,
    a: CoefficientField,
    b: CoefficientField,
    cfg: StepperConfig,
    ws: SpectralWorkspace | None = None,
) -> float:
    """Stable step size from the advective CFL and the reaction-rate bound."""
    ws = ws or workspace_for(state.u.grid)
    drift, _ = drift_and_gap_arrays(state.u.values, p, ws, cfg.positivity_tol)
    _, a_sup = a.bounds()
    _, b_sup = b.bounds()
    return _cfl_from_drift(drift, float(np.abs(state.u.values).max()),
                           p, a_sup, b_sup, cfg, state.u.grid)


def _clamp_positive(values: np.ndarray, tol: float, cell_volume: float) -> tuple[np.ndarray, float]:
    scale = max(1.0, float(np.abs(values).max()))
    floor = -tol * scale
    mn = float(values.min())
    if mn < floor:
        raise PositivityBreach(
            f"pre-diffusion update reached {mn:.3e}, below the positivity floor {floor:.3e}"
        )
    neg = values < 0.0
    if not neg.any():
        return values, 0.0
    mass = -float(values[neg].sum()) * cell_volume
    out = values.copy()
    out[neg] = 0.0
    return out, mass


def step(
    state: State,
    dt: float,
    p: ModelParams,
    a: CoefficientField,
    b: CoefficientField,
    cfg: StepperConfig,
    ws: SpectralWorkspace | None = None,
) -> tuple[State, float]:
    """One Lie-split step; returns the new state and the clamped mass."""
    ws = ws or workspace_for(state.u.grid)
    grid = state.u.grid
    coord = grid.coord_sum()
    drift, gap = drift_and_gap_arrays(state.u.values, p, ws, cfg.positivity_tol)
    vals = _tendency_arrays(state.u.values, drift, gap, p,
                            a.sample(coord, state.t), b.sample(coord, state.t),
                            ws, cfg.positivity_tol)
    if cfg.dealias:
        vals = ws.ifft(ws.fft(vals) * ws.dealias_mask)
    updated = state.u.values + dt * vals
    if not np.all(np.isfinite(updated)):
        raise NonFinite("non-finite values after explicit substep")
    clamped, clamp_mass = _clamp_positive(updated, cfg.positivity_tol, grid.cell_volume)
    diffused = ws.ifft(ws.fft(clamped) * ws.multiplier("frac_heat", float(dt), p.alpha))
    u_next = make_field(grid, diffused)
    new_state = make_state(u_next, p, state.t + dt, ws, cfg.positivity_tol)
    return new_state, clamp_mass


def integrate(
    u0: Field,
    p: ModelParams,
    a: CoefficientField,
    b: CoefficientField,
    cfg: StepperConfig,
    ws: SpectralWorkspace | None = None,
    c0_candidate: float | None = None,
) -> Trajectory:
    """Run the stepper to t_end with adaptive dt, recording diagnostics.

    Raises BlowUpSuspected (carrying the partial trajectory) once sup u
    exceeds ``blowup_factor * c0_candidate``; the default candidate is
    max(1, sup u0).  The total clamped mass is budgeted against
    ``clamp_budget_rate * mean(u0) * t_end``: a run that exceeds it fails.
    """
    ws = ws or workspace_for(u0.grid)
    grid = u0.grid
    if float(u0.values.min()) < 0.0:
        raise PositivityBreach("initial data must be nonnegative")
    if c0_candidate is None:
        c0_candidate = max(1.0, float(u0.values.max()))
    coord = grid.coord_sum()
    _, a_sup = a.bounds()
    _, b_sup = b.bounds()

    state = make_state(u0, p, 0.0, ws, cfg.positivity_tol)
    times = [0.0]
    sup_u = [state.u.sup]
    inf_u = [state.u.inf]
    clamp = [0.0]
    drift0, gap0 = drift_and_gap_arrays(state.u.values, p, ws, cfg.positivity_tol)
    gap_max = [float(gap0.max())]
    snapshots: list[State] = []
    if cfg.snapshot_every > 0:
        snapshots.append(state)

    clamp_total = 0.0
    clamp_budget = cfg.clamp_budget_rate * max(u0.mean(), 0.0) * cfg.t_end
    threshold = cfg.blowup_factor * c0_candidate

    def _bundle() -> Trajectory:
        return Trajectory(
            times=np.asarray(times),
            sup_u=np.asarray(sup_u),
            inf_u=np.asarray(inf_u),
            clamp_mass=np.asarray(clamp),
            drift_gap_max=np.asarray(gap_max),
            snapshots=snapshots,
        )

    n_steps = 0
    drift, gap = drift0, gap0
    while state.t < cfg.t_end - 1e-12 and n_steps < cfg.max_steps:
        vals = _tendency_arrays(state.u.values, drift, gap, p,
                                a.sample(coord, state.t), b.sample(coord, state.t),
                                ws, cfg.positivity_tol)
        if cfg.dealias:
            vals = ws.ifft(ws.fft(vals) * ws.dealias_mask)
        dt = _cfl_from_drift(drift, float(np.abs(state.u.values).max()),
                             p, a_sup, b_sup, cfg, grid)
        dt = min(dt, cfg.t_end - state.t)
        updated = state.u.values + dt * vals
        if not np.all(np.isfinite(updated)):
            raise NonFinite(f"non-finite values at t = {state.t:.6g}")
        clamped, clamp_mass = _clamp_positive(updated, cfg.positivity_tol, grid.cell_volume)
        diffused = ws.ifft(ws.fft(clamped) * ws.multiplier("frac_heat", float(dt), p.alpha))
        u_next = make_field(grid, diffused)
        t_next = state.t + dt
        v1 = solve_signal(u_next, p.lambda1, p.mu1, p.k, ws, cfg.positivity_tol)
        v2 = solve_signal(u_next, p.lambda2, p.mu2, p.k, ws, cfg.positivity_tol)
        state = State(t=t_next, u=u_next, v1=v1, v2=v2)
        n_steps += 1

        drift, gap = drift_and_gap_arrays(state.u.values, p, ws, cfg.positivity_tol)
        times.append(t_next)
        sup_u.append(state.u.sup)
        inf_u.append(state.u.inf)
        clamp.append(clamp_mass)
        gap_max.append(float(gap.max()))
        clamp_total += clamp_mass
        if cfg.snapshot_every > 0 and n_steps % cfg.snapshot_every == 0:
            snapshots.append(state)

        if state.u.sup > threshold:
            raise BlowUpSuspected(
                f"sup u = {state.u.sup:.3e} exceeded {threshold:.3e} at t = {t_next:.6g}",
                trajectory=_bundle(),
            )

    if clamp_total > clamp_budget and clamp_budget > 0.0:
        raise ClampBudgetExceeded(
            f"total clamped mass {clamp_total:.3e} exceeds budget {clamp_budget:.3e}"
        )
    return _bundle()


# -- snapshot format -----------------------------------------------------------
#
# Raw binary, little-endian.  Header: magic "FXS1", then dim (int64), points
# per axis (int64 each), extent per axis (float64 each), time (float64); then
# row-major float64 payloads for u, v1, v2 in that order.

def write_snapshot(path, state: State) -> None:
    grid = state.u.grid
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<q", grid.dim))
        for n in grid.points:
            fh.write(struct.pack("<q", n))
        for ext in grid.extent:
            fh.write(struct.pack("<d", ext))
        fh.write(struct.pack("<d", state.t))
        for f in (state.u, state.v1, state.v2):
            fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_snapshot(path) -> State:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise NonFinite(f"bad snapshot magic {magic!r}")
        (dim,) = struct.unpack("<q", fh.read(8))
        points = tuple(struct.unpack("<q", fh.read(8))[0] for _ in range(dim))
        extent = tuple(struct.unpack("<d", fh.read(8))[0] for _ in range(dim))
        (t,) = struct.unpack("<d", fh.read(8))
        grid = Grid(dim=dim, extent=extent, points=points)
        fields = []
        count = grid.size
        for _ in range(3):
            arr = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(grid.shape)
            fields.append(make_field(grid, arr.astype(np.float64)))
    return State(t=t, u=fields[0], v1=fields[1], v2=fields[2])
