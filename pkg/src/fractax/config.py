"""Plain-text configuration: one ``key = value`` per line, '#' comments.

Model keys: alpha, gamma, k, chi1, chi2, lambda1, lambda2, mu1, mu2, dim,
extent, points, a.kind, a.mean, a.amp_x, a.amp_t, a.wave, a.freq, a.phase,
b.* (same sub-keys), u0.kind plus its kind-specific sub-keys.  Stepper keys
(t_end, dt_max, cfl_safety, snapshot_every, dealias, positivity_tol) are
accepted so a simulation is reproducible from its config alone.

Numeric values may be ranged for sweeps: a comma list ``0.6, 0.75, 0.9`` or
a linspace ``0.6:0.9:4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .evolve import StepperConfig
from .model import (
    CoefficientField,
    Field,
    Grid,
    ModelParams,
    coeff_bounds,
    make_field,
    make_grid,
    validate_params,
)

_MODEL_KEYS = {
    "alpha", "gamma", "k", "chi1", "chi2", "lambda1", "lambda2", "mu1", "mu2", "dim",
    "extent", "points",
}
_FIELD_SUBKEYS = {"kind", "mean", "amp_x", "amp_t", "wave", "freq", "phase"}
_U0_SUBKEYS = {"kind", "value", "mean", "amp", "wave", "base", "width"}
_STEPPER_KEYS = {"t_end", "dt_max", "cfl_safety", "snapshot_every", "dealias", "positivity_tol"}


def parse_config_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        _check_key(key, lineno)
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _check_key(key: str, lineno: int) -> None:
    if key in _MODEL_KEYS or key in _STEPPER_KEYS:
        return
    if "." in key:
        head, sub = key.split(".", 1)
        if head in ("a", "b") and sub in _FIELD_SUBKEYS:
            return
        if head == "u0" and sub in _U0_SUBKEYS:
            return
    raise ConfigError(f"line {lineno}: unknown key {key!r}")


def parse_config(path) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _parse_values(value: str) -> list[float]:
    value = value.strip()
    if "," in value:
        return [float(tok) for tok in value.split(",") if tok.strip()]
    if ":" in value:
        lo, hi, count = value.split(":")
        n = int(count)
        if n < 2:
            raise ConfigError(f"range {value!r} needs at least 2 points")
        return list(np.linspace(float(lo), float(hi), n))
    return [float(value)]


def is_swept(entries: dict[str, str]) -> bool:
    return any(len(_parse_values(v)) > 1 for k, v in entries.items()
               if k not in ("a.kind", "b.kind", "u0.kind"))


def expand_sweep(entries: dict[str, str]) -> list[dict[str, str]]:
    """Cartesian product over every ranged key, in config order."""
    tuples: list[dict[str, str]] = [dict(entries)]
    for key, value in entries.items():
        if key in ("a.kind", "b.kind", "u0.kind"):
            continue
        values = _parse_values(value)
        if len(values) == 1:
            continue
        tuples = [
            {**t, key: repr(v)}
            for t in tuples
            for v in values
        ]
    return tuples


def _get_float(entries, key, default=None) -> float:
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return float(default)
    vals = _parse_values(entries[key])
    if len(vals) != 1:
        raise ConfigError(f"key {key!r} is ranged; expand the sweep first")
    return vals[0]


def _get_int(entries, key, default=None) -> int:
    val = _get_float(entries, key, default)
    if val != int(val):
        raise ConfigError(f"key {key!r} must be an integer, got {val}")
    return int(val)


def _get_bool(entries, key, default) -> bool:
    if key not in entries:
        return default
    token = entries[key].lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"key {key!r} must be boolean, got {entries[key]!r}")


def _build_coefficient(entries: dict[str, str], prefix: str, grid: Grid) -> CoefficientField:
    kind = entries.get(f"{prefix}.kind", "constant")
    if kind == "constant":
        return CoefficientField.constant(_get_float(entries, f"{prefix}.mean", 1.0))
    if kind != "periodic":
        raise ConfigError(f"{prefix}.kind must be constant or periodic, got {kind!r}")
    wave = _get_float(entries, f"{prefix}.wave", 0.0)
    _check_torus_wave(wave, grid, f"{prefix}.wave")
    return CoefficientField.periodic(
        mean=_get_float(entries, f"{prefix}.mean"),
        amp_x=_get_float(entries, f"{prefix}.amp_x", 0.0),
        amp_t=_get_float(entries, f"{prefix}.amp_t", 0.0),
        wave=wave,
        freq=_get_float(entries, f"{prefix}.freq", 0.0),
        phase=_get_float(entries, f"{prefix}.phase", 0.0),
    )


def _check_torus_wave(wave: float, grid: Grid, key: str) -> None:
    # spatial oscillations must close over the torus period
    if wave == 0.0:
        return
    base = math.pi / grid.extent[0]
    ratio = wave / base
    if abs(ratio - round(ratio)) > 1e-9:
        raise ConfigError(
            f"{key} = {wave} is not a multiple of pi/extent = {base:.6g}; "
            "the field would not be periodic on the torus"
        )


def build_u0(entries: dict[str, str], grid: Grid) -> Field:
    kind = entries.get("u0.kind", "constant")
    if kind == "constant":
        value = _get_float(entries, "u0.value", 1.0)
        if value < 0.0:
            raise ConfigError("u0.value must be nonnegative")
        return make_field(grid, np.full(grid.shape, value))
    if kind == "cosine":
        mean = _get_float(entries, "u0.mean")
        amp = _get_float(entries, "u0.amp", 0.0)
        wave = _get_float(entries, "u0.wave", 0.0)
        _check_torus_wave(wave, grid, "u0.wave")
        vals = mean + amp * np.cos(wave * grid.coord_sum())
        if vals.min() < 0.0:
            raise ConfigError("cosine initial data dips below zero")
        return make_field(grid, vals)
    if kind == "bump":
        base = _get_float(entries, "u0.base")
        amp = _get_float(entries, "u0.amp", 0.0)
        width = _get_float(entries, "u0.width", 1.0)
        if base < 0.0 or base + min(amp, 0.0) < 0.0:
            raise ConfigError("bump initial data dips below zero")
        sq = sum(m * m for m in grid.meshes())
        vals = base + amp * np.exp(-sq / (2.0 * width * width))
        return make_field(grid, vals)
    raise ConfigError(f"u0.kind must be constant, cosine or bump, got {kind!r}")


@dataclass(frozen=True)
class RunSetup:
    """Everything needed to reproduce one simulation or classification."""

    params: ModelParams
    grid: Grid
    a: CoefficientField
    b: CoefficientField
    u0: Field
    stepper: StepperConfig
    entries: tuple[tuple[str, str], ...]


def build_setup(entries: dict[str, str]) -> RunSetup:
    params = validate_params(ModelParams(
        alpha=_get_float(entries, "alpha"),
        gamma=_get_float(entries, "gamma"),
        k=_get_float(entries, "k"),
        chi1=_get_float(entries, "chi1"),
        chi2=_get_float(entries, "chi2"),
        lambda1=_get_float(entries, "lambda1"),
        lambda2=_get_float(entries, "lambda2"),
        mu1=_get_float(entries, "mu1"),
        mu2=_get_float(entries, "mu2"),
        dim=_get_int(entries, "dim", 1),
    ))
    grid = make_grid(
        dim=params.dim,
        extent=_get_float(entries, "extent", None) if "extent" in entries else None,
        points=_get_int(entries, "points", None) if "points" in entries else None,
    )
    a = _build_coefficient(entries, "a", grid)
    b = _build_coefficient(entries, "b", grid)
    u0 = build_u0(entries, grid)
    stepper = StepperConfig(
        t_end=_get_float(entries, "t_end", 50.0),
        dt_max=_get_float(entries, "dt_max", 0.25),
        cfl_safety=_get_float(entries, "cfl_safety", 0.8),
        positivity_tol=_get_float(entries, "positivity_tol", 1e-10),
        dealias=_get_bool(entries, "dealias", True),
        snapshot_every=_get_int(entries, "snapshot_every", 0),
    )
    resolved = dict(entries)
    resolved.setdefault("dim", str(params.dim))
    resolved.setdefault("extent", repr(grid.extent[0]))
    resolved.setdefault("points", str(grid.points[0]))
    resolved.setdefault("t_end", repr(stepper.t_end))
    return RunSetup(
        params=params, grid=grid, a=a, b=b, u0=u0, stepper=stepper,
        entries=tuple(sorted(resolved.items())),
    )


def setup_bounds(setup: RunSetup):
    return coeff_bounds(setup.a, setup.b)
