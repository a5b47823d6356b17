"""Shared test utilities: random smooth fields with controlled spectra."""

import numpy as np

from fractax.model import make_field
from fractax.spectral import workspace_for


def random_smooth_field(grid, rng, nonneg=False, floor=0.1, amplitude=1.0):
    """Random band-limited field, sup-normalized.

    Spectrum decays as a Gaussian and is cut hard at a third of Nyquist, so
    cubic nonlinearities of these fields are exactly representable on the
    grid (no aliasing).
    """
    ws = workspace_for(grid)
    cutoff = ws.k_abs.max() / 3.0
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    coeffs *= np.exp(-((ws.k_abs / (cutoff / 2.0)) ** 2))
    coeffs[ws.k_abs > cutoff] = 0.0
    vals = np.fft.ifftn(coeffs).real
    vals = amplitude * vals / np.abs(vals).max()
    if nonneg:
        vals = vals - vals.min() + floor
    return make_field(grid, vals)
