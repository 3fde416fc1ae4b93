"""Pattern metrics: visibility, fringe fitting, pattern arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .waveoptics import Pattern


class FitError(RuntimeError):
    """Fringe fit failed to converge; message carries diagnostics."""


def _window_mask(p: Pattern, window):
    if window is None:
        return np.ones(p.positions.size, dtype=bool)
    lo, hi = window
    mask = (p.positions >= lo) & (p.positions <= hi)
    if not np.any(mask):
        raise ValueError(f"window ({lo:g}, {hi:g}) contains no samples")
    return mask


def central_envelope_window(wavelength: float, distance: float, slit_width: float):
    """Central diffraction lobe |x| <= lambda L / (2a), the default metric window."""
    half = wavelength * distance / (2.0 * slit_width)
    return (-half, half)


def visibility(p: Pattern, window=None) -> float:
    """(max - min) / (max + min) of the rates inside the window; 0 for an empty pattern."""
    r = p.rates[_window_mask(p, window)]
    hi, lo = float(r.max()), float(r.min())
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def fringe_contrast(p: Pattern, reference: Pattern, window=None) -> float:
    """Visibility of the pattern after dividing out a fringeless reference.

    The reference is typically the same scene evaluated without
    interference cross terms, so smooth diffraction-envelope variation
    does not register as fringe contrast.
    """
    if p.positions.shape != reference.positions.shape or not np.allclose(
        p.positions, reference.positions
    ):
        raise ValueError("pattern and reference are on different grids")
    mask = _window_mask(p, window)
    ref = reference.rates[mask]
    if np.any(ref <= 0):
        raise ValueError("reference must be strictly positive inside the window")
    ratio = p.rates[mask] / ref
    hi, lo = float(ratio.max()), float(ratio.min())
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def fringe_amplitude(p: Pattern, period: float, window=None) -> float:
    """Relative modulation amplitude at one spatial period.

    Hann-weighted least squares of a + b cos + c sin at the given period;
    returns hypot(b, c) / a.  The taper plus the explicit baseline keep
    leakage from a smooth diffraction envelope near zero, so a fringe-free
    pattern scores ~0 while a full-contrast fringe scores ~1.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    mask = _window_mask(p, window)
    x = p.positions[mask]
    y = p.rates[mask]
    if x.size < 4:
        raise ValueError("window too small for a spectral estimate")
    width = x.max() - x.min()
    t = (x - x.mean()) / width
    h = 0.5 * (1.0 + np.cos(2.0 * np.pi * t))
    w = 2.0 * np.pi / period
    # quadratic + quartic baseline soaks up envelope curvature
    basis = np.column_stack([np.ones_like(x), t ** 2, t ** 4,
                             np.cos(w * x), np.sin(w * x)])
    sw = np.sqrt(h)
    coef, *_ = np.linalg.lstsq(basis * sw[:, None], y * sw, rcond=None)
    base = float(np.sum((basis[:, :3] @ coef[:3]) * h) / np.sum(h))
    if base == 0.0:
        return 0.0
    return float(np.hypot(coef[3], coef[4]) / abs(base))


@dataclass(frozen=True)
class FringeFit:
    """Least-squares fit of rates to A (1 + V cos(2 pi x / T + phi))."""

    visibility: float
    period: float
    phase: float  # radians in (-pi, pi]
    residual: float
    kind: str  # "fringe" | "anti-fringe" | "none"


def _linear_fit(x, y, period):
    w = 2.0 * np.pi / period
    basis = np.column_stack([np.ones_like(x), np.cos(w * x), np.sin(w * x)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    return coef, float(np.sqrt(np.mean(resid ** 2)))


def fit_fringe(p: Pattern, expected_period: float, window=None) -> FringeFit:
    """Fit A (1 + V cos(2 pi x / T + phi)), refining T around the seed period.

    Classification: fringe when |phi| < pi/2, anti-fringe otherwise,
    none when V < 0.05.
    """
    if expected_period <= 0:
        raise ValueError("expected_period must be positive")
    mask = _window_mask(p, window)
    x = p.positions[mask]
    y = p.rates[mask]
    if x.size < 8:
        raise FitError(f"only {x.size} samples inside the fit window")

    def cost(period):
        _, r = _linear_fit(x, y, period)
        return r

    res = minimize_scalar(
        cost,
        bounds=(0.5 * expected_period, 1.5 * expected_period),
        method="bounded",
        options={"xatol": expected_period * 1e-10, "maxiter": 200},
    )
    if not res.success:
        raise FitError(f"period refinement did not converge: {res.message}")
    period = float(res.x)
    (a, b, c), residual = _linear_fit(x, y, period)
    if a <= 0:
        # all-zero or pathological data: report no modulation
        return FringeFit(0.0, period, 0.0, residual, "none")
    vis = float(np.hypot(b, c) / a)
    phase = float(np.arctan2(-c, b))
    if phase <= -np.pi:
        phase += 2.0 * np.pi
    if vis < 0.05:
        kind = "none"
    elif abs(phase) < np.pi / 2:
        kind = "fringe"
    else:
        kind = "anti-fringe"
    return FringeFit(vis, period, phase, residual, kind)


def _check_same_grid(p: Pattern, q: Pattern):
    if p.positions.shape != q.positions.shape or not np.allclose(
        p.positions, q.positions
    ):
        raise ValueError("patterns are on different grids")


def add(p: Pattern, q: Pattern, label: str = "") -> Pattern:
    _check_same_grid(p, q)
    return Pattern(p.positions, p.rates + q.rates, label or p.label)


def scale(p: Pattern, c: float, label: str = "") -> Pattern:
    return Pattern(p.positions, p.rates * c, label or p.label)


def normalize(p: Pattern, label: str = "") -> Pattern:
    """Scale so the total rate integrates to 1; an all-zero pattern is passed through."""
    total = float(np.sum(p.rates))
    meta = dict(p.meta)
    if total == 0.0:
        meta["degenerate"] = True
        return Pattern(p.positions, p.rates.copy(), label or p.label, meta)
    return Pattern(p.positions, p.rates / total, label or p.label, meta)


def linf_relative_distance(p: Pattern, q: Pattern) -> float:
    """max |p - q| / max |p|; 0 when both are identically zero."""
    _check_same_grid(p, q)
    scale_ = float(np.max(np.abs(p.rates)))
    if scale_ == 0.0:
        return float(np.max(np.abs(q.rates)) != 0.0)
    return float(np.max(np.abs(p.rates - q.rates)) / scale_)
