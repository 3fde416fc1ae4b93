"""1-D transverse scalar wave optics.

Fields live on uniform grids of cell-centered samples; each sample
represents a cell of width dx, so aperture edges are area-weighted and
rectangle-rule quadrature converges at O(dx^2).  Propagators evaluate the
Fresnel/Fraunhofer integrals by direct quadrature, which keeps the output
grid free (any set of detector positions) at desk-scale cost.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform sample grid: positions x0 + dx * arange(n)."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if self.dx <= 0 or self.n < 1:
            raise ValueError("grid needs dx > 0 and n >= 1")

    @staticmethod
    def centered(span: float, n: int) -> "Grid":
        """Grid of n cells symmetric about x = 0 covering `span`."""
        dx = span / n
        return Grid(x0=-dx * (n - 1) / 2.0, dx=dx, n=n)

    @staticmethod
    def scan(lo: float, hi: float, steps: int) -> "Grid":
        """Inclusive endpoint grid, matching a detector scan."""
        if steps < 2 or hi <= lo:
            raise ValueError("scan needs hi > lo and steps >= 2")
        return Grid(x0=lo, dx=(hi - lo) / (steps - 1), n=steps)

    @property
    def positions(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def span(self) -> tuple[float, float]:
        return self.x0 - self.dx / 2.0, self.x0 + self.dx * (self.n - 0.5)


@dataclass(frozen=True)
class ScalarField:
    """Sampled complex amplitude at longitudinal plane z."""

    samples: np.ndarray
    x0: float
    dx: float
    wavelength: float
    z: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a nonempty 1-D array")
        if self.dx <= 0 or self.wavelength <= 0:
            raise ValueError("dx and wavelength must be positive")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.samples.size)

    @property
    def grid(self) -> Grid:
        return Grid(self.x0, self.dx, self.samples.size)

    @property
    def k(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dx)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def normalized(self) -> "ScalarField":
        p = self.power
        if p == 0.0:
            raise ValueError("cannot normalize a zero field")
        return replace(self, samples=self.samples / np.sqrt(p))

    def at(self, x: float | np.ndarray) -> np.ndarray | complex:
        """Linear interpolation of the complex amplitude."""
        re = np.interp(x, self.x, self.samples.real)
        im = np.interp(x, self.x, self.samples.imag)
        return re + 1j * im


@dataclass(frozen=True)
class Aperture:
    """Single or double slit; x > 0 is the 'upper' side."""

    kind: str  # "single" | "double"
    width: float
    separation: float = 0.0
    center: float = 0.0
    open_upper: bool = True
    open_lower: bool = True

    def __post_init__(self):
        if self.kind not in ("single", "double"):
            raise ValueError(f"unknown aperture kind {self.kind!r}")
        if self.width <= 0:
            raise ValueError("slit width must be positive")
        if self.kind == "double" and self.separation <= self.width:
            raise ValueError("slit separation must exceed the slit width")

    def intervals(self) -> list[tuple[float, float]]:
        """Open intervals (lo, hi), upper slit first for a double slit."""
        a = self.width
        if self.kind == "single":
            return [(self.center - a / 2, self.center + a / 2)]
        out = []
        if self.open_upper:
            c = self.center + self.separation / 2
            out.append((c - a / 2, c + a / 2))
        if self.open_lower:
            c = self.center - self.separation / 2
            out.append((c - a / 2, c + a / 2))
        return out

    def slit_intervals(self) -> dict[str, tuple[float, float]]:
        """Intervals keyed by slit name, closed slits omitted."""
        if self.kind == "single":
            return {"single": self.intervals()[0]}
        a = self.width
        out = {}
        if self.open_upper:
            c = self.center + self.separation / 2
            out["upper"] = (c - a / 2, c + a / 2)
        if self.open_lower:
            c = self.center - self.separation / 2
            out["lower"] = (c - a / 2, c + a / 2)
        return out

    @property
    def full_span(self) -> float:
        """Outer extent of the aperture structure."""
        if self.kind == "single":
            return self.width
        return self.separation + self.width


def interval_weights(grid: Grid, lo: float, hi: float) -> np.ndarray:
    """Fraction of each grid cell covered by [lo, hi]."""
    x = grid.positions
    cell_lo = x - grid.dx / 2.0
    cell_hi = x + grid.dx / 2.0
    overlap = np.minimum(cell_hi, hi) - np.maximum(cell_lo, lo)
    return np.clip(overlap / grid.dx, 0.0, 1.0)


def transmission(ap: Aperture, grid: Grid) -> np.ndarray:
    """Area-weighted transmission profile of the aperture on the grid."""
    t = np.zeros(grid.n)
    for lo, hi in ap.intervals():
        t += interval_weights(grid, lo, hi)
    return np.clip(t, 0.0, 1.0)


def apply_aperture(f: ScalarField, ap: Aperture) -> ScalarField:
    """Mask the field with the aperture transmission."""
    g_lo, g_hi = f.grid.span
    for lo, hi in ap.intervals():
        if lo < g_lo or hi > g_hi:
            raise ValueError("aperture extends outside the field grid")
    return replace(f, samples=f.samples * transmission(ap, f.grid))


def hermite_gauss(order: int, waist: float, grid: Grid, wavelength: float,
                  z: float = 0.0) -> ScalarField:
    """Unit-power Hermite-Gauss mode of order 0 or 1 at its waist.

    Order 0 is exp(-x^2/w^2); order 1 is (2x/w) exp(-x^2/w^2), odd with a
    node at x = 0 and intensity maxima at +-w/sqrt(2).
    """
    if waist <= 0:
        raise ValueError("waist must be positive")
    if order not in (0, 1):
        raise ValueError(f"unsupported mode order {order}")
    x = grid.positions
    u = np.exp(-(x / waist) ** 2).astype(complex)
    if order == 1:
        u *= 2.0 * x / waist
    f = ScalarField(u, grid.x0, grid.dx, wavelength, z)
    return f.normalized()


def _support_slice(samples: np.ndarray, rel_tol: float = 1e-14) -> slice:
    """Contiguous index range where the field is non-negligible."""
    mag = np.abs(samples)
    peak = mag.max()
    if peak == 0.0:
        return slice(0, samples.size)
    idx = np.nonzero(mag > rel_tol * peak)[0]
    return slice(int(idx[0]), int(idx[-1]) + 1)


def fresnel_propagate(f: ScalarField, distance: float, out_grid: Grid) -> ScalarField:
    """Free-space propagation by the 1-D Fresnel integral.

    u(x', z+L) = sqrt(1/(i lambda L)) * sum_j u(x_j) exp(i k (x'-x_j)^2 / 2L) dx.
    Direct O(N*M) quadrature over the input support.
    """
    if distance <= 0:
        raise ValueError("propagation distance must be positive")
    sel = _support_slice(f.samples)
    x_in = f.x[sel]
    u_in = f.samples[sel]
    x_out = out_grid.positions
    k = f.k
    phase = np.exp(1j * (k / (2.0 * distance)) * (x_out[:, None] - x_in[None, :]) ** 2)
    pref = np.sqrt(1.0 / (1j * f.wavelength * distance))
    u_out = pref * (phase @ u_in) * f.dx
    return ScalarField(u_out, out_grid.x0, out_grid.dx, f.wavelength, f.z + distance)


def fraunhofer_distance(span: float, wavelength: float) -> float:
    """Conventional far-field threshold 2 * span^2 / lambda."""
    return 2.0 * span ** 2 / wavelength


def fraunhofer_pattern(f: ScalarField, distance: float, out_grid: Grid) -> ScalarField:
    """Far-field amplitude: scaled Fourier transform of the input field.

    Keeps the sqrt(1/(i lambda L)) prefactor and the observation-plane
    quadratic phase so it agrees with fresnel_propagate sample-for-sample
    deep in the far field.  Warns when the distance is below the
    conventional Fraunhofer threshold for the field's support.
    """
    if distance <= 0:
        raise ValueError("propagation distance must be positive")
    sel = _support_slice(f.samples)
    x_in = f.x[sel]
    u_in = f.samples[sel]
    span = x_in[-1] - x_in[0] if x_in.size > 1 else f.dx
    if distance < fraunhofer_distance(span, f.wavelength):
        warnings.warn(
            f"distance {distance:g} m is inside the Fraunhofer threshold "
            f"{fraunhofer_distance(span, f.wavelength):g} m for a "
            f"{span:g} m wide field; far-field pattern is approximate",
            stacklevel=2,
        )
    x_out = out_grid.positions
    k = f.k
    kernel = np.exp(-1j * (k / distance) * x_out[:, None] * x_in[None, :])
    pref = np.sqrt(1.0 / (1j * f.wavelength * distance)) * np.exp(
        1j * (k / (2.0 * distance)) * x_out ** 2
    )
    u_out = pref * (kernel @ u_in) * f.dx
    return ScalarField(u_out, out_grid.x0, out_grid.dx, f.wavelength, f.z + distance)


def double_slit_closed_form(width: float, separation: float, wavelength: float,
                            distance: float, x: np.ndarray) -> np.ndarray:
    """Textbook double-slit intensity sinc^2(pi a x/(lambda L)) cos^2(pi d x/(lambda L)).

    Test oracle only; peak value 1 at x = 0.
    """
    if min(width, separation, wavelength, distance) <= 0:
        raise ValueError("all geometry parameters must be positive")
    x = np.asarray(x, dtype=float)
    s = wavelength * distance
    env = np.sinc(width * x / s) ** 2  # np.sinc includes the pi
    return env * np.cos(np.pi * separation * x / s) ** 2


@dataclass
class Pattern:
    """Detector-position grid with rates.

    Engine outputs are nonnegative (clamped there); intermediate pattern
    arithmetic such as subtraction may hold signed values.
    """

    positions: np.ndarray
    rates: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.rates = np.asarray(self.rates, dtype=float)
        if self.positions.shape != self.rates.shape:
            raise ValueError("positions and rates must have equal length")
