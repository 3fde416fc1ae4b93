"""Coincidence and singles rates for entangled photon-pair states.

A state is a superposition of product terms (amplitude, signal field,
idler field, signal Jones vector, idler Jones vector).  Detection rates
follow from the Gram matrix of the idler branches: whichever idler
measurement is made determines which signal cross terms survive,

    R(x) = sum_{t,t'} a_t a_t'^* s_t(x) s_t'(x)^* <sp_t'|sp_t> G_t't,

with G the idler overlap matrix for the chosen detector.  The rate is
real and nonnegative because G and the polarization overlaps are both
Gram matrices (Schur product of PSD matrices is PSD).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import polarization as pol
from .waveoptics import Aperture, Grid, Pattern, ScalarField, apply_aperture, \
    fresnel_propagate, hermite_gauss, interval_weights


class UsageError(RuntimeError):
    """State used out of order (e.g. pattern requested before propagation)."""


@dataclass(frozen=True)
class BiphotonTerm:
    amp: complex
    s_field: ScalarField
    i_field: ScalarField
    s_pol: np.ndarray
    i_pol: np.ndarray
    s_slit: str | None = None  # set once the signal arm has passed a slit


@dataclass(frozen=True)
class BiphotonState:
    terms: tuple[BiphotonTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("state needs at least one term")

    @property
    def signal_grid(self) -> Grid:
        return self.terms[0].s_field.grid

    @property
    def wavelength(self) -> float:
        return self.terms[0].s_field.wavelength


@dataclass(frozen=True)
class IdlerDetector:
    """How the idler arm is read out for coincidences.

    mode: "bucket" integrates everything; "point" evaluates the idler
    field at x; "polarized" adds a linear analyzer; "point_polarized"
    combines both.
    """

    mode: str = "bucket"
    x: float | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.mode not in ("bucket", "point", "polarized", "point_polarized"):
            raise ValueError(f"unknown idler detector mode {self.mode!r}")
        if "point" in self.mode and self.x is None:
            raise ValueError("point detector needs a position")
        if "polarized" in self.mode and self.angle is None:
            raise ValueError("polarized detector needs an analyzer angle")


def source_walborn(grid: Grid, wavelength: float, waist: float) -> BiphotonState:
    """Polarization-entangled pair: (H_s V_i + V_s H_i)/sqrt(2), Gaussian modes."""
    mode = hermite_gauss(0, waist, grid, wavelength)
    amp = 1.0 / np.sqrt(2.0)
    return BiphotonState((
        BiphotonTerm(amp, mode, mode, pol.H, pol.V),
        BiphotonTerm(amp, mode, mode, pol.V, pol.H),
    ))


def source_menzel(grid: Grid, wavelength: float, waist: float) -> BiphotonState:
    """Lobe-entangled pair from a two-lobed pump: (u1 v1 + u2 v2)/sqrt(2).

    u1/u2 (and v1/v2) are the upper/lower halves of the first-order
    Hermite-Gauss mode, split at its node and renormalized, so the idler
    branches are exactly orthogonal.  Polarizations are fixed in both arms.
    """
    hg1 = hermite_gauss(1, waist, grid, wavelength)
    x = hg1.x
    upper = replace(hg1, samples=np.where(x > 0, hg1.samples, 0.0)).normalized()
    lower = replace(hg1, samples=np.where(x < 0, hg1.samples, 0.0)).normalized()
    amp = 1.0 / np.sqrt(2.0)
    return BiphotonState((
        BiphotonTerm(amp, upper, upper, pol.H, pol.H),
        BiphotonTerm(amp, lower, lower, pol.H, pol.H),
    ))


# ---------------------------------------------------------------------------
# element application

_DROP_POWER = 1e-24


def apply_signal_jones(st: BiphotonState, m: np.ndarray) -> BiphotonState:
    """Polarization element across the whole signal arm."""
    return merge_terms(BiphotonState(tuple(
        replace(t, s_pol=m @ t.s_pol) for t in st.terms
    )))


def apply_idler_jones(st: BiphotonState, m: np.ndarray) -> BiphotonState:
    return merge_terms(BiphotonState(tuple(
        replace(t, i_pol=m @ t.i_pol) for t in st.terms
    )))


def apply_signal_aperture(st: BiphotonState, ap: Aperture) -> BiphotonState:
    """Mask the signal arm; a double slit splits each term per open slit.

    After a double slit every surviving term has support inside a single
    slit and carries that slit's name, which is what slit-local wave
    plates key on.  Terms whose masked field carries no power are dropped.
    """
    out: list[BiphotonTerm] = []
    for t in st.terms:
        if ap.kind == "single":
            masked = apply_aperture(t.s_field, ap)
            if masked.power > _DROP_POWER:
                out.append(replace(t, s_field=masked))
            continue
        for slit, (lo, hi) in ap.slit_intervals().items():
            piece = Aperture("single", width=hi - lo, center=(lo + hi) / 2)
            masked = apply_aperture(t.s_field, piece)
            if masked.power > _DROP_POWER:
                out.append(replace(t, s_field=masked, s_slit=slit))
    if not out:
        raise UsageError("aperture blocked the whole state")
    return merge_terms(BiphotonState(tuple(out)))


def apply_slit_wave_plate(st: BiphotonState, slit: str, matrix: np.ndarray,
                          extra_phase: float = 0.0) -> BiphotonState:
    """Wave plate covering one slit: acts on terms tagged with that slit.

    extra_phase is a common phase the plate imparts on top of its Jones
    action (plate tilt in the lab); it shifts the recovered fringe.
    """
    if all(t.s_slit is None for t in st.terms):
        raise UsageError("slit-local plate applied before the double slit")
    m = np.exp(1j * extra_phase) * np.asarray(matrix, dtype=complex)
    terms = tuple(
        replace(t, s_pol=m @ t.s_pol) if t.s_slit == slit else t
        for t in st.terms
    )
    return merge_terms(BiphotonState(terms))


def propagate_signal(st: BiphotonState, distance: float, out_grid: Grid) -> BiphotonState:
    return BiphotonState(tuple(
        replace(t, s_field=fresnel_propagate(t.s_field, distance, out_grid))
        for t in st.terms
    ))


def propagate_idler(st: BiphotonState, distance: float, out_grid: Grid) -> BiphotonState:
    return BiphotonState(tuple(
        replace(t, i_field=fresnel_propagate(t.i_field, distance, out_grid))
        for t in st.terms
    ))


def merge_terms(st: BiphotonState, tol: float = 1e-12) -> BiphotonState:
    """Coalesce terms with identical fields and polarizations by adding amplitudes."""
    kept: list[BiphotonTerm] = []
    for t in st.terms:
        for i, u in enumerate(kept):
            if (
                t.s_slit == u.s_slit
                and t.s_field.samples.shape == u.s_field.samples.shape
                and t.i_field.samples.shape == u.i_field.samples.shape
                and np.allclose(t.s_pol, u.s_pol, atol=tol, rtol=0)
                and np.allclose(t.i_pol, u.i_pol, atol=tol, rtol=0)
                and np.allclose(t.s_field.samples, u.s_field.samples, atol=tol, rtol=0)
                and np.allclose(t.i_field.samples, u.i_field.samples, atol=tol, rtol=0)
            ):
                kept[i] = replace(u, amp=u.amp + t.amp)
                break
        else:
            kept.append(t)
    return BiphotonState(tuple(kept))


# ---------------------------------------------------------------------------
# detection

def _field_overlaps(fields: list[ScalarField]) -> np.ndarray:
    """Gram matrix G[i, j] = <f_i|f_j> by grid quadrature."""
    arr = np.stack([f.samples for f in fields])
    return (arr.conj() @ arr.T) * fields[0].dx


def _pol_overlaps(kets: list[np.ndarray]) -> np.ndarray:
    arr = np.stack(kets)
    return arr.conj() @ arr.T


def idler_gram(st: BiphotonState, det: IdlerDetector) -> np.ndarray:
    """G[t', t] for the chosen idler readout."""
    kets = [t.i_pol for t in st.terms]
    if "polarized" in det.mode:
        e = pol.linear(det.angle)
        proj = np.array([e.conj() @ k for k in kets])
        pol_part = np.outer(proj.conj(), proj)
    else:
        pol_part = _pol_overlaps(kets)
    if "point" in det.mode:
        vals = np.array([t.i_field.at(det.x) for t in st.terms])
        field_part = np.outer(vals.conj(), vals)
    else:
        field_part = _field_overlaps([t.i_field for t in st.terms])
    return pol_part * field_part


def _check_common_signal_grid(st: BiphotonState):
    g = st.terms[0].s_field
    for t in st.terms[1:]:
        f = t.s_field
        if f.samples.size != g.samples.size or abs(f.x0 - g.x0) > 1e-15 or \
                abs(f.dx - g.dx) > 1e-18 or abs(f.z - g.z) > 1e-12:
            raise UsageError("signal fields are not all on one detection plane")


def coincidence_pattern(st: BiphotonState, det: IdlerDetector,
                        label: str = "", incoherent: bool = False) -> Pattern:
    """Signal rate scanned across the current signal plane, idler per `det`.

    With incoherent=True the cross terms between branches are dropped,
    giving the fringe-free companion pattern (the diffraction envelope
    the coincidence fringes live on).
    """
    _check_common_signal_grid(st)
    g = idler_gram(st, det)
    p = _pol_overlaps([t.s_pol for t in st.terms])
    kernel = p * g
    if incoherent:
        kernel = np.diag(np.diag(kernel))
    w = np.stack([t.amp * t.s_field.samples for t in st.terms])
    rates = np.einsum("tx,st,sx->x", w, kernel, w.conj())
    worst = float(np.max(np.abs(rates.imag))) if rates.size else 0.0
    peak = float(np.max(np.abs(rates.real))) or 1.0
    if worst > 1e-9 * peak:
        raise UsageError(f"coincidence rate has imaginary residue {worst:g}")
    rates = rates.real
    if rates.min() < -1e-12 * peak:
        raise UsageError(f"coincidence rate is negative beyond tolerance: {rates.min():g}")
    meta = {"z": st.terms[0].s_field.z, "incoherent": incoherent}
    return Pattern(st.terms[0].s_field.x, np.clip(rates, 0.0, None), label, meta)


def singles_pattern(st: BiphotonState, label: str = "",
                    incoherent: bool = False) -> Pattern:
    """Signal rate with the idler traced out (bucket detector)."""
    return coincidence_pattern(st, IdlerDetector("bucket"), label, incoherent)


def near_field_correlation(st: BiphotonState) -> np.ndarray:
    """Joint 2x2 probability over {upper, lower}_signal x {upper, lower}_idler.

    Integrates the joint rate over each half-plane pair at the arms'
    current planes and normalizes the four entries to sum to 1.
    """
    s_fields = [t.s_field for t in st.terms]
    i_fields = [t.i_field for t in st.terms]
    sp = _pol_overlaps([t.s_pol for t in st.terms])
    ip = _pol_overlaps([t.i_pol for t in st.terms])
    amps = np.array([t.amp for t in st.terms])
    amp_outer = np.outer(amps.conj(), amps)

    def half_gram(fields, upper: bool):
        grid = fields[0].grid
        big = grid.span[1] - grid.span[0]
        lo, hi = (0.0, grid.span[1] + big) if upper else (grid.span[0] - big, 0.0)
        wts = interval_weights(grid, lo, hi)
        arr = np.stack([f.samples for f in fields])
        return ((arr * wts).conj() @ arr.T) * fields[0].dx

    table = np.zeros((2, 2))
    halves = {"upper": True, "lower": False}
    for i_s, s_up in enumerate(halves.values()):
        gs = half_gram(s_fields, s_up)
        for i_i, i_up in enumerate(halves.values()):
            gi = half_gram(i_fields, i_up)
            val = np.sum(amp_outer * sp * ip * gs * gi)
            table[i_s, i_i] = float(val.real)
    total = table.sum()
    if total <= 0:
        raise UsageError("state carries no power at the near-field planes")
    return np.clip(table / total, 0.0, None)


def state_norm(st: BiphotonState) -> float:
    """Total norm via the Gram formula, integrated over both arms."""
    sp = _pol_overlaps([t.s_pol for t in st.terms])
    ip = _pol_overlaps([t.i_pol for t in st.terms])
    gs = _field_overlaps([t.s_field for t in st.terms])
    gi = _field_overlaps([t.i_field for t in st.terms])
    amps = np.array([t.amp for t in st.terms])
    val = np.sum(np.outer(amps.conj(), amps) * sp * ip * gs * gi)
    return float(np.sqrt(max(val.real, 0.0)))
