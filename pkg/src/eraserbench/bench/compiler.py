"""Resolve a parsed scene into a concrete execution plan.

Defaults live here, not in the parser: wavelength 700 nm, pump waist
200 um, slit width 80 um, separation 250 um, grid N = 2048 with span
eight times the slit structure, trajectory counts 100000, seed 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import polarization as pol
from ..biphoton import IdlerDetector
from ..pilotwave import SlitPlates
from ..waveoptics import Aperture, Grid, fraunhofer_distance
from .model import BenchSpec, Quantity

DEFAULT_WAVELENGTH = 700e-9
DEFAULT_WAIST = 200e-6
DEFAULT_SLIT_WIDTH = 80e-6
DEFAULT_SLIT_SEPARATION = 250e-6
DEFAULT_N = 100_000
DEFAULT_SEED = 0
SOURCE_GRID_N = 2048
STACK_GRID_N = 4096
STACK_STEPS = 256
HISTOGRAM_BINS = 200


class CompileError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunPlan:
    engine: str  # orthodox | pilotwave
    mode: str  # coincidence | singles
    kind: str  # pattern | nearfield
    n: int
    seed: int


@dataclass
class ScenePlan:
    name: str
    spec: BenchSpec
    wavelength: float
    source_kind: str
    source_mode: str  # gauss | hg1
    waist: float
    pre_slit_distance: float
    idler_distance: float
    aperture: Aperture | None
    plates: SlitPlates
    signal_polarizer: float | None
    idler_polarizer: float | None
    idler_detector: IdlerDetector
    scan_lo: float
    scan_hi: float
    steps: int
    detector_at: float
    screen_distance: float  # slit plane -> detector; 0 = near field
    runs: tuple[RunPlan, ...]
    warnings: list[str] = field(default_factory=list)

    @property
    def source_grid(self) -> Grid:
        span8 = 8.0 * self.slit_span
        span = max(span8, min(12.0 * self.waist, 2.0 * span8))
        return Grid.centered(span, SOURCE_GRID_N)

    @property
    def slit_span(self) -> float:
        if self.aperture is not None:
            return self.aperture.full_span
        return 4.0 * self.waist

    @property
    def stack_grid(self) -> Grid:
        span = max(2.4 * max(abs(self.scan_lo), abs(self.scan_hi)),
                   8.0 * self.slit_span)
        n = STACK_GRID_N if span > 5e-3 else STACK_GRID_N // 2
        return Grid.centered(span, n)

    @property
    def scan_grid(self) -> Grid:
        return Grid.scan(self.scan_lo, self.scan_hi, self.steps)

    @property
    def fringe_period(self) -> float | None:
        if (self.aperture is None or self.aperture.kind != "double"
                or self.screen_distance <= 0):
            return None
        return self.wavelength * self.screen_distance / self.aperture.separation

    @property
    def metric_window(self) -> tuple[float, float] | None:
        if self.aperture is None or self.screen_distance <= 0:
            return None
        half = self.wavelength * self.screen_distance / (2.0 * self.aperture.width)
        half = min(half, max(abs(self.scan_lo), abs(self.scan_hi)))
        return (-half, half)

    @property
    def conditioning_angle(self) -> float | None:
        """Polarizer angle that post-selects the guided-wave ensemble."""
        if self.signal_polarizer is not None:
            return self.signal_polarizer
        return self.idler_polarizer


def _si(q: Quantity | None, default: float) -> float:
    return default if q is None else q.si


def compile_spec(spec: BenchSpec, name: str = "scene") -> ScenePlan:
    """Validate the scene against engine capabilities and fill defaults."""
    src = spec.source
    wavelength = _si(src.wavelength, DEFAULT_WAVELENGTH)
    waist = _si(src.waist, DEFAULT_WAIST)
    if src.kind == "walborn":
        source_mode = "gauss"
    elif src.kind == "menzel":
        source_mode = "hg1"
    else:
        source_mode = src.mode or "gauss"

    plane = 0.0
    idler_distance = 0.0
    aperture = None
    aperture_plane = 0.0
    plate_jones: dict[str, np.ndarray] = {}
    plate_phases: dict[str, float] = {}
    signal_polarizer = None
    idler_polarizer = None

    for e in spec.elements:
        if e.kind == "propagate":
            if e.arm == "idler":
                idler_distance += e.distance.si
            else:
                if aperture is not None:
                    raise CompileError(
                        "signal-arm propagate after the slit is implied by the "
                        "detector plane; move it before the slit or adjust at=")
                plane += e.distance.si
        elif e.kind in ("double_slit", "single_slit"):
            if aperture is not None:
                raise CompileError("only one aperture per scene is supported")
            if e.kind == "double_slit":
                aperture = Aperture(
                    "double",
                    width=_si(e.width, DEFAULT_SLIT_WIDTH),
                    separation=_si(e.separation, DEFAULT_SLIT_SEPARATION),
                    center=_si(e.center, 0.0),
                    open_upper=e.open in (None, "both", "upper"),
                    open_lower=e.open in (None, "both", "lower"),
                )
            else:
                aperture = Aperture("single", width=_si(e.width, DEFAULT_SLIT_WIDTH),
                                    center=_si(e.center, 0.0))
            aperture_plane = plane
        elif e.kind == "qwp":
            if aperture is None or aperture.kind != "double":
                raise CompileError("qwp needs a double_slit in the scene")
            if e.slit in plate_jones:
                raise CompileError(f"duplicate qwp on the {e.slit} slit")
            plate_jones[e.slit] = pol.quarter_wave_plate(e.angle.si)
            plate_phases[e.slit] = e.phase.si if e.phase is not None else 0.0
        elif e.kind == "polarizer":
            if e.arm == "signal":
                if signal_polarizer is not None:
                    raise CompileError("duplicate signal polarizer")
                signal_polarizer = e.angle.si
            else:
                if idler_polarizer is not None:
                    raise CompileError("duplicate idler polarizer")
                idler_polarizer = e.angle.si

    sig = [d for d in spec.detectors if d.arm == "signal"]
    if len(sig) != 1:
        raise CompileError("exactly one signal detector is required")
    det = sig[0]
    detector_at = det.at.si
    screen_distance = detector_at - aperture_plane
    if aperture is not None and screen_distance < 0:
        raise CompileError("signal detector sits before the slit plane")
    if aperture is None:
        screen_distance = detector_at

    idl = [d for d in spec.detectors if d.arm == "idler"]
    if len(idl) > 1:
        raise CompileError("at most one idler detector")
    if idl:
        d = idl[0]
        if d.mode == "bucket":
            idler_detector = IdlerDetector("bucket")
        elif d.mode == "point":
            idler_detector = IdlerDetector("point", x=d.x.si)
        else:
            idler_detector = IdlerDetector("polarized", angle=d.angle.si)
    else:
        idler_detector = IdlerDetector("bucket")

    runs = []
    for r in spec.runs:
        kind = "nearfield" if (aperture is not None and screen_distance == 0.0) \
            else "pattern"
        if r.engine == "pilotwave":
            if idler_detector.mode not in ("bucket", "polarized"):
                raise CompileError(
                    "pilotwave supports bucket/lobe/polarized idler rules, "
                    f"not {idler_detector.mode!r}")
        runs.append(RunPlan(r.engine, r.mode, kind,
                            r.n if r.n is not None else DEFAULT_N,
                            r.seed if r.seed is not None else DEFAULT_SEED))

    plan = ScenePlan(
        name=name, spec=spec, wavelength=wavelength, source_kind=src.kind,
        source_mode=source_mode, waist=waist, pre_slit_distance=aperture_plane,
        idler_distance=idler_distance, aperture=aperture,
        plates=SlitPlates(plate_jones, plate_phases),
        signal_polarizer=signal_polarizer, idler_polarizer=idler_polarizer,
        idler_detector=idler_detector,
        scan_lo=det.scan[0].si, scan_hi=det.scan[1].si, steps=det.steps,
        detector_at=detector_at, screen_distance=screen_distance,
        runs=tuple(runs),
    )

    if aperture is not None:
        g_lo, g_hi = plan.source_grid.span
        for lo, hi in aperture.intervals():
            if lo < g_lo or hi > g_hi:
                raise CompileError("aperture does not fit the source grid")
        threshold = fraunhofer_distance(aperture.full_span, wavelength)
        if 0.0 < screen_distance < threshold:
            plan.warnings.append(
                f"detector at {screen_distance:g} m is inside the Fraunhofer "
                f"threshold {threshold:g} m; expect near-field structure")
    return plan
