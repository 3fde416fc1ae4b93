"""Declarations recorded from a bench scene file.

The spec stores exactly what the user wrote (values keep their units);
defaults are filled in by the compiler, which keeps parse -> format ->
parse an identity on the spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0}
ANGLE_UNITS = {"deg", "rad"}
UNITS = set(LENGTH_UNITS) | ANGLE_UNITS


@dataclass(frozen=True)
class Quantity:
    """A number as written, with its mandatory unit suffix."""

    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")

    @property
    def is_angle(self) -> bool:
        return self.unit in ANGLE_UNITS

    @property
    def si(self) -> float:
        """Meters for lengths, radians for angles."""
        if self.unit == "deg":
            return math.radians(self.value)
        if self.unit == "rad":
            return self.value
        return self.value * LENGTH_UNITS[self.unit]

    def __str__(self) -> str:
        return f"{self.value!r}{self.unit}"


@dataclass(frozen=True)
class SourceDecl:
    kind: str  # walborn | menzel | custom
    mode: str | None = None  # custom only: gauss | hg1
    waist: Quantity | None = None
    wavelength: Quantity | None = None


@dataclass(frozen=True)
class ElementDecl:
    kind: str  # double_slit | single_slit | qwp | polarizer | propagate
    width: Quantity | None = None
    separation: Quantity | None = None
    center: Quantity | None = None
    open: str | None = None  # both | upper | lower
    slit: str | None = None  # qwp: upper | lower
    angle: Quantity | None = None
    phase: Quantity | None = None  # qwp: extra common phase (plate tilt)
    arm: str | None = None  # polarizer/propagate: signal | idler
    distance: Quantity | None = None


@dataclass(frozen=True)
class DetectorDecl:
    arm: str  # signal | idler
    mode: str | None = None  # idler: bucket | point | polarized
    scan: tuple[Quantity, Quantity] | None = None
    steps: int | None = None
    at: Quantity | None = None
    x: Quantity | None = None
    angle: Quantity | None = None


@dataclass(frozen=True)
class RunDecl:
    engine: str  # orthodox | pilotwave
    mode: str  # coincidence | singles
    n: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class BenchSpec:
    source: SourceDecl
    elements: tuple[ElementDecl, ...]
    detectors: tuple[DetectorDecl, ...]
    runs: tuple[RunDecl, ...]
