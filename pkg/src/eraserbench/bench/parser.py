"""Line-oriented parser and formatter for .bench scene files.

Grammar, one statement per line, '#' starts a comment:

    source walborn|menzel [waist=Q] [wavelength=Q]
    source custom mode=gauss|hg1 [waist=Q] [wavelength=Q]
    element double_slit [width=Q] [separation=Q] [center=Q] [open=both|upper|lower]
    element single_slit [width=Q] [center=Q]
    element qwp slit=upper|lower angle=Q [phase=Q]
    element polarizer arm=signal|idler angle=Q
    element propagate arm=signal|idler distance=Q
    detector signal scan=Q..Q steps=INT at=Q
    detector idler bucket | point x=Q | polarized angle=Q
    run orthodox|pilotwave coincidence|singles [n=INT] [seed=INT]

Dimensioned values (Q) require a unit suffix from {nm, um, mm, m, deg,
rad}; counts are bare integers.  Unknown keys are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (ANGLE_UNITS, BenchSpec, DetectorDecl, ElementDecl,
                    Quantity, RunDecl, SourceDecl)

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_QTY_RE = re.compile(rf"^({_NUMBER})(nm|um|mm|m|deg|rad)$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_RANGE_RE = re.compile(rf"^({_NUMBER})(nm|um|mm|m)\.\.({_NUMBER})(nm|um|mm|m)$")
_WORD_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class BenchParseError(Exception):
    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        tok = f" near {self.token!r}" if self.token else ""
        return f"line {self.line}, column {self.column}: {self.message}{tok}"


def _err(line_no, col, message, token=""):
    raise BenchParseError(line_no, col, message, token)


def _tokens(line: str):
    """(token, 1-based column) pairs, comments stripped."""
    code = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", code)]


def _parse_value(raw: str, key: str, line_no: int, col: int):
    if key in ("steps", "n", "seed"):
        if not _INT_RE.match(raw):
            _err(line_no, col, f"{key} expects a bare integer", raw)
        return int(raw)
    if key == "scan":
        m = _RANGE_RE.match(raw)
        if not m:
            _err(line_no, col,
                 "scan expects a range like -5mm..5mm (units required)", raw)
        return (Quantity(float(m.group(1)), m.group(2)),
                Quantity(float(m.group(3)), m.group(4)))
    if key in ("mode", "open", "slit", "arm"):
        if not _WORD_RE.match(raw):
            _err(line_no, col, f"{key} expects a word", raw)
        return raw
    m = _QTY_RE.match(raw)
    if not m:
        if re.match(rf"^{_NUMBER}$", raw):
            _err(line_no, col, f"{key} needs a unit suffix (nm/um/mm/m/deg/rad)", raw)
        _err(line_no, col, f"{key} expects a number with a unit", raw)
    q = Quantity(float(m.group(1)), m.group(2))
    if key in ("angle", "phase") and not q.is_angle:
        _err(line_no, col, f"{key} expects deg or rad", raw)
    if key not in ("angle", "phase") and q.is_angle:
        _err(line_no, col, f"{key} expects a length", raw)
    return q


def _parse_kv(pairs, allowed, line_no):
    out = {}
    for tok, col in pairs:
        if "=" not in tok:
            _err(line_no, col, "expected key=value", tok)
        key, _, raw = tok.partition("=")
        if key not in allowed:
            _err(line_no, col, f"unknown key {key!r}", tok)
        if key in out:
            _err(line_no, col, f"duplicate key {key!r}", tok)
        if raw == "":
            _err(line_no, col, f"empty value for {key!r}", tok)
        out[key] = _parse_value(raw, key, line_no, col)
    return out


_SOURCE_KINDS = ("walborn", "menzel", "custom")
_ELEMENT_KEYS = {
    "double_slit": {"width", "separation", "center", "open"},
    "single_slit": {"width", "center"},
    "qwp": {"slit", "angle", "phase"},
    "polarizer": {"arm", "angle"},
    "propagate": {"arm", "distance"},
}
_ENUMS = {
    "open": ("both", "upper", "lower"),
    "slit": ("upper", "lower"),
    "arm": ("signal", "idler"),
    "mode": ("gauss", "hg1"),
}


def _check_enum(values: dict, line_no: int):
    for key, allowed in _ENUMS.items():
        if key in values and values[key] not in allowed:
            _err(line_no, 1, f"{key} must be one of {', '.join(allowed)}",
                 str(values[key]))


def parse(text: str) -> BenchSpec:
    """Parse scene text; raises BenchParseError with position on any violation."""
    source = None
    elements: list[ElementDecl] = []
    detectors: list[DetectorDecl] = []
    runs: list[RunDecl] = []
    seen_double_slit = False

    for line_no, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        head, col0 = toks[0]

        if head == "source":
            if len(toks) < 2:
                _err(line_no, col0, "source needs a kind (walborn/menzel/custom)")
            kind, col1 = toks[1]
            if kind not in _SOURCE_KINDS:
                _err(line_no, col1, "source kind must be walborn, menzel or custom", kind)
            if source is not None:
                _err(line_no, col0, "duplicate source declaration")
            keys = {"waist", "wavelength"} | ({"mode"} if kind == "custom" else set())
            vals = _parse_kv(toks[2:], keys, line_no)
            _check_enum(vals, line_no)
            if kind == "custom" and "mode" not in vals:
                _err(line_no, col1, "custom source needs mode=gauss|hg1")
            source = SourceDecl(kind, **vals)

        elif head == "element":
            if len(toks) < 2:
                _err(line_no, col0, "element needs a kind")
            kind, col1 = toks[1]
            if kind not in _ELEMENT_KEYS:
                _err(line_no, col1, f"unknown element {kind!r}", kind)
            vals = _parse_kv(toks[2:], _ELEMENT_KEYS[kind], line_no)
            _check_enum(vals, line_no)
            if kind == "qwp":
                if "slit" not in vals or "angle" not in vals:
                    _err(line_no, col1, "qwp needs slit= and angle=")
                if not seen_double_slit:
                    _err(line_no, col1,
                         "qwp must come after the double_slit it covers")
            if kind == "polarizer" and ("arm" not in vals or "angle" not in vals):
                _err(line_no, col1, "polarizer needs arm= and angle=")
            if kind == "propagate" and ("arm" not in vals or "distance" not in vals):
                _err(line_no, col1, "propagate needs arm= and distance=")
            if kind == "propagate" and vals["distance"].si <= 0:
                _err(line_no, col1, "propagate distance must be positive")
            if kind == "double_slit":
                seen_double_slit = True
            elements.append(ElementDecl(kind, **vals))

        elif head == "detector":
            if len(toks) < 2:
                _err(line_no, col0, "detector needs an arm (signal/idler)")
            arm, col1 = toks[1]
            if arm == "signal":
                vals = _parse_kv(toks[2:], {"scan", "steps", "at"}, line_no)
                missing = {"scan", "steps", "at"} - set(vals)
                if missing:
                    _err(line_no, col1,
                         f"signal detector needs {', '.join(sorted(missing))}")
                if vals["steps"] < 2:
                    _err(line_no, col1, "signal detector needs steps >= 2")
                lo, hi = vals["scan"]
                if hi.si <= lo.si:
                    _err(line_no, col1, "scan range must be increasing")
                detectors.append(DetectorDecl("signal", **vals))
            elif arm == "idler":
                if len(toks) < 3:
                    _err(line_no, col1,
                         "idler detector needs a mode (bucket/point/polarized)")
                mode, col2 = toks[2]
                if mode not in ("bucket", "point", "polarized"):
                    _err(line_no, col2, "idler mode must be bucket, point or polarized", mode)
                keys = {"bucket": set(), "point": {"x"}, "polarized": {"angle"}}[mode]
                vals = _parse_kv(toks[3:], keys, line_no)
                if mode == "point" and "x" not in vals:
                    _err(line_no, col2, "point detector needs x=")
                if mode == "polarized" and "angle" not in vals:
                    _err(line_no, col2, "polarized detector needs angle=")
                detectors.append(DetectorDecl("idler", mode=mode, **vals))
            else:
                _err(line_no, col1, "detector arm must be signal or idler", arm)

        elif head == "run":
            if len(toks) < 3:
                _err(line_no, col0, "run needs an engine and a mode")
            engine, col1 = toks[1]
            mode, col2 = toks[2]
            if engine not in ("orthodox", "pilotwave"):
                _err(line_no, col1, "engine must be orthodox or pilotwave", engine)
            if mode not in ("coincidence", "singles"):
                _err(line_no, col2, "mode must be coincidence or singles", mode)
            vals = _parse_kv(toks[3:], {"n", "seed"}, line_no)
            if "n" in vals and vals["n"] < 1:
                _err(line_no, col2, "n must be positive")
            runs.append(RunDecl(engine, mode, **vals))

        else:
            _err(line_no, col0,
                 "expected source, element, detector or run", head)

    n_lines = text.count("\n") + 1
    if source is None:
        _err(n_lines, 1, "missing source declaration")
    if not runs:
        _err(n_lines, 1, "missing run declaration")
    if not any(d.arm == "signal" for d in detectors):
        _err(n_lines, 1, "missing signal detector")
    return BenchSpec(source, tuple(elements), tuple(detectors), tuple(runs))


def _fmt_kv(key, value) -> str:
    if isinstance(value, Quantity):
        return f"{key}={value}"
    if isinstance(value, tuple):  # scan range
        return f"{key}={value[0]}..{value[1]}"
    return f"{key}={value}"


def format_spec(spec: BenchSpec) -> str:
    """Canonical text; parse(format_spec(parse(t))) == parse(t)."""
    lines = []
    s = spec.source
    parts = [f"source {s.kind}"]
    for key in ("mode", "waist", "wavelength"):
        if getattr(s, key) is not None:
            parts.append(_fmt_kv(key, getattr(s, key)))
    lines.append(" ".join(parts))
    for e in spec.elements:
        parts = [f"element {e.kind}"]
        for key in ("width", "separation", "center", "open", "slit", "angle",
                    "phase", "arm", "distance"):
            if getattr(e, key) is not None:
                parts.append(_fmt_kv(key, getattr(e, key)))
        lines.append(" ".join(parts))
    for d in spec.detectors:
        if d.arm == "signal":
            parts = [f"detector signal", _fmt_kv("scan", d.scan),
                     _fmt_kv("steps", d.steps), _fmt_kv("at", d.at)]
        else:
            parts = [f"detector idler {d.mode}"]
            if d.x is not None:
                parts.append(_fmt_kv("x", d.x))
            if d.angle is not None:
                parts.append(_fmt_kv("angle", d.angle))
        lines.append(" ".join(parts))
    for r in spec.runs:
        parts = [f"run {r.engine} {r.mode}"]
        if r.n is not None:
            parts.append(_fmt_kv("n", r.n))
        if r.seed is not None:
            parts.append(_fmt_kv("seed", r.seed))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
