"""Scene DSL: parse/format, compile to an execution plan, run, serialize."""

from .model import (BenchSpec, DetectorDecl, ElementDecl, Quantity, RunDecl,
                    SourceDecl)
from .parser import BenchParseError, format_spec, parse
from .compiler import CompileError, ScenePlan, compile_spec
from .runner import RunResult, SceneResult, run_scene
from . import scenes

__all__ = [
    "BenchSpec", "SourceDecl", "ElementDecl", "DetectorDecl", "RunDecl",
    "Quantity", "parse", "format_spec", "BenchParseError",
    "compile_spec", "CompileError", "ScenePlan",
    "run_scene", "RunResult", "SceneResult", "scenes",
]
