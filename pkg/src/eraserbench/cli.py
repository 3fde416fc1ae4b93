"""Command-line client for the bench simulator.

Thin wrapper over the core package: `run` executes a scene file (or a
shipped scene by name) and writes one CSV per run, `validate` parses and
compiles without running, `scenes list` shows the shipped corpus.

Exit codes: 0 success, 1 parse/compile error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (BenchParseError, CompileError, compile_spec, io, parse,
                    run_scene, scenes)


def _load_scene_text(ref: str) -> tuple[str, str]:
    """(name, text) from a path or a shipped scene name."""
    path = Path(ref)
    if path.is_file():
        return path.stem, path.read_text()
    name = ref[:-len(".bench")] if ref.endswith(".bench") else ref
    try:
        return name, scenes.load(name)
    except KeyError:
        raise FileNotFoundError(
            f"no scene file {ref!r} and no shipped scene named {name!r}")


def _cmd_run(args) -> int:
    try:
        name, text = _load_scene_text(args.scene)
        spec = parse(text)
        plan = compile_spec(spec, name)
    except (FileNotFoundError, BenchParseError, CompileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for w in plan.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.seed is not None:
        plan.runs = tuple(r.__class__(r.engine, r.mode, r.kind, r.n, args.seed)
                          for r in plan.runs)
    try:
        result = run_scene(plan)
        written = io.write_scene(Path(args.out), result)
    except Exception as exc:  # engine failures map to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    for r in result.runs:
        summary = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                            for k, v in sorted(r.metrics.items()))
        print(f"{result.name} [{r.engine} {r.mode}] {summary}")
    for p in written:
        print(f"wrote {p}")
    return 0


def _cmd_validate(args) -> int:
    try:
        name, text = _load_scene_text(args.scene)
        spec = parse(text)
        plan = compile_spec(spec, name)
    except (FileNotFoundError, BenchParseError, CompileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for w in plan.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"{name}: ok ({len(plan.runs)} runs)")
    return 0


def _cmd_scenes(args) -> int:
    if args.action == "list":
        for name in scenes.names():
            print(name)
        return 0
    print(f"error: unknown scenes action {args.action!r}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eraserbench",
        description="two-photon double-slit bench simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scene and write CSVs")
    p_run.add_argument("scene", help=".bench file path or shipped scene name")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override every run's seed")
    p_run.add_argument("--format", choices=["csv"], default="csv")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="parse and compile only")
    p_val.add_argument("scene")
    p_val.set_defaults(func=_cmd_validate)

    p_sc = sub.add_parser("scenes", help="inspect the shipped corpus")
    p_sc.add_argument("action", choices=["list"])
    p_sc.set_defaults(func=_cmd_scenes)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
