"""CSV serialization of run results.

One file per run.  Pattern files:

    # scene=<name>, engine=<engine>, mode=<mode>, seed=<seed>
    x_m,rate

Near-field tables swap the columns for signal_half,idler_half,probability.
Trajectory files are long format: x0_m,slit,z_m,x_m.  Floats are written
with shortest round-trip repr, so a fixed seed gives byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

from .runner import RunResult, SceneResult


def _header(scene: str, r: RunResult) -> str:
    return f"# scene={scene}, engine={r.engine}, mode={r.mode}, seed={r.seed}\n"


def _f(v: float) -> str:
    return repr(float(v))


def pattern_csv(scene: str, r: RunResult) -> str:
    lines = [_header(scene, r), "x_m,rate\n"]
    for x, rate in zip(r.pattern.positions, r.pattern.rates):
        lines.append(f"{_f(x)},{_f(rate)}\n")
    return "".join(lines)


def table_csv(scene: str, r: RunResult) -> str:
    lines = [_header(scene, r), "signal_half,idler_half,probability\n"]
    for i, s_label in enumerate(r.table_labels):
        for j, i_label in enumerate(r.table_labels):
            lines.append(f"{s_label},{i_label},{_f(r.table[i, j])}\n")
    return "".join(lines)


def trajectories_csv(scene: str, r: RunResult) -> str:
    lines = [_header(scene, r), "x0_m,slit,z_m,x_m\n"]
    for _, ens in r.ensembles:
        for path in ens.paths:
            for z, x in path.path:
                lines.append(f"{_f(path.x0)},{path.slit_taken},{_f(z)},{_f(x)}\n")
    return "".join(lines)


def write_run(out_dir: Path, scene: str, r: RunResult) -> list[Path]:
    """Write the CSVs a run produces; returns the created paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{scene}__{r.engine}_{r.mode}"
    written = []
    if r.pattern is not None:
        p = out_dir / f"{stem}.csv"
        p.write_text(pattern_csv(scene, r))
        written.append(p)
    if r.table is not None:
        p = out_dir / f"{stem}_table.csv"
        p.write_text(table_csv(scene, r))
        written.append(p)
    if r.ensembles:
        p = out_dir / f"{stem}_trajectories.csv"
        p.write_text(trajectories_csv(scene, r))
        written.append(p)
    return written


def write_scene(out_dir: Path, result: SceneResult) -> list[Path]:
    written = []
    for r in result.runs:
        written.extend(write_run(out_dir, result.name, r))
    return written
