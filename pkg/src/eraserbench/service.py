"""HTTP service exposing the bench: validate, run, browse scenes.

Run with `uvicorn eraserbench.service:app`.  The CLI performs the same
operations in-process; this service exists for multi-client use (e.g.
the report frontend or notebook users hitting a shared instance).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from .bench import (BenchParseError, CompileError, compile_spec, parse,
                    run_scene, scenes)
from .bench.runner import RunResult

app = FastAPI(
    title="eraserbench",
    description="Two-photon double-slit bench simulator: coincidence-counting "
                "and guided-trajectory engines behind a scene DSL.",
    version="0.1.0",
)


class SceneListEntry(BaseModel):
    name: str


class SceneText(BaseModel):
    name: str
    text: str


class ValidateRequest(BaseModel):
    text: str


class ParseIssue(BaseModel):
    line: int
    column: int
    message: str
    token: str = ""


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[ParseIssue] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


class RunRequest(BaseModel):
    scene: str | None = Field(default=None, description="shipped scene name")
    text: str | None = Field(default=None, description="inline scene source")
    seed: int | None = Field(default=None, description="override all run seeds")

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.scene is None) == (self.text is None):
            raise ValueError("provide exactly one of 'scene' or 'text'")
        return self


class PatternPayload(BaseModel):
    x_m: list[float]
    rate: list[float]


class TablePayload(BaseModel):
    labels: list[str]
    probabilities: list[list[float]]


class RunPayload(BaseModel):
    engine: str
    mode: str
    kind: str
    n: int
    seed: int
    metrics: dict
    pattern: PatternPayload | None = None
    reference: PatternPayload | None = None
    table: TablePayload | None = None


class RunResponse(BaseModel):
    scene: str
    warnings: list[str]
    runs: list[RunPayload]


def _pattern_payload(p) -> PatternPayload | None:
    if p is None:
        return None
    return PatternPayload(x_m=[float(v) for v in p.positions],
                          rate=[float(v) for v in p.rates])


def _run_payload(r: RunResult) -> RunPayload:
    table = None
    if r.table is not None:
        table = TablePayload(labels=list(r.table_labels),
                             probabilities=[[float(v) for v in row]
                                            for row in r.table])
    metrics = {k: (bool(v) if isinstance(v, (bool,)) else
                   v if isinstance(v, str) else float(v))
               for k, v in r.metrics.items()}
    return RunPayload(engine=r.engine, mode=r.mode, kind=r.kind, n=r.n,
                      seed=r.seed, metrics=metrics,
                      pattern=_pattern_payload(r.pattern),
                      reference=_pattern_payload(r.reference), table=table)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/scenes", response_model=list[SceneListEntry])
def list_scenes():
    return [SceneListEntry(name=n) for n in scenes.names()]


@app.get("/scenes/{name}", response_model=SceneText)
def get_scene(name: str):
    try:
        return SceneText(name=name, text=scenes.load(name))
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc))


@app.post("/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest):
    try:
        spec = parse(req.text)
    except BenchParseError as exc:
        issue = ParseIssue(line=exc.line, column=exc.column,
                           message=exc.message, token=exc.token)
        return ValidateResponse(valid=False, errors=[issue])
    try:
        plan = compile_spec(spec)
    except CompileError as exc:
        issue = ParseIssue(line=0, column=0, message=str(exc))
        return ValidateResponse(valid=False, errors=[issue])
    return ValidateResponse(valid=True, warnings=plan.warnings)


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest):
    if req.scene is not None:
        try:
            name, text = req.scene, scenes.load(req.scene)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
    else:
        name, text = "inline", req.text
    try:
        spec = parse(text)
        plan = compile_spec(spec, name)
    except (BenchParseError, CompileError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    if req.seed is not None:
        plan.runs = tuple(r.__class__(r.engine, r.mode, r.kind, r.n, req.seed)
                          for r in plan.runs)
    try:
        result = run_scene(plan)
    except Exception as exc:
        raise HTTPException(status_code=500, detail=f"run failed: {exc}")
    return RunResponse(scene=name, warnings=plan.warnings,
                       runs=[_run_payload(r) for r in result.runs])
