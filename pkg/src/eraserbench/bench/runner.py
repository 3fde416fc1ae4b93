"""Execute compiled scene plans with either engine."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .. import analysis as an
from .. import biphoton as bp
from .. import pilotwave as pw
from .. import polarization as pol
from ..waveoptics import Grid, Pattern, ScalarField, hermite_gauss
from .compiler import HISTOGRAM_BINS, STACK_STEPS, RunPlan, ScenePlan


@dataclass
class RunResult:
    engine: str
    mode: str
    kind: str  # pattern | nearfield
    n: int
    seed: int
    pattern: Pattern | None = None
    reference: Pattern | None = None  # fringe-free companion on same grid
    table: np.ndarray | None = None  # 2x2 joint probabilities
    table_labels: tuple = ()
    ensembles: list = field(default_factory=list)  # (weight, TrajectoryEnsemble)
    metrics: dict = field(default_factory=dict)


@dataclass
class SceneResult:
    name: str
    plan: ScenePlan
    runs: list[RunResult]


# ---------------------------------------------------------------------------
# biphoton side

def _source_state(plan: ScenePlan) -> bp.BiphotonState:
    grid = plan.source_grid
    if plan.source_kind == "walborn":
        return bp.source_walborn(grid, plan.wavelength, plan.waist)
    if plan.source_kind == "menzel":
        return bp.source_menzel(grid, plan.wavelength, plan.waist)
    order = 1 if plan.source_mode == "hg1" else 0
    mode = hermite_gauss(order, plan.waist, grid, plan.wavelength)
    return bp.BiphotonState((bp.BiphotonTerm(1.0, mode, mode, pol.H, pol.H),))


def _orthodox_state(plan: ScenePlan, propagated: bool,
                    pre_slit: bool = True) -> bp.BiphotonState:
    st = _source_state(plan)
    if plan.idler_distance > 0:
        st = bp.propagate_idler(st, plan.idler_distance, plan.source_grid)
    if pre_slit and plan.pre_slit_distance > 0:
        st = bp.propagate_signal(st, plan.pre_slit_distance, plan.source_grid)
    if plan.aperture is not None:
        st = bp.apply_signal_aperture(st, plan.aperture)
        for slit, jones in plan.plates.jones.items():
            st = bp.apply_slit_wave_plate(st, slit, jones,
                                          plan.plates.phases.get(slit, 0.0))
    if plan.signal_polarizer is not None:
        st = bp.apply_signal_jones(st, pol.linear_polarizer(plan.signal_polarizer))
    if plan.idler_polarizer is not None:
        st = bp.apply_idler_jones(st, pol.linear_polarizer(plan.idler_polarizer))
    if propagated and plan.screen_distance > 0:
        st = bp.propagate_signal(st, plan.screen_distance, plan.scan_grid)
    return st


def _pattern_metrics(plan: ScenePlan, pattern: Pattern,
                     reference: Pattern | None) -> dict:
    window = plan.metric_window
    metrics = {"total_rate": float(pattern.rates.sum())}
    try:
        metrics["visibility"] = an.visibility(pattern, window)
    except ValueError:
        return metrics
    if reference is not None:
        try:
            metrics["fringe_contrast"] = an.fringe_contrast(pattern, reference,
                                                            window)
        except ValueError:
            pass
    period = plan.fringe_period
    if period is not None:
        metrics["fringe_amplitude"] = an.fringe_amplitude(pattern, period, window)
        target = pattern
        if reference is not None and "fringe_contrast" in metrics:
            target = Pattern(pattern.positions,
                             pattern.rates / np.where(reference.rates > 0,
                                                      reference.rates, 1.0))
        try:
            fit = an.fit_fringe(target, period, window)
            metrics.update(fitted_visibility=fit.visibility,
                           fitted_phase=fit.phase, fitted_period=fit.period,
                           fringe_kind=fit.kind)
        except an.FitError:
            pass
    return metrics


def _run_orthodox(plan: ScenePlan, run: RunPlan) -> RunResult:
    if run.kind == "nearfield":
        # the lobe/slit correlation is read with the source imaged onto the
        # slit plane; free-flight smearing of the lobes is not modeled here
        st = _orthodox_state(plan, propagated=False, pre_slit=False)
        table = bp.near_field_correlation(st)
        result = RunResult(run.engine, run.mode, run.kind, run.n, run.seed,
                           table=table,
                           table_labels=("upper", "lower"))
        result.metrics = {
            "diagonal": float(np.trace(table)),
            "off_diagonal": float(table.sum() - np.trace(table)),
        }
        return result
    st = _orthodox_state(plan, propagated=True)
    det = plan.idler_detector if run.mode == "coincidence" \
        else bp.IdlerDetector("bucket")
    label = f"{plan.name} orthodox {run.mode}"
    pattern = bp.coincidence_pattern(st, det, label)
    reference = bp.coincidence_pattern(st, det, label + " envelope",
                                       incoherent=True)
    result = RunResult(run.engine, run.mode, run.kind, run.n, run.seed,
                       pattern=pattern, reference=reference)
    result.metrics = _pattern_metrics(plan, pattern, reference)
    return result


# ---------------------------------------------------------------------------
# pilot-wave side

def _initial_fields(plan: ScenePlan, jones: np.ndarray):
    grid = plan.source_grid
    order = 1 if plan.source_mode == "hg1" else 0
    mode = hermite_gauss(order, plan.waist, grid, plan.wavelength)
    h = ScalarField(mode.samples * jones[0], grid.x0, grid.dx, plan.wavelength)
    v = ScalarField(mode.samples * jones[1], grid.x0, grid.dx, plan.wavelength)
    return h, v


def _branches(plan: ScenePlan) -> list[tuple[np.ndarray, float]]:
    """(input Jones, weight) per precomputed stack.

    A polarizer on either arm post-selects the pairs: the surviving
    ensemble rides the wave conditioned on that outcome, which for the
    anti-correlated pair pins the signal polarization to the mirror of
    the analyzer angle (pass rate 1/2, recorded by the caller).  Without
    a polarizer the pair's definite polarization is an even mixture over
    the two anti-correlated branches; branches only produce distinct
    stacks when slit plates act on them.
    """
    theta = plan.conditioning_angle
    if theta is not None and plan.source_kind == "walborn":
        jones, _ = pw.walborn_conditioning(theta)
        return [(jones, 1.0)]
    if plan.source_kind == "walborn" and plan.plates.jones:
        return [(pol.H, 0.5), (pol.V, 0.5)]
    return [(pol.H, 1.0)]


def _build_stack(plan: ScenePlan, jones: np.ndarray) -> pw.WaveStack:
    h, v = _initial_fields(plan, jones)
    elements = []
    if plan.aperture is not None:
        elements.append(pw.StackElement(plan.pre_slit_distance, plan.aperture,
                                        plan.plates))
    z_final = plan.detector_at if plan.screen_distance > 0 \
        else plan.pre_slit_distance
    if z_final <= 0:
        raise ValueError("pilot-wave run needs a positive flight distance")
    # a slit-terminated (near-field) flight is smooth; fewer planes suffice
    n_steps = STACK_STEPS if plan.screen_distance > 0 else 64
    return pw.build_wave_stack(h, v, elements, z_final, n_steps=n_steps,
                               grid=plan.stack_grid)


_STACK_CACHE: dict = {}


def _cached_stack(plan: ScenePlan, jones: np.ndarray) -> pw.WaveStack:
    key = (plan.name, plan.wavelength, plan.waist, plan.source_mode,
           plan.pre_slit_distance, plan.detector_at, plan.screen_distance,
           plan.aperture, tuple(np.round(np.asarray(jones, complex), 12)),
           tuple(sorted((s, tuple(np.round(m, 12).ravel()),
                         plan.plates.phases.get(s, 0.0))
                        for s, m in plan.plates.jones.items())),
           plan.stack_grid)
    if key not in _STACK_CACHE:
        _STACK_CACHE[key] = _build_stack(plan, jones)
    return _STACK_CACHE[key]


def _run_pilotwave(plan: ScenePlan, run: RunPlan) -> RunResult:
    branches = _branches(plan)
    counts = [int(round(w * run.n)) for _, w in branches]
    counts[0] += run.n - sum(counts)
    keep = max(8, 200 // len(branches))

    ensembles = []
    stacks = []
    for i, ((jones, w), n_b) in enumerate(zip(branches, counts)):
        stack = _cached_stack(plan, jones)
        ens = pw.run_trajectories(stack, n_b, seed=run.seed + i,
                                  keep_paths=keep)
        ensembles.append((w, ens))
        stacks.append((w, stack, n_b))

    result = RunResult(run.engine, run.mode, run.kind, run.n, run.seed,
                       ensembles=ensembles)
    no_crossing = all(e.no_crossing for _, e in ensembles)

    x_range = (plan.scan_lo, plan.scan_hi)
    arrivals = np.concatenate([e.arrivals for _, e in ensembles])
    counts_hist, edges = np.histogram(arrivals, bins=HISTOGRAM_BINS,
                                      range=x_range)
    centers = 0.5 * (edges[:-1] + edges[1:])
    hist = Pattern(centers, counts_hist / max(counts_hist.sum(), 1),
                   f"{plan.name} pilotwave {run.mode}",
                   {"n": run.n, "bins": HISTOGRAM_BINS})

    # equivariance against the weighted final intensity of the stacks
    ref = np.zeros(HISTOGRAM_BINS)
    for w, stack, n_b in stacks:
        ref += (n_b / run.n) * pw.intensity_histogram(
            stack, HISTOGRAM_BINS, x_range).rates
    l1 = float(np.sum(np.abs(hist.rates - ref / max(ref.sum(), 1e-300))))

    if run.kind == "nearfield":
        # joint outcome table: slit taken x birth lobe, over decided pairs
        table = np.zeros((2, 2))
        labels = ("upper", "lower")
        for _, ens in ensembles:
            for i_s, slit in enumerate(labels):
                for i_i, lobe in enumerate(labels):
                    table[i_s, i_i] += np.sum(
                        (ens.slit_taken == slit) & (ens.birth_lobe == lobe))
        passed = table.sum()
        result.table = table / passed if passed else table
        result.table_labels = labels
        agree = float(np.trace(result.table))
        result.metrics = {"lobe_slit_agreement": agree,
                          "blocked_fraction": float(1.0 - passed / run.n),
                          "equivariance_l1": l1,
                          "no_crossing": no_crossing}
        return result
    result.pattern = hist

    # fringe metrics against the coincidence engine's fringe-free envelope
    env_state = _orthodox_state(plan, propagated=True)
    det = plan.idler_detector if run.mode == "coincidence" \
        else bp.IdlerDetector("bucket")
    env = bp.coincidence_pattern(env_state, det, incoherent=True)
    env_bins = Pattern(centers, np.interp(centers, env.positions, env.rates))
    env_bins = an.normalize(env_bins)
    result.reference = env_bins
    result.metrics = _pattern_metrics(plan, hist, env_bins)
    result.metrics.update(equivariance_l1=l1, no_crossing=no_crossing)
    if plan.conditioning_angle is not None and plan.source_kind == "walborn":
        result.metrics["pass_rate"] = pw.walborn_conditioning(
            plan.conditioning_angle)[1]
    return result


def run_scene(plan: ScenePlan) -> SceneResult:
    results = []
    for run in plan.runs:
        if run.engine == "orthodox":
            results.append(_run_orthodox(plan, run))
        else:
            results.append(_run_pilotwave(plan, run))
    return SceneResult(plan.name, plan, results)
