"""Repeated-run benchmark harness: paddy runs, random-search baseline, summaries.

Outputs (all UTF-8 CSV, written to ``out_dir`` when one is given):

``runs.csv``
    ``run, rng_seed, best_fitness, metric, evaluations, iterations,
    termination_reason, wall_time_s`` (``metric`` is the headline value, e.g.
    positive MSE for gramacy-lee).
``curves.csv``
    ``run, iteration, best_so_far, mean_new, new_plants``. One row per
    generation (0 = random sowing). For random search an "iteration" is a
    block of evaluations.
``summary.csv``
    ``key, value`` pairs: benchmark, metric, higher_is_better, runs, best,
    worst, mean, sd, sd_defined and benchmark-specific extras.
"""

from __future__ import annotations

import csv
import dataclasses
import importlib
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .. import engine, trial_store
from ..engine import GaussianKind, Mode, RunnerConfig
from ..errors import UsageError
from ..objectives import BIMODAL_SUCCESS, Bimodal, GramacyLeeInterpolation, SurrogateMLP
from ..objectives.base import Objective
from ..objectives.molecules import DEFAULT_ALPHA, DEFAULT_BETA, MoleculeObjective
from ..space import ParamSpec, SpaceSpec, sow

logger = logging.getLogger(__name__)

LATENT_DIM = 56


@dataclass(frozen=True)
class BenchmarkDefinition:
    name: str
    config: RunnerConfig
    random_evals: int
    metric: str = "fitness"
    higher_is_better: bool = True
    needs_decoder: bool = False

    def to_metric(self, fitness: float) -> float:
        # Engine fitness is -MSE for the interpolation benchmark.
        return -fitness if self.metric == "mse" else fitness


BENCHMARKS: Dict[str, BenchmarkDefinition] = {
    "bimodal": BenchmarkDefinition(
        "bimodal",
        RunnerConfig(50, 50, 100, 0.02, 5, Mode.GENERATIONAL, GaussianKind.SCALED),
        random_evals=500,
    ),
    "gramacy-lee": BenchmarkDefinition(
        "gramacy-lee",
        RunnerConfig(25, 25, 25, 0.02, 10, Mode.GENERATIONAL, GaussianKind.DEFAULT),
        random_evals=5000,
        metric="mse",
        higher_is_better=False,
    ),
    "surrogate-mlp": BenchmarkDefinition(
        "surrogate-mlp",
        RunnerConfig(25, 5, 10, 0.2, 7, Mode.GENERATIONAL, GaussianKind.DEFAULT),
        random_evals=200,
    ),
    "molecule-score": BenchmarkDefinition(
        "molecule-score",
        RunnerConfig(250, 15, 25, 5.0, 30, Mode.GENERATIONAL, GaussianKind.SCALED),
        random_evals=3500,
        needs_decoder=True,
    ),
}


def latent_space(dim: int = LATENT_DIM) -> SpaceSpec:
    return SpaceSpec(tuple(
        ParamSpec(f"z{i}", -1.0, 1.0, 0.05, lower_limit=-1.0, upper_limit=1.0) for i in range(dim)
    ))


@dataclass
class BenchmarkSpec:
    name: str
    runs: int = 100
    base_seed: int = 0
    overrides: dict = field(default_factory=dict)
    out_dir: Optional[str] = None
    jobs: int = 1
    save_trials: bool = False
    random_evals: Optional[int] = None
    # molecule-score only
    decoder: Optional[str] = None
    target_fp: Optional[frozenset] = None
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    molecule_metric: str = "custom"

    def __post_init__(self):
        if self.name not in BENCHMARKS:
            raise UsageError(f"unknown benchmark {self.name!r}; choose from {sorted(BENCHMARKS)}")
        if self.runs < 1:
            raise UsageError("run count must be at least 1")
        unknown = set(self.overrides) - {f.name for f in dataclasses.fields(RunnerConfig)}
        if unknown:
            raise UsageError(f"unknown config overrides: {sorted(unknown)}")

    @property
    def definition(self) -> BenchmarkDefinition:
        return BENCHMARKS[self.name]

    def config_for(self, run: int) -> RunnerConfig:
        overrides = {k: v for k, v in self.overrides.items() if v is not None}
        overrides["rng_seed"] = self.base_seed + run
        return dataclasses.replace(self.definition.config, **overrides)


@dataclass(frozen=True)
class RunRow:
    run: int
    rng_seed: int
    best_fitness: float
    metric: float
    evaluations: int
    iterations: int
    termination_reason: str
    wall_time_s: float


@dataclass(frozen=True)
class CurveRow:
    run: int
    iteration: int
    best_so_far: float
    mean_new: float
    new_plants: int


@dataclass
class RunSummary:
    """Aggregate of the headline metric over runs.

    ``sd`` is the sample standard deviation (n - 1 denominator); with a
    single run it is reported as 0 and ``sd_defined`` is False.
    """

    benchmark: str
    metric: str
    higher_is_better: bool
    rows: List[RunRow]
    best: float
    worst: float
    mean: float
    sd: float
    sd_defined: bool
    curves: List[CurveRow] = field(default_factory=list)
    extras: Dict[str, float] = field(default_factory=dict)


def summarize(
    rows: Sequence,
    metric: str = "fitness",
    higher_is_better: bool = True,
    benchmark: str = "",
) -> RunSummary:
    """Best / worst / mean / sample sd of the headline metric.

    ``rows`` may be :class:`RunRow` objects or bare metric values.
    """
    if not rows:
        raise UsageError("cannot summarize zero runs")
    rows = [
        r if isinstance(r, RunRow) else RunRow(i, i, float(r), float(r), 0, 0, "", 0.0)
        for i, r in enumerate(rows)
    ]
    values = [r.metric for r in rows]
    best, worst = (max(values), min(values)) if higher_is_better else (min(values), max(values))
    sd_defined = len(values) > 1
    return RunSummary(
        benchmark=benchmark,
        metric=metric,
        higher_is_better=higher_is_better,
        rows=rows,
        best=best,
        worst=worst,
        mean=statistics.fmean(values),
        sd=statistics.stdev(values) if sd_defined else 0.0,
        sd_defined=sd_defined,
    )


# -- objectives ----------------------------------------------------------------


def load_callable(path: str) -> Callable:
    """Import ``package.module:attribute``."""
    module, sep, attr = path.partition(":")
    if not sep or not module or not attr:
        raise UsageError(f"expected 'module:function', got {path!r}")
    try:
        obj = importlib.import_module(module)
    except ImportError as exc:
        raise UsageError(f"cannot import {module!r}: {exc}") from None
    for part in attr.split("."):
        try:
            obj = getattr(obj, part)
        except AttributeError:
            raise UsageError(f"{module!r} has no attribute {attr!r}") from None
    if not callable(obj):
        raise UsageError(f"{path!r} is not callable")
    return obj


def build_problem(spec: BenchmarkSpec):
    """Return ``(space, objective)`` for a benchmark spec."""
    name = spec.name
    if name == "bimodal":
        obj: Objective = Bimodal()
    elif name == "gramacy-lee":
        obj = GramacyLeeInterpolation()
    elif name == "surrogate-mlp":
        obj = SurrogateMLP()
    else:
        if spec.decoder is None or not spec.target_fp:
            raise UsageError("molecule-score needs a latent decoder (module:function) and a target fingerprint")
        obj = MoleculeObjective(
            load_callable(spec.decoder), spec.target_fp, LATENT_DIM,
            spec.alpha, spec.beta, spec.molecule_metric,
        )
        return latent_space(), obj
    return obj.default_space(), obj


# -- paddy runs ----------------------------------------------------------------


def _one_paddy_run(spec: BenchmarkSpec, run: int):
    space, objective = build_problem(spec)
    config = spec.config_for(run)
    definition = spec.definition
    curves: List[CurveRow] = []

    def sink(report: engine.IterationReport):
        if report.new_plants:
            curves.append(CurveRow(run, report.iteration, report.best_fitness,
                                   report.mean_new_fitness, report.new_plants))

    t0 = time.perf_counter()
    result = engine.run(space, objective, config, sink=sink)
    wall = time.perf_counter() - t0
    state = result.state
    row = RunRow(
        run=run,
        rng_seed=config.rng_seed,
        best_fitness=result.best.fitness,
        metric=definition.to_metric(result.best.fitness),
        evaluations=len(state.population),
        iterations=state.iteration,
        termination_reason=state.termination_reason.value,
        wall_time_s=wall,
    )
    if spec.save_trials and spec.out_dir:
        trial_dir = os.path.join(spec.out_dir, "trials")
        os.makedirs(trial_dir, exist_ok=True)
        trial_store.save(state, os.path.join(trial_dir, f"run{run:04d}{trial_store.FILE_SUFFIX}"), spec.name)
    return row, curves


def _map_runs(fn, spec: BenchmarkSpec, runs: range):
    if spec.jobs > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(fn, [spec] * len(runs), runs))
    return [fn(spec, r) for r in runs]


def _collect(spec: BenchmarkSpec, outcomes) -> RunSummary:
    definition = spec.definition
    rows = [row for row, _ in outcomes]
    summary = summarize(rows, definition.metric, definition.higher_is_better, spec.name)
    summary.curves = [c for _, curves in outcomes for c in curves]
    if spec.name == "bimodal":
        summary.extras["success_threshold"] = BIMODAL_SUCCESS
        summary.extras["successes"] = sum(r.best_fitness > BIMODAL_SUCCESS for r in rows)
    if spec.out_dir:
        write_outputs(summary, spec.out_dir)
    return summary


def run_benchmark(spec: BenchmarkSpec) -> RunSummary:
    """``spec.runs`` independent paddy runs with seeds ``base_seed + i``."""
    outcomes = _map_runs(_one_paddy_run, spec, range(spec.runs))
    return _collect(spec, outcomes)


# -- random search -------------------------------------------------------------


def search_box(space: SpaceSpec) -> SpaceSpec:
    """Widen each sowing range to the parameter's limits, where both exist.

    Random search draws over the full allowed range; paddy's narrower sowing
    box is a head start the baseline does not get.
    """
    return SpaceSpec(tuple(
        dataclasses.replace(p, init_lo=p.lower_limit, init_hi=p.upper_limit) if p.two_sided else p
        for p in space.params
    ))


def _random_execution(objective, space: SpaceSpec, n_evals: int, rng_seed: int,
                      metric: Callable[[float], float], run: int, block: int):
    space = search_box(space)
    rng = np.random.default_rng(rng_seed)
    t0 = time.perf_counter()
    best = -math.inf
    curves = []
    for i, start in enumerate(range(0, n_evals, block)):
        values = sow(space, rng, min(block, n_evals - start))
        fitness = engine.evaluate_batch(objective, values)
        best = max(best, float(fitness.max()))
        curves.append(CurveRow(run, i, best, float(fitness.mean()), len(values)))
    row = RunRow(run, rng_seed, best, metric(best), n_evals, len(curves), "budget", time.perf_counter() - t0)
    return row, curves


def random_search(objective, space: SpaceSpec, n_evals: int, rng_seed: int,
                  block: int = 250) -> RunSummary:
    """Uniform grid draws between the limits (see :func:`search_box`); one execution."""
    if n_evals < 1:
        raise UsageError("n_evals must be at least 1")
    row, curves = _random_execution(objective, space, n_evals, rng_seed, lambda f: f, 0, block)
    summary = summarize([row])
    summary.curves = curves
    return summary


def _one_random_run(spec: BenchmarkSpec, run: int):
    space, objective = build_problem(spec)
    n_evals = spec.random_evals or spec.definition.random_evals
    return _random_execution(objective, space, n_evals, spec.base_seed + run,
                             spec.definition.to_metric, run, 250)


def random_baseline(spec: BenchmarkSpec, n_evals: Optional[int] = None) -> RunSummary:
    """``spec.runs`` random-search executions of ``n_evals`` draws each."""
    if n_evals is not None:
        if n_evals < 1:
            raise UsageError("n_evals must be at least 1")
        spec = dataclasses.replace(spec, random_evals=n_evals)
    outcomes = _map_runs(_one_random_run, spec, range(spec.runs))
    return _collect(spec, outcomes)


# -- CSV i/o -------------------------------------------------------------------

RUN_FIELDS = [f.name for f in dataclasses.fields(RunRow)]
CURVE_FIELDS = [f.name for f in dataclasses.fields(CurveRow)]


def _fmt(value):
    return repr(value) if isinstance(value, float) else str(value)


def write_outputs(summary: RunSummary, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "runs.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_FIELDS)
        for row in summary.rows:
            writer.writerow([_fmt(getattr(row, f)) for f in RUN_FIELDS])
    with open(os.path.join(out_dir, "curves.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_FIELDS)
        for row in summary.curves:
            writer.writerow([_fmt(getattr(row, f)) for f in CURVE_FIELDS])
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "value"])
        for key in ("benchmark", "metric", "higher_is_better", "best", "worst", "mean", "sd", "sd_defined"):
            writer.writerow([key, _fmt(getattr(summary, key))])
        writer.writerow(["runs", len(summary.rows)])
        for key, value in summary.extras.items():
            writer.writerow([key, _fmt(value)])


def _bool(text: str) -> bool:
    return text == "True"


def read_outputs(out_dir: str) -> RunSummary:
    """Re-parse the three CSV files written by :func:`write_outputs`."""
    converters = {f.name: f.type for f in dataclasses.fields(RunRow)}
    casts = {"int": int, "float": float, "str": str}
    with open(os.path.join(out_dir, "runs.csv"), newline="", encoding="utf-8") as fh:
        rows = [RunRow(**{k: casts[converters[k]](v) for k, v in r.items()}) for r in csv.DictReader(fh)]
    curve_types = {f.name: f.type for f in dataclasses.fields(CurveRow)}
    with open(os.path.join(out_dir, "curves.csv"), newline="", encoding="utf-8") as fh:
        curves = [CurveRow(**{k: casts[curve_types[k]](v) for k, v in r.items()}) for r in csv.DictReader(fh)]
    with open(os.path.join(out_dir, "summary.csv"), newline="", encoding="utf-8") as fh:
        kv = {r["key"]: r["value"] for r in csv.DictReader(fh)}
    core = {"benchmark", "metric", "higher_is_better", "best", "worst", "mean", "sd", "sd_defined", "runs"}
    return RunSummary(
        benchmark=kv["benchmark"],
        metric=kv["metric"],
        higher_is_better=_bool(kv["higher_is_better"]),
        rows=rows,
        best=float(kv["best"]),
        worst=float(kv["worst"]),
        mean=float(kv["mean"]),
        sd=float(kv["sd"]),
        sd_defined=_bool(kv["sd_defined"]),
        curves=curves,
        extras={k: float(v) for k, v in kv.items() if k not in core},
    )
