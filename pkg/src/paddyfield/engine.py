"""Paddy field algorithm: sowing, selection, seeding, pollination, dispersion.

The engine always maximizes. A run is a pure function of the space, the
objective and the :class:`RunnerConfig` (including ``rng_seed``); all
randomness flows through one PCG64 generator held on the :class:`RunnerState`
so that a state can be saved and resumed bit-exactly.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import space as sp
from .errors import ConfigurationError, EvaluationError, InvariantViolation, UsageError

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"

DEFAULT_SIGMA = 0.2
# Standard deviation of the random walk applied to inherited scaling terms.
DELTA_SIGMA = 0.2
# Fraction of the candidate pool selected when the pool is smaller than the threshold.
SMALL_POOL_FRACTION = 0.75
# Quantiles tried, in order, when no plant has a neighbour at the configured radius.
FALLBACK_QUANTILES = tuple(round(0.75 - 0.05 * i, 2) for i in range(15))


class Mode(str, enum.Enum):
    POPULATION = "population"
    GENERATIONAL = "generational"


class GaussianKind(str, enum.Enum):
    DEFAULT = "default"
    SCALED = "scaled"


class TerminationReason(str, enum.Enum):
    ITERATION_LIMIT = "iteration_limit"
    FITNESS_PLATEAU = "fitness_plateau"


@dataclass(frozen=True)
class Seed:
    id: int
    params: Tuple[float, ...]
    deltas: Tuple[float, ...]
    parent_id: Optional[int] = None
    born_iteration: int = 0


@dataclass(frozen=True)
class Plant:
    seed: Seed
    fitness: float

    @property
    def id(self) -> int:
        return self.seed.id

    @property
    def params(self) -> Tuple[float, ...]:
        return self.seed.params


@dataclass(frozen=True)
class RunnerConfig:
    """Hyperparameters of a paddy run.

    ``s_max`` is the maximum number of seeds a selected plant may produce
    (the top plant of every selection gets exactly ``s_max`` before
    pollination).
    """

    random_seed_count: int
    threshold: int
    s_max: int
    radius: float
    iterations: int
    mode: Mode = Mode.GENERATIONAL
    gaussian: GaussianKind = GaussianKind.DEFAULT
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "gaussian", GaussianKind(self.gaussian))
        for name in ("random_seed_count", "threshold", "s_max", "iterations"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ConfigurationError(f"radius must be positive and finite, got {self.radius!r}")
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise ConfigurationError("rng_seed must be a non-negative integer")
        object.__setattr__(self, "rng_seed", int(self.rng_seed))

    def to_dict(self) -> dict:
        return {
            "random_seed_count": self.random_seed_count,
            "threshold": self.threshold,
            "s_max": self.s_max,
            "radius": self.radius,
            "iterations": self.iterations,
            "mode": self.mode.value,
            "gaussian": self.gaussian.value,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunnerConfig":
        return cls(**data)


@dataclass
class RunnerState:
    config: RunnerConfig
    space: sp.SpaceSpec
    population: List[Plant]
    rng: np.random.Generator
    iteration: int = 0
    terminated: bool = False
    termination_reason: Optional[TerminationReason] = None

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    def best(self) -> Plant:
        return best_plant(self.population)


@dataclass(frozen=True)
class IterationReport:
    """What one step did. ``iteration`` is the generation the step produced."""

    iteration: int
    selected_ids: Tuple[int, ...]
    seed_counts: Tuple[int, ...]
    pollinated_counts: Tuple[int, ...]
    radius_used: Optional[float]
    fallback_uniform: bool
    new_plants: int
    best_fitness: float
    mean_new_fitness: float
    terminated: bool = False
    termination_reason: Optional[TerminationReason] = None


class RadiusResult(NamedTuple):
    radius_used: Optional[float]
    neighbors: List[int]
    fallback_uniform: bool


class RunResult(NamedTuple):
    state: RunnerState
    reports: List[IterationReport]
    best: Plant


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def best_plant(plants: Sequence[Plant]) -> Plant:
    """Highest fitness; ties go to the lowest id."""
    if not plants:
        raise UsageError("no plants to choose from")
    return min(plants, key=lambda p: (-p.fitness, p.id))


# -- objective evaluation ------------------------------------------------------


def evaluate_batch(objective, values: np.ndarray) -> np.ndarray:
    """Evaluate rows of ``values``; rejects any non-finite fitness.

    Objectives exposing ``evaluate_batch`` get the whole matrix at once;
    otherwise ``evaluate`` (or the objective itself, if callable) is applied
    row by row in order.
    """
    values = np.atleast_2d(values)
    if len(values) == 0:
        return np.empty(0)
    if hasattr(objective, "evaluate_batch"):
        fitness = np.asarray(objective.evaluate_batch(values), dtype=float).reshape(-1)
    else:
        fn = objective.evaluate if hasattr(objective, "evaluate") else objective
        fitness = np.array([float(fn(row.tolist())) for row in values])
    if fitness.shape != (len(values),):
        raise EvaluationError(f"objective returned {fitness.shape} values for {len(values)} seeds")
    bad = ~np.isfinite(fitness)
    if bad.any():
        row = values[int(np.argmax(bad))]
        raise EvaluationError(
            f"objective returned non-finite fitness at {row.tolist()}", params=row.tolist()
        )
    return fitness


# -- phases --------------------------------------------------------------------


def init_run(space: sp.SpaceSpec, objective, config: RunnerConfig) -> RunnerState:
    """Sow ``config.random_seed_count`` random seeds and evaluate them."""
    rng = make_rng(config.rng_seed)
    values = sp.sow(space, rng, config.random_seed_count)
    fitness = evaluate_batch(objective, values)
    zeros = (0.0,) * space.dimension
    population = [
        Plant(Seed(i, tuple(row.tolist()), zeros, None, 0), float(y))
        for i, (row, y) in enumerate(zip(values, fitness))
    ]
    return RunnerState(config=config, space=space, population=population, rng=rng)


def effective_threshold(pool_size: int, threshold: int) -> int:
    if pool_size >= threshold:
        return threshold
    return max(1, int(sp.round_half_away(SMALL_POOL_FRACTION * pool_size)))


def candidate_pool(state: RunnerState) -> List[Plant]:
    if state.config.mode is Mode.POPULATION:
        return list(state.population)
    return [p for p in state.population if p.seed.born_iteration == state.iteration]


def select_plants(state: RunnerState) -> List[Plant]:
    """Top plants of the candidate pool, sorted by ascending fitness."""
    pool = candidate_pool(state)
    if not pool:
        raise InvariantViolation(
            f"empty candidate pool at iteration {state.iteration} ({state.config.mode.value} mode)"
        )
    h = effective_threshold(len(pool), state.config.threshold)
    ranked = sorted(pool, key=lambda p: (-p.fitness, p.id))[:h]
    ranked.reverse()
    return ranked


def seed_count(y_star: float, y_t: float, y_max: float, s_max: int) -> int:
    """Seeds for a selected plant, linear in its min-max normalized fitness."""
    if not y_t <= y_star <= y_max:
        raise InvariantViolation(f"fitness {y_star} outside selected range [{y_t}, {y_max}]")
    if y_max == y_t:
        raise InvariantViolation("seed_count undefined when y_t == y_max (run has plateaued)")
    s = int(sp.round_half_away(s_max * (y_star - y_t) / (y_max - y_t)))
    return min(max(s, 0), s_max)


def _neighbor_counts(dist: np.ndarray, radius: float, inclusive: bool = False) -> List[int]:
    close = dist <= radius if inclusive else dist - radius < 0
    np.fill_diagonal(close, False)
    return close.sum(axis=1).astype(int).tolist()


def _param_matrix(plants: Sequence[Plant]) -> np.ndarray:
    return np.array([p.params for p in plants], dtype=float)


def count_neighbors(selected: Sequence[Plant], space: sp.SpaceSpec, radius: float) -> List[int]:
    """Number of other selected plants strictly within ``radius`` of each plant."""
    if radius <= 0:
        raise UsageError("radius must be positive")
    if len(selected) == 0:
        return []
    return _neighbor_counts(sp.pairwise_distances(space, _param_matrix(selected)), radius)


def effective_radius(selected: Sequence[Plant], space: sp.SpaceSpec, radius: float) -> RadiusResult:
    """Neighbour counts with the adaptive-radius fallback.

    When nobody has a neighbour at ``radius``, quantiles 0.75, 0.70, ...,
    0.05 of the pairwise distances are tried as the radius. A quantile is an
    observed (or interpolated) distance, so those radii count a neighbour at
    ``distance <= radius``. If every quantile fails, each plant is assigned
    one neighbour, which makes the pollination factor 1 for everybody.
    """
    n = len(selected)
    if n == 0:
        raise UsageError("no selected plants")
    if n == 1:
        return RadiusResult(None, [1], True)
    dist = sp.pairwise_distances(space, _param_matrix(selected))
    v = _neighbor_counts(dist, radius)
    if any(v):
        return RadiusResult(float(radius), v, False)
    pair_dists = dist[np.triu_indices(n, k=1)]
    for q in FALLBACK_QUANTILES:
        r = float(np.quantile(pair_dists, q))
        v = _neighbor_counts(dist, r, inclusive=True)
        if any(v):
            return RadiusResult(r, v, False)
    return RadiusResult(None, [1] * n, True)


def pollination_factor(v: int, v_max: int) -> float:
    if v < 0 or v > v_max:
        raise InvariantViolation(f"neighbour count {v} outside [0, {v_max}]")
    if v_max == 0:
        return 1.0
    return math.exp(v / v_max - 1.0)


def pollinated_seed_count(u: float, s: int) -> int:
    return int(sp.round_half_away(u * s))


def scaled_sigma(delta):
    """Dispersion width for scaling term ``delta``: ``(0.2**10) ** delta``."""
    return (DEFAULT_SIGMA ** 10) ** delta


def perturb(
    space: sp.SpaceSpec,
    centre: Sequence[float],
    sigmas: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Gaussian draws around ``centre`` with per-row, per-parameter widths.

    ``sigmas`` has shape ``(count, dim)``. Normalized parameters are sampled
    in unit coordinates and mapped back; results are clamped and rounded.
    """
    sigmas = np.atleast_2d(np.asarray(sigmas, dtype=float))
    mean = sp.metric_coords(space, np.asarray(centre, dtype=float))
    draws = rng.normal(mean, sigmas)
    for j, spec in enumerate(space.params):
        if spec.normalize:
            draws[:, j] = spec.lower_limit + draws[:, j] * (spec.upper_limit - spec.lower_limit)
    return sp.clamp_rows(space, draws)


def disperse(
    parent: Plant,
    count: int,
    space: sp.SpaceSpec,
    gaussian: GaussianKind,
    rng: np.random.Generator,
    *,
    first_id: int = 0,
    born_iteration: int = 0,
) -> List[Seed]:
    """Sample ``count`` children of ``parent``; ids start at ``first_id``."""
    if count < 0:
        raise UsageError("count must be non-negative")
    if count == 0:
        return []
    dim = space.dimension
    if GaussianKind(gaussian) is GaussianKind.SCALED:
        deltas = rng.normal(np.asarray(parent.seed.deltas), DELTA_SIGMA, size=(count, dim))
        sigmas = scaled_sigma(deltas)
    else:
        deltas = np.zeros((count, dim))
        sigmas = np.full((count, dim), DEFAULT_SIGMA)
    values = perturb(space, parent.params, sigmas, rng)
    return [
        Seed(first_id + i, tuple(values[i].tolist()), tuple(deltas[i].tolist()), parent.id, born_iteration)
        for i in range(count)
    ]


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(values)) if len(values) else float("nan")


def initial_report(state: RunnerState) -> IterationReport:
    """Pseudo-report for the random sowing (generation 0)."""
    roots = [p for p in state.population if p.seed.born_iteration == 0]
    return IterationReport(
        iteration=0,
        selected_ids=(),
        seed_counts=(),
        pollinated_counts=(),
        radius_used=None,
        fallback_uniform=False,
        new_plants=len(roots),
        best_fitness=best_plant(state.population).fitness,
        mean_new_fitness=_mean([p.fitness for p in roots]),
    )


def step(state: RunnerState, objective) -> Tuple[RunnerState, IterationReport]:
    """Advance ``state`` by one generation (in place) and report what happened.

    On an evaluation error the state, including its RNG, is left untouched.
    """
    if state.terminated:
        raise UsageError("run already terminated")
    cfg, space = state.config, state.space
    selected = select_plants(state)
    ids = tuple(p.id for p in selected)
    y_t, y_max = selected[0].fitness, selected[-1].fitness

    if y_t == y_max:
        state.terminated = True
        state.termination_reason = TerminationReason.FITNESS_PLATEAU
        logger.debug("iteration %d: plateau at fitness %r", state.iteration, y_max)
        return state, IterationReport(
            iteration=state.iteration + 1,
            selected_ids=ids,
            seed_counts=(0,) * len(ids),
            pollinated_counts=(0,) * len(ids),
            radius_used=None,
            fallback_uniform=False,
            new_plants=0,
            best_fitness=best_plant(state.population).fitness,
            mean_new_fitness=float("nan"),
            terminated=True,
            termination_reason=TerminationReason.FITNESS_PLATEAU,
        )

    s = [seed_count(p.fitness, y_t, y_max, cfg.s_max) for p in selected]
    radius_used, v, fallback = effective_radius(selected, space, cfg.radius)
    v_max = max(v)
    big_s = [pollinated_seed_count(pollination_factor(vi, v_max), si) for vi, si in zip(v, s)]

    generation = state.iteration + 1
    saved_rng = state.rng.bit_generator.state
    seeds: List[Seed] = []
    next_id = len(state.population)
    try:
        for parent, count in zip(selected, big_s):
            children = disperse(
                parent, count, space, cfg.gaussian, state.rng,
                first_id=next_id, born_iteration=generation,
            )
            seeds.extend(children)
            next_id += count
        fitness = evaluate_batch(objective, np.array([sd.params for sd in seeds]).reshape(len(seeds), space.dimension))
    except Exception:
        state.rng.bit_generator.state = saved_rng
        raise

    new_plants = [Plant(sd, float(y)) for sd, y in zip(seeds, fitness)]
    state.population.extend(new_plants)
    state.iteration = generation
    if state.iteration >= cfg.iterations:
        state.terminated = True
        state.termination_reason = TerminationReason.ITERATION_LIMIT
    if not new_plants:
        state.terminated = True
        state.termination_reason = TerminationReason.FITNESS_PLATEAU

    report = IterationReport(
        iteration=generation,
        selected_ids=ids,
        seed_counts=tuple(s),
        pollinated_counts=tuple(big_s),
        radius_used=radius_used,
        fallback_uniform=fallback,
        new_plants=len(new_plants),
        best_fitness=best_plant(state.population).fitness,
        mean_new_fitness=_mean([p.fitness for p in new_plants]),
        terminated=state.terminated,
        termination_reason=state.termination_reason,
    )
    logger.debug(
        "iteration %d: %d selected, %d new plants, best %r",
        generation, len(ids), len(new_plants), report.best_fitness,
    )
    return state, report


def resume(
    state: RunnerState,
    objective,
    sink: Optional[Callable[[IterationReport], None]] = None,
) -> RunResult:
    """Step ``state`` until it terminates."""
    reports = []
    while not state.terminated:
        state, report = step(state, objective)
        reports.append(report)
        if sink is not None:
            sink(report)
    return RunResult(state, reports, state.best())


def run(
    space: sp.SpaceSpec,
    objective,
    config: RunnerConfig,
    sink: Optional[Callable[[IterationReport], None]] = None,
) -> RunResult:
    """Full run: sow, then step until the iteration limit or a plateau.

    ``sink`` receives the generation-0 report followed by one report per step.
    """
    state = init_run(space, objective, config)
    if sink is not None:
        sink(initial_report(state))
    return resume(state, objective, sink)
