"""Search-space definitions: parameter kinds, limits, sowing grids, distance.

Distances between plants are measured in *metric coordinates*: parameters
flagged ``normalize=True`` contribute their min-max normalized value, all
others contribute their raw value. A single pollination radius therefore
means "fraction of the range" on normalized axes and "raw units" elsewhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, UsageError

# Guards floor((hi - lo) / resolution) against representation error,
# e.g. 0.3 / 0.1 == 2.9999999999999996.
_GRID_EPS = 1e-9


class ParamKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    INTEGER = "integer"


def round_half_away(x):
    """Round to the nearest whole number, ties away from zero.

    Works on scalars and numpy arrays. Scalars come back as ``float``.
    """
    if isinstance(x, np.ndarray):
        return np.copysign(np.floor(np.abs(x) + 0.5), x)
    return math.copysign(math.floor(abs(x) + 0.5), x)


@dataclass(frozen=True)
class ParamSpec:
    """One dimension of the search space.

    Parameters
    ----------
    name : str
        Unique identifier within a space.
    kind : ParamKind
        Integer parameters are rounded after every generation step.
    lower_limit, upper_limit : float or None
        Hard bounds; ``None`` leaves that side unbounded.
    init_lo, init_hi : float
        Range used for random sowing.
    resolution : float
        Step of the sowing grid.
    normalize : bool
        Disperse (and measure distance) in min-max normalized coordinates.
        Requires two-sided limits.
    """

    name: str
    init_lo: float
    init_hi: float
    resolution: float
    kind: ParamKind = ParamKind.CONTINUOUS
    lower_limit: Optional[float] = None
    upper_limit: Optional[float] = None
    normalize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ParamKind(self.kind))
        for field in ("init_lo", "init_hi", "resolution"):
            value = getattr(self, field)
            if not math.isfinite(value):
                raise ConfigurationError(f"{self.name}: {field} must be finite, got {value!r}")
        for field in ("lower_limit", "upper_limit"):
            value = getattr(self, field)
            if value is not None and math.isnan(value):
                raise ConfigurationError(f"{self.name}: {field} is NaN")
        if self.init_lo > self.init_hi:
            raise ConfigurationError(f"{self.name}: init_lo > init_hi")
        lo, hi = self.lower_limit, self.upper_limit
        if lo is not None and hi is not None and lo > hi:
            raise ConfigurationError(f"{self.name}: lower_limit > upper_limit")
        if lo is not None and self.init_lo < lo:
            raise ConfigurationError(f"{self.name}: init_lo below lower_limit")
        if hi is not None and self.init_hi > hi:
            raise ConfigurationError(f"{self.name}: init_hi above upper_limit")
        if self.normalize and not self.two_sided:
            raise ConfigurationError(
                f"{self.name}: normalization requires two-sided limits with lower < upper"
            )
        if self.resolution <= 0:
            raise ConfigurationError(f"{self.name}: resolution must be positive")
        span = self.init_hi - self.init_lo
        if span > 0 and self.resolution > span * (1 + _GRID_EPS):
            raise ConfigurationError(f"{self.name}: resolution exceeds the initiation range")

    @property
    def two_sided(self) -> bool:
        return (
            self.lower_limit is not None
            and self.upper_limit is not None
            and self.lower_limit < self.upper_limit
        )

    @property
    def grid_size(self) -> int:
        """Number of points on the sowing grid (last point <= init_hi)."""
        span = self.init_hi - self.init_lo
        if span == 0:
            return 1
        return int(math.floor(span / self.resolution + _GRID_EPS)) + 1

    def grid_point(self, k):
        return self.init_lo + k * self.resolution


@dataclass(frozen=True)
class SpaceSpec:
    params: tuple

    def __post_init__(self):
        params = tuple(self.params)
        object.__setattr__(self, "params", params)
        if not params:
            raise ConfigurationError("a space needs at least one parameter")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ConfigurationError("parameter names must be unique")

    @property
    def dimension(self) -> int:
        return len(self.params)

    @property
    def names(self) -> list:
        return [p.name for p in self.params]

    def __len__(self):
        return len(self.params)

    def __iter__(self):
        return iter(self.params)

    def to_dict(self) -> dict:
        return {
            "params": [
                {
                    "name": p.name,
                    "kind": p.kind.value,
                    "lower_limit": p.lower_limit,
                    "upper_limit": p.upper_limit,
                    "init_lo": p.init_lo,
                    "init_hi": p.init_hi,
                    "resolution": p.resolution,
                    "normalize": p.normalize,
                }
                for p in self.params
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        return cls(tuple(ParamSpec(**p) for p in data["params"]))


# -- scalar operations -------------------------------------------------------


def clamp(spec: ParamSpec, value: float) -> float:
    """Clamp ``value`` to the limits of ``spec``; integers are rounded first."""
    value = float(value)
    if spec.kind is ParamKind.INTEGER:
        value = round_half_away(value)
    if spec.lower_limit is not None and value < spec.lower_limit:
        value = float(spec.lower_limit)
    if spec.upper_limit is not None and value > spec.upper_limit:
        value = float(spec.upper_limit)
    return value


def normalize(spec: ParamSpec, value: float) -> float:
    if not spec.two_sided:
        raise ConfigurationError(f"{spec.name}: cannot normalize without two-sided limits")
    return (value - spec.lower_limit) / (spec.upper_limit - spec.lower_limit)


def denormalize(spec: ParamSpec, unit: float) -> float:
    if not spec.two_sided:
        raise ConfigurationError(f"{spec.name}: cannot denormalize without two-sided limits")
    return clamp(spec, spec.lower_limit + unit * (spec.upper_limit - spec.lower_limit))


def random_sow(space: SpaceSpec, rng: np.random.Generator) -> list:
    """Draw one seed uniformly from the sowing grids of ``space``."""
    return sow(space, rng, 1)[0].tolist()


def distance(space: SpaceSpec, a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two vectors in metric coordinates."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (space.dimension,) or b.shape != (space.dimension,):
        raise UsageError(
            f"expected vectors of length {space.dimension}, got {a.shape} and {b.shape}"
        )
    diff = metric_coords(space, a) - metric_coords(space, b)
    return float(math.sqrt(float(np.dot(diff, diff))))


# -- vectorized operations ---------------------------------------------------


def sow(space: SpaceSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` seeds from the sowing grids; returns an ``(n, dim)`` array.

    Each column is drawn in parameter order, so the stream consumed depends
    only on ``n`` and the space.
    """
    out = np.empty((n, space.dimension))
    for j, spec in enumerate(space.params):
        k = rng.integers(0, spec.grid_size, size=n)
        out[:, j] = spec.grid_point(k)
    return clamp_rows(space, out)


def clamp_rows(space: SpaceSpec, values: np.ndarray) -> np.ndarray:
    """Apply :func:`clamp` column-wise to an ``(n, dim)`` array (returns a copy)."""
    values = np.array(values, dtype=float, copy=True)
    for j, spec in enumerate(space.params):
        col = values[..., j]
        if spec.kind is ParamKind.INTEGER:
            col = round_half_away(col)
        if spec.lower_limit is not None or spec.upper_limit is not None:
            col = np.clip(col, spec.lower_limit, spec.upper_limit)
        values[..., j] = col
    return values


def metric_coords(space: SpaceSpec, values: np.ndarray) -> np.ndarray:
    """Map raw values to the coordinates used for distances."""
    values = np.asarray(values, dtype=float)
    out = values.copy()
    for j, spec in enumerate(space.params):
        if spec.normalize:
            out[..., j] = (values[..., j] - spec.lower_limit) / (
                spec.upper_limit - spec.lower_limit
            )
    return out


def pairwise_distances(space: SpaceSpec, values: np.ndarray) -> np.ndarray:
    """Full ``(n, n)`` matrix of Euclidean distances in metric coordinates."""
    coords = metric_coords(space, np.atleast_2d(values))
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
