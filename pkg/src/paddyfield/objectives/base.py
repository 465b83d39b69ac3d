"""Objective contract used by the engine (fitness is always maximized)."""

from __future__ import annotations

import numpy as np


class Objective:
    """Base class for fitness functions.

    Subclasses implement :meth:`evaluate` and may override
    :meth:`evaluate_batch` with a vectorized version; the engine prefers the
    batch form. ``default_space`` returns the benchmark's search space when
    the objective has one.
    """

    dimension: int = 0
    description: str = ""

    def evaluate(self, params) -> float:
        raise NotImplementedError

    def evaluate_batch(self, values: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(row) for row in np.atleast_2d(values)], dtype=float)

    def __call__(self, params) -> float:
        return self.evaluate(params)

    def default_space(self):
        raise NotImplementedError(f"{type(self).__name__} has no default space")


class FunctionObjective(Objective):
    """Wrap a plain ``f(params) -> float`` callable."""

    def __init__(self, fn, dimension: int, description: str = ""):
        self.fn = fn
        self.dimension = dimension
        self.description = description or getattr(fn, "__name__", "objective")

    def evaluate(self, params) -> float:
        return float(self.fn(list(params)))
