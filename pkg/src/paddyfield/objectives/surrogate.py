"""Synthetic stand-in for tuning a two-hidden-layer perceptron.

The search space has two integer layer widths and two dropout rates, all
min-max normalized during dispersion. Fitness is a Gaussian bump in
normalized coordinates::

    f = 0.66 * exp(-sum_i w_i * (u_i - c_i)^2)

with widths ``w = (0.5, 0.5, 2.0, 2.0)``: dropout matters more than layer
width, and the response around the optimum is flat, like a validation F1.
The unique maximum ``SURROGATE_MAX = 0.66`` is attained at
``SURROGATE_ARGMAX = (1200, 256, 0.30, 0.20)``, which lies on the integer
lattice so the engine can hit it exactly.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..space import ParamKind, ParamSpec, SpaceSpec
from .base import Objective

LAYER1_LIMITS = (300.0, 3000.0)
LAYER2_LIMITS = (32.0, 2000.0)
DROPOUT_LIMITS = (0.0, 1.0)

SURROGATE_ARGMAX = (1200.0, 256.0, 0.30, 0.20)
SURROGATE_MAX = 0.66
_WEIGHTS = np.array([0.5, 0.5, 2.0, 2.0])
_LIMITS = np.array([LAYER1_LIMITS, LAYER2_LIMITS, DROPOUT_LIMITS, DROPOUT_LIMITS])


def _unit(values: np.ndarray) -> np.ndarray:
    return (values - _LIMITS[:, 0]) / (_LIMITS[:, 1] - _LIMITS[:, 0])


_CENTRE = _unit(np.array(SURROGATE_ARGMAX))


def surrogate_hyperparam_batch(values: np.ndarray) -> np.ndarray:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != 4:
        raise DomainError(f"expected 4 hyperparameters, got {values.shape[1]}")
    outside = (values < _LIMITS[:, 0]) | (values > _LIMITS[:, 1])
    if outside.any():
        raise DomainError(f"hyperparameters outside the search space: {values[outside.any(axis=1)][0].tolist()}")
    d = _unit(values) - _CENTRE
    return SURROGATE_MAX * np.exp(-(d * d) @ _WEIGHTS)


def surrogate_hyperparam(params) -> float:
    """Fitness of ``(layer1, layer2, dropout1, dropout2)``."""
    return float(surrogate_hyperparam_batch(np.asarray(params, dtype=float))[0])


class SurrogateMLP(Objective):
    dimension = 4
    description = "smooth surrogate for MLP width/dropout tuning (max 0.66 at (1200, 256, 0.3, 0.2))"

    def evaluate(self, params) -> float:
        return surrogate_hyperparam(params)

    def evaluate_batch(self, values):
        return surrogate_hyperparam_batch(values)

    def default_space(self) -> SpaceSpec:
        """Limits span the full ranges; sowing is confined to smaller boxes."""
        return SpaceSpec((
            ParamSpec("layer1", 500.0, 1000.0, 0.05, ParamKind.INTEGER, *LAYER1_LIMITS, normalize=True),
            ParamSpec("layer2", 32.0, 500.0, 0.05, ParamKind.INTEGER, *LAYER2_LIMITS, normalize=True),
            ParamSpec("dropout1", 0.0, 0.5, 0.05, ParamKind.CONTINUOUS, *DROPOUT_LIMITS, normalize=True),
            ParamSpec("dropout2", 0.0, 0.5, 0.05, ParamKind.CONTINUOUS, *DROPOUT_LIMITS, normalize=True),
        ))
