"""Analytic benchmarks: a two-peak Gaussian surface and Gramacy & Lee interpolation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DomainError, UsageError
from ..space import ParamSpec, SpaceSpec
from .base import Objective

# -- bimodal surface -----------------------------------------------------------

LOCAL_PEAK = (0.5, 0.5)
GLOBAL_PEAK = (0.6, 0.1)
LOCAL_AMPLITUDE = 0.80
GLOBAL_AMPLITUDE = 0.88
PEAK_WIDTH = 0.09
# Best fitness above this counts as having found the global basin. The surface
# is ~0.9331 at (0.5, 0.5); the two bumps overlap enough that their sum has a
# single summit, ~1.0595 near (0.570, 0.219).
BIMODAL_SUCCESS = 0.95


def bimodal(x, y):
    """Sum of two isotropic Gaussian bumps on the plane (scalar or array)."""
    local = LOCAL_AMPLITUDE * np.exp(
        -((x - LOCAL_PEAK[0]) ** 2 + (y - LOCAL_PEAK[1]) ** 2) / PEAK_WIDTH
    )
    glob = GLOBAL_AMPLITUDE * np.exp(
        -((x - GLOBAL_PEAK[0]) ** 2 + (y - GLOBAL_PEAK[1]) ** 2) / PEAK_WIDTH
    )
    out = local + glob
    return float(out) if np.ndim(out) == 0 else out


class Bimodal(Objective):
    dimension = 2
    description = "two-peak Gaussian surface on [0, 1]^2 (global peak at (0.6, 0.1))"

    def evaluate(self, params) -> float:
        x, y = params
        return bimodal(float(x), float(y))

    def evaluate_batch(self, values):
        values = np.atleast_2d(values)
        return bimodal(values[:, 0], values[:, 1])

    def default_space(self) -> SpaceSpec:
        return SpaceSpec(
            tuple(
                ParamSpec(name, 0.0, 1.0, 0.01, lower_limit=0.0, upper_limit=1.0)
                for name in ("x", "y")
            )
        )


# -- Gramacy & Lee -------------------------------------------------------------

GL_LOWER = -0.5
GL_UPPER = 2.5
# Sample grid: x = -0.5, -0.499, ..., 2.5 built from integers so that x = 0
# is hit exactly.
GL_GRID = (np.arange(3001) - 500) / 1000.0
# Limit at the removable singularity: 10 pi / 2 from the sine term plus (0 - 1)^4.
GL_AT_ZERO = 5 * math.pi + 1.0


def gramacy_lee(x: float) -> float:
    """``sin(10 pi x) / (2x) + (x - 1)^4``, continuous at 0 where it equals ``5 pi + 1``."""
    if not GL_LOWER <= x <= GL_UPPER:
        raise DomainError(f"x={x} outside [{GL_LOWER}, {GL_UPPER}]")
    if x == 0:
        return GL_AT_ZERO
    return math.sin(10 * math.pi * x) / (2 * x) + (x - 1) ** 4


def gramacy_lee_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any((x < GL_LOWER) | (x > GL_UPPER)):
        raise DomainError(f"x outside [{GL_LOWER}, {GL_UPPER}]")
    safe = np.where(x == 0, 1.0, x)
    return np.where(x == 0, GL_AT_ZERO, np.sin(10 * np.pi * x) / (2 * safe) + (x - 1) ** 4)


TRIG_DEGREE = 32
TRIG_COEFFS = 2 * TRIG_DEGREE + 1


@dataclass(frozen=True)
class TrigPolynomial:
    """``a0 + sum_k a_k cos(kx) + b_k sin(kx)`` for k = 1..32.

    As a flat vector the coefficients are ordered ``[a0, a1..a32, b1..b32]``.
    """

    a0: float
    cos_coeffs: tuple
    sin_coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        if len(self.cos_coeffs) != TRIG_DEGREE or len(self.sin_coeffs) != TRIG_DEGREE:
            raise UsageError(f"need {TRIG_DEGREE} cosine and {TRIG_DEGREE} sine coefficients")

    @classmethod
    def from_vector(cls, coeffs: Sequence[float]) -> "TrigPolynomial":
        coeffs = [float(c) for c in coeffs]
        if len(coeffs) != TRIG_COEFFS:
            raise UsageError(f"expected {TRIG_COEFFS} coefficients, got {len(coeffs)}")
        return cls(coeffs[0], tuple(coeffs[1:33]), tuple(coeffs[33:]))

    @classmethod
    def zero(cls) -> "TrigPolynomial":
        return cls(0.0, (0.0,) * TRIG_DEGREE, (0.0,) * TRIG_DEGREE)

    def to_vector(self) -> np.ndarray:
        return np.array((self.a0, *self.cos_coeffs, *self.sin_coeffs))


def trig_basis(x: np.ndarray) -> np.ndarray:
    """Design matrix with columns ``[1, cos(kx).., sin(kx)..]``."""
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    k = np.arange(1, TRIG_DEGREE + 1)
    return np.hstack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])


def trig_poly_eval(p: TrigPolynomial, x: float) -> float:
    total = p.a0
    for k in range(1, TRIG_DEGREE + 1):
        total += p.cos_coeffs[k - 1] * math.cos(k * x) + p.sin_coeffs[k - 1] * math.sin(k * x)
    return total


_GL_TARGET = gramacy_lee_array(GL_GRID)
_GL_BASIS = trig_basis(GL_GRID)


def interpolation_mse_batch(coeffs: np.ndarray) -> np.ndarray:
    """MSE against Gramacy & Lee on the 3001-point grid, one per coefficient row."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    resid = coeffs @ _GL_BASIS.T - _GL_TARGET
    return np.mean(resid * resid, axis=1)


def interpolation_fitness(p: TrigPolynomial) -> float:
    """Negated mean squared error, so that maximizing fitness minimizes MSE."""
    return -float(interpolation_mse_batch(p.to_vector())[0])


class GramacyLeeInterpolation(Objective):
    dimension = TRIG_COEFFS
    description = "negated MSE of a degree-32 trigonometric fit to Gramacy & Lee on [-0.5, 2.5]"

    def evaluate(self, params) -> float:
        return interpolation_fitness(TrigPolynomial.from_vector(params))

    def evaluate_batch(self, values):
        values = np.atleast_2d(values)
        out = np.empty(len(values))
        # Chunked to bound the (rows x 3001) residual buffer.
        for start in range(0, len(values), 512):
            out[start:start + 512] = -interpolation_mse_batch(values[start:start + 512])
        return out

    def default_space(self) -> SpaceSpec:
        names = ["a0"] + [f"a{k}" for k in range(1, 33)] + [f"b{k}" for k in range(1, 33)]
        return SpaceSpec(
            tuple(ParamSpec(n, -1.0, 1.0, 0.05, lower_limit=-1.0, upper_limit=1.0) for n in names)
        )
