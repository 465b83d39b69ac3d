import math

import numpy as np
import pytest

from paddyfield.engine import RunnerConfig, run
from paddyfield.errors import DomainError, UsageError
from paddyfield.objectives import (
    BIMODAL_SUCCESS,
    SURROGATE_ARGMAX,
    SURROGATE_MAX,
    Bimodal,
    GramacyLeeInterpolation,
    SurrogateMLP,
    TrigPolynomial,
    bimodal,
    gramacy_lee,
    interpolation_fitness,
    surrogate_hyperparam,
    trig_poly_eval,
)
from paddyfield.objectives.analytic import GL_GRID, interpolation_mse_batch, trig_basis

# Mean of gramacy_lee(x)^2 over the 3001-point grid, from a plain Python loop.
MSE_ZERO_POLY = 12.152737542594819


def naive_mse(coeffs):
    a0, a, b = coeffs[0], coeffs[1:33], coeffs[33:]
    total = 0.0
    for k in range(3001):
        x = (k - 500) / 1000
        g = 5 * math.pi + 1 if x == 0 else math.sin(10 * math.pi * x) / (2 * x) + (x - 1) ** 4
        p = a0 + sum(a[j - 1] * math.cos(j * x) + b[j - 1] * math.sin(j * x) for j in range(1, 33))
        total += (g - p) ** 2
    return total / 3001


class TestBimodal:
    def test_peak_values(self):
        local = 0.80 + 0.88 * math.exp(-0.17 / 0.09)
        glob = 0.88 + 0.80 * math.exp(-0.17 / 0.09)
        assert bimodal(0.5, 0.5) == pytest.approx(local, abs=1e-12)
        assert bimodal(0.5, 0.5) == pytest.approx(0.9331, abs=1e-4)
        assert bimodal(0.6, 0.1) == pytest.approx(glob, abs=1e-12)
        assert bimodal(0.6, 0.1) == pytest.approx(1.0010, abs=1e-4)
        assert bimodal(100, 100) == pytest.approx(0.0, abs=1e-300)

    def test_swap_symmetry(self):
        rng = np.random.default_rng(0)
        for x, y in rng.uniform(-1, 2, (50, 2)):
            swapped = 0.88 * math.exp(-((x - 0.6) ** 2 + (y - 0.1) ** 2) / 0.09) + 0.80 * math.exp(
                -((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.09
            )
            assert bimodal(x, y) == pytest.approx(swapped, rel=1e-14)

    def test_success_threshold_separates_start_from_summit(self):
        # (0.5, 0.5) sits below the threshold; the grid maximum lies above it.
        assert bimodal(0.5, 0.5) < 0.94 < BIMODAL_SUCCESS
        g = np.arange(1001) / 1000
        xx, yy = np.meshgrid(g, g)
        assert bimodal(xx, yy).max() > BIMODAL_SUCCESS

    def test_objective_batch(self):
        obj = Bimodal()
        pts = np.random.default_rng(1).uniform(0, 1, (20, 2))
        assert np.allclose(obj.evaluate_batch(pts), [obj.evaluate(p) for p in pts])
        space = obj.default_space()
        assert space.dimension == 2 and all(p.resolution == 0.01 for p in space)


class TestGramacyLee:
    def test_values(self):
        assert gramacy_lee(1.0) == pytest.approx(0.0, abs=1e-12)
        assert gramacy_lee(0.5) == pytest.approx(0.0625, abs=1e-12)
        # sine term -> 10 pi / 2, quartic term -> 1
        assert gramacy_lee(0.0) == pytest.approx(5 * math.pi + 1, abs=1e-12)
        assert gramacy_lee(0.0) == pytest.approx(16.70796, abs=1e-5)

    def test_continuous_at_zero(self):
        for x in (1e-6, -1e-6):
            assert abs(gramacy_lee(x) - gramacy_lee(0.0)) < 1e-3

    def test_domain(self):
        with pytest.raises(DomainError):
            gramacy_lee(2.6)
        with pytest.raises(DomainError):
            gramacy_lee(-0.51)

    def test_grid(self):
        assert len(GL_GRID) == 3001
        assert GL_GRID[0] == -0.5 and GL_GRID[-1] == 2.5 and GL_GRID[500] == 0.0


class TestTrigPolynomial:
    def test_eval(self):
        zero = TrigPolynomial.zero()
        assert trig_poly_eval(zero, 1.3) == 0.0
        one = TrigPolynomial(1.0, (0.0,) * 32, (0.0,) * 32)
        assert trig_poly_eval(one, -7.0) == 1.0
        sin1 = TrigPolynomial.from_vector([0.0] * 33 + [1.0] + [0.0] * 31)
        assert trig_poly_eval(sin1, math.pi / 2) == pytest.approx(1.0, abs=1e-12)

    def test_vector_layout(self):
        v = np.arange(65, dtype=float)
        p = TrigPolynomial.from_vector(v)
        assert p.a0 == 0 and p.cos_coeffs[0] == 1 and p.cos_coeffs[-1] == 32
        assert p.sin_coeffs[0] == 33 and p.sin_coeffs[-1] == 64
        assert np.array_equal(p.to_vector(), v)
        with pytest.raises(UsageError):
            TrigPolynomial.from_vector(v[:64])

    def test_basis_matches_scalar(self):
        rng = np.random.default_rng(2)
        coeffs = rng.uniform(-1, 1, 65)
        p = TrigPolynomial.from_vector(coeffs)
        xs = np.array([-0.5, 0.0, 0.77, 2.5])
        assert np.allclose(trig_basis(xs) @ coeffs, [trig_poly_eval(p, x) for x in xs], atol=1e-12)


class TestInterpolationFitness:
    def test_zero_polynomial(self):
        assert interpolation_fitness(TrigPolynomial.zero()) == pytest.approx(-MSE_ZERO_POLY, abs=1e-10)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_agrees_with_naive_loop(self, seed):
        coeffs = np.random.default_rng(seed).uniform(-1, 1, 65)
        fast = interpolation_fitness(TrigPolynomial.from_vector(coeffs))
        assert fast == pytest.approx(-naive_mse(coeffs), abs=1e-10)

    def test_grid_order_irrelevant(self):
        coeffs = np.random.default_rng(3).uniform(-1, 1, 65)
        perm = np.random.default_rng(4).permutation(3001)
        from paddyfield.objectives.analytic import _GL_TARGET

        resid = trig_basis(GL_GRID[perm]) @ coeffs - _GL_TARGET[perm]
        assert np.mean(resid**2) == pytest.approx(interpolation_mse_batch(coeffs)[0], rel=1e-12)

    def test_always_negative(self):
        rng = np.random.default_rng(5)
        fit = GramacyLeeInterpolation().evaluate_batch(rng.uniform(-1, 1, (600, 65)))
        assert np.all(fit < 0)

    def test_batch_chunks(self):
        obj = GramacyLeeInterpolation()
        x = np.random.default_rng(6).uniform(-1, 1, (1030, 65))
        batch = obj.evaluate_batch(x)
        assert batch[0] == pytest.approx(obj.evaluate(x[0]), abs=1e-12)
        assert batch[-1] == pytest.approx(obj.evaluate(x[-1]), abs=1e-12)


class TestSurrogate:
    def test_argmax_value(self):
        assert surrogate_hyperparam(SURROGATE_ARGMAX) == pytest.approx(SURROGATE_MAX, abs=1e-15)

    def test_argmax_is_maximum(self):
        rng = np.random.default_rng(0)
        pts = np.column_stack([
            rng.integers(300, 3001, 5000), rng.integers(32, 2001, 5000), rng.uniform(0, 1, (5000, 2)),
        ])
        assert SurrogateMLP().evaluate_batch(pts).max() < SURROGATE_MAX
        # stepping one unit off the optimum on an integer axis lowers fitness
        for axis in (0, 1):
            p = list(SURROGATE_ARGMAX)
            p[axis] += 1
            assert surrogate_hyperparam(p) < SURROGATE_MAX

    def test_domain(self):
        with pytest.raises(DomainError):
            surrogate_hyperparam((200, 256, 0.3, 0.2))
        with pytest.raises(DomainError):
            surrogate_hyperparam((1200, 256, 1.3, 0.2))

    def test_space(self):
        space = SurrogateMLP().default_space()
        assert [p.kind.value for p in space] == ["integer", "integer", "continuous", "continuous"]
        assert all(p.normalize for p in space)

    def test_engine_keeps_layers_integral(self):
        obj = SurrogateMLP()
        result = run(obj.default_space(), obj, RunnerConfig(25, 5, 10, 0.2, 7, rng_seed=1))
        for plant in result.state.population:
            assert plant.params[0] == int(plant.params[0])
            assert plant.params[1] == int(plant.params[1])
