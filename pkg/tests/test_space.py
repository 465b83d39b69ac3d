import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paddyfield.errors import ConfigurationError, UsageError
from paddyfield.space import (
    ParamKind,
    ParamSpec,
    SpaceSpec,
    clamp,
    denormalize,
    distance,
    normalize,
    pairwise_distances,
    random_sow,
    round_half_away,
    sow,
)


def unit_param(name="x", res=0.01):
    return ParamSpec(name, 0.0, 1.0, res, lower_limit=0.0, upper_limit=1.0)


class TestParamSpec:
    def test_rejects_inverted_init_range(self):
        with pytest.raises(ConfigurationError):
            ParamSpec("x", 1.0, 0.0, 0.1)

    def test_rejects_init_outside_limits(self):
        with pytest.raises(ConfigurationError):
            ParamSpec("x", -2.0, 1.0, 0.1, lower_limit=-1.0, upper_limit=1.0)

    def test_normalize_needs_two_sided_limits(self):
        with pytest.raises(ConfigurationError):
            ParamSpec("x", 0.0, 1.0, 0.1, lower_limit=0.0, normalize=True)
        with pytest.raises(ConfigurationError):
            ParamSpec("x", 0.0, 0.0, 0.1, lower_limit=0.0, upper_limit=0.0, normalize=True)

    @pytest.mark.parametrize("res", [0.0, -0.1, 2.0])
    def test_bad_resolution(self, res):
        with pytest.raises(ConfigurationError):
            ParamSpec("x", 0.0, 1.0, res)

    def test_degenerate_range_any_resolution(self):
        assert ParamSpec("x", 0.5, 0.5, 10.0).grid_size == 1

    def test_space_names_unique(self):
        with pytest.raises(ConfigurationError):
            SpaceSpec((unit_param("a"), unit_param("a")))
        with pytest.raises(ConfigurationError):
            SpaceSpec(())

    def test_dict_round_trip(self):
        space = SpaceSpec((
            unit_param("a"),
            ParamSpec("n", 32, 500, 0.05, ParamKind.INTEGER, 32, 2000, normalize=True),
            ParamSpec("free", -3, 3, 0.5),
        ))
        assert SpaceSpec.from_dict(space.to_dict()) == space


class TestRandomSow:
    def test_unit_grid_has_101_points(self):
        spec = unit_param()
        assert spec.grid_size == 101
        rng = np.random.default_rng(0)
        values = sow(SpaceSpec((spec,)), rng, 20000)[:, 0]
        k = np.round(values / 0.01)
        assert np.allclose(values, k * 0.01, atol=1e-12)
        assert set(k.astype(int)) == set(range(101))

    def test_degenerate(self):
        space = SpaceSpec((ParamSpec("x", 0.5, 0.5, 0.3),))
        assert random_sow(space, np.random.default_rng(1)) == [0.5]

    def test_integer_layer_width(self):
        spec = ParamSpec("n", 32, 500, 0.05, ParamKind.INTEGER, 32, 2000)
        values = sow(SpaceSpec((spec,)), np.random.default_rng(2), 5000)[:, 0]
        assert np.all(values == np.round(values))
        assert values.min() >= 32 and values.max() <= 500

    def test_truncated_grid(self):
        # 0.25 is not reachable from 0 in steps of 0.1; last point is 0.2.
        spec = ParamSpec("x", 0.0, 0.25, 0.1)
        assert spec.grid_size == 3
        values = sow(SpaceSpec((spec,)), np.random.default_rng(3), 1000)[:, 0]
        assert values.max() <= 0.2 + 1e-12

    def test_exact_endpoint_included_despite_rounding(self):
        assert ParamSpec("x", 0.0, 0.3, 0.1).grid_size == 4

    @settings(max_examples=200, deadline=None)
    @given(
        lo=st.floats(-100, 100),
        span=st.one_of(st.just(0.0), st.floats(1e-3, 50)),
        steps=st.integers(1, 400),
        integer=st.booleans(),
        seed=st.integers(0, 2**32),
    )
    def test_on_grid_and_within_limits(self, lo, span, steps, integer, seed):
        hi = lo + span
        res = span / steps if span > 0 else 1.0
        kind = ParamKind.INTEGER if integer else ParamKind.CONTINUOUS
        spec = ParamSpec("x", lo, hi, res, kind, lower_limit=lo - 1, upper_limit=hi + 1)
        values = sow(SpaceSpec((spec,)), np.random.default_rng(seed), 50)[:, 0]
        assert np.all(values >= spec.lower_limit) and np.all(values <= spec.upper_limit)
        if integer:
            assert np.all(values == np.round(values))
        else:
            k = (values - lo) / res
            assert np.allclose(k, np.round(k), atol=1e-6)
            assert np.all(values <= hi + 1e-9)


class TestClamp:
    def test_examples(self):
        assert clamp(ParamSpec("x", -1, 1, 0.1, lower_limit=-1, upper_limit=1), 1.7) == 1.0
        assert clamp(ParamSpec("x", -1, 1, 0.1), -3.2) == -3.2
        assert clamp(ParamSpec("n", 32, 500, 1, ParamKind.INTEGER, 32, 2000), 31.4) == 32

    def test_one_sided(self):
        spec = ParamSpec("x", 0, 1, 0.1, lower_limit=0)
        assert clamp(spec, -5) == 0
        assert clamp(spec, 1e9) == 1e9

    @pytest.mark.parametrize("x, expected", [(2.5, 3), (-2.5, -3), (0.5, 1), (-0.5, -1), (1.49, 1), (-1.5, -2)])
    def test_round_half_away(self, x, expected):
        assert round_half_away(x) == expected
        assert round_half_away(np.array([x]))[0] == expected

    @settings(max_examples=300)
    @given(st.floats(-1e6, 1e6), st.booleans())
    def test_idempotent(self, value, integer):
        spec = ParamSpec("x", -10, 10, 0.5, ParamKind.INTEGER if integer else ParamKind.CONTINUOUS, -20, 20)
        once = clamp(spec, value)
        assert clamp(spec, once) == once


class TestNormalize:
    def test_examples(self):
        unit = unit_param()
        assert normalize(unit, 0.25) == 0.25
        wide = ParamSpec("n", 300, 3000, 1, lower_limit=300, upper_limit=3000, normalize=True)
        assert normalize(wide, 300) == 0.0
        assert normalize(wide, 3000) == 1.0
        sym = ParamSpec("x", -1, 1, 0.1, lower_limit=-1, upper_limit=1, normalize=True)
        assert denormalize(sym, 0.75) == pytest.approx(0.5, abs=1e-15)

    def test_one_sided_rejected(self):
        with pytest.raises(ConfigurationError):
            normalize(ParamSpec("x", 0, 1, 0.1, lower_limit=0), 0.5)

    def test_denormalize_clamps(self):
        assert denormalize(unit_param(), 1.4) == 1.0

    @settings(max_examples=300)
    @given(st.floats(-1e3, 1e3), st.floats(1e-3, 1e3), st.floats(0, 1))
    def test_round_trip(self, lo, width, frac):
        spec = ParamSpec("x", lo, lo + width, width / 2, lower_limit=lo, upper_limit=lo + width, normalize=True)
        v = lo + frac * width
        assert abs(denormalize(spec, normalize(spec, v)) - v) <= 1e-12 * max(1.0, abs(v))


class TestDistance:
    def test_examples(self):
        raw = SpaceSpec((ParamSpec("a", 0, 1, 0.1), ParamSpec("b", 0, 1, 0.1)))
        assert distance(raw, [0, 0], [3, 4]) == 5.0
        assert distance(raw, [0.2, 0.7], [0.2, 0.7]) == 0.0
        norm = SpaceSpec((ParamSpec("a", 0, 10, 1, lower_limit=0, upper_limit=10, normalize=True),))
        assert distance(norm, [0], [5]) == pytest.approx(0.5)

    def test_dimension_mismatch(self):
        space = SpaceSpec((unit_param(),))
        with pytest.raises(UsageError):
            distance(space, [0, 1], [0])

    def test_pairwise_matches_scalar(self):
        space = SpaceSpec((unit_param("a"), ParamSpec("b", 0, 100, 1, lower_limit=0, upper_limit=100, normalize=True)))
        pts = np.random.default_rng(0).uniform(0, 1, (7, 2)) * [1, 100]
        mat = pairwise_distances(space, pts)
        for i in range(7):
            for j in range(7):
                assert mat[i, j] == pytest.approx(distance(space, pts[i], pts[j]), abs=1e-12)

    @settings(max_examples=300)
    @given(st.lists(st.tuples(st.floats(-50, 50), st.floats(0, 10)), min_size=3, max_size=3))
    def test_metric_axioms(self, pts):
        space = SpaceSpec((ParamSpec("a", -50, 50, 1), ParamSpec("b", 0, 10, 1, lower_limit=0, upper_limit=10, normalize=True)))
        a, b, c = pts
        dab, dba = distance(space, a, b), distance(space, b, a)
        assert dab >= 0 and dab == dba
        if tuple(a) == tuple(b):
            assert dab == 0
        elif max(abs(x - y) for x, y in zip(a, b)) > 1e-100:
            assert dab > 0
        assert distance(space, a, c) <= dab + distance(space, b, c) + 1e-9
