import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from devpool.errors import DegenerateWeightsError, EmptyInputError, InvalidInputError
from devpool.pooling import (MCT, PoolingSpec, Strategy, dd_pool_joint, mad_pool, mean_pool,
                             minkowski_deviation_pool, pool, sd_pool, weighted_mean_pool)

import oracles

# Frozen from tests/derive_expected.py (exact rational arithmetic)
MAD_001 = 4 / 9
SD_001 = math.sqrt(2) / 3
DD_001_HALF = 0.45792448261773805
MINK3_001 = 0.4979338607285739

values = arrays(np.float64, st.integers(1, 200),
                elements=st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False))
deviation_pools = [
    sd_pool,
    mad_pool,
    lambda x: dd_pool_joint(x, 0.3)[2],
    lambda x: minkowski_deviation_pool(x, 3.0),
    lambda x: minkowski_deviation_pool(x, 1.5, MCT.MEDIAN),
]


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1.0)


@pytest.mark.parametrize("ls, expected", [([2.5, 2.5, 2.5], 2.5), ([0, 1], 0.5), ([0, 0, 1], 1 / 3)])
def test_mean(ls, expected):
    assert mean_pool(ls).value == pytest.approx(expected, rel=1e-15)


def test_mean_of_constant_is_exact():
    assert mean_pool([0.1] * 7).value == 0.1


def test_weighted_mean():
    assert weighted_mean_pool([2, 4], [1, 3]).value == 3.5
    assert weighted_mean_pool([0, 1], [0, 5]).value == 1.0
    x = [0.2, 0.9, 0.4]
    assert weighted_mean_pool(x, [2, 2, 2]).value == pytest.approx(mean_pool(x).value)


def test_weighted_mean_errors():
    with pytest.raises(DegenerateWeightsError):
        weighted_mean_pool([1, 2], [0, 0])
    with pytest.raises(InvalidInputError):
        weighted_mean_pool([1, 2], [1, 2, 3])
    with pytest.raises(InvalidInputError):
        weighted_mean_pool([1, 2], [1, -1])
    with pytest.raises(InvalidInputError):
        weighted_mean_pool(np.ones((2, 3)), np.ones((3, 2)))


def test_sd_mad_hand_values():
    assert sd_pool([3, 3, 3]).value == 0
    assert sd_pool([0, 1]).value == 0.5
    assert sd_pool([0, 0, 1]).value == pytest.approx(SD_001, abs=1e-15)
    assert mad_pool([3, 3, 3]).value == 0
    assert mad_pool([0, 1]).value == 0.5
    assert mad_pool([0, 0, 1]).value == pytest.approx(MAD_001, abs=1e-15)


def test_sd_is_population():
    assert sd_pool([1, 3]).value == 1.0


def test_dd_joint():
    mad, sd, dd = dd_pool_joint([0, 0, 1], 0.5)
    assert mad.value == pytest.approx(MAD_001, abs=1e-15)
    assert sd.value == pytest.approx(SD_001, abs=1e-15)
    assert dd.value == pytest.approx(DD_001_HALF, abs=1e-12)
    assert dd.spec.alpha == 0.5 and dd.n == 3


@pytest.mark.parametrize("alpha", [-0.01, 1.01])
def test_dd_alpha_range(alpha):
    with pytest.raises(InvalidInputError):
        dd_pool_joint([1, 2], alpha)


def test_minkowski_hand_value():
    assert minkowski_deviation_pool([0, 0, 1], 3).value == pytest.approx(MINK3_001, abs=1e-12)


def test_minkowski_median_center():
    # median of [0, 0, 1] is 0: deviations 0, 0, 1
    assert minkowski_deviation_pool([0, 0, 1], 1, MCT.MEDIAN).value == pytest.approx(1 / 3)
    # even length: median 2.5 -> deviations 1.5, 0.5, 0.5, 1.5
    assert minkowski_deviation_pool([1, 2, 3, 4], 1, "median").value == pytest.approx(1.0)


def test_minkowski_rho_range():
    with pytest.raises(InvalidInputError):
        minkowski_deviation_pool([1, 2], 0.5)
    with pytest.raises(InvalidInputError):
        minkowski_deviation_pool([1, 2], math.inf)


def test_minkowski_large_rho_does_not_overflow():
    v = minkowski_deviation_pool([0.0, 1e3, -1e3], 400).value
    assert math.isfinite(v) and 0 < v <= 1e3


@pytest.mark.parametrize("fn", [mean_pool, sd_pool, mad_pool, lambda x: dd_pool_joint(x),
                                lambda x: minkowski_deviation_pool(x, 2)])
def test_empty_input(fn):
    with pytest.raises(EmptyInputError):
        fn([])


def test_nonfinite_rejected():
    with pytest.raises(InvalidInputError):
        sd_pool([1.0, math.nan])


@pytest.mark.parametrize("fn", deviation_pools)
def test_single_element_deviation_is_zero(fn):
    assert fn([7.25]).value == 0.0


def test_field_flattened_row_major():
    field = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert sd_pool(field).value == pytest.approx(sd_pool([0, 0, 1, 0]).value, abs=0)
    assert sd_pool(field).n == 4


@settings(max_examples=200)
@given(values)
def test_identities(x):
    mad, sd = mad_pool(x).value, sd_pool(x).value
    assert close(minkowski_deviation_pool(x, 1.0).value, mad)
    assert close(minkowski_deviation_pool(x, 2.0).value, sd)
    j_mad, j_sd, _ = dd_pool_joint(x, 0.5)
    assert close(j_mad.value, mad) and close(j_sd.value, sd)
    assert close(dd_pool_joint(x, 0.0)[2].value, mad)
    assert close(dd_pool_joint(x, 1.0)[2].value, sd)


@given(values)
def test_mad_not_above_sd(x):
    assert mad_pool(x).value <= sd_pool(x).value * (1 + 1e-12)


@given(values, st.floats(0, 1), st.floats(0, 1))
def test_dd_monotone_in_alpha(x, a1, a2):
    lo, hi = sorted((a1, a2))
    assert dd_pool_joint(x, lo)[2].value <= dd_pool_joint(x, hi)[2].value + 1e-12 * (1 + sd_pool(x).value)


@pytest.mark.parametrize("fn", deviation_pools)
@given(x=values, b=st.floats(-1e3, 1e3))
def test_shift_invariance(fn, x, b):
    shifted = x + b
    # x + b is itself rounded; allow that rounding on top of the pooling tolerance
    slack = 4 * np.finfo(float).eps * (np.abs(x).max() + abs(b))
    assert abs(fn(shifted).value - fn(x).value) <= 1e-12 * max(fn(x).value, 1.0) + slack


@pytest.mark.parametrize("fn", deviation_pools)
@given(x=values, k=st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-6))
def test_scale_equivariance(fn, x, k):
    assert close(fn(k * x).value, abs(k) * fn(x).value, 1e-12)


@pytest.mark.parametrize("fn", deviation_pools)
@given(c=st.floats(-1e6, 1e6), n=st.integers(1, 500))
def test_constant_is_exactly_zero(fn, c, n):
    assert fn(np.full(n, c)).value == 0.0


def test_large_list_accuracy():
    # 2**21 values: pairwise summation keeps the mean within a few ulps
    x = np.full(2**21, 0.1)
    x[::2] = 0.3
    assert mean_pool(x).value == pytest.approx(0.2, rel=1e-14)
    assert sd_pool(x).value == pytest.approx(0.1, rel=1e-12)
    assert mad_pool(x).value == pytest.approx(0.1, rel=1e-12)


def test_matches_fsum_oracle(rng):
    x = rng.normal(0.8, 0.1, 5000)
    w = rng.uniform(0, 1, 5000)
    assert close(mean_pool(x).value, oracles.mean(x))
    assert close(weighted_mean_pool(x, w).value, oracles.weighted_mean(x, w))
    assert close(sd_pool(x).value, oracles.sd(x))
    assert close(mad_pool(x).value, oracles.mad(x))
    assert close(minkowski_deviation_pool(x, 3).value, oracles.deviation(x, 3))
    assert close(minkowski_deviation_pool(x, 1.5, "median").value, oracles.deviation(x, 1.5, "median"))


def test_pool_dispatch():
    x = [0, 0, 1]
    assert pool(np.full((3, 3), 0.7), PoolingSpec(Strategy.MEAN)).value == 0.7
    assert pool(np.full((3, 3), 0.7), PoolingSpec("sd")).value == 0
    assert pool(x, PoolingSpec(Strategy.DD, alpha=0.5)).value == pytest.approx(DD_001_HALF, abs=1e-12)
    assert pool(x, PoolingSpec("mad")).value == mad_pool(x).value
    assert pool(x, PoolingSpec("minkowski", rho=3)).value == minkowski_deviation_pool(x, 3).value
    assert pool([2, 4], PoolingSpec("weighted-mean", weights=[1, 3])).value == 3.5


def test_pooling_spec_validation():
    with pytest.raises(InvalidInputError):
        PoolingSpec(Strategy.DD, alpha=2)
    with pytest.raises(InvalidInputError):
        PoolingSpec(Strategy.MINKOWSKI, rho=0.9)
    with pytest.raises(InvalidInputError):
        PoolingSpec(Strategy.WEIGHTED_MEAN)
    with pytest.raises(DegenerateWeightsError):
        PoolingSpec(Strategy.WEIGHTED_MEAN, weights=[0, 0])
    with pytest.raises(ValueError):
        PoolingSpec("median-absolute-deviation")
