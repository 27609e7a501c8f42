"""Reduce an LS map to a single score.

Mean and weighted-mean pooling summarize the central tendency of a map;
the deviation poolings (SD, MAD, their alpha blend DD, and the general
order-rho deviation) summarize its spread. All reductions run on a single
thread with numpy's pairwise summation, so results are deterministic for
a given input and accurate on maps with tens of millions of elements.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .errors import DegenerateWeightsError, EmptyInputError, InvalidInputError

__all__ = [
    "Strategy",
    "MCT",
    "PoolingSpec",
    "PooledScore",
    "mean_pool",
    "weighted_mean_pool",
    "sd_pool",
    "mad_pool",
    "dd_pool_joint",
    "minkowski_deviation_pool",
    "pool",
]


class Strategy(str, enum.Enum):
    MEAN = "mean"
    WEIGHTED_MEAN = "weighted-mean"
    SD = "sd"
    MAD = "mad"
    DD = "dd"
    MINKOWSKI = "minkowski"

    @property
    def is_deviation(self):
        return self in (Strategy.SD, Strategy.MAD, Strategy.DD, Strategy.MINKOWSKI)


class MCT(str, enum.Enum):
    """Central tendency about which a generalized deviation is measured."""

    MEAN = "mean"
    MEDIAN = "median"


@dataclass(frozen=True)
class PoolingSpec:
    """
    Pooling strategy and its parameters.

    `alpha` is only read by DD, `rho` and `mct` only by the Minkowski
    deviation, `weights` only by the weighted mean.
    """

    strategy: Strategy = Strategy.MEAN
    alpha: float = 0.5
    rho: float = 2.0
    mct: MCT = MCT.MEAN
    weights: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "mct", MCT(self.mct))
        _check_alpha(self.alpha)
        _check_rho(self.rho)
        if self.strategy is Strategy.WEIGHTED_MEAN and self.weights is None:
            raise InvalidInputError("weighted-mean pooling needs weights")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            _check_weights(w)
            object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PooledScore:
    value: float
    spec: PoolingSpec
    n: int

    def __float__(self):
        return self.value


def _check_alpha(alpha):
    if not (0.0 <= alpha <= 1.0):
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")


def _check_rho(rho):
    if not (math.isfinite(rho) and rho >= 1.0):
        raise InvalidInputError(f"rho must be a finite real >= 1, got {rho}")


def _check_weights(w):
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("weights contain non-finite values")
    if np.any(w < 0):
        raise InvalidInputError("weights must be non-negative")
    if not np.sum(w) > 0:
        raise DegenerateWeightsError("weights sum to zero")


def _values(ls):
    x = np.asarray(ls, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInputError("cannot pool an empty map")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("LS values must be finite")
    return x


def _mean(x):
    # Centering on the first element makes constant inputs exact and
    # shrinks the magnitude fed to the pairwise sum.
    x0 = x[0]
    return float(x0 + np.sum(x - x0) / x.size)


def _abs_deviations(x, center):
    d = np.subtract(x, center)
    return np.abs(d, out=d)


def _root_mean_square(d, x, center):
    """RMS of deviations `d` of `x` about `center`; `d` is overwritten."""
    np.multiply(d, d, out=d)
    ssq = float(np.sum(d))
    if 1e-280 < ssq < 1e280 or ssq == 0.0 and not np.any(x != center):
        return math.sqrt(ssq / d.size)
    # Squares under- or overflowed; redo on deviations scaled to [0, 1]
    d = _abs_deviations(x, center)
    top = float(d.max())
    np.divide(d, top, out=d)
    np.multiply(d, d, out=d)
    return top * math.sqrt(float(np.sum(d)) / d.size)


def mean_pool(ls):
    """Arithmetic mean of the LS values."""
    x = _values(ls)
    return PooledScore(_mean(x), PoolingSpec(Strategy.MEAN), x.size)


def weighted_mean_pool(ls, w):
    """
    Weighted mean ``sum(ls * w) / sum(w)``.

    Parameters
    ----------
    ls : array_like
      LS values (any shape; flattened row-major)
    w : array_like
      Non-negative weights with the same number of elements as `ls`; when
      both are 2-D their shapes must agree

    Returns
    -------
    score : PooledScore
    """
    x = _values(ls)
    wa = np.asarray(w, dtype=np.float64)
    ls_shape = np.shape(ls)
    if wa.ndim == 2 and len(ls_shape) == 2 and wa.shape != ls_shape:
        raise InvalidInputError(f"weights shape {wa.shape} does not match LS shape {ls_shape}")
    wa = wa.ravel()
    if wa.size != x.size:
        raise InvalidInputError(f"length mismatch: {x.size} values, {wa.size} weights")
    _check_weights(wa)
    value = float(np.sum(x * wa) / np.sum(wa))
    spec = PoolingSpec(Strategy.WEIGHTED_MEAN, weights=wa)
    return PooledScore(value, spec, x.size)


def sd_pool(ls):
    """Population standard deviation (divisor N) about the mean."""
    x = _values(ls)
    m = _mean(x)
    value = _root_mean_square(np.subtract(x, m), x, m)
    return PooledScore(value, PoolingSpec(Strategy.SD), x.size)


def mad_pool(ls):
    """Mean absolute deviation about the mean."""
    x = _values(ls)
    d = _abs_deviations(x, _mean(x))
    value = float(np.sum(d)) / x.size
    return PooledScore(value, PoolingSpec(Strategy.MAD), x.size)


def dd_pool_joint(ls, alpha=0.5):
    """
    MAD, SD and their blend from one set of absolute deviations.

    The absolute deviations from the mean are formed once; their mean is
    the MAD and the root of their mean square is the SD. The blend is
    ``alpha * SD + (1 - alpha) * MAD``.

    Returns
    -------
    mad, sd, dd : PooledScore
    """
    _check_alpha(alpha)
    x = _values(ls)
    n = x.size
    m = _mean(x)
    d = _abs_deviations(x, m)
    mad = float(np.sum(d)) / n
    sd = _root_mean_square(d, x, m)
    dd = alpha * sd + (1.0 - alpha) * mad
    return (
        PooledScore(mad, PoolingSpec(Strategy.MAD), n),
        PooledScore(sd, PoolingSpec(Strategy.SD), n),
        PooledScore(dd, PoolingSpec(Strategy.DD, alpha=alpha), n),
    )


def minkowski_deviation_pool(ls, rho=2.0, mct=MCT.MEAN):
    """
    Deviation of order `rho` about a central tendency.

    ``(mean(|x - center| ** rho)) ** (1 / rho)`` where the center is the
    mean or the median of `ls`. With the mean as center, ``rho=1`` is the
    MAD and ``rho=2`` the SD. Even-length medians average the two middle
    values.
    """
    _check_rho(rho)
    mct = MCT(mct)
    x = _values(ls)
    center = _mean(x) if mct is MCT.MEAN else float(np.median(x))
    d = _abs_deviations(x, center)
    top = float(d.max())
    if top == 0.0:
        value = 0.0
    else:
        # Scaling by the largest deviation keeps large rho from overflowing
        np.divide(d, top, out=d)
        np.power(d, rho, out=d)
        value = top * (float(np.sum(d)) / x.size) ** (1.0 / rho)
    spec = PoolingSpec(Strategy.MINKOWSKI, rho=rho, mct=mct)
    return PooledScore(value, spec, x.size)


def pool(ls, spec):
    """Pool `ls` (a 2-D map or flat values) according to `spec`."""
    s = spec.strategy
    if s is Strategy.MEAN:
        return mean_pool(ls)
    if s is Strategy.WEIGHTED_MEAN:
        return weighted_mean_pool(ls, spec.weights)
    if s is Strategy.SD:
        return sd_pool(ls)
    if s is Strategy.MAD:
        return mad_pool(ls)
    if s is Strategy.DD:
        return dd_pool_joint(ls, spec.alpha)[2]
    if s is Strategy.MINKOWSKI:
        return minkowski_deviation_pool(ls, spec.rho, spec.mct)
    raise InvalidInputError(f"unknown pooling strategy {s!r}")
