"""Local similarity (LS) maps computed from a reference/distorted pair.

Each generator takes two equally sized luminance arrays that have
already been preprocessed and returns a 2-D float64 map ready for
pooling.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError
from .image import as_field, gradient_magnitude_prewitt

__all__ = ["GmsParams", "SsimParams", "gms_map", "mse_map", "ssim_map", "gaussian_window"]


@dataclass(frozen=True)
class GmsParams:
    """Stability constant for gradient magnitude similarity.

    The default suits gradients of [0, 255] luminance taken with the
    1/3-normalized Prewitt kernels.
    """

    c: float = 170.0

    def __post_init__(self):
        if not (np.isfinite(self.c) and self.c > 0):
            raise InvalidInputError(f"GMS constant c must be positive and finite, got {self.c}")


@dataclass(frozen=True)
class SsimParams:
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window: int = 11
    sigma: float = 1.5

    def __post_init__(self):
        if not (0 < self.k1 < 1 and 0 < self.k2 < 1):
            raise InvalidInputError(f"k1, k2 must lie in (0, 1), got {self.k1}, {self.k2}")
        if not self.dynamic_range > 0:
            raise InvalidInputError(f"dynamic_range must be positive, got {self.dynamic_range}")
        if int(self.window) != self.window or self.window < 3 or self.window % 2 == 0:
            raise InvalidInputError(f"window must be an odd integer >= 3, got {self.window}")
        if not self.sigma > 0:
            raise InvalidInputError(f"sigma must be positive, got {self.sigma}")

    @property
    def c1(self):
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self):
        return (self.k2 * self.dynamic_range) ** 2


def _pair(ref, dist):
    ref = as_field(ref, "reference")
    dist = as_field(dist, "distorted")
    if ref.shape != dist.shape:
        raise InvalidInputError(f"dimension mismatch: {ref.shape} vs {dist.shape}")
    return ref, dist


def gms_map(ref, dist, params=GmsParams()):
    """
    Gradient magnitude similarity map.

    ``(2 gr gd + c) / (gr**2 + gd**2 + c)`` per pixel, where ``gr`` and
    ``gd`` are Prewitt gradient magnitudes. Values lie in (0, 1] and equal
    1 exactly where the two magnitudes coincide.
    """
    ref, dist = _pair(ref, dist)
    gr = gradient_magnitude_prewitt(ref)
    gd = gradient_magnitude_prewitt(dist)
    c = params.c
    return (2.0 * gr * gd + c) / (gr * gr + gd * gd + c)


def mse_map(ref, dist):
    """Per-pixel squared error; its mean is the MSE of the pair."""
    ref, dist = _pair(ref, dist)
    d = ref - dist
    return d * d


def gaussian_window(size, sigma):
    """Sum-normalized isotropic Gaussian of shape ``(size, size)``."""
    r = (size - 1) / 2.0
    y, x = np.mgrid[-r:r + 1, -r:r + 1]
    g = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return g / g.sum()


def ssim_map(ref, dist, params=SsimParams()):
    """
    Local structural similarity map.

    Local means, variances and covariance are Gaussian-weighted. Only
    windows lying fully inside the image are evaluated, so the map has
    shape ``(h - window + 1, w - window + 1)``.

    Parameters
    ----------
    ref, dist : array_like
      Equally sized luminance arrays, each dimension >= ``params.window``
    params : SsimParams
      Constants and window geometry

    Returns
    -------
    smap : ndarray
      SSIM values in [-1, 1]
    """
    ref, dist = _pair(ref, dist)
    n = params.window
    if min(ref.shape) < n:
        raise InvalidInputError(f"image {ref.shape} is smaller than the {n}x{n} SSIM window")
    win = gaussian_window(n, params.sigma)
    r = n // 2
    inner = (slice(r, ref.shape[0] - r), slice(r, ref.shape[1] - r))

    def local_mean(a):
        return ndimage.correlate(a, win, mode="nearest")[inner]

    mu_x = local_mean(ref)
    mu_y = local_mean(dist)
    mu_xx, mu_yy, mu_xy = mu_x * mu_x, mu_y * mu_y, mu_x * mu_y
    var_x = local_mean(ref * ref) - mu_xx
    var_y = local_mean(dist * dist) - mu_yy
    cov = local_mean(ref * dist) - mu_xy

    c1, c2 = params.c1, params.c2
    num = (2.0 * mu_xy + c1) * (2.0 * cov + c2)
    den = (mu_xx + mu_yy + c1) * (var_x + var_y + c2)
    return num / den
