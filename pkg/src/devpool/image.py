"""Luminance images, downsampling and 3x3 filtering.

Images and scalar fields are plain 2-D ``float64`` numpy arrays indexed
``[row, column]``; row-major flattening is numpy's default ``ravel``.
:func:`as_field` is the single validation gate used by every public
function that accepts one.
"""

from pathlib import Path

import numpy as np
from scipy import ndimage
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, InvalidInputError

__all__ = [
    "LUMA_WEIGHTS",
    "PREWITT_X",
    "PREWITT_Y",
    "as_field",
    "to_grayscale",
    "downsample2",
    "convolve3x3",
    "gradient_magnitude_prewitt",
    "load_image",
]

# ITU-R BT.601
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_PREWITT_UNIT = np.array([[1.0, 0.0, -1.0],
                          [1.0, 0.0, -1.0],
                          [1.0, 0.0, -1.0]])
PREWITT_X = _PREWITT_UNIT / 3.0
PREWITT_Y = PREWITT_X.T.copy()


def as_field(data, name="image"):
    """Validate and convert `data` to a finite, non-empty 2-D float64 array."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} has a zero dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def to_grayscale(rgb):
    """
    Convert an RGB raster to BT.601 luminance.

    Parameters
    ----------
    rgb : array_like
      Array of shape ``(height, width, 3)`` with channel values in [0, 255]

    Returns
    -------
    gray : ndarray
      ``0.299 R + 0.587 G + 0.114 B``, shape ``(height, width)``
    """
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"expected an (H, W, 3) raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"raster has a zero dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("raster contains non-finite values")
    wr, wg, wb = LUMA_WEIGHTS
    return arr[..., 0] * wr + arr[..., 1] * wg + arr[..., 2] * wb


def downsample2(img):
    """Average non-overlapping 2x2 blocks; a trailing odd row/column is dropped."""
    img = as_field(img)
    h, w = img.shape
    if h < 2 or w < 2:
        raise InvalidInputError(f"downsample2 needs both dimensions >= 2, got {img.shape}")
    h2, w2 = h // 2, w // 2
    blocks = img[:2 * h2, :2 * w2]
    # Fixed pairing order so the result is independent of numpy's reduction strategy
    return ((blocks[0::2, 0::2] + blocks[0::2, 1::2])
            + (blocks[1::2, 0::2] + blocks[1::2, 1::2])) / 4.0


def convolve3x3(img, kernel):
    """
    Filter `img` with a 3x3 kernel.

    Uses the correlation convention (the kernel is applied as written,
    not flipped) and replicate padding at the borders. Output has the
    same shape as the input.
    """
    img = as_field(img)
    k = np.asarray(kernel, dtype=np.float64)
    if k.shape != (3, 3):
        raise InvalidInputError(f"kernel must be 3x3, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise InvalidInputError("kernel contains non-finite entries")
    return ndimage.correlate(img, k, mode="nearest")


def gradient_magnitude_prewitt(img):
    """
    Per-pixel ``sqrt(gx**2 + gy**2)`` with 1/3-normalized Prewitt kernels.

    The filtering uses the +-1 taps and divides by 3 afterwards, so sums of
    integer-valued pixels are exact and adding a constant to an 8-bit image
    leaves the result bit-identical.
    """
    gx = convolve3x3(img, _PREWITT_UNIT) / 3.0
    gy = convolve3x3(img, _PREWITT_UNIT.T) / 3.0
    return np.sqrt(gx * gx + gy * gy)


def load_image(path):
    """
    Decode an 8-bit image file into a luminance array.

    Grayscale files are returned as stored; anything else is converted to
    RGB first and reduced with :func:`to_grayscale`.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                return np.asarray(im, dtype=np.float64)
            if im.mode not in ("RGB", "RGBA", "P", "LA", "1", "CMYK", "YCbCr"):
                raise DecodeError(f"{path}: unsupported image mode {im.mode!r}")
            return to_grayscale(np.asarray(im.convert("RGB")))
    except (OSError, UnidentifiedImageError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
