import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from devpool.errors import DecodeError, InvalidInputError
from devpool.image import (PREWITT_X, PREWITT_Y, convolve3x3, downsample2,
                           gradient_magnitude_prewitt, load_image, to_grayscale)

import oracles


def test_grayscale_black_and_white():
    assert np.all(to_grayscale(np.zeros((4, 5, 3))) == 0)
    white = to_grayscale(np.full((4, 5, 3), 255.0))
    assert white.shape == (4, 5)
    assert np.all(white == 255.0)


def test_grayscale_red_pixel():
    assert to_grayscale([[[255, 0, 0]]])[0, 0] == pytest.approx(76.245, abs=1e-12)


def test_grayscale_rejects_zero_dimension():
    with pytest.raises(InvalidInputError):
        to_grayscale(np.zeros((0, 3, 3)))
    with pytest.raises(InvalidInputError):
        to_grayscale(np.zeros((3, 3)))


@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3))))
def test_grayscale_stays_in_range(rgb):
    g = to_grayscale(rgb)
    assert g.min() >= 0 and g.max() <= 255


@pytest.mark.parametrize("block, expected", [([[0, 0], [0, 0]], 0.0), ([[1, 2], [3, 4]], 2.5)])
def test_downsample_block(block, expected):
    assert downsample2(block).tolist() == [[expected]]


def test_downsample_drops_odd_edge():
    img = np.arange(9.0).reshape(3, 3)
    out = downsample2(img)
    assert out.shape == (1, 1)
    assert out[0, 0] == (0 + 1 + 3 + 4) / 4


def test_downsample_matches_block_mean_oracle(rng):
    img = rng.uniform(0, 255, (11, 14))
    np.testing.assert_allclose(downsample2(img), oracles.block_mean2(img), rtol=0, atol=1e-12)


def test_downsample_constant():
    assert np.all(downsample2(np.full((7, 9), 42.5)) == 42.5)


def test_downsample_too_small():
    with pytest.raises(InvalidInputError):
        downsample2(np.zeros((1, 5)))


def test_convolve_zero_kernel(rng):
    assert np.all(convolve3x3(rng.uniform(size=(5, 6)), np.zeros((3, 3))) == 0)


def test_convolve_constant_with_prewitt():
    assert np.all(convolve3x3(np.full((6, 6), 17.0), PREWITT_X) == 0)


def test_convolve_single_pixel_sees_itself_everywhere():
    k = np.arange(9.0).reshape(3, 3)
    assert convolve3x3([[2.0]], k)[0, 0] == pytest.approx(2.0 * k.sum())


def test_convolve_is_correlation_not_convolution():
    img = np.zeros((5, 5))
    img[2, 2] = 1.0
    k = np.arange(9.0).reshape(3, 3)
    out = convolve3x3(img, k)
    # output at (r, c) picks k[2 - r + 1, 2 - c + 1]; unflipped kernel appears reversed
    assert out[1, 1] == k[2, 2]
    assert out[3, 3] == k[0, 0]


def test_convolve_matches_loop_oracle(rng):
    img = rng.uniform(0, 255, (7, 9))
    k = rng.normal(size=(3, 3))
    np.testing.assert_allclose(convolve3x3(img, k), oracles.correlate3x3(img.tolist(), k.tolist()),
                               rtol=0, atol=1e-9)


def test_convolve_rejects_nonfinite_kernel():
    k = np.zeros((3, 3))
    k[1, 1] = np.nan
    with pytest.raises(InvalidInputError):
        convolve3x3(np.zeros((3, 3)), k)


@settings(max_examples=50)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**32 - 1))
def test_convolve_linear(a, b, seed):
    r = np.random.default_rng(seed)
    i, j, k = r.normal(size=(6, 5)), r.normal(size=(6, 5)), r.normal(size=(3, 3))
    np.testing.assert_allclose(convolve3x3(a * i + b * j, k),
                               a * convolve3x3(i, k) + b * convolve3x3(j, k), atol=1e-9)


def test_prewitt_kernels_are_third_normalized():
    assert np.allclose(np.abs(PREWITT_X).sum(), 2.0)
    assert np.array_equal(PREWITT_Y, PREWITT_X.T)


def test_gradient_of_constant_is_zero():
    assert np.all(gradient_magnitude_prewitt(np.full((5, 5), 99.0)) == 0)


def test_gradient_vertical_step():
    h = 30.0
    img = np.zeros((5, 5))
    img[:, 3:] = h
    g = gradient_magnitude_prewitt(img)
    # columns 2 and 3 straddle the step; every row sees it thanks to replicate padding
    np.testing.assert_allclose(g[:, 2], h, atol=1e-12)
    np.testing.assert_allclose(g[:, 3], h, atol=1e-12)
    assert np.all(g[:, 0] == 0) and np.all(g[:, 4] == 0)


def test_gradient_matches_loop_oracle(rng):
    img = rng.uniform(0, 255, (8, 6))
    np.testing.assert_allclose(gradient_magnitude_prewitt(img), oracles.gradient_magnitude(img),
                               atol=1e-9)


@given(st.integers(0, 2**32 - 1), st.sampled_from([-1000.0, -3.0, 0.5, 64.0, 1e4]))
def test_gradient_shift_invariant(seed, c):
    img = np.random.default_rng(seed).integers(0, 256, (6, 7)).astype(float)
    assert np.array_equal(gradient_magnitude_prewitt(img + c), gradient_magnitude_prewitt(img))


def test_load_png_gray_and_rgb(tmp_path):
    gray = np.array([[0, 128], [255, 7]], dtype=np.uint8)
    Image.fromarray(gray, mode="L").save(tmp_path / "g.png")
    assert np.array_equal(load_image(tmp_path / "g.png"), gray.astype(float))

    rgb = np.zeros((2, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    Image.fromarray(rgb, mode="RGB").save(tmp_path / "c.bmp")
    out = load_image(tmp_path / "c.bmp")
    assert out.shape == (2, 3)
    assert out[0, 0] == pytest.approx(76.245)


def test_load_failures(tmp_path):
    with pytest.raises(DecodeError):
        load_image(tmp_path / "missing.png")
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_image(bad)


def test_gradient_shift_invariant_real_valued(rng):
    img = rng.uniform(0, 255, (9, 9))
    np.testing.assert_allclose(gradient_magnitude_prewitt(img + 12.345),
                               gradient_magnitude_prewitt(img), rtol=0, atol=1e-10)
