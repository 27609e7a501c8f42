"""Deterministic synthetic images and manifests for demos and tests."""

import csv
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["checkerboard", "add_noise", "noise_ladder", "write_noise_manifest"]


def checkerboard(size=64, square=8, low=64.0, high=192.0):
    """Checkerboard with a gentle diagonal shading so flat regions are not perfectly flat."""
    idx = np.arange(size)
    board = ((idx[:, None] // square + idx[None, :] // square) % 2).astype(np.float64)
    img = low + (high - low) * board
    shade = 12.0 * np.sin(2 * np.pi * (idx[:, None] + idx[None, :]) / (4.0 * size))
    return img + shade


def add_noise(img, sigma, seed=0):
    """Add zero-mean Gaussian noise of standard deviation `sigma` (no clipping)."""
    rng = np.random.default_rng(seed)
    return img + sigma * rng.standard_normal(img.shape)


def noise_ladder(img, sigmas, seed=0):
    """Nested distortions: one noise field scaled by each sigma in turn."""
    field = np.random.default_rng(seed).standard_normal(np.shape(img))
    return [img + s * field for s in sigmas]


def _save_png(arr, path):
    Image.fromarray(np.clip(np.rint(arr), 0, 255).astype(np.uint8), mode="L").save(path)


def write_noise_manifest(directory, levels=20, step=2.0, size=64, seed=0, mos_scale=100.0):
    """
    Write a one-reference manifest of `levels` noise-distorted PNGs.

    Subjective scores fall linearly with the noise level, so any index
    that is monotone in noise strength ranks the entries perfectly.
    Returns the manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ref = checkerboard(size)
    _save_png(ref, directory / "ref.png")
    sigmas = [step * (k + 1) for k in range(levels)]
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["ref", "dist", "mos", "tag"])
        for k, (s, img) in enumerate(zip(sigmas, noise_ladder(ref, sigmas, seed))):
            name = f"dist_{k:02d}.png"
            _save_png(img, directory / name)
            tag = "low" if k < levels // 2 else "high"
            w.writerow(["ref.png", name, f"{mos_scale * (1 - k / levels):.6g}", tag])
    return manifest
