"""Pooling runtime versus LS size.

Times mean, SD, MAD and joint MAD/SD pooling on a fixed-seed uniform
[0, 1) buffer. Everything runs on the calling thread; each strategy gets
one discarded warm-up call, then `runs` timed calls interleaved across
strategies, and the median is reported.
"""

import csv
from dataclasses import dataclass
import os
import statistics
import time

import numpy as np

from .errors import InvalidInputError
from .pooling import dd_pool_joint, mad_pool, mean_pool, sd_pool

__all__ = ["STRATEGIES", "DEFAULT_SIZES", "BenchRow", "run_bench", "write_csv"]

STRATEGIES = {
    "mean": mean_pool,
    "sd": sd_pool,
    "mad": mad_pool,
    "dd-joint": lambda x: dd_pool_joint(x, 0.5),
}
DEFAULT_SIZES = tuple(2 ** k for k in range(20, 25))
MIN_RUNS = 5
# input buffer plus the temporaries a pooling call allocates
_BYTES_PER_ELEMENT = 8 * 4


@dataclass(frozen=True)
class BenchRow:
    ls_size: int
    strategy: str
    median_seconds: float
    runs: int


def _available_bytes():
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return None


def check_sizes(sizes, runs):
    sizes = sorted({int(s) for s in sizes})
    if not sizes:
        raise InvalidInputError("no LS sizes given")
    if sizes[0] < 1:
        raise InvalidInputError(f"LS sizes must be >= 1, got {sizes[0]}")
    if runs < MIN_RUNS:
        raise InvalidInputError(f"runs must be >= {MIN_RUNS}, got {runs}")
    avail = _available_bytes()
    need = sizes[-1] * _BYTES_PER_ELEMENT
    if avail is not None and need > avail:
        raise InvalidInputError(
            f"LS size {sizes[-1]} needs about {need / 2**20:.0f} MiB; "
            f"only {avail / 2**20:.0f} MiB available")
    return sizes


def run_bench(sizes=DEFAULT_SIZES, runs=20, seed=0, strategies=None):
    """Return one :class:`BenchRow` per (size, strategy), sizes ascending."""
    sizes = check_sizes(sizes, runs)
    names = list(strategies or STRATEGIES)
    rows = []
    clock = time.perf_counter
    for n in sizes:
        buf = np.random.default_rng(seed).random(n)
        for name in names:
            STRATEGIES[name](buf)
        samples = {name: [] for name in names}
        for _ in range(runs):
            for name in names:
                fn = STRATEGIES[name]
                t0 = clock()
                fn(buf)
                samples[name].append(clock() - t0)
        for name in names:
            med = statistics.median(samples[name])
            rows.append(BenchRow(n, name, max(med, 1e-9), runs))
    return rows


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["ls_size", "strategy", "median_seconds", "runs"])
    for r in rows:
        w.writerow([r.ls_size, r.strategy, f"{r.median_seconds:.9f}", r.runs])
