"""Dataset-level evaluation: SRC, PCC and RMSE against subjective scores.

SRC is computed on raw objective scores and reported as an absolute
value, so indices of either polarity are comparable. PCC and RMSE are
computed after mapping objective scores onto the subjective scale with a
four-parameter logistic::

    q(s) = (b1 - b2) / (1 + exp(-(s - b3) / |b4|)) + b2

Manifest format
---------------
A CSV file with header ``ref,dist,mos`` and an optional ``tag`` column.
Paths are relative to the manifest's directory. Malformed rows and
unreadable images are excluded and listed in the report, never fatal
unless nothing usable remains.

Report fields
-------------
``index``, ``polarity``, ``mos_polarity``, ``n_scored``, ``n_excluded``,
``src``, ``pcc``, ``rmse``, ``logistic`` (``beta1``..``beta4``,
``converged``, ``iterations``), ``src_by_distortion`` (tag -> SRC),
``distortion_summary`` (``avg``, ``min``, ``std``), ``entries`` (``row``,
``ref``, ``dist``, ``tag``, ``mos``, ``score``, ``predicted``) and
``exclusions`` (``row``, ``ref``, ``dist``, ``reason``). Statistics that
are undefined for the data at hand are ``null``.
"""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
import json
import logging
import math
from pathlib import Path

import numpy as np
from scipy import optimize, stats

from .errors import (DatasetError, DecodeError, InvalidInputError, ManifestError,
                     UndefinedCorrelationError)
from .registry import Polarity, score_pair

__all__ = [
    "LogisticParams",
    "ManifestEntry",
    "DatasetManifest",
    "EntryScore",
    "EvaluationReport",
    "spearman",
    "pearson",
    "rmse",
    "fit_logistic",
    "read_manifest",
    "evaluate_dataset",
]

log = logging.getLogger(__name__)


def _pair_arrays(x, y, min_len):
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.size != b.size:
        raise InvalidInputError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise InvalidInputError(f"need at least {min_len} values, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError("values must be finite")
    return a, b


def pearson(x, y):
    """Product-moment correlation of `x` and `y`, in [-1, 1]."""
    a, b = _pair_arrays(x, y, 2)
    a = a - a.mean()
    b = b - b.mean()
    saa = float(np.dot(a, a))
    sbb = float(np.dot(b, b))
    if saa == 0.0 or sbb == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant sequence")
    r = float(np.dot(a, b)) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def spearman(x, y):
    """Rank-order correlation using average ranks for ties."""
    a, b = _pair_arrays(x, y, 2)
    return pearson(stats.rankdata(a), stats.rankdata(b))


def rmse(pred, target):
    p, t = _pair_arrays(pred, target, 1)
    d = p - t
    return math.sqrt(float(np.dot(d, d)) / d.size)


@dataclass(frozen=True)
class LogisticParams:
    beta1: float
    beta2: float
    beta3: float
    beta4: float
    converged: bool
    iterations: int

    def predict(self, s):
        s = np.asarray(s, dtype=np.float64)
        mid = 0.5 * (self.beta1 + self.beta2)
        half = 0.5 * (self.beta1 - self.beta2)
        # tanh form of the logistic; avoids exp overflow far from the centre
        return mid + half * np.tanh((s - self.beta3) / (2.0 * abs(self.beta4)))


# Smallest inverse width (standardized units) reported back as a finite b4.
_MIN_INV_WIDTH = 1e-6


def _curve(t, mid, slope, center, inv_width):
    # mid + (2 slope / u) tanh(u (t - center) / 2); tanh(z) / z -> 1 at z = 0
    d = t - center
    z = (0.5 * inv_width) * d
    ratio = np.ones_like(z)
    np.divide(np.tanh(z), z, out=ratio, where=z != 0.0)
    return mid + slope * d * ratio


_COARSE = {"xatol": 1e-4, "fatol": 1e-10, "maxiter": 600, "adaptive": True}
_FINE = {"xatol": 1e-12, "fatol": 1e-22, "maxiter": 3000, "adaptive": True}


def fit_logistic(objective, mos, max_polish=10):
    """
    Fit the monotone 4-parameter logistic from objective scores to `mos`.

    Works on standardized data with a Nelder-Mead simplex in two phases.
    A coarse pass runs from the documented guess (``b1 = max(mos)``,
    ``b2 = min(mos)``, ``b3 = median(objective)``,
    ``b4 = std(objective) / 4``) and from a small grid of alternative
    centres, widths and orientations; the best result is then polished
    by repeated tight restarts. Failure of the final polish to meet its
    tolerances is reported as ``converged=False`` together with the best
    parameters found.

    Internally the curve is ``mid + (2 k / u) tanh(u (s - b3) / 2)``,
    which equals the logistic with ``b4 = 1 / u`` and stays well defined
    as ``u -> 0`` (the straight-line limit).
    """
    s, y = _pair_arrays(objective, mos, 5)
    s_sd = float(np.std(s))
    if s_sd == 0.0:
        raise InvalidInputError("objective scores are constant; logistic fit is undefined")
    s_c = float(np.median(s))
    y_c = float(np.mean(y))
    y_sd = float(np.std(y)) or 1.0
    t = (s - s_c) / s_sd
    v = (y - y_c) / y_sd

    def loss(p):
        r = _curve(t, *p) - v
        return float(np.dot(r, r)) / r.size

    hi = (float(y.max()) - y_c) / y_sd
    lo = (float(y.min()) - y_c) / y_sd
    mid0, span = 0.5 * (hi + lo), hi - lo
    # documented guess first: b4 = std / 4 means u = 4 in standardized units
    starts = [np.array([mid0, span, 0.0, 4.0])]
    for c in np.quantile(t, [0.25, 0.5, 0.75]):
        for u in (4.0, 1.0):
            for sign in (1.0, -1.0):
                starts.append(np.array([mid0, sign * span * u / 4.0, c, u]))

    iterations = 0
    best, best_f = starts[0], loss(starts[0])
    for x0 in starts:
        res = optimize.minimize(loss, x0, method="Nelder-Mead", options=_COARSE)
        iterations += int(res.nit)
        if res.fun < best_f:
            best, best_f = res.x, float(res.fun)

    converged = False
    for _ in range(max_polish):
        res = optimize.minimize(loss, best, method="Nelder-Mead", options=_FINE)
        iterations += int(res.nit)
        converged = bool(res.success)
        if not res.fun < best_f:
            break
        gain = best_f - res.fun
        best, best_f = res.x, float(res.fun)
        if gain <= 1e-6 * best_f:
            break

    mid, slope, center, inv_width = (float(p) for p in best)
    inv_width = max(abs(inv_width), _MIN_INV_WIDTH)
    half = 2.0 * slope / inv_width
    params = LogisticParams(
        beta1=y_c + y_sd * (mid + half),
        beta2=y_c + y_sd * (mid - half),
        beta3=s_c + s_sd * center,
        beta4=s_sd / inv_width,
        converged=converged and math.isfinite(best_f),
        iterations=iterations,
    )
    if not np.all(np.isfinite(params.predict(s))):
        params = LogisticParams(params.beta1, params.beta2, params.beta3, params.beta4,
                                False, iterations)
    return params


@dataclass(frozen=True)
class ManifestEntry:
    row: int
    ref: str
    dist: str
    mos: float
    tag: str = None


@dataclass
class DatasetManifest:
    entries: list
    mos_polarity: Polarity = Polarity.HIGHER_IS_BETTER
    base_dir: Path = field(default_factory=Path)
    rejected: list = field(default_factory=list)

    def resolve(self, p):
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p


def read_manifest(path, mos_polarity=Polarity.HIGHER_IS_BETTER):
    """
    Parse a ``ref,dist,mos[,tag]`` manifest.

    Rows that cannot be parsed are kept in ``rejected`` as
    ``(row, message)`` pairs; row numbers count the header as row 1.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    entries, rejected = [], []
    with fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = {"ref", "dist", "mos"} - set(header)
        if missing:
            raise ManifestError(f"{path}: header lacks column(s) {sorted(missing)}")
        reader.fieldnames = header
        for row_no, row in enumerate(reader, start=2):
            ref = (row.get("ref") or "").strip()
            dist = (row.get("dist") or "").strip()
            raw_mos = (row.get("mos") or "").strip()
            tag = (row.get("tag") or "").strip() or None
            try:
                if not ref or not dist:
                    raise ValueError("empty image path")
                mos = float(raw_mos)
                if not math.isfinite(mos):
                    raise ValueError(f"non-finite mos {raw_mos!r}")
            except ValueError as exc:
                rejected.append((row_no, f"malformed row: {exc}"))
                continue
            entries.append(ManifestEntry(row_no, ref, dist, mos, tag))
    if not entries:
        raise ManifestError(f"{path}: no valid rows")
    return DatasetManifest(entries, Polarity(mos_polarity), path.parent, rejected)


@dataclass(frozen=True)
class EntryScore:
    row: int
    ref: str
    dist: str
    tag: str
    mos: float
    score: float
    predicted: float = None


@dataclass
class EvaluationReport:
    index_name: str
    polarity: Polarity
    mos_polarity: Polarity
    entries: list
    src: float
    pcc: float
    rmse: float
    logistic: LogisticParams
    src_by_distortion: dict
    distortion_summary: dict
    exclusions: list

    def to_dict(self):
        return {
            "index": self.index_name,
            "polarity": Polarity(self.polarity).value,
            "mos_polarity": Polarity(self.mos_polarity).value,
            "n_scored": len(self.entries),
            "n_excluded": len(self.exclusions),
            "src": self.src,
            "pcc": self.pcc,
            "rmse": self.rmse,
            "logistic": None if self.logistic is None else asdict(self.logistic),
            "src_by_distortion": dict(self.src_by_distortion),
            "distortion_summary": self.distortion_summary,
            "entries": [asdict(e) for e in self.entries],
            "exclusions": list(self.exclusions),
        }

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path):
        cols = ["row", "ref", "dist", "tag", "mos", "score", "predicted"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for e in self.entries:
                w.writerow(asdict(e))


def _score_entry(manifest, entry, spec):
    try:
        q = score_pair(manifest.resolve(entry.ref), manifest.resolve(entry.dist), spec)
    except (DecodeError, InvalidInputError) as exc:
        return None, str(exc)
    return q.value, None


def _abs_src(x, y):
    try:
        return abs(spearman(x, y))
    except UndefinedCorrelationError:
        return None


def evaluate_dataset(manifest, spec, workers=1):
    """
    Score every manifest entry with `spec` and compare against subjective scores.

    Parameters
    ----------
    manifest : DatasetManifest or path
    spec : IndexSpec
    workers : int
      Number of threads used for scoring; results are collected in
      manifest order so the report does not depend on scheduling

    Returns
    -------
    report : EvaluationReport
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = read_manifest(manifest)
    exclusions = [{"row": r, "ref": None, "dist": None, "reason": msg}
                  for r, msg in manifest.rejected]

    def job(entry):
        return _score_entry(manifest, entry, spec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, manifest.entries))
    else:
        results = [job(e) for e in manifest.entries]

    kept = []
    for entry, (value, err) in zip(manifest.entries, results):
        if err is not None:
            log.warning("row %d excluded: %s", entry.row, err)
            exclusions.append({"row": entry.row, "ref": entry.ref, "dist": entry.dist,
                               "reason": err})
        else:
            kept.append((entry, value))
    exclusions.sort(key=lambda e: e["row"])
    if len(kept) < 2:
        raise DatasetError(f"only {len(kept)} usable entries; need at least 2")

    scores = np.array([v for _, v in kept])
    mos = np.array([e.mos for e, _ in kept])
    src = _abs_src(scores, mos)

    logistic, pcc, err = None, None, None
    if len(kept) >= 5 and np.std(scores) > 0:
        logistic = fit_logistic(scores, mos)
        predicted = logistic.predict(scores)
        err = rmse(predicted, mos)
        try:
            pcc = pearson(predicted, mos)
        except UndefinedCorrelationError:
            pcc = None
    else:
        predicted = [None] * len(kept)

    entries = [EntryScore(e.row, e.ref, e.dist, e.tag, e.mos, float(v),
                          None if p is None else float(p))
               for (e, v), p in zip(kept, predicted)]

    by_tag = {}
    for e, v in kept:
        if e.tag is not None:
            by_tag.setdefault(e.tag, []).append((v, e.mos))
    src_by_tag = {}
    for tag in sorted(by_tag):
        pairs = by_tag[tag]
        if len(pairs) >= 2:
            src_by_tag[tag] = _abs_src([p[0] for p in pairs], [p[1] for p in pairs])
    defined = [v for v in src_by_tag.values() if v is not None]
    summary = None
    if defined:
        summary = {"avg": float(np.mean(defined)), "min": float(np.min(defined)),
                   "std": float(np.std(defined))}

    return EvaluationReport(spec.name, spec.polarity, manifest.mos_polarity, entries,
                            src, pcc, err, logistic, src_by_tag, summary, exclusions)
