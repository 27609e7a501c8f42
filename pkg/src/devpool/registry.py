"""Named quality indices: preprocessing + LS map + pooling + polarity.

A custom index can be described by a plain mapping (for example a JSON
document) and built with :func:`index_from_dict`::

    {
      "name": "gms-mink3",
      "map": "gms",                      # gms | mse | ssim
      "pooling": {"strategy": "minkowski", "rho": 3, "mct": "mean"},
      "preprocess": {"grayscale": true, "downsample2": true},
      "map_params": {"c": 170},          # GmsParams or SsimParams fields
      "polarity": "lower-is-better"      # optional, derived when omitted
    }

Pooling keys are ``strategy`` (``mean``, ``sd``, ``mad``, ``dd``,
``minkowski``), ``alpha``, ``rho`` and ``mct``. Weighted-mean pooling is
not available from a document because it needs a per-pixel weight map.
"""

from dataclasses import dataclass, field, replace
import enum
import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .image import as_field, downsample2, load_image, to_grayscale
from .maps import GmsParams, SsimParams, gms_map, mse_map, ssim_map
from .pooling import PoolingSpec, Strategy, pool

__all__ = [
    "MapKind",
    "Polarity",
    "Preprocess",
    "IndexSpec",
    "QualityScore",
    "builtin_indices",
    "get_index",
    "index_from_dict",
    "load_index_file",
    "default_polarity",
    "prepare_image",
    "score_pair",
]


class MapKind(str, enum.Enum):
    GMS = "gms"
    MSE = "mse"
    SSIM = "ssim"

    @property
    def is_similarity(self):
        return self is not MapKind.MSE


class Polarity(str, enum.Enum):
    HIGHER_IS_BETTER = "higher-is-better"
    LOWER_IS_BETTER = "lower-is-better"


@dataclass(frozen=True)
class Preprocess:
    grayscale: bool = True
    downsample2: bool = False


def default_polarity(map_kind, strategy):
    """Polarity implied by composing `map_kind` with a pooling `strategy`."""
    if MapKind(map_kind).is_similarity and not Strategy(strategy).is_deviation:
        return Polarity.HIGHER_IS_BETTER
    return Polarity.LOWER_IS_BETTER


@dataclass(frozen=True)
class IndexSpec:
    name: str
    map_kind: MapKind
    pooling: PoolingSpec = field(default_factory=PoolingSpec)
    preprocess: Preprocess = field(default_factory=Preprocess)
    polarity: Polarity = None
    map_params: object = None

    def __post_init__(self):
        if not self.name:
            raise InvalidInputError("index name must be non-empty")
        kind = MapKind(self.map_kind)
        object.__setattr__(self, "map_kind", kind)
        expected = default_polarity(kind, self.pooling.strategy)
        if self.polarity is None:
            object.__setattr__(self, "polarity", expected)
        elif Polarity(self.polarity) is not expected:
            raise InvalidInputError(
                f"index {self.name!r}: polarity {Polarity(self.polarity).value} is inconsistent "
                f"with {kind.value} map + {self.pooling.strategy.value} pooling")
        else:
            object.__setattr__(self, "polarity", Polarity(self.polarity))

        params = self.map_params
        if kind is MapKind.GMS:
            params = GmsParams() if params is None else params
            if not isinstance(params, GmsParams):
                raise InvalidInputError("GMS index needs GmsParams")
        elif kind is MapKind.SSIM:
            params = SsimParams() if params is None else params
            if not isinstance(params, SsimParams):
                raise InvalidInputError("SSIM index needs SsimParams")
        elif params is not None:
            raise InvalidInputError("MSE index takes no map parameters")
        object.__setattr__(self, "map_params", params)


@dataclass(frozen=True)
class QualityScore:
    value: float
    index_name: str

    def __float__(self):
        return self.value


def _preset(name, kind, strategy, downsample=False, **pool_kw):
    return IndexSpec(name, kind, PoolingSpec(strategy, **pool_kw),
                     Preprocess(grayscale=True, downsample2=downsample))


_BUILTINS = (
    _preset("mse", MapKind.MSE, Strategy.MEAN),
    _preset("mse-sd", MapKind.MSE, Strategy.SD),
    _preset("mse-mad", MapKind.MSE, Strategy.MAD),
    _preset("ssim", MapKind.SSIM, Strategy.MEAN),
    _preset("ssim-sd", MapKind.SSIM, Strategy.SD),
    _preset("ssim-mad", MapKind.SSIM, Strategy.MAD),
    _preset("gms-mean", MapKind.GMS, Strategy.MEAN, downsample=True),
    _preset("gmsd", MapKind.GMS, Strategy.SD, downsample=True),
    _preset("gms-mad", MapKind.GMS, Strategy.MAD, downsample=True),
    _preset("gms-dd", MapKind.GMS, Strategy.DD, downsample=True, alpha=0.5),
)


def builtin_indices():
    """The ten preset indices, in table order."""
    return list(_BUILTINS)


def get_index(name):
    for spec in _BUILTINS:
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in _BUILTINS)
    raise KeyError(f"unknown index {name!r} (known: {known})")


def index_from_dict(doc):
    """Build an :class:`IndexSpec` from a configuration mapping."""
    try:
        kind = MapKind(doc["map"])
        pool_doc = dict(doc.get("pooling", {}))
        strategy = Strategy(pool_doc.pop("strategy", "mean"))
        if strategy is Strategy.WEIGHTED_MEAN:
            raise InvalidInputError("weighted-mean pooling cannot be configured from a document")
        unknown = set(pool_doc) - {"alpha", "rho", "mct"}
        if unknown:
            raise InvalidInputError(f"unknown pooling keys: {sorted(unknown)}")
        pooling = PoolingSpec(strategy, **pool_doc)
        pre_doc = doc.get("preprocess", {})
        preprocess = Preprocess(
            grayscale=bool(pre_doc.get("grayscale", True)),
            downsample2=bool(pre_doc.get("downsample2", kind is MapKind.GMS)))
        params = doc.get("map_params")
        if params is not None:
            params = (GmsParams if kind is MapKind.GMS else SsimParams)(**params)
        return IndexSpec(doc["name"], kind, pooling, preprocess, doc.get("polarity"), params)
    except KeyError as exc:
        raise InvalidInputError(f"index definition is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"invalid index definition: {exc}") from exc


def load_index_file(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: {exc}") from exc
    return index_from_dict(doc)


def prepare_image(img, preprocess):
    """Apply `preprocess` to a decoded raster or a file path."""
    if isinstance(img, (str, Path)):
        arr = load_image(img)
    else:
        arr = np.asarray(img, dtype=np.float64)
        if arr.ndim == 3:
            if not preprocess.grayscale:
                raise InvalidInputError("colour input requires grayscale preprocessing")
            arr = to_grayscale(arr)
    arr = as_field(arr)
    if preprocess.downsample2:
        arr = downsample2(arr)
    return arr


def score_pair(ref, dist, spec):
    """
    Score a distorted image against its reference with index `spec`.

    Parameters
    ----------
    ref, dist : path or array_like
      File paths, ``(H, W, 3)`` RGB rasters, or 2-D luminance arrays
    spec : IndexSpec or str
      Index definition or the name of a built-in index

    Returns
    -------
    score : QualityScore
    """
    if isinstance(spec, str):
        spec = get_index(spec)
    r = prepare_image(ref, spec.preprocess)
    d = prepare_image(dist, spec.preprocess)
    if r.shape != d.shape:
        raise InvalidInputError(f"dimension mismatch: {r.shape} vs {d.shape}")
    if spec.map_kind is MapKind.GMS:
        ls = gms_map(r, d, spec.map_params)
    elif spec.map_kind is MapKind.SSIM:
        ls = ssim_map(r, d, spec.map_params)
    else:
        ls = mse_map(r, d)
    return QualityScore(pool(ls, spec.pooling).value, spec.name)


def with_overrides(spec, pooling=None, gms_c=None, downsample=None):
    """Copy of `spec` with the given pieces replaced (used by the CLI)."""
    changes = {}
    if pooling is not None:
        changes["pooling"] = pooling
        changes["polarity"] = None
        if pooling != spec.pooling:
            changes["name"] = f"{spec.name}[{pooling.strategy.value}]"
    if gms_c is not None:
        if spec.map_kind is not MapKind.GMS:
            raise InvalidInputError("the GMS constant only applies to GMS indices")
        changes["map_params"] = GmsParams(gms_c)
    if downsample is not None:
        changes["preprocess"] = replace(spec.preprocess, downsample2=downsample)
    return replace(spec, **changes) if changes else spec
