"""Full-reference image quality assessment with deviation pooling.

LS maps (squared error, SSIM, gradient magnitude similarity) are built
separately from the pooling step, so any map can be reduced with mean,
weighted mean, SD, MAD, their blend DD, or a general order-rho deviation.
"""

from .errors import (DatasetError, DecodeError, DegenerateWeightsError, DevpoolError,
                     EmptyInputError, InvalidInputError, ManifestError,
                     UndefinedCorrelationError)
from .evaluation import (DatasetManifest, EvaluationReport, LogisticParams, evaluate_dataset,
                         fit_logistic, pearson, read_manifest, rmse, spearman)
from .image import (convolve3x3, downsample2, gradient_magnitude_prewitt, load_image,
                    to_grayscale)
from .maps import GmsParams, SsimParams, gms_map, mse_map, ssim_map
from .pooling import (MCT, PooledScore, PoolingSpec, Strategy, dd_pool_joint, mad_pool,
                      mean_pool, minkowski_deviation_pool, pool, sd_pool, weighted_mean_pool)
from .registry import (IndexSpec, MapKind, Polarity, Preprocess, QualityScore,
                       builtin_indices, get_index, index_from_dict, score_pair)

__version__ = "0.1.0"
