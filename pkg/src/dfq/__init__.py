"""dfq: MSE-optimal non-uniform scalar quantization of weight tensors.

Fits Gaussian/Laplace models to weight data, selects the better family by
Kolmogorov-Smirnov distance, derives the minimum-distortion quantizer for
the fitted model by fixed-point iteration, and encodes tensors to packed
M-bit codes.
"""
from .baselines import BaselineSpec, apot_spec, uniform_spec
from .codec import (QuantizedTensor, Tensor, decode, empirical_mse, encode,
                    pack_codes, read_qdfq, unpack_codes, write_qdfq)
from .distributions import (DistributionModel, FitReport, ModelKind, cdf,
                            fit_gaussian_mle, fit_laplace_mle, gaussian,
                            ks_statistic, laplace, pdf, select_distribution,
                            truncated_mean, truncated_second_moment)
from .errors import (CodeOutOfRange, DegenerateData, DfqError,
                     FileFormatError, InvalidBitWidth, ManifestError,
                     NoConvergence, NonFiniteValue, ShapeMismatch,
                     ZeroMassInterval)
from .quantizer import (DistortionReport, IterationTrace, QuantizerSpec,
                        codebook_distortion, distortion, init_spec, optimize,
                        residuals, standard_spec, update_boundaries,
                        update_levels)
from .tensorio import (Manifest, ManifestEntry, load_manifest, read_qtns,
                       save_manifest, sha256_file, write_qtns)

__version__ = "0.1.0"
