"""Comparison quantizers: uniform with MSE-optimal symmetric clipping, and
additive-powers-of-two (APoT) level grids.

Both are defined in standardized coordinates like QuantizerSpec, and both
pick their single free scale parameter (clip range / largest level) by a
one-dimensional golden-section search over analytic distortion for the
standard model.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import DistributionModel, ModelKind
from .errors import InvalidBitWidth
from .quantizer import (DistortionReport, _check_bits, _frozen,
                        _per_interval_error, codebook_distortion, distortion)

__all__ = ["BaselineSpec", "uniform_spec", "apot_spec"]

SEARCH_LO = 1e-6
SEARCH_HI = 20.0
SEARCH_TOL = 1e-6


@dataclass(frozen=True)
class BaselineSpec:
    """A baseline codebook with the same encode interface as QuantizerSpec.

    Uniform specs keep their finite clip range as the outer boundaries (so
    their distortion report includes a clipping term); APoT specs use
    infinite outer boundaries.
    """

    method: str
    bits: int
    model_kind: ModelKind
    levels: np.ndarray
    boundaries: np.ndarray
    clip: float | None = None
    location_offset: float = 0.0
    scale_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "levels", _frozen(self.levels))
        object.__setattr__(self, "boundaries", _frozen(self.boundaries))

    @property
    def num_levels(self) -> int:
        return 2**self.bits

    @property
    def interior_boundaries(self) -> np.ndarray:
        return self.boundaries[1:-1]

    def codebook(self) -> np.ndarray:
        return self.location_offset + self.scale_factor * self.levels

    def with_transform(self, location: float, scale: float) -> "BaselineSpec":
        return BaselineSpec(self.method, self.bits, self.model_kind,
                            self.levels, self.boundaries, self.clip,
                            float(location), float(scale))


def _golden_search(f, lo: float, hi: float, tol: float) -> float:
    """Deterministic golden-section minimum of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bracketed_minimum(f, lo: float, hi: float, tol: float) -> float:
    """Coarse scan to bracket the global minimum, then golden section."""
    grid = np.linspace(lo, hi, 128)
    values = [f(x) for x in grid]
    i = int(np.argmin(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    return _golden_search(f, a, b, tol)


def _uniform_arrays(bits: int, clip: float):
    k = 2**bits
    edges = np.linspace(-clip, clip, k + 1)
    levels = 0.5 * (edges[:-1] + edges[1:])
    return levels, edges


def _clipped_distortion(kind: ModelKind, bits: int, clip: float) -> float:
    """Quantization error inside [-clip, clip] plus clipping error outside."""
    levels, edges = _uniform_arrays(bits, clip)
    quant = float(np.sum(_per_interval_error(kind, edges[:-1], edges[1:], levels)))
    tails = _per_interval_error(kind, np.array([-np.inf, clip]),
                                np.array([-clip, np.inf]),
                                np.array([-clip, clip]))
    return quant + float(np.sum(tails))


@lru_cache(maxsize=None)
def uniform_spec(kind: ModelKind, bits: int) -> BaselineSpec:
    """Equal-width quantizer over [-clip, clip] with midpoint levels, clip
    chosen to minimize analytic distortion for the standard model."""
    bits = _check_bits(bits)
    clip = _bracketed_minimum(lambda c: _clipped_distortion(kind, bits, c),
                              SEARCH_LO, SEARCH_HI, SEARCH_TOL)
    levels, edges = _uniform_arrays(bits, clip)
    return BaselineSpec("uniform", bits, kind, levels, edges, clip=clip)


def _apot_magnitudes(high_bits: int, low_bits: int) -> np.ndarray:
    """All sums of one even-exponent and one odd-exponent power of two
    (zero allowed in each slot).  The two exponent sets are disjoint in
    binary, so all 2^(high_bits+low_bits) sums are distinct."""
    first = [0.0] + [2.0 ** -(2 * j) for j in range(2**high_bits - 1)]
    second = [0.0] + [2.0 ** -(2 * j + 1) for j in range(2**low_bits - 1)]
    sums = sorted({p + q for p in first for q in second})
    return np.array(sums)


def apot_levels_unit(bits: int) -> tuple[np.ndarray, tuple[int, int]]:
    """Unit-normalized APoT level grid and the bit split used.

    The 2^bits magnitudes (including 0) are mirrored into a symmetric
    ascending list of 2^(bits+1)-1 values; keeping every other value
    yields exactly 2^bits symmetric nonzero levels.  Odd widths fall back
    to an uneven split (ceil, floor).
    """
    if not 2 <= bits <= 8:
        raise InvalidBitWidth(f"APoT bit width must be in [2, 8], got {bits}")
    split = (math.ceil(bits / 2), math.floor(bits / 2))
    if bits % 2:
        warnings.warn(f"APoT: odd bit width {bits} split unevenly as {split}",
                      stacklevel=2)
    mags = _apot_magnitudes(*split)
    full = np.concatenate((-mags[:0:-1], mags))
    levels = full[0::2]
    return levels / np.max(np.abs(levels)), split


@lru_cache(maxsize=None)
def apot_spec(kind: ModelKind, bits: int) -> BaselineSpec:
    """APoT codebook scaled so its largest level minimizes analytic
    distortion for the standard model."""
    unit, _ = apot_levels_unit(bits)
    gamma = _bracketed_minimum(
        lambda g: codebook_distortion(kind, g * unit),
        SEARCH_LO, SEARCH_HI, SEARCH_TOL)
    levels = gamma * unit
    bounds = np.empty(levels.size + 1)
    bounds[0], bounds[-1] = -np.inf, np.inf
    bounds[1:-1] = 0.5 * (levels[:-1] + levels[1:])
    return BaselineSpec("apot", bits, kind, levels, bounds)


def baseline_for(method: str, model: DistributionModel, bits: int) -> BaselineSpec:
    if method == "uniform":
        return uniform_spec(model.kind, bits)
    if method == "apot":
        return apot_spec(model.kind, bits)
    raise ValueError(f"unknown baseline method: {method}")
