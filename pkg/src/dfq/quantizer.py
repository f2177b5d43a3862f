"""MSE-optimal scalar quantizer via alternating fixed-point iteration.

Levels are moved to the conditional mean of their interval, boundaries to
the midpoint of adjacent levels, until the levels stop moving.  For the
bell-shaped families supported here this converges to the unique
minimum-distortion K-level quantizer (the classic Lloyd-Max fixed point).

Everything is computed on the standard (location 0, scale 1) member of
the family; `location_offset` and `scale_factor` carry the affine
back-transform to the data's coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from functools import lru_cache

import numpy as np

from . import kernels
from .distributions import DistributionModel, ModelKind, std_interval_moments
from .errors import InvalidBitWidth, NoConvergence

__all__ = [
    "QuantizerSpec",
    "DistortionReport",
    "IterationTrace",
    "init_spec",
    "update_levels",
    "update_boundaries",
    "optimize",
    "distortion",
    "codebook_distortion",
    "residuals",
    "standard_spec",
]

MAX_BITS = 16
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000


def _check_bits(bits: int) -> int:
    if not isinstance(bits, (int, np.integer)) or not 1 <= int(bits) <= MAX_BITS:
        raise InvalidBitWidth(f"bit width must be in [1, {MAX_BITS}], got {bits}")
    return int(bits)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class QuantizerSpec:
    """K = 2^bits levels and K+1 boundaries in standardized coordinates.

    Outer boundaries are infinite: the outermost levels absorb the tails,
    so this spec never clips.  `location_offset`/`scale_factor` map the
    standardized levels back to data coordinates.
    """

    bits: int
    model_kind: ModelKind
    levels: np.ndarray
    boundaries: np.ndarray
    location_offset: float = 0.0
    scale_factor: float = 1.0

    def __post_init__(self):
        bits = _check_bits(self.bits)
        levels = _frozen(self.levels)
        boundaries = _frozen(self.boundaries)
        k = 2**bits
        if levels.shape != (k,):
            raise ValueError(f"expected {k} levels, got {levels.shape}")
        if boundaries.shape != (k + 1,):
            raise ValueError(f"expected {k + 1} boundaries, got {boundaries.shape}")
        if not (np.diff(levels) > 0).all():
            raise ValueError("levels must be strictly increasing")
        if not (boundaries[0] == -np.inf and boundaries[-1] == np.inf):
            raise ValueError("outer boundaries must be infinite")
        if not (np.diff(boundaries[1:-1]) > 0).all():
            raise ValueError("interior boundaries must be strictly increasing")
        if not ((boundaries[:-1] < levels) & (levels < boundaries[1:])).all():
            raise ValueError("each level must lie inside its interval")
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "boundaries", boundaries)

    @property
    def num_levels(self) -> int:
        return 2**self.bits

    @property
    def interior_boundaries(self) -> np.ndarray:
        return self.boundaries[1:-1]

    def codebook(self) -> np.ndarray:
        """Reconstruction levels in data coordinates."""
        return self.location_offset + self.scale_factor * self.levels

    def with_transform(self, location: float, scale: float) -> "QuantizerSpec":
        return QuantizerSpec(self.bits, self.model_kind, self.levels,
                             self.boundaries, float(location), float(scale))


@dataclass(frozen=True)
class DistortionReport:
    """Expected squared error split into clipping and quantization parts.

    All values are in standardized coordinates; multiply by the spec's
    scale_factor^2 for data coordinates.
    """

    clipping_error: float
    quantization_error: float
    total: float
    per_interval: np.ndarray


@dataclass
class IterationTrace:
    """Per-iteration progress of `optimize`.

    `drops[t]` is iteration t's distortion decrement, computed without
    cancellation so it stays meaningful far below one ulp of the total
    (direct re-evaluation of the distortion would round those decrements
    away).  `distortions` reconstructs the float64 sequence from the
    drops; `exact_distortions` keeps 40 significant digits so strict
    monotonicity is preserved exactly.
    """

    iteration_count: int
    converged: bool
    final_residual: float
    initial_distortion: float
    changes: np.ndarray
    drops: np.ndarray
    states: list | None = field(default=None, repr=False)

    @property
    def distortions(self) -> np.ndarray:
        seq = np.empty(self.iteration_count + 1)
        seq[0] = self.initial_distortion
        seq[1:] = self.initial_distortion - np.cumsum(self.drops)
        return seq

    def exact_distortions(self) -> list[Decimal]:
        ctx = getcontext().copy()
        ctx.prec = 40
        d = Decimal(self.initial_distortion)
        seq = [d]
        for drop in self.drops:
            d = ctx.subtract(d, Decimal(float(drop)))
            seq.append(d)
        return seq


def init_spec(bits: int, model_kind: ModelKind) -> QuantizerSpec:
    """Symmetric uniform starting point: K levels spaced 2/K about 0."""
    bits = _check_bits(bits)
    k = 2**bits
    i = np.arange(1, k + 1, dtype=float)
    levels = 2.0 * (i - (k + 1) / 2.0) / k
    return QuantizerSpec(bits, model_kind, levels, _midpoint_boundaries(levels))


def _midpoint_boundaries(levels: np.ndarray) -> np.ndarray:
    bounds = np.empty(levels.size + 1)
    bounds[0], bounds[-1] = -np.inf, np.inf
    bounds[1:-1] = 0.5 * (levels[:-1] + levels[1:])
    return bounds


def update_levels(spec: QuantizerSpec, model: DistributionModel) -> QuantizerSpec:
    """Move each level to the conditional mean of its interval."""
    mass, m1, _ = std_interval_moments(model.kind, spec.boundaries[:-1],
                                       spec.boundaries[1:])
    return QuantizerSpec(spec.bits, spec.model_kind, m1 / mass, spec.boundaries,
                         spec.location_offset, spec.scale_factor)


def update_boundaries(spec: QuantizerSpec) -> QuantizerSpec:
    """Move each interior boundary to the midpoint of adjacent levels."""
    return QuantizerSpec(spec.bits, spec.model_kind, spec.levels,
                         _midpoint_boundaries(spec.levels),
                         spec.location_offset, spec.scale_factor)


def optimize(model: DistributionModel, bits: int, tol: float = DEFAULT_TOL,
             max_iter: int = DEFAULT_MAX_ITER, initial_levels=None,
             record_states: bool = False):
    """Run the alternating iteration to convergence.

    Returns (spec, trace).  The spec carries the model's location/scale
    as its back-transform.  Raises NoConvergence (with the partial spec
    and trace attached) if `max_iter` is exhausted.
    """
    bits = _check_bits(bits)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    start = init_spec(bits, model.kind)
    if initial_levels is not None:
        start = QuantizerSpec(bits, model.kind, initial_levels,
                              _midpoint_boundaries(np.asarray(initial_levels, float)))
    d0 = distortion(start, model).total
    record = [] if record_states else None
    levels, inner, iters, converged, changes, drops = kernels.lloyd_iterate(
        kernels.kind_code(model.kind), start.levels, tol, max_iter,
        record=record)
    boundaries = np.concatenate(([-np.inf], inner, [np.inf]))
    spec = QuantizerSpec(bits, model.kind, levels, boundaries,
                         model.location, model.scale)
    trace = IterationTrace(
        iteration_count=iters,
        converged=converged,
        final_residual=float(changes[-1]),
        initial_distortion=d0,
        changes=changes,
        drops=drops,
        states=record,
    )
    if not converged:
        raise NoConvergence(
            f"no convergence after {iters} iterations (last change "
            f"{changes[-1]:.3e}, tol {tol:.3e})", spec=spec, trace=trace)
    return spec, trace


def _per_interval_error(kind: ModelKind, lo, hi, levels) -> np.ndarray:
    mass, m1, m2 = std_interval_moments(kind, lo, hi)
    per = m2 - 2.0 * levels * m1 + levels**2 * mass
    return np.maximum(per, 0.0)


def distortion(spec, model: DistributionModel) -> DistortionReport:
    """Expected squared error of the spec against the standard model of
    `model.kind`, in standardized coordinates.

    Works for finite outer boundaries too: mass outside them is charged
    as clipping error (squared distance to the nearest boundary).
    """
    bounds = np.asarray(spec.boundaries, dtype=float)
    levels = np.asarray(spec.levels, dtype=float)
    per = _per_interval_error(model.kind, bounds[:-1], bounds[1:], levels)
    quant = float(np.sum(per))
    clip = 0.0
    if math.isfinite(bounds[0]):
        clip += _per_interval_error(model.kind, np.array([-np.inf]),
                                    bounds[:1], bounds[:1])[0]
    if math.isfinite(bounds[-1]):
        clip += _per_interval_error(model.kind, bounds[-1:],
                                    np.array([np.inf]), bounds[-1:])[0]
    clip = float(clip)
    return DistortionReport(clipping_error=clip, quantization_error=quant,
                            total=clip + quant, per_interval=per)


def codebook_distortion(kind: ModelKind, levels) -> float:
    """Expected squared reconstruction error of a codebook under the
    standard model: nearest-level assignment, i.e. midpoint boundaries
    with the outermost levels absorbing the tails."""
    levels = np.asarray(levels, dtype=float)
    bounds = _midpoint_boundaries(levels)
    return float(np.sum(_per_interval_error(kind, bounds[:-1], bounds[1:], levels)))


def residuals(spec, model: DistributionModel) -> tuple[float, float]:
    """How far the spec is from satisfying both optimality conditions.

    Returns (max level distance from its interval's conditional mean,
    max interior-boundary distance from the adjacent levels' midpoint).
    """
    bounds = np.asarray(spec.boundaries, dtype=float)
    levels = np.asarray(spec.levels, dtype=float)
    mass, m1, _ = std_interval_moments(model.kind, bounds[:-1], bounds[1:])
    level_residual = float(np.max(np.abs(levels - m1 / mass)))
    if levels.size > 1:
        mids = 0.5 * (levels[:-1] + levels[1:])
        boundary_residual = float(np.max(np.abs(bounds[1:-1] - mids)))
    else:
        boundary_residual = 0.0
    return level_residual, boundary_residual


@lru_cache(maxsize=None)
def standard_spec(kind: ModelKind, bits: int, tol: float = DEFAULT_TOL,
                  max_iter: int = 1_000_000):
    """Converged spec for the standard model, memoized per process.

    The default iteration budget is sized for bit widths up to ~9 at the
    default tolerance; convergence slows roughly 4x per extra bit.
    """
    model = DistributionModel(kind, 0.0, 1.0)
    return optimize(model, bits, tol=tol, max_iter=max_iter)
