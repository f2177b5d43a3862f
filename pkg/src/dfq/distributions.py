"""Parametric Gaussian/Laplace weight models.

Density and CDF evaluation, closed-form truncated moments, maximum
likelihood fitting, and Kolmogorov-Smirnov model selection.  All moment
computations are done in standardized coordinates (location 0, scale 1)
and transformed back, so a single set of closed forms serves every model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateData, ZeroMassInterval

__all__ = [
    "ModelKind",
    "DistributionModel",
    "FitReport",
    "pdf",
    "cdf",
    "truncated_mean",
    "truncated_second_moment",
    "fit_gaussian_mle",
    "fit_laplace_mle",
    "ks_statistic",
    "select_distribution",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Interval probabilities below this are treated as zero mass: conditional
# means would be 0/0 at double precision.
MASS_FLOOR = 1e-300


class ModelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"


@dataclass(frozen=True)
class DistributionModel:
    """A location/scale family member: Gaussian(mu, sigma) or Laplace(mu, b)."""

    kind: ModelKind
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.location) and math.isfinite(self.scale)):
            raise ValueError("model parameters must be finite")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def is_standard(self) -> bool:
        return self.location == 0.0 and self.scale == 1.0

    def standardized(self) -> "DistributionModel":
        return DistributionModel(self.kind, 0.0, 1.0)

    def variance(self) -> float:
        if self.kind is ModelKind.GAUSSIAN:
            return self.scale**2
        return 2.0 * self.scale**2


def gaussian(location: float = 0.0, scale: float = 1.0) -> DistributionModel:
    return DistributionModel(ModelKind.GAUSSIAN, location, scale)


def laplace(location: float = 0.0, scale: float = 1.0) -> DistributionModel:
    return DistributionModel(ModelKind.LAPLACE, location, scale)


# ---------------------------------------------------------------------------
# Density / CDF
# ---------------------------------------------------------------------------

def pdf(model: DistributionModel, x):
    """Density f(x | model).  Accepts scalars or arrays."""
    z = (np.asarray(x, dtype=float) - model.location) / model.scale
    if model.kind is ModelKind.GAUSSIAN:
        out = _INV_SQRT_2PI * np.exp(-0.5 * z * z) / model.scale
    else:
        out = 0.5 * np.exp(-np.abs(z)) / model.scale
    return out if out.ndim else float(out)


def cdf(model: DistributionModel, x):
    """P(X <= x).  Accepts scalars or arrays; stable in both tails."""
    z = (np.asarray(x, dtype=float) - model.location) / model.scale
    if model.kind is ModelKind.GAUSSIAN:
        out = 0.5 * special.erfc(-z / _SQRT2)
    else:
        out = np.where(z < 0.0, 0.5 * np.exp(-np.abs(z)),
                       1.0 - 0.5 * np.exp(-np.abs(z)))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Standardized interval moments (closed forms)
#
# For a standard model and an interval (a, b), possibly with infinite
# endpoints, these return the unconditional moments
#   mass = int_a^b f,   m1 = int_a^b x f,   m2 = int_a^b x^2 f.
# The Gaussian mass and the Laplace moments are evaluated piecewise by
# sign so that mirrored intervals give exactly mirrored values and far
# tails do not cancel catastrophically.
# ---------------------------------------------------------------------------

def _gauss_phi(x):
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    out[finite] = _INV_SQRT_2PI * np.exp(-0.5 * x[finite] ** 2)
    return out


def _gauss_x_phi(x):
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    out[finite] = x[finite] * _INV_SQRT_2PI * np.exp(-0.5 * x[finite] ** 2)
    return out


def _gauss_moments(a, b):
    mass = np.empty_like(a)
    pos = a >= 0.0
    neg = ~pos & (b <= 0.0)
    mid = ~pos & ~neg
    mass[pos] = 0.5 * (special.erfc(a[pos] / _SQRT2) - special.erfc(b[pos] / _SQRT2))
    mass[neg] = 0.5 * (special.erfc(-b[neg] / _SQRT2) - special.erfc(-a[neg] / _SQRT2))
    mass[mid] = 0.5 * (special.erf(b[mid] / _SQRT2) + special.erf(-a[mid] / _SQRT2))
    phi_a, phi_b = _gauss_phi(a), _gauss_phi(b)
    m1 = phi_a - phi_b
    m2 = mass + _gauss_x_phi(a) - _gauss_x_phi(b)
    return mass, m1, m2


def _lap_tail(x, poly):
    """0.5 * poly(x) * exp(-x) for x >= 0, with the limit 0 at +inf."""
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    xf = x[finite]
    out[finite] = 0.5 * poly(xf) * np.exp(-xf)
    return out


_LAP_P0 = lambda x: np.ones_like(x)          # noqa: E731
_LAP_P1 = lambda x: x + 1.0                  # noqa: E731
_LAP_P2 = lambda x: x * (x + 2.0) + 2.0      # noqa: E731


def _lap_moments_pos(a, b):
    """Moments over 0 <= a < b for the standard Laplace."""
    mass = _lap_tail(a, _LAP_P0) - _lap_tail(b, _LAP_P0)
    m1 = _lap_tail(a, _LAP_P1) - _lap_tail(b, _LAP_P1)
    m2 = _lap_tail(a, _LAP_P2) - _lap_tail(b, _LAP_P2)
    return mass, m1, m2


def _lap_moments(a, b):
    mass = np.empty_like(a)
    m1 = np.empty_like(a)
    m2 = np.empty_like(a)
    pos = a >= 0.0
    neg = ~pos & (b <= 0.0)
    mid = ~pos & ~neg
    mass[pos], m1[pos], m2[pos] = _lap_moments_pos(a[pos], b[pos])
    # mirrored interval (-b, -a): mass and m2 carry over, m1 flips sign
    ms, m1s, m2s = _lap_moments_pos(-b[neg], -a[neg])
    mass[neg], m1[neg], m2[neg] = ms, -m1s, m2s
    # straddling zero: split into (a, 0) and (0, b)
    zeros = np.zeros_like(a[mid])
    ml, m1l, m2l = _lap_moments_pos(zeros, -a[mid])
    mr, m1r, m2r = _lap_moments_pos(zeros, b[mid])
    mass[mid] = ml + mr
    m1[mid] = m1r - m1l
    m2[mid] = m2l + m2r
    return mass, m1, m2


def std_interval_moments(kind: ModelKind, a, b):
    """(mass, m1, m2) over intervals (a, b) of the standard model of `kind`.

    Array-valued; endpoints may be infinite.  Used by the quantizer's
    pure-numpy backend as well as the scalar operations below.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if kind is ModelKind.GAUSSIAN:
        return _gauss_moments(a, b)
    return _lap_moments(a, b)


def _standardize_bound(x: float, model: DistributionModel) -> float:
    if math.isinf(x):
        return x
    return (x - model.location) / model.scale


def truncated_mean(model: DistributionModel, a: float, b: float) -> float:
    """E[X | a < X < b] for the model; either endpoint may be infinite.

    Raises ZeroMassInterval when P(a < X < b) falls below the mass floor.
    """
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    za = _standardize_bound(a, model)
    zb = _standardize_bound(b, model)
    mass, m1, _ = std_interval_moments(model.kind, [za], [zb])
    if mass[0] < MASS_FLOOR:
        raise ZeroMassInterval(f"interval ({a}, {b}) has mass < {MASS_FLOOR}")
    return model.location + model.scale * float(m1[0] / mass[0])


def truncated_second_moment(model: DistributionModel, a: float, b: float,
                            y: float) -> float:
    """Unconditional squared-error mass: int_a^b (x - y)^2 f(x) dx."""
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    za = _standardize_bound(a, model)
    zb = _standardize_bound(b, model)
    zy = (y - model.location) / model.scale
    mass, m1, m2 = std_interval_moments(model.kind, [za], [zb])
    value = m2[0] - 2.0 * zy * m1[0] + zy * zy * mass[0]
    return model.scale**2 * max(float(value), 0.0)


# ---------------------------------------------------------------------------
# Fitting and model selection
# ---------------------------------------------------------------------------

def _check_samples(samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2:
        raise DegenerateData(f"need at least 2 samples, got {samples.size}")
    if np.all(samples == samples[0]):
        raise DegenerateData("all samples identical")
    return samples


def fit_gaussian_mle(samples) -> tuple[float, float]:
    """Maximum-likelihood Gaussian fit: (mean, population std)."""
    samples = _check_samples(samples)
    mu = float(np.mean(samples))
    sigma = float(np.sqrt(np.mean((samples - mu) ** 2)))
    return mu, sigma


def fit_laplace_mle(samples) -> tuple[float, float]:
    """Maximum-likelihood Laplace fit: (median, mean absolute deviation)."""
    samples = _check_samples(samples)
    mu = float(np.median(samples))
    b = float(np.mean(np.abs(samples - mu)))
    return mu, b


def ks_statistic(samples, model: DistributionModel) -> float:
    """Two-sided one-sample Kolmogorov-Smirnov statistic.

    sup over the sorted sample of the distance between the empirical CDF
    (evaluated from both sides of each jump) and the model CDF.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    if n < 1:
        raise ValueError("need at least one sample")
    f = cdf(model, np.sort(samples))
    steps = np.arange(n + 1, dtype=float) / n
    d_plus = np.max(steps[1:] - f)
    d_minus = np.max(f - steps[:-1])
    return float(min(max(d_plus, d_minus), 1.0))


@dataclass(frozen=True)
class FitReport:
    """Result of fitting both families to one sample.

    `selected` is the family with the smaller K-S statistic; an exact tie
    selects Gaussian.
    """

    gaussian_params: tuple[float, float]
    laplace_params: tuple[float, float]
    ks_gaussian: float
    ks_laplace: float
    selected: ModelKind

    @property
    def selected_params(self) -> tuple[float, float]:
        if self.selected is ModelKind.GAUSSIAN:
            return self.gaussian_params
        return self.laplace_params

    def selected_model(self) -> DistributionModel:
        return DistributionModel(self.selected, *self.selected_params)


def _select(ks_gaussian: float, ks_laplace: float) -> ModelKind:
    # tie goes to Gaussian
    return ModelKind.LAPLACE if ks_laplace < ks_gaussian else ModelKind.GAUSSIAN


def select_distribution(samples) -> FitReport:
    """Fit both families by MLE and pick the better one by K-S distance."""
    samples = _check_samples(samples)
    g_mu, g_sigma = fit_gaussian_mle(samples)
    l_mu, l_b = fit_laplace_mle(samples)
    ks_g = ks_statistic(samples, DistributionModel(ModelKind.GAUSSIAN, g_mu, g_sigma))
    ks_l = ks_statistic(samples, DistributionModel(ModelKind.LAPLACE, l_mu, l_b))
    return FitReport(
        gaussian_params=(g_mu, g_sigma),
        laplace_params=(l_mu, l_b),
        ks_gaussian=ks_g,
        ks_laplace=ks_l,
        selected=_select(ks_g, ks_l),
    )
