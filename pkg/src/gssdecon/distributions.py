"""Symmetric base family and measurement-error laws.

Closed-form densities, characteristic functions and even moments used
throughout: the standard normal base and the Normal / Laplace error models,
both parameterized by their variance.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import UnsupportedOrderError

# highest even-moment index 2k tabulated; GMM with M moments needs 2M <= M_MAX
M_MAX = 12


def _double_factorial_odd(k: int) -> float:
    """(2k-1)!! via iterative product."""
    out = 1.0
    for j in range(1, k + 1):
        out *= 2 * j - 1
    return out


def norm_pdf(z):
    """Standard normal density."""
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def norm_cdf(z):
    """Standard normal distribution function."""
    return ndtr(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class SymmetricBase:
    """Known symmetric component: density, cf and even moments.

    Only the standard normal family is provided; the enumeration exists so
    other symmetric bases can be added without touching call sites.
    """

    family: str = "standard_normal"
    m_max: int = M_MAX

    def __post_init__(self):
        if self.family != "standard_normal":
            raise ValueError(f"unsupported symmetric base family: {self.family!r}")

    def pdf(self, z):
        return norm_pdf(z)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * t * t)

    def even_moment(self, k: int) -> float:
        """E[Z0^(2k)] = (2k-1)!! for the standard normal."""
        if k < 0 or k > self.m_max:
            raise UnsupportedOrderError(f"even moment order 2k={2 * k} not tabulated (k<={self.m_max})")
        return _double_factorial_odd(k)


@dataclass(frozen=True)
class ErrorModel:
    """Measurement-error law with known variance.

    family: 'normal' or 'laplace'. The Laplace model is parameterized by its
    variance, so noise-to-signal configurations read off directly; the scale
    conversion b^2 = var/2 is internal.
    """

    family: str
    variance: float
    m_max: int = field(default=M_MAX)

    def __post_init__(self):
        if self.family not in ("normal", "laplace"):
            raise ValueError(f"unsupported error family: {self.family!r}")
        if self.variance < 0:
            raise ValueError("error variance must be nonnegative")

    def cf(self, t):
        """Characteristic function psi_U(t); real, even, positive for both families."""
        t = np.asarray(t, dtype=float)
        if self.family == "normal":
            return np.exp(-0.5 * self.variance * t * t)
        return 1.0 / (1.0 + 0.5 * self.variance * t * t)

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        if self.variance == 0.0:
            raise ValueError("degenerate error law has no density")
        if self.family == "normal":
            sd = math.sqrt(self.variance)
            return norm_pdf(u / sd) / sd
        b = math.sqrt(self.variance / 2.0)
        return np.exp(-np.abs(u) / b) / (2.0 * b)

    def even_moment(self, k: int) -> float:
        """E[U^(2k)]: normal sigma^(2k)(2k-1)!!, Laplace (2k)! (var/2)^k."""
        if k < 0 or k > self.m_max:
            raise UnsupportedOrderError(f"even moment order 2k={2 * k} not tabulated (k<={self.m_max})")
        if k == 0:
            return 1.0
        if self.family == "normal":
            return self.variance**k * _double_factorial_odd(k)
        return math.factorial(2 * k) * (self.variance / 2.0) ** k

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.variance == 0.0:
            return np.zeros(n)
        if self.family == "normal":
            return rng.normal(0.0, math.sqrt(self.variance), size=n)
        return rng.laplace(0.0, math.sqrt(self.variance / 2.0), size=n)


def cf_base(t, base: SymmetricBase | None = None):
    """c0(t) of the symmetric base; exp(-t^2/2) for the standard normal."""
    return (base or SymmetricBase()).cf(t)


def cf_error(t, model: ErrorModel):
    """psi_U(t) of the error model."""
    return model.cf(t)


def even_moment_error(k: int, model: ErrorModel) -> float:
    """E[U^(2k)] of the error model."""
    return model.even_moment(k)
