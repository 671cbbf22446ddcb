"""Frequency-domain estimation: quadrature grids, the smoothing kernel, and
the empirical / smoothed imaginary-cf estimators.

Everything here works on the rescaled data W* = (W - xi)/omega, whose cf is
psi_Z(t) psi_U(t/omega); dividing the empirical sine sum by psi_U(t/omega)
removes the error contribution.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import cos_sin_sums, sin_sums
from .distributions import ErrorModel
from .errors import DegenerateWeightError, InsufficientDataError, PhaseUndefinedError, QuadratureError

# below this, dividing by psi_U is numerically meaningless
PSI_U_FLOOR = 1e-300

# empirical-cf modulus below which the phase is undefined
PHASE_FLOOR = 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    """Symmetric quadrature rule on [-t_max, t_max]."""

    nodes: np.ndarray
    weights: np.ndarray
    t_max: float

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if not np.allclose(self.nodes, -self.nodes[::-1]):
            raise ValueError("grid nodes must be symmetric around 0")


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre_grid(t_max: float, n_nodes: int = 1024, n_panels: int = 8) -> FrequencyGrid:
    """Composite Gauss-Legendre rule on [-t_max, t_max].

    n_panels must divide n_nodes and be even so the node set is exactly
    symmetric around 0.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if n_panels % 2 or n_nodes % n_panels:
        raise ValueError("need an even panel count dividing n_nodes")
    per = n_nodes // n_panels
    x, w = _leggauss(per)
    edges = np.linspace(-t_max, t_max, n_panels + 1)
    half = (edges[1] - edges[0]) / 2.0
    centers = (edges[:-1] + edges[1:]) / 2.0
    nodes = (centers[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * w, (n_panels, per)).ravel().copy()
    return FrequencyGrid(nodes=nodes, weights=weights, t_max=t_max)


def quad_integrate(f, grid: FrequencyGrid) -> float:
    """Integrate f over the grid; f may be a callable or node values."""
    vals = f(grid.nodes) if callable(f) else np.asarray(f, dtype=float)
    if vals.shape != grid.nodes.shape:
        raise ValueError("integrand values do not match the grid")
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite integrand value on quadrature grid")
    return float(vals @ grid.weights)


@dataclass(frozen=True)
class SmoothingKernelCF:
    """Fourier-domain smoothing weight with compact support [-1, 1].

    psi_K(t) = (1 - t^2)^power; power 0 is the sharp-cutoff (sinc) kernel,
    power 3 the smooth taper matching the phase weight used in selection.
    curvature is -psi_K''(0), the second moment of the corresponding kernel;
    it feeds the bias-slope diagnostic and the plug-in pilot, which both
    need a strictly positive value (power >= 1).
    """

    power: int = 0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")

    @property
    def curvature(self) -> float:
        return 2.0 * self.power

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.power == 0:
            return (np.abs(t) <= 1.0).astype(float)
        inside = np.clip(1.0 - t * t, 0.0, None) ** self.power
        return np.where(np.abs(t) <= 1.0, inside, 0.0)


# sharp-cutoff default for estimation; the tapered kernel drives the
# plug-in bandwidth and the bias diagnostics
DEFAULT_KERNEL = SmoothingKernelCF(power=0)
TAPERED_KERNEL = SmoothingKernelCF(power=3)


@dataclass(frozen=True)
class SpectralEstimate:
    """Tabulated s0-hat and s2-hat on a frequency grid."""

    grid: FrequencyGrid
    s0: np.ndarray
    s2: np.ndarray
    h: float
    omega: float
    kappa: float


def _psi_u_rescaled(t, model: ErrorModel, omega: float):
    psi = model.cf(np.asarray(t, dtype=float) / omega)
    if np.any(psi < PSI_U_FLOOR):
        raise DegenerateWeightError("psi_U(t/omega) underflowed; reduce the frequency range")
    return psi


def s0_empirical(t, wstar, model: ErrorModel, omega: float):
    """Unbiased empirical estimate of s0(t) = Im psi_Z(t).

    (1/psi_U(t/omega)) n^-1 sum_j sin(t W*_j); odd in t, zero at t = 0.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    wstar = np.asarray(wstar, dtype=float)
    if wstar.size == 0:
        raise InsufficientDataError("empty sample")
    psi = _psi_u_rescaled(t, model, omega)
    S, _ = sin_sums(t, wstar)
    out = S / (wstar.size * psi)
    return out if out.size > 1 else float(out[0])


def s0_smoothed(t, wstar, model: ErrorModel, omega: float, h: float, kernel: SmoothingKernelCF = DEFAULT_KERNEL):
    """Smoothed estimator psi_K(ht) * s0_empirical(t); vanishes for |t| > 1/h."""
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    kt = kernel(h * t)
    out = np.zeros_like(t)
    live = kt > 0.0
    if np.any(live):
        out[live] = kt[live] * np.atleast_1d(s0_empirical(t[live], wstar, model, omega))
    return out if out.size > 1 else float(out[0])


def s2_hat(t, wstar, model: ErrorModel, omega: float, kappa: float = 5.0):
    """Clipped U-statistic estimate of s0^2(t), truncated to |t| <= kappa.

    The j != k double sum equals S^2 - Q with S = sum sin(t W*_j) and
    Q = sum sin^2(t W*_j), giving O(n) cost per node.
    """
    wstar = np.asarray(wstar, dtype=float)
    n = wstar.size
    if n < 2:
        raise InsufficientDataError("s2_hat needs at least two observations")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    live = np.abs(t) <= kappa
    if np.any(live):
        tl = t[live]
        psi = _psi_u_rescaled(tl, model, omega)
        S, Q = sin_sums(tl, wstar)
        raw = (S * S - Q) / (n * (n - 1) * psi * psi)
        out[live] = np.clip(raw, 0.0, None)
    return out if out.size > 1 else float(out[0])


def ecf(t, w):
    """Empirical characteristic function of the raw data at t (complex)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = np.asarray(w, dtype=float)
    C, S = cos_sin_sums(t, w)
    return (C + 1j * S) / w.size


def phase_empirical(t, w):
    """Unit-modulus empirical phase function of the raw data.

    Errors out where the empirical cf modulus is below PHASE_FLOOR; callers
    restrict the frequency window accordingly.
    """
    vals = ecf(t, w)
    mod = np.abs(vals)
    if np.any(mod <= PHASE_FLOOR):
        raise PhaseUndefinedError("empirical cf modulus is numerically zero in the window")
    out = vals / mod
    return out if out.size > 1 else complex(out[0])


def estimate_spectrum(
    wstar,
    model: ErrorModel,
    omega: float,
    h: float,
    kappa: float = 5.0,
    n_nodes: int = 1024,
    kernel: SmoothingKernelCF = DEFAULT_KERNEL,
) -> SpectralEstimate:
    """Tabulate s0-hat and s2-hat on the default grid over [-1/h, 1/h]."""
    grid = gauss_legendre_grid(1.0 / h, n_nodes=n_nodes)
    s0 = np.atleast_1d(s0_smoothed(grid.nodes, wstar, model, omega, h, kernel))
    s2 = np.atleast_1d(s2_hat(grid.nodes, wstar, model, omega, kappa))
    return SpectralEstimate(grid=grid, s0=s0, s2=s2, h=h, omega=omega, kappa=kappa)


def sine_transform_weights(grid: FrequencyGrid, values) -> np.ndarray:
    """Quadrature coefficients weights * values, for integral transforms."""
    values = np.asarray(values, dtype=float)
    return grid.weights * values


def gauss_legendre_interval(a: float, b: float, n_nodes: int = 512, n_panels: int = 8):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    if b <= a:
        raise ValueError("need a < b")
    if n_nodes % n_panels:
        raise ValueError("panel count must divide node count")
    per = n_nodes // n_panels
    x, w = _leggauss(per)
    edges = np.linspace(a, b, n_panels + 1)
    half = (edges[1] - edges[0]) / 2.0
    centers = (edges[:-1] + edges[1:]) / 2.0
    nodes = (centers[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * w, (n_panels, per)).ravel().copy()
    return nodes, weights
