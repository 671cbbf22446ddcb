"""Bandwidth selection for the smoothed imaginary-cf estimator.

Three selectors: a cross-validation score, a plug-in approximation to the
exact MISE built on the clipped squared-imaginary estimator, and a two-stage
plug-in baseline ported from nonparametric deconvolution. A shared scalar
minimizer (coarse log grid + golden-section refinement) serves all of them.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._backend import sin_sums
from .distributions import ErrorModel, SymmetricBase
from .errors import DegenerateWeightError, InsufficientDataError
from .gss import GssModel, implied_cf
from .spectral import (
    DEFAULT_KERNEL,
    TAPERED_KERNEL,
    SmoothingKernelCF,
    ecf,
    gauss_legendre_grid,
    gauss_legendre_interval,
    s2_hat,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# psi_U enters these criteria squared; below this the division is meaningless
PSI_U_SQ_FLOOR = 1e-150


@dataclass(frozen=True)
class BandwidthSearch:
    """Search box for the scalar bandwidth minimizer."""

    h_min: float = 0.02
    h_max: float = 3.0
    grid_size: int = 40
    tol: float = 1e-4

    def __post_init__(self):
        if not (0 < self.h_min < self.h_max):
            raise ValueError("need 0 < h_min < h_max")
        if self.grid_size < 20:
            raise ValueError("grid size must be at least 20")

    def grid(self) -> np.ndarray:
        return np.geomspace(self.h_min, self.h_max, self.grid_size)


DEFAULT_SEARCH = BandwidthSearch()


def _psi_sq(model: ErrorModel, t) -> np.ndarray:
    psi = model.cf(t)
    if np.any(psi < PSI_U_SQ_FLOOR):
        raise DegenerateWeightError("psi_U underflow; raise h_min")
    return psi * psi


def cv_score(
    h: float,
    wstar,
    model: ErrorModel,
    omega: float,
    n_nodes: int = 1024,
    kernel: SmoothingKernelCF = DEFAULT_KERNEL,
) -> float:
    """Cross-validation criterion for the smoothed estimator at bandwidth h.

    Integrates psi_K(ht)/psi_U^2(t/omega) [psi_K(ht) (n^-1 S)^2
    - 2 (S^2 - Q) / (n(n-1))] over the kernel support, with
    S = sum_j sin(t W*_j) and Q = sum_j sin^2(t W*_j).
    """
    wstar = np.asarray(wstar, dtype=float)
    n = wstar.size
    if n < 2:
        raise InsufficientDataError("cv_score needs at least two observations")
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    grid = gauss_legendre_grid(1.0 / h, n_nodes=n_nodes)
    psi2 = _psi_sq(model, grid.nodes / omega)
    kt = kernel(h * grid.nodes)
    S, Q = sin_sums(grid.nodes, wstar)
    integrand = kt / psi2 * (kt * (S / n) ** 2 - 2.0 * (S * S - Q) / (n * (n - 1.0)))
    return float(integrand @ grid.weights)


def mise_approx(
    h: float,
    wstar,
    model: ErrorModel,
    omega: float,
    kappa: float = 5.0,
    n_nodes: int = 1024,
    kernel: SmoothingKernelCF = DEFAULT_KERNEL,
) -> float:
    """Estimated MISE criterion at bandwidth h (up to h-free constants).

    The exact MISE with s0^2 replaced by its clipped U-statistic estimate,
    written on the rescaled frequency u = h t so the integral runs over the
    kernel support [-1, 1].
    """
    wstar = np.asarray(wstar, dtype=float)
    n = wstar.size
    if n < 2:
        raise InsufficientDataError("mise_approx needs at least two observations")
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    base = SymmetricBase()
    grid = gauss_legendre_grid(1.0, n_nodes=n_nodes)
    u = grid.nodes
    psi2 = _psi_sq(model, u / (h * omega))
    ku = kernel(u)
    var_term = ku * ku / (n * psi2) * 0.5 * (1.0 - model.cf(2.0 * u / (h * omega)) * base.cf(2.0 * u / h))
    s2 = np.atleast_1d(s2_hat(u / h, wstar, model, omega, kappa))
    bias_term = ((n - 1.0) / n * ku - 2.0) * ku * s2
    return float((var_term + bias_term) @ grid.weights) / h


def _s0_exact_on(truth: GssModel, t: np.ndarray) -> np.ndarray:
    """Imaginary cf component of the standardized truth, by quadrature."""
    std = GssModel(skew=truth.skew, xi=0.0, omega=1.0, base=truth.base)
    return np.atleast_1d(implied_cf(std, t)).imag


def mise_exact(
    h: float,
    truth: GssModel,
    model: ErrorModel,
    n: int,
    n_nodes: int = 2048,
    t_tail: float = 60.0,
    kernel: SmoothingKernelCF = DEFAULT_KERNEL,
) -> float:
    """Exact MISE of the smoothed estimator at h, for a known truth.

    Diagnostic/oracle use only. The variance part lives on the kernel
    support; the squared-bias part extends over the decay range of s0,
    which is slow for near-boundary skewing functions, hence the wide
    default tail.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    base = truth.base
    omega = truth.omega
    # integrate the kernel band and the tail separately so the compact
    # support edge at |t| = 1/h never falls inside a quadrature panel
    band = gauss_legendre_grid(1.0 / h, n_nodes=n_nodes)
    t = band.nodes
    s0 = _s0_exact_on(truth, t)
    kt = kernel(h * t)
    psi2 = _psi_sq(model, t / omega)
    inner = (1.0 - base.cf(2.0 * t) * model.cf(2.0 * t / omega)) / (2.0 * psi2) - s0 * s0
    band_val = float(((kt * kt / n) * inner + (kt - 1.0) ** 2 * s0 * s0) @ band.weights)
    tail_val = 0.0
    if t_tail > 1.0 / h:
        nodes, weights = gauss_legendre_interval(1.0 / h, t_tail, n_nodes=n_nodes, n_panels=16)
        s0_tail = _s0_exact_on(truth, nodes)
        tail_val = 2.0 * float((s0_tail * s0_tail) @ weights)
    return (band_val + tail_val) / (2.0 * math.pi)


def mise_symmetric_bound(
    h: float, model: ErrorModel, omega: float, n: int, n_nodes: int = 2048,
    kernel: SmoothingKernelCF = DEFAULT_KERNEL,
) -> float:
    """Upper bound (2 pi n)^-1 Integral psi_K^2(ht)/psi_U^2(t/omega) dt."""
    grid = gauss_legendre_grid(1.0 / h, n_nodes=n_nodes)
    kt = kernel(h * grid.nodes)
    psi2 = _psi_sq(model, grid.nodes / omega)
    vals = kt * kt / psi2
    return float(vals @ grid.weights) / (2.0 * math.pi * n)


def minimize_bandwidth(objective, search: BandwidthSearch = DEFAULT_SEARCH) -> float:
    """Coarse grid scan plus golden-section refinement of a scalar objective.

    Degenerate or non-finite objective values are treated as +inf during the
    search. Boundary minima and flat objectives return with a warning.
    """

    def guarded(h: float) -> float:
        try:
            v = objective(h)
        except DegenerateWeightError:
            return np.inf
        return v if np.isfinite(v) else np.inf

    hs = search.grid()
    vals = np.array([guarded(float(h)) for h in hs])
    if not np.any(np.isfinite(vals)):
        raise DegenerateWeightError("objective not finite anywhere on the bandwidth grid")
    if np.nanmax(vals) == np.nanmin(vals):
        warnings.warn("flat bandwidth objective; returning grid midpoint", RuntimeWarning)
        return float(hs[hs.size // 2])
    best = int(np.argmin(vals))
    if best == 0 or best == hs.size - 1:
        warnings.warn("bandwidth objective minimized at the search boundary", RuntimeWarning)
        return float(hs[best])
    a, b = float(hs[best - 1]), float(hs[best + 1])
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = guarded(c), guarded(d)
    while b - a > search.tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = guarded(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = guarded(d)
    return float((a + b) / 2.0)


# the plug-in pilot needs a kernel with nonzero second moment, so it runs
# on the tapered kernel regardless of the estimation kernel
_MU2 = TAPERED_KERNEL.curvature

# normal-reference curvature functionals: R(phi''') and R(phi'')
_R_PHI3 = 15.0 / (16.0 * math.sqrt(math.pi))
_R_PHI2 = 3.0 / (8.0 * math.sqrt(math.pi))


def _variance_functional(rho: float, order: int, err: ErrorModel, n: int, u, du, ku2) -> float:
    """(2 pi n)^-1 Integral t^(2 order) psi_K^2(rho t)/psi_U^2(t) dt."""
    t = u / rho
    psi2 = _psi_sq(err, t)
    vals = t ** (2 * order) * ku2 / psi2
    return float(vals @ du) / (2.0 * math.pi * n * rho)


def plugin_bandwidth(
    w,
    model: ErrorModel,
    search: BandwidthSearch = DEFAULT_SEARCH,
    n_nodes: int = 512,
    kernel: SmoothingKernelCF = TAPERED_KERNEL,
) -> float:
    """Two-stage plug-in bandwidth for deconvolution estimation.

    Stage one balances the smoothing bias of the squared-curvature
    functional against its deconvolution variance term, starting from a
    normal-reference value of the squared-third-derivative functional;
    stage two minimizes the asymptotic MISE with the estimated curvature
    plugged in. Deterministic given the data; computations run on
    scale-standardized data so the returned bandwidth is exactly scale
    equivariant.
    """
    w = np.asarray(w, dtype=float)
    n = w.size
    if n < 10:
        raise InsufficientDataError("plug-in bandwidth needs at least 10 observations")
    s = float(w.std(ddof=1))
    if s <= 0:
        raise InsufficientDataError("zero-variance sample")
    ws = w / s
    err = ErrorModel(model.family, model.variance / (s * s))
    sig_x2 = max(1.0 - err.variance, 0.05)
    theta3 = _R_PHI3 * sig_x2 ** (-3.5)

    grid = gauss_legendre_grid(1.0, n_nodes=n_nodes)
    u, du = grid.nodes, grid.weights
    ku2 = kernel(u) ** 2

    def stage1(rho: float) -> float:
        v = _variance_functional(rho, 2, err, n, u, du, ku2)
        return abs(v - _MU2 * rho * rho * theta3)

    theta2 = None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rho2 = minimize_bandwidth(stage1, search)
        t = u / rho2
        psi2 = _psi_sq(err, t)
        mod2 = np.abs(ecf(t, ws)) ** 2
        theta2 = float((t**4 * ku2 * mod2 / psi2) @ du) / (2.0 * math.pi * rho2)
        if not np.isfinite(theta2) or theta2 <= 0:
            theta2 = None
    except DegenerateWeightError:
        theta2 = None
    if theta2 is None:
        warnings.warn("plug-in pilot stage failed; using normal-reference curvature", RuntimeWarning)
        theta2 = _R_PHI2 * sig_x2 ** (-2.5)

    def amise(h: float) -> float:
        v = _variance_functional(h, 0, err, n, u, du, ku2)
        return v + 0.25 * h**4 * _MU2**2 * theta2

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        h_std = minimize_bandwidth(amise, search)
    return s * h_std


def select_bandwidth(
    method: str,
    wstar,
    model: ErrorModel,
    omega: float,
    kappa: float = 5.0,
    search: BandwidthSearch = DEFAULT_SEARCH,
    n_nodes: int = 1024,
) -> float:
    """Dispatch to one of the selectors; cv and mise minimize their scores
    over the search box, plugin runs its own two stages."""
    wstar = np.asarray(wstar, dtype=float)
    if method == "cv":
        objective = lambda h: cv_score(h, wstar, model, omega, n_nodes=n_nodes)
    elif method == "mise":
        objective = lambda h: mise_approx(h, wstar, model, omega, kappa=kappa, n_nodes=n_nodes)
    elif method == "plugin":
        scaled = ErrorModel(model.family, model.variance / (omega * omega))
        return plugin_bandwidth(wstar, scaled, search=search)
    else:
        raise ValueError(f"unknown bandwidth method: {method!r}")
    # boundary/flat warnings propagate so callers can flag those cases
    return minimize_bandwidth(objective, search)
