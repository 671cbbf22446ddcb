"""Location/scale estimation by generalized method of moments.

Matches sample even moments of the standardized data against their model
expectations, weighted by the inverse of the exact moment covariance. Both
the expectations and the covariance depend on omega (not xi), so the
quadratic form is continuously updated during minimization. The objective
often has several local minima; gmm_solve enumerates them from a grid of
starts and returns the deduplicated list sorted by objective value.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._backend import tk_vector
from .distributions import ErrorModel, SymmetricBase
from .errors import EstimationFailureError

# dedup tolerance on the standardized scale, and conditioning guard
DEDUP_TOL = 1e-3
COND_LIMIT = 1e12
RIDGE = 1e-10


@dataclass(frozen=True)
class MomentSpec:
    """Number of even moments to match plus the moment tables they need."""

    M: int
    error: ErrorModel
    base: SymmetricBase = field(default_factory=SymmetricBase)

    def __post_init__(self):
        if not 2 <= self.M <= 5:
            raise ValueError("M must be between 2 and 5")
        # covariance of (T_1..T_M) needs expectations up to T_{2M}
        self.base.even_moment(2 * self.M)
        self.error.even_moment(2 * self.M)


@dataclass(frozen=True)
class GmmSolution:
    """One local minimum of the moment-matching objective."""

    xi: float
    omega: float
    d_value: float
    converged: bool
    basin: int


def t_stat(k: int, w, xi: float, omega: float) -> float:
    """Sample even moment T_k = n^-1 sum ((w_j - xi)/omega)^(2k)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    w = np.asarray(w, dtype=float)
    return float(tk_vector(w, xi, omega, k)[k - 1])


class _MomentTables:
    """Precomputed coefficients so E[T_k](omega) is a polynomial in omega^-2.

    E[T_k] = sum_j C(2k, 2j) omega^(-2(k-j)) E[Z^(2j)] E[U^(2(k-j))], and the
    even-transform property lets E[Z^(2j)] be read off the symmetric base.
    """

    def __init__(self, spec: MomentSpec):
        self.M = spec.M
        kmax = 2 * spec.M
        mz = np.array([spec.base.even_moment(j) for j in range(kmax + 1)])
        mu = np.array([spec.error.even_moment(j) for j in range(kmax + 1)])
        # P[k-1, m] multiplies (omega^-2)^m in E[T_k], m = k - j
        self.P = np.zeros((kmax, kmax + 1))
        for k in range(1, kmax + 1):
            for m in range(k + 1):
                self.P[k - 1, m] = math.comb(2 * k, 2 * m) * mz[k - m] * mu[m]
        idx = np.arange(1, spec.M + 1)
        self.sum_idx = idx[:, None] + idx[None, :] - 1  # rows of P for E[T_{i+j}]

    def expectations(self, omega: float) -> np.ndarray:
        """E[T_k] for k = 1..2M at the given omega."""
        u = omega**-2.0
        return self.P @ (u ** np.arange(self.P.shape[1]))

    def sigma(self, e_all: np.ndarray, n: int) -> np.ndarray:
        """Covariance of (T_1..T_M) from the expectation table."""
        e = e_all[: self.M]
        return (e_all[self.sum_idx] - np.outer(e, e)) / n


def t_mean(k: int, spec: MomentSpec, omega: float) -> float:
    """Exact expectation of T_k under the model at scale omega."""
    if not 1 <= k <= 2 * spec.M:
        raise ValueError(f"k must be in 1..{2 * spec.M}")
    return float(_MomentTables(spec).expectations(omega)[k - 1])


def sigma_matrix(spec: MomentSpec, omega: float, n: int) -> np.ndarray:
    """M x M covariance matrix of the sample even moments."""
    tables = _MomentTables(spec)
    return tables.sigma(tables.expectations(omega), n)


def _quad_form(resid: np.ndarray, sigma: np.ndarray) -> float:
    """r' Sigma^-1 r, computed on the correlation scale for stability.

    Sigma is the covariance of the averaged moments (it carries the 1/n),
    so the quadratic form is already chi-square calibrated at the truth;
    no extra sample-size factor is applied.
    """
    sd = np.sqrt(np.diag(sigma))
    corr = sigma / np.outer(sd, sd)
    if np.linalg.cond(corr) > COND_LIMIT:
        corr = corr + RIDGE * (np.trace(corr) / corr.shape[0]) * np.eye(corr.shape[0])
    r = resid / sd
    try:
        x = np.linalg.solve(corr, r)
    except np.linalg.LinAlgError:
        corr = corr + RIDGE * np.eye(corr.shape[0])
        x = np.linalg.solve(corr, r)
    return float(r @ x)


def d_objective(xi: float, omega: float, w, spec: MomentSpec) -> float:
    """Moment-matching objective D(xi, omega) = T' Sigma^-1 T, chi-square
    calibrated at the truth (Sigma is the covariance of the averaged
    moments and already carries the 1/n)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    w = np.asarray(w, dtype=float)
    tables = _MomentTables(spec)
    return _d_eval(xi, omega, w, tables, spec.M)


def _d_eval(xi: float, omega: float, w: np.ndarray, tables: _MomentTables, M: int) -> float:
    T = tk_vector(w, xi, omega, M)
    e_all = tables.expectations(omega)
    sigma = tables.sigma(e_all, w.size)
    return _quad_form(T - e_all[:M], sigma)


def default_starts(w, error_variance: float) -> list[tuple[float, float]]:
    """Start grid: xi over the 10%..90% deciles, omega over multiples of the
    implied signal standard deviation (clipped positive)."""
    w = np.asarray(w, dtype=float)
    xis = np.quantile(w, np.linspace(0.1, 0.9, 9))
    s2 = w.var(ddof=1)
    sig = math.sqrt(max(s2 - error_variance, 0.04 * s2))
    omegas = [0.25 * sig, 0.5 * sig, sig, 2.0 * sig]
    return [(float(x), float(o)) for x in xis for o in omegas]


def gmm_solve(
    w,
    spec: MomentSpec,
    starts=None,
    max_iter: int = 500,
    tol: float = 1e-8,
) -> list[GmmSolution]:
    """Enumerate local minima of the moment objective from many starts.

    Runs Nelder-Mead on (xi, log omega) from each start, on median/SD
    standardized data so location and scale equivariance hold by
    construction. Converged solutions agreeing within 1e-3 (standardized
    scale) in both coordinates are merged, keeping the lowest objective
    value; the result is sorted by objective value.

    Raises EstimationFailureError when no start converges.
    """
    w = np.asarray(w, dtype=float)
    med = float(np.median(w))
    s = float(w.std(ddof=1))
    if s <= 0:
        raise EstimationFailureError("zero-variance sample")
    ws = (w - med) / s
    spec_std = MomentSpec(M=spec.M, error=ErrorModel(spec.error.family, spec.error.variance / (s * s)), base=spec.base)
    tables = _MomentTables(spec_std)

    if starts is None:
        start_list = default_starts(ws, spec_std.error.variance)
    else:
        start_list = [((x - med) / s, o / s) for x, o in starts]
        if not start_list:
            raise ValueError("starts must be nonempty")
        if any(o <= 0 for _, o in start_list):
            raise ValueError("every start needs omega > 0")

    def fun(p):
        lam = p[1]
        if abs(lam) > 12.0:
            return 1e12 + lam * lam  # keep the simplex in a sane range
        return _d_eval(p[0], math.exp(lam), ws, tables, spec.M)

    found = []
    for x0, o0 in start_list:
        p0 = np.array([x0, math.log(o0)])
        simplex = np.array([p0, p0 + [0.2, 0.0], p0 + [0.0, 0.2]])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(
                fun,
                p0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": 1e-7,
                    "fatol": tol,
                    "maxiter": max_iter,
                    "maxfev": 2 * max_iter,
                },
            )
        if res.success:
            found.append((float(res.x[0]), math.exp(float(res.x[1])), float(res.fun)))
    if not found:
        raise EstimationFailureError("no optimizer start converged")

    found.sort(key=lambda r: r[2])
    kept: list[tuple[float, float, float]] = []
    for xi_s, om_s, d in found:
        if any(abs(xi_s - kx) <= DEDUP_TOL and abs(om_s - ko) <= DEDUP_TOL for kx, ko, _ in kept):
            continue
        kept.append((xi_s, om_s, d))
    return [
        GmmSolution(xi=med + s * xi_s, omega=s * om_s, d_value=d, converged=True, basin=i)
        for i, (xi_s, om_s, d) in enumerate(kept)
    ]
