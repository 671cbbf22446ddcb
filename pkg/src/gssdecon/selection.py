"""Choosing among multiple GMM solutions, and the end-to-end pipeline.

Two practical criteria: matching the error-corrected sample skewness against
each candidate's model-implied skewness, and the distance between the
empirical phase function (invariant to symmetric measurement error) and each
candidate's model-implied phase. An oracle minimum-ISE criterion and blind
random selection exist for benchmarking.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bandwidth import BandwidthSearch, DEFAULT_SEARCH, select_bandwidth
from .distributions import ErrorModel
from .errors import SignalVarianceError
from .estimator import DeconvFit, SelectionRecord, gss_fit, ise
from .gmm import GmmSolution, MomentSpec, gmm_solve
from .gss import GssModel, implied_cf, implied_moments
from .spectral import PHASE_FLOOR, ecf

PHASE_QUAD_POINTS = 201
T_STAR_CAP = 3.0


def empirical_skewness_x(w, error_variance: float) -> float:
    """Error-corrected skewness estimate of the latent X from contaminated w.

    Skew(W) = (sigma_X / sigma_W)^3 Skew(X) under W = X + U with symmetric U,
    so the correction multiplies the sample skewness by S_W^3 over the
    implied signal standard deviation cubed.
    """
    w = np.asarray(w, dtype=float)
    s2 = float(w.var(ddof=1))
    if s2 <= error_variance:
        raise SignalVarianceError("sample variance does not exceed the error variance")
    centered = w - w.mean()
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    skew_w = m3 / m2**1.5
    return s2**1.5 / (s2 - error_variance) ** 1.5 * skew_w


def implied_skewness(fit) -> float:
    """Standardized skewness of the fitted density via its implied moments."""
    m1 = implied_moments(fit, 1)
    m2 = implied_moments(fit, 2)
    m3 = implied_moments(fit, 3)
    var = m2 - m1 * m1
    if var <= 0:
        raise SignalVarianceError("fitted density has nonpositive implied variance")
    return (m3 - 3.0 * m2 * m1 + 2.0 * m1**3) / var**1.5


def skewness_select(candidates: Sequence[DeconvFit], w, error_variance: float) -> SelectionRecord:
    """Pick the candidate whose implied skewness is nearest the empirical one."""
    if not candidates:
        raise ValueError("need at least one candidate")
    target = empirical_skewness_x(w, error_variance)
    scores = tuple(abs(target - implied_skewness(fit)) for fit in candidates)
    return SelectionRecord(criterion="skewness", scores=scores, chosen=int(np.argmin(scores)))


def default_t_star(w, cap: float = T_STAR_CAP) -> float:
    """Largest frequency below which the empirical cf modulus stays above
    n^(-1/4), capped; the empirical phase is unreliable past that point."""
    w = np.asarray(w, dtype=float)
    t = np.linspace(0.0, cap, 601)[1:]
    mod = np.abs(ecf(t, w))
    thresh = w.size ** (-0.25)
    below = np.nonzero(mod < thresh)[0]
    if below.size == 0:
        return cap
    if below[0] == 0:
        return float(t[0])
    return float(t[below[0] - 1])


def phase_distance(fit, w, t_star: float, n_points: int = PHASE_QUAD_POINTS) -> float:
    """Weighted L1 distance between empirical and model-implied phases.

    Integrates |rho_hat(t) - rho_model(t)| (1 - (t/t*)^2)^3 over [-t*, t*]
    on a uniform grid. If the empirical cf modulus degenerates inside the
    window, the window shrinks with a warning.
    """
    w = np.asarray(w, dtype=float)
    if t_star <= 0:
        raise ValueError("t_star must be positive")
    t = np.linspace(-t_star, t_star, n_points)
    emp = np.atleast_1d(ecf(t, w))
    mod = np.abs(emp)
    if np.any(mod <= PHASE_FLOOR):
        ok = np.abs(t[mod > PHASE_FLOOR])
        t_star = float(0.95 * ok.min()) if ok.size else t_star
        warnings.warn(f"empirical cf degenerate inside the window; shrinking t* to {t_star:.4g}", RuntimeWarning)
        t = np.linspace(-t_star, t_star, n_points)
        emp = np.atleast_1d(ecf(t, w))
        mod = np.abs(emp)
    rho_emp = emp / mod
    model_cf = np.atleast_1d(implied_cf(fit, t))
    rho_mod = model_cf / np.abs(model_cf)
    weight = (1.0 - (t / t_star) ** 2) ** 3
    return float(np.trapezoid(np.abs(rho_emp - rho_mod) * weight, t))


def phase_select(candidates: Sequence[DeconvFit], w, t_star: Optional[float] = None) -> SelectionRecord:
    """Pick the candidate with the smallest phase-function distance."""
    if not candidates:
        raise ValueError("need at least one candidate")
    ts = default_t_star(w) if t_star is None else float(t_star)
    scores = tuple(phase_distance(fit, w, ts) for fit in candidates)
    return SelectionRecord(criterion="phase", scores=scores, chosen=int(np.argmin(scores)), t_star=ts)


def min_ise_select(candidates: Sequence[DeconvFit], truth: GssModel) -> SelectionRecord:
    """Oracle: pick the candidate with the smallest true ISE."""
    if not candidates:
        raise ValueError("need at least one candidate")
    scores = tuple(ise(fit, truth) for fit in candidates)
    return SelectionRecord(criterion="min_ise", scores=scores, chosen=int(np.argmin(scores)))


def random_select(candidates: Sequence[DeconvFit], rng: np.random.Generator) -> SelectionRecord:
    """Blind baseline: pick uniformly at random. Scores are 0/1 indicators
    so the chosen index still minimizes the recorded scores."""
    if not candidates:
        raise ValueError("need at least one candidate")
    j = int(rng.integers(len(candidates)))
    scores = tuple(0.0 if i == j else 1.0 for i in range(len(candidates)))
    return SelectionRecord(criterion="random", scores=scores, chosen=j)


@dataclass(frozen=True)
class PipelineResult:
    """Full output of the deconvolution pipeline."""

    fit: DeconvFit
    solutions: tuple[GmmSolution, ...]
    candidates: tuple[DeconvFit, ...]
    bandwidths: tuple[float, ...]
    record: SelectionRecord


def run_pipeline(
    w,
    model: ErrorModel,
    bandwidth: str = "mise",
    selection: str = "phase",
    M: int = 5,
    kappa: float = 5.0,
    t_star: Optional[float] = None,
    search: BandwidthSearch = DEFAULT_SEARCH,
    zgrid: Optional[np.ndarray] = None,
    n_nodes: int = 1024,
    seed: Optional[int] = None,
    truth: Optional[GssModel] = None,
    return_details: bool = False,
):
    """End-to-end GSS deconvolution: GMM solutions, per-solution bandwidth
    and skewing-function fit, then solution selection.

    Parameters
    ----------
    w : array
        Contaminated sample.
    model : ErrorModel
        Known measurement-error law.
    bandwidth : {'cv', 'mise', 'plugin'}
        Bandwidth selector applied to each solution's standardized data.
    selection : {'skewness', 'phase', 'random', 'minise'}
        Criterion used when the GMM produces several solutions.
    seed : int, optional
        Only used by random selection.
    truth : GssModel, optional
        Required by the minise oracle criterion.

    Returns the selected DeconvFit (with its SelectionRecord attached), or a
    PipelineResult when return_details is set.
    """
    w = np.asarray(w, dtype=float)
    if w.size < 10:
        raise ValueError("need at least 10 observations")
    spec = MomentSpec(M=M, error=model)
    solutions = gmm_solve(w, spec)

    fits = []
    bandwidths = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for sol in solutions:
            wstar = (w - sol.xi) / sol.omega
            h = select_bandwidth(bandwidth, wstar, model, sol.omega, kappa=kappa, search=search, n_nodes=n_nodes)
            fits.append(gss_fit(w, sol.xi, sol.omega, model, h, zgrid=zgrid, n_nodes=n_nodes))
            bandwidths.append(h)

    if len(fits) == 1:
        record = SelectionRecord(criterion="single", scores=(0.0,), chosen=0)
    elif selection == "skewness":
        record = skewness_select(fits, w, model.variance)
    elif selection == "phase":
        record = phase_select(fits, w, t_star=t_star)
    elif selection == "random":
        record = random_select(fits, np.random.default_rng(seed))
    elif selection == "minise":
        if truth is None:
            raise ValueError("minise selection needs the truth")
        record = min_ise_select(fits, truth)
    else:
        raise ValueError(f"unknown selection method: {selection!r}")

    chosen = fits[record.chosen].with_record(record)
    if return_details:
        return PipelineResult(
            fit=chosen,
            solutions=tuple(solutions),
            candidates=tuple(fits),
            bandwidths=tuple(bandwidths),
            record=record,
        )
    return chosen
