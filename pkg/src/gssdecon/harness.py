"""Simulation engine: data generation over study configurations, RMSE and
ISE summaries, oracle-bandwidth searches, and table emission.

Replicate seeds are spawned from the master seed with SeedSequence, so runs
are reproducible bit for bit and independent of worker count or replicate
ordering. Failed replicates are dropped and counted.
"""

import csv
import json
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache
from multiprocessing import Pool
from typing import Optional, Sequence

import numpy as np

from .bandwidth import BandwidthSearch, DEFAULT_SEARCH, minimize_bandwidth, plugin_bandwidth, select_bandwidth
from .distributions import ErrorModel
from .errors import EstimationFailureError, GssDeconError
from .estimator import gss_fit, ise, np_fit
from .gmm import MomentSpec, gmm_solve
from .gss import GssModel, SKEW_BY_NAME, gss_sample, model_variance
from .selection import phase_select, random_select, skewness_select

DEFAULT_SEED = 20170
DEFAULT_REPLICATES = 200

SELECTION_KEYS = ("min", "skw", "phs", "rnd")


@dataclass(frozen=True)
class SimConfig:
    """One simulation cell: skewing function, error law, NSR and sample size."""

    skew: str
    error_family: str
    nsr: float
    n: int
    replicates: int = DEFAULT_REPLICATES
    seed: int = DEFAULT_SEED
    M: int = 5
    bandwidth: str = "mise"
    kappa: float = 5.0

    def __post_init__(self):
        if self.skew not in SKEW_BY_NAME:
            raise ValueError(f"unknown skewing function: {self.skew!r}")
        if self.error_family not in ("normal", "laplace"):
            raise ValueError(f"unknown error family: {self.error_family!r}")
        if self.nsr <= 0:
            raise ValueError("NSR must be positive")

    def label(self) -> str:
        fam = "N" if self.error_family == "normal" else "L"
        return f"{self.skew},n={self.n},({self.nsr},{fam})"


@dataclass
class SimResult:
    """Per-replicate records plus their summary for one table."""

    table: str
    config: dict
    records: list
    summary: dict
    failures: int

    def to_json(self, path):
        payload = {
            "table": self.table,
            "config": self.config,
            "summary": self.summary,
            "failures": self.failures,
            "replicates_recorded": len(self.records),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")

    def to_csv(self, path):
        keys = sorted({k for rec in self.records for k in rec})
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(keys)
            for rec in self.records:
                writer.writerow([repr(rec.get(k, "")) for k in keys])


@lru_cache(maxsize=8)
def signal_variance(skew: str) -> float:
    """Exact variance of the standardized GSS truth, by quadrature."""
    return model_variance(GssModel(skew=SKEW_BY_NAME[skew]()))


def truth_model(config: SimConfig) -> GssModel:
    return GssModel(skew=SKEW_BY_NAME[config.skew]())


def error_model(config: SimConfig) -> ErrorModel:
    return ErrorModel(config.error_family, config.nsr * signal_variance(config.skew))


def draw_sample(config: SimConfig, rng: np.random.Generator):
    """One contaminated sample W = X + U for the configuration."""
    truth = truth_model(config)
    err = error_model(config)
    x = gss_sample(config.n, truth, rng)
    u = err.sample(config.n, rng)
    return x + u, truth, err


def replicate_rngs(config: SimConfig):
    """Independent per-replicate generators via a counter-based spawn."""
    children = np.random.SeedSequence(config.seed).spawn(config.replicates)
    return [np.random.default_rng(c) for c in children]


def summarize(values) -> dict:
    """Median and quartiles (linear interpolation)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("nothing to summarize")
    q1, med, q3 = np.quantile(values, [0.25, 0.5, 0.75])
    return {"q1": float(q1), "median": float(med), "q3": float(q3)}


def rmse(values, truth: float) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("nothing to summarize")
    return float(np.sqrt(np.mean((values - truth) ** 2)))


def _map_replicates(worker, tasks, workers: Optional[int]):
    if workers is None:
        workers = 1
    if workers <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with Pool(processes=workers) as pool:
        return pool.map(worker, tasks, chunksize=max(1, len(tasks) // (4 * workers)))


def _closest_solution(solutions, xi0: float, omega0: float):
    dists = [(s.xi - xi0) ** 2 + (s.omega - omega0) ** 2 for s in solutions]
    return solutions[int(np.argmin(dists))]


def _table1_rep(task):
    config, child, m_values = task
    rng = np.random.default_rng(child)
    w, _, err = draw_sample(config, rng)
    rec = {}
    for m in m_values:
        spec = MomentSpec(M=m, error=err)
        try:
            sols = gmm_solve(w, spec)
        except EstimationFailureError:
            return None
        best = _closest_solution(sols, 0.0, 1.0)
        rec[f"xi_M{m}"] = best.xi
        rec[f"omega_M{m}"] = best.omega
        rec[f"n_solutions_M{m}"] = len(sols)
    return rec


def run_table1(
    configs: Sequence[SimConfig],
    m_values: Sequence[int] = (2, 5),
    workers: Optional[int] = None,
) -> list[SimResult]:
    """RMSE of the GMM location/scale estimates, best-case solution choice.

    For every replicate and every moment count, the solution closest to the
    true (0, 1) in Euclidean distance is scored.
    """
    results = []
    for config in configs:
        tasks = [(config, child, tuple(m_values)) for child in np.random.SeedSequence(config.seed).spawn(config.replicates)]
        raw = _map_replicates(_table1_rep, tasks, workers)
        records = [r for r in raw if r is not None]
        if not records:
            raise EstimationFailureError(f"all replicates failed for {config.label()}")
        summary = {}
        for m in m_values:
            summary[f"M{m}"] = {
                "rmse_xi": rmse([r[f"xi_M{m}"] for r in records], 0.0),
                "rmse_omega": rmse([r[f"omega_M{m}"] for r in records], 1.0),
            }
        for i, rec in enumerate(records):
            rec["rep"] = i
        results.append(
            SimResult(
                table="table1",
                config=asdict(config),
                records=records,
                summary=summary,
                failures=len(raw) - len(records),
            )
        )
    return results


def _oracle_gss_ise(w, sol, err, truth, search, n_nodes):
    def objective(h):
        return ise(gss_fit(w, sol.xi, sol.omega, err, h, n_nodes=n_nodes), truth)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        h = minimize_bandwidth(objective, search)
    return objective(h), h


def _oracle_np_ise(w, err, truth, search, n_nodes):
    def objective(h):
        return ise(np_fit(w, err, h, n_nodes=n_nodes), truth)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        h = minimize_bandwidth(objective, search)
    return objective(h), h


def _table2_rep(task):
    config, child, search, n_nodes = task
    rng = np.random.default_rng(child)
    w, truth, err = draw_sample(config, rng)
    spec = MomentSpec(M=config.M, error=err)
    try:
        sols = gmm_solve(w, spec)
    except EstimationFailureError:
        return None
    best = None
    for sol in sols:
        val, h = _oracle_gss_ise(w, sol, err, truth, search, n_nodes)
        if best is None or val < best[0]:
            best = (val, h, sol)
    np_val, np_h = _oracle_np_ise(w, err, truth, search, n_nodes)
    return {
        "ise100_gss": 100.0 * best[0],
        "h_gss": best[1],
        "xi": best[2].xi,
        "omega": best[2].omega,
        "n_solutions": len(sols),
        "ise100_np": 100.0 * np_val,
        "h_np": np_h,
    }


def run_table2(
    configs: Sequence[SimConfig],
    workers: Optional[int] = None,
    search: BandwidthSearch = DEFAULT_SEARCH,
    n_nodes: int = 1024,
) -> list[SimResult]:
    """Oracle-bandwidth comparison: per replicate, the bandwidth (and GSS
    solution) minimizing the true ISE, for both estimators."""
    results = []
    for config in configs:
        tasks = [(config, child, search, n_nodes) for child in np.random.SeedSequence(config.seed).spawn(config.replicates)]
        raw = _map_replicates(_table2_rep, tasks, workers)
        records = [r for r in raw if r is not None]
        if not records:
            raise EstimationFailureError(f"all replicates failed for {config.label()}")
        summary = {
            "gss": summarize([r["ise100_gss"] for r in records]),
            "np": summarize([r["ise100_np"] for r in records]),
        }
        for i, rec in enumerate(records):
            rec["rep"] = i
        results.append(
            SimResult(
                table="table2",
                config=asdict(config),
                records=records,
                summary=summary,
                failures=len(raw) - len(records),
            )
        )
    return results


def _selection_rep(task):
    config, child, bandwidths, selections, search, n_nodes = task
    rng = np.random.default_rng(child)
    w, truth, err = draw_sample(config, rng)
    spec = MomentSpec(M=config.M, error=err)
    try:
        sols = gmm_solve(w, spec)
    except EstimationFailureError:
        return None
    rec = {"n_solutions": len(sols)}
    for bw in bandwidths:
        fits = []
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                for sol in sols:
                    wstar = (w - sol.xi) / sol.omega
                    h = select_bandwidth(bw, wstar, err, sol.omega, kappa=config.kappa, search=search, n_nodes=n_nodes)
                    fits.append(gss_fit(w, sol.xi, sol.omega, err, h, n_nodes=n_nodes))
        except GssDeconError:
            return None
        ises = [ise(f, truth) for f in fits]
        for sel in selections:
            if sel == "min":
                chosen = int(np.argmin(ises))
            elif sel == "skw":
                chosen = skewness_select(fits, w, err.variance).chosen
            elif sel == "phs":
                chosen = phase_select(fits, w).chosen
            elif sel == "rnd":
                chosen = random_select(fits, rng).chosen
            else:
                raise ValueError(f"unknown selection key: {sel!r}")
            rec[f"{bw}_{sel}_ise100"] = 100.0 * ises[chosen]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            h_np = plugin_bandwidth(w, err, search=search)
            rec["np_ise100"] = 100.0 * ise(np_fit(w, err, h_np, n_nodes=n_nodes), truth)
        rec["h_np"] = h_np
    except GssDeconError:
        return None
    return rec


def run_selection_tables(
    configs: Sequence[SimConfig],
    bandwidths: Optional[Sequence[str]] = None,
    selections: Sequence[str] = SELECTION_KEYS,
    workers: Optional[int] = None,
    search: BandwidthSearch = DEFAULT_SEARCH,
    n_nodes: int = 1024,
) -> list[SimResult]:
    """Estimated-bandwidth comparison across solution-selection criteria,
    with the plug-in nonparametric estimator as the reference column.

    bandwidths defaults to each configuration's own bandwidth setting."""
    results = []
    for config in configs:
        bw_methods = tuple(bandwidths) if bandwidths is not None else (config.bandwidth,)
        tasks = [
            (config, child, bw_methods, tuple(selections), search, n_nodes)
            for child in np.random.SeedSequence(config.seed).spawn(config.replicates)
        ]
        raw = _map_replicates(_selection_rep, tasks, workers)
        records = [r for r in raw if r is not None]
        if not records:
            raise EstimationFailureError(f"all replicates failed for {config.label()}")
        summary = {}
        for bw in bw_methods:
            for sel in selections:
                key = f"{bw}_{sel}"
                summary[key] = summarize([r[f"{key}_ise100"] for r in records])
        summary["np"] = summarize([r["np_ise100"] for r in records])
        for i, rec in enumerate(records):
            rec["rep"] = i
        results.append(
            SimResult(
                table="selection",
                config=asdict(config),
                records=records,
                summary=summary,
                failures=len(raw) - len(records),
            )
        )
    return results
