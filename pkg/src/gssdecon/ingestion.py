"""Real-data preprocessing: paired-instrument harmonization and
replicate averaging with an optional shifted-log transform.

Both pipelines reduce raw measurement files to a single contaminated series
w together with estimated error parameters, ready for the deconvolution
pipeline. CSV input requires a header row; paired files carry 2 columns,
replicate files 2 (per-exam averages) or 4 (two replicates per exam).
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import GssDeconError, InsufficientDataError, SignalVarianceError


class ParseError(GssDeconError):
    """Input file does not conform to the expected CSV schema."""


@dataclass(frozen=True)
class PairedResult:
    """Harmonized paired-instrument series and its error-variance estimates."""

    w: np.ndarray
    mu_hat: float
    sigma_hat: float
    sigma_u2: float
    sigma_eps2: float

    def summary(self) -> dict:
        var_w = float(self.w.var(ddof=1))
        sig_x2 = var_w - self.sigma_eps2
        return {
            "n": int(self.w.size),
            "mu_hat": self.mu_hat,
            "sigma_hat": self.sigma_hat,
            "sigma_u2": self.sigma_u2,
            "sigma_eps2": self.sigma_eps2,
            "nsr": self.sigma_eps2 / sig_x2 if sig_x2 > 0 else math.inf,
        }


@dataclass(frozen=True)
class ReplicateResult:
    """Averaged replicate series with error and signal scales."""

    w: np.ndarray
    sigma_x: float
    sigma_u: float
    n_rejected: int

    def summary(self) -> dict:
        return {
            "n": int(self.w.size),
            "rejected_rows": int(self.n_rejected),
            "sigma_x": self.sigma_x,
            "sigma_u": self.sigma_u,
            "nsr": (self.sigma_u / self.sigma_x) ** 2 if self.sigma_x > 0 else math.inf,
        }


def read_numeric_csv(path, n_columns=None) -> np.ndarray:
    """Read a headed CSV of floats; enforce a column count when given."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if any(_is_number(cell) for cell in header):
            raise ParseError(f"{path}: header row required")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if n_columns is not None and data.shape[1] != n_columns:
        raise ParseError(f"{path}: expected {n_columns} columns, got {data.shape[1]}")
    return data


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def harmonize_pairs(data) -> PairedResult:
    """Merge two same-quantity instruments observed on different scales.

    Given rows (w1, w2) with w2 = mu + sigma (x + u2) and w1 = x + u1, the
    moment estimates sigma-hat = S2/S1 and mu-hat = mean2 - sigma-hat mean1
    bring the second instrument onto the first scale; the output series is
    the average of the two aligned measurements, whose error variance is a
    quarter of the mean squared disagreement.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ParseError("paired data needs exactly 2 columns")
    n = data.shape[0]
    if n < 3:
        raise InsufficientDataError("paired harmonization needs at least 3 rows")
    w1, w2 = data[:, 0], data[:, 1]
    s1, s2 = w1.std(ddof=1), w2.std(ddof=1)
    if s1 <= 0 or s2 <= 0:
        raise SignalVarianceError("an instrument column has zero variance")
    sigma_hat = float(s2 / s1)
    mu_hat = float(w2.mean() - sigma_hat * w1.mean())
    aligned = (w2 - mu_hat) / sigma_hat
    sigma_u2 = float(np.sum((w1 - aligned) ** 2) / (2.0 * n))
    w = 0.5 * w1 + 0.5 * aligned
    return PairedResult(w=w, mu_hat=mu_hat, sigma_hat=sigma_hat, sigma_u2=sigma_u2, sigma_eps2=sigma_u2 / 2.0)


def replicate_average(data, shift: float = 50.0, log: bool = True) -> ReplicateResult:
    """Average replicate measurements into one surrogate per subject.

    With 4 columns (two replicates at each of two exams) the error scale
    comes from within-exam differences of the transformed replicates; with
    2 columns (per-exam values) it falls back to the between-exam
    difference. Rows violating the transform domain are rejected and
    counted.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] not in (2, 4):
        raise ParseError("replicate data needs 2 or 4 columns")
    n_rejected = 0
    if log:
        ok = np.all(data > shift, axis=1)
        n_rejected = int(np.sum(~ok))
        data = data[ok]
    if data.shape[0] < 3:
        raise InsufficientDataError("too few usable rows after domain filtering")

    def transform(v):
        return np.log(v - shift) if log else v

    if data.shape[1] == 4:
        exam1 = transform((data[:, 0] + data[:, 1]) / 2.0)
        exam2 = transform((data[:, 2] + data[:, 3]) / 2.0)
        d = np.concatenate([transform(data[:, 0]) - transform(data[:, 1]), transform(data[:, 2]) - transform(data[:, 3])])
        # replicate-level error variance, halved twice: once for the exam
        # mean of two replicates, once for the average over the two exams
        sigma_u2 = float(d.var(ddof=1)) / 8.0
    else:
        exam1 = transform(data[:, 0])
        exam2 = transform(data[:, 1])
        d = exam1 - exam2
        sigma_u2 = float(d.var(ddof=1)) / 4.0
    w = (exam1 + exam2) / 2.0
    sigma_x2 = float(w.var(ddof=1)) - sigma_u2
    if sigma_x2 <= 0:
        raise SignalVarianceError("replicate variance estimate leaves no signal variance")
    return ReplicateResult(w=w, sigma_x=math.sqrt(sigma_x2), sigma_u=math.sqrt(sigma_u2), n_rejected=n_rejected)


def write_series_csv(path, w: np.ndarray, column: str = "w"):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([column])
        for value in w:
            writer.writerow([repr(float(value))])


def write_summary_json(path, summary: dict):
    with open(path, "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
