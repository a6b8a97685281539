"""Pairwise-difference second-moment matrices and their population values.

Observations are consumed in consecutive pairs (2i-1, 2i) in stored order.
The difference-type matrix weights each covariate-difference outer product by
the squared label difference,

    M = (2/n) sum_i (y_2i - y_2i-1)^2 (x_2i - x_2i-1)(x_2i - x_2i-1)^T,

and the sum-type variant M' uses (y_2i + y_2i-1)^2 instead.  For standard
Gaussian covariates their expectations are rank-one-plus-identity:

    E[M]  =  4 phi b b^T + 4 (1 - mu0^2) I,
    E[M'] = -4 phi b b^T + 4 (1 + mu0^2) I,

so the signal direction b is the top eigenvector of E[M] when phi > 0 and of
E[M'] when phi < 0.  ``expected_moment`` provides these exact matrices as a
test oracle and for population-level studies.

Both estimators are associative pair sums: chunked accumulation reproduces the
serial result as long as chunk boundaries depend only on n.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .links import DEFAULT_QUAD_ORDER, LinkModel, moments
from .synth import Dataset, GroundTruth

KIND_DIFFERENCE = "difference"
KIND_SUM = "sum"
_KINDS = (KIND_DIFFERENCE, KIND_SUM)


@dataclass(frozen=True)
class MomentMatrix:
    """Symmetric PSD p-by-p second-moment matrix with its construction tag."""

    entries: np.ndarray
    kind: str
    n_pairs: int

    def __post_init__(self):
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigError(f"matrix must be square, got shape {a.shape}")
        if self.kind not in _KINDS:
            raise ConfigError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if asym > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
            raise ConfigError(f"matrix not symmetric (max asymmetry {asym:.3g})")

    @property
    def p(self) -> int:
        return self.entries.shape[0]


def _pair_weighted_moment(data: Dataset, kind: str) -> MomentMatrix:
    y = data.labels
    x = data.covariates
    n = data.n
    if kind == KIND_DIFFERENCE:
        dy = y[1::2] - y[0::2]
    else:
        dy = y[1::2] + y[0::2]
    # exact {0, 4} integer weights before any float conversion
    w = (dy * dy).astype(np.float64)
    dx = x[1::2] - x[0::2]
    m = (2.0 / n) * ((dx * w[:, None]).T @ dx)
    m = 0.5 * (m + m.T)
    return MomentMatrix(entries=m, kind=kind, n_pairs=n // 2)


def second_moment(data: Dataset) -> MomentMatrix:
    """Difference-type estimator M from consecutive pairs in stored order."""
    return _pair_weighted_moment(data, KIND_DIFFERENCE)


def second_moment_sum(data: Dataset) -> MomentMatrix:
    """Sum-type estimator M' (for links whose eigengap statistic is negative)."""
    return _pair_weighted_moment(data, KIND_SUM)


def expected_moment(
    model: LinkModel,
    truth: GroundTruth,
    kind: str = KIND_DIFFERENCE,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> MomentMatrix:
    """Exact population matrix E[M] or E[M'] for the given model and truth."""
    if kind not in _KINDS:
        raise ConfigError(f"kind must be one of {_KINDS}, got {kind!r}")
    summ = moments(model, quad_order=quad_order)
    b = truth.beta_star
    p = b.shape[0]
    if kind == KIND_DIFFERENCE:
        m = 4.0 * summ.phi * np.outer(b, b) + 4.0 * (1.0 - summ.mu0**2) * np.eye(p)
    else:
        m = -4.0 * summ.phi * np.outer(b, b) + 4.0 * (1.0 + summ.mu0**2) * np.eye(p)
    m = 0.5 * (m + m.T)
    return MomentMatrix(entries=m, kind=kind, n_pairs=0)


def write_matrix_csv(mtx: MomentMatrix, path) -> None:
    """Dump the matrix as CSV: p rows of p comma-separated 17-digit floats."""
    with open(path, "w", newline="") as fh:
        for row in mtx.entries:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
