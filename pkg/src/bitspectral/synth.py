"""Synthetic ground truth and datasets with seeded determinism.

Covariates are i.i.d. standard Gaussian rows; labels are drawn from the link
model via one uniform variate per observation, so deterministic links reduce
exactly to their sign rule.  All sampling takes an explicit generator (or a
seed), and the same generator state always reproduces the same dataset bit for
bit.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .links import LinkModel, link_eval

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundTruth:
    """Unit-norm target direction and its support set."""

    beta_star: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        norm = float(np.linalg.norm(self.beta_star))
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"beta_star must be unit norm, got ||.|| = {norm!r}")


@dataclass(frozen=True)
class Dataset:
    """Paired observations: labels in {-1, +1} and an n-by-p covariate matrix."""

    labels: np.ndarray
    covariates: np.ndarray

    def __post_init__(self):
        n = self.labels.shape[0]
        if n < 2 or n % 2 != 0:
            raise ConfigError(f"dataset needs an even number n >= 2 of rows, got {n}")
        if self.covariates.shape[0] != n:
            raise ConfigError("labels and covariates disagree on n")

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_beta_dense(p: int, seed) -> GroundTruth:
    """Draw a direction uniformly from the unit sphere in R^p."""
    if p < 1:
        raise ConfigError(f"dimension must be >= 1, got {p}")
    rng = _as_rng(seed)
    v = rng.standard_normal(p)
    norm = np.linalg.norm(v)
    while norm == 0.0:  # probability-zero guard
        v = rng.standard_normal(p)
        norm = np.linalg.norm(v)
    return GroundTruth(beta_star=v / norm, support=np.arange(p))


def sample_beta_sparse(p: int, s: int, seed) -> GroundTruth:
    """Draw an s-sparse unit direction: uniform support, uniform on its sphere."""
    if not 1 <= s <= p:
        raise ConfigError(f"sparsity must satisfy 1 <= s <= p, got s={s}, p={p}")
    rng = _as_rng(seed)
    support = np.sort(rng.choice(p, size=s, replace=False))
    v = rng.standard_normal(s)
    norm = np.linalg.norm(v)
    while norm == 0.0:
        v = rng.standard_normal(s)
        norm = np.linalg.norm(v)
    beta = np.zeros(p)
    beta[support] = v / norm
    return GroundTruth(beta_star=beta, support=support)


def draw_labels(model: LinkModel, index_values, rng) -> np.ndarray:
    """Draw {-1, +1} labels for given linear-index values.

    Uses one uniform variate per value: y = +1 iff u < (f(z) + 1) / 2.  Since
    u lives in [0, 1), links with f(z) = +-1 reduce exactly to the sign rule.
    """
    rng = _as_rng(rng)
    z = np.asarray(index_values, dtype=float)
    p_plus = 0.5 * (link_eval(model, z) + 1.0)
    u = rng.random(z.shape[0])
    return np.where(u < p_plus, 1, -1).astype(np.int64)


def generate_dataset(model: LinkModel, truth: GroundTruth, n: int, seed) -> Dataset:
    """Generate n observations from the model at the given ground truth.

    Covariate rows are i.i.d. N(0, I_p).  Odd n is trimmed by dropping the
    last observation (logged), so the stored dataset always pairs up cleanly.
    """
    if n < 2:
        raise ConfigError(f"need n >= 2 observations, got {n}")
    rng = _as_rng(seed)
    p = truth.beta_star.shape[0]
    x = rng.standard_normal((n, p))
    y = draw_labels(model, x @ truth.beta_star, rng)
    if n % 2 != 0:
        log.info("odd n=%d: trimming the last observation to n=%d", n, n - 1)
        x, y = x[:-1], y[:-1]
    return Dataset(labels=y, covariates=x)


def write_dataset_csv(dataset: Dataset, path) -> None:
    """Dump a dataset as CSV: header ``y,x1,...,xp``, 17-significant-digit floats."""
    cols = ",".join(f"x{j + 1}" for j in range(dataset.p))
    with open(path, "w", newline="") as fh:
        fh.write(f"y,{cols}\n")
        for yi, row in zip(dataset.labels, dataset.covariates):
            vals = ",".join(f"{v:.17g}" for v in row)
            fh.write(f"{int(yi)},{vals}\n")
