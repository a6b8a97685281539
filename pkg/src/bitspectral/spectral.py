"""Dense-regime recovery: power iteration and top-eigenpair extraction."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError
from .estimator import MomentMatrix


@dataclass(frozen=True)
class RecoveryReport:
    """Result of an iterative recovery run.

    ``rayleigh_trace`` holds the quotient b_t^T M b_t after every multiply;
    for PSD input it is non-decreasing.  ``converged`` records whether the
    early-stop tolerance was met before the iteration cap.  ``stages`` carries
    optional upstream diagnostics (e.g. the sparse pipeline's initialization).
    """

    beta_hat: np.ndarray
    iterations: int
    rayleigh_trace: np.ndarray
    converged: bool
    stages: dict | None = field(default=None, compare=False)


def _as_matrix(mtx) -> np.ndarray:
    if isinstance(mtx, MomentMatrix):
        return mtx.entries
    return np.asarray(mtx, dtype=float)


def sign_normalize(v: np.ndarray) -> np.ndarray:
    """Flip sign so the largest-magnitude coordinate is positive (ties: lowest index)."""
    idx = int(np.argmax(np.abs(v)))
    return -v if v[idx] < 0.0 else v


def _check_unit(v: np.ndarray, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-6:
        raise ConfigError(f"{what} must be unit norm")
    return v


def power_method(mtx, beta0, t_max: int = 500, tol: float = 1e-10) -> RecoveryReport:
    """Power iteration b <- M b / ||M b|| from a unit starting vector.

    Stops early once successive iterates differ by at most ``tol`` after sign
    alignment (``tol=0`` reproduces a fixed-iteration run), or after ``t_max``
    multiplies.  The returned vector is sign-normalized.  A zero matrix, or an
    iterate that M annihilates, has no dominant direction and raises
    ``NumericalError``.
    """
    m = _as_matrix(mtx)
    b = _check_unit(beta0, "beta0")
    if t_max < 1:
        raise ConfigError(f"t_max must be >= 1, got {t_max}")
    if not np.any(m):
        raise NumericalError("no dominant direction: matrix is zero")
    trace = []
    converged = False
    iterations = 0
    for _ in range(t_max):
        v = m @ b
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise NumericalError("no dominant direction: iterate annihilated")
        v = v / norm
        iterations += 1
        trace.append(float(v @ (m @ v)))
        diff = min(float(np.linalg.norm(v - b)), float(np.linalg.norm(v + b)))
        b = v
        if diff <= tol:
            converged = True
            break
    return RecoveryReport(
        beta_hat=sign_normalize(b),
        iterations=iterations,
        rayleigh_trace=np.asarray(trace),
        converged=converged,
    )


def top_two_eigs(mtx):
    """Top two eigenvalues and the leading eigenvector of a symmetric matrix.

    Full symmetric eigendecomposition; fine at desk scale (p <= 512).  Returns
    ``(lambda1, lambda2, v1)`` with lambda1 >= lambda2 and v1 sign-normalized.
    """
    m = _as_matrix(mtx)
    if m.shape[0] < 2:
        raise ConfigError(f"need p >= 2 for a top-two spectrum, got p={m.shape[0]}")
    vals, vecs = np.linalg.eigh(m)
    return float(vals[-1]), float(vals[-2]), sign_normalize(vecs[:, -1].copy())
