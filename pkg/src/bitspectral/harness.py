"""Experiment drivers and CSV emission for the desk-scale numerical studies.

Four experiments are provided:

* ``eigs``   -- top-two eigenvalues of the (scaled) second moment across a
  noise-parameter grid; per-trial rows.
* ``lowdim`` -- dense recovery error across a (p, n) grid, abscissa sqrt(p/n).
* ``sparse`` -- sparse-pipeline recovery error across an (s, p, n) grid,
  abscissa sqrt(s log p / n).
* ``diag``   -- closed-form moment summary and theory constants; no sampling.

Each trial of each grid point draws from its own derived stream keyed by the
grid point's parameter values and the trial index, so results are independent
of execution order and stable under grid edits.  Reruns with the same config
and seed produce byte-identical CSV.

CSV columns (unused cells empty, floats with 17 significant digits):

    experiment,model,param_name,param_value,n,p,s,trial,abscissa,
    lambda1_over4,lambda2_over4,err,err_signfree,iters,converged

The noisy-sign model is parameterized by the noise standard deviation sigma;
a variance of 0.1 (the usual figure setting, sometimes written delta^2)
corresponds to sigma = sqrt(0.1).
"""

import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .estimator import KIND_DIFFERENCE, KIND_SUM, second_moment, second_moment_sum
from .links import (
    DEFAULT_QUAD_ORDER,
    FlippedLogistic,
    LinkModel,
    OneBitCS,
    OneBitPR,
    moments,
    theory_diagnostics,
)
from .rng import derive_rng
from .sparse import SparseConfig, sparse_recover
from .spectral import power_method, top_two_eigs
from .synth import generate_dataset, sample_beta_dense, sample_beta_sparse

DEFAULT_SIGMA = math.sqrt(0.1)  # noise variance 0.1

CSV_HEADER = (
    "experiment,model,param_name,param_value,n,p,s,trial,abscissa,"
    "lambda1_over4,lambda2_over4,err,err_signfree,iters,converged"
)

_EXPERIMENTS = ("eigs", "lowdim", "sparse", "diag")
_MODELS = ("flr", "cs", "pr")
_PARAM_NAMES = {"flr": "pe", "cs": "sigma", "pr": "theta"}

_EIGS_NOISE_DEFAULTS = {
    "flr": (0.0, 0.1, 0.2, 0.3, 0.4),
    "cs": (0.0, 0.5, 1.0, 1.5, 2.0),
    "pr": (0.25, 0.45, 0.675, 0.9, 1.2),
}


@dataclass(frozen=True)
class RunConfig:
    """Configuration for one experiment run; grids are tuples."""

    experiment: str
    model: str = "cs"
    pe: tuple = (0.1,)
    sigma: tuple = (DEFAULT_SIGMA,)
    theta: tuple = (1.0,)
    zeta: float = 0.0
    n: tuple = (3000,)
    p: tuple = (20,)
    s: tuple = ()
    trials: int = 1
    seed: int = 0
    out: str | None = None
    tmax: int = 500
    tol: float = 1e-10
    rho_const: float = 1.0
    shat: int | None = None
    admm_tol: float = 1e-6
    admm_penalty: float = 1.0
    admm_max_iter: int = 2000
    matrix: str = "auto"
    quad_order: int = DEFAULT_QUAD_ORDER


@dataclass(frozen=True)
class ExperimentRow:
    """One CSV row; None means the column is unused for this experiment."""

    experiment: str
    model: str
    param_name: str
    param_value: float
    n: int | None
    p: int
    s: int | None
    trial: int | None
    abscissa: float | None
    lambda1_over4: float | None = None
    lambda2_over4: float | None = None
    err: float | None = None
    err_signfree: float | None = None
    iters: int | None = None
    converged: bool | None = None


def default_config(experiment: str, model: str = "cs", **overrides) -> RunConfig:
    """Config with the standard desk-scale grids for the given experiment."""
    if experiment not in _EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {_EXPERIMENTS}, got {experiment!r}")
    if model not in _MODELS:
        raise ConfigError(f"model must be one of {_MODELS}, got {model!r}")
    cfg = RunConfig(experiment=experiment, model=model)
    if experiment == "eigs":
        grid = _EIGS_NOISE_DEFAULTS[model]
        cfg = replace(cfg, trials=10, **{_PARAM_NAMES[model]: grid})
    elif experiment == "lowdim":
        cfg = replace(cfg, trials=100, n=(500, 2000, 8000), p=(20,))
    elif experiment == "sparse":
        cfg = replace(cfg, trials=100, n=(1000, 2000, 4000), p=(100,), s=(5,))
    return replace(cfg, **overrides)


def _noise_grid(cfg: RunConfig) -> tuple:
    return getattr(cfg, _PARAM_NAMES[cfg.model])


def _make_model(cfg: RunConfig, param_value: float) -> LinkModel:
    if cfg.model == "flr":
        return FlippedLogistic(zeta=cfg.zeta, pe=param_value)
    if cfg.model == "cs":
        return OneBitCS(sigma=param_value)
    if cfg.model == "pr":
        return OneBitPR(theta=param_value)
    raise ConfigError(f"model must be one of {_MODELS}, got {cfg.model!r}")


def _validate(cfg: RunConfig) -> None:
    if cfg.experiment not in _EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {_EXPERIMENTS}, got {cfg.experiment!r}")
    if cfg.model not in _MODELS:
        raise ConfigError(f"model must be one of {_MODELS}, got {cfg.model!r}")
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if not cfg.n or not cfg.p or not _noise_grid(cfg):
        raise ConfigError("grids must be nonempty")
    if cfg.experiment == "sparse" and not cfg.s:
        raise ConfigError("sparse experiment needs an s grid")
    if cfg.matrix not in ("auto", "diff", "sum"):
        raise ConfigError(f"matrix must be auto|diff|sum, got {cfg.matrix!r}")
    for value in _noise_grid(cfg):
        _make_model(cfg, value)  # validates the noise parameter range


def select_matrix_kind(
    model: LinkModel, override: str = "auto", quad_order: int = DEFAULT_QUAD_ORDER
) -> str:
    """Difference vs sum estimator: by flag, else by the sign of phi."""
    if override == "diff":
        return KIND_DIFFERENCE
    if override == "sum":
        return KIND_SUM
    return KIND_SUM if moments(model, quad_order=quad_order).phi < 0.0 else KIND_DIFFERENCE


def _build_moment(data, kind):
    return second_moment(data) if kind == KIND_DIFFERENCE else second_moment_sum(data)


def estimation_error(beta_hat, beta_star, sign_invariant: bool = False) -> float:
    """l2 estimation error between unit vectors, optionally modulo sign."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_star = np.asarray(beta_star, dtype=float)
    for name, v in (("beta_hat", beta_hat), ("beta_star", beta_star)):
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-6:
            raise ConfigError(f"{name} must be unit norm")
    plain = float(np.linalg.norm(beta_hat - beta_star))
    if not sign_invariant:
        return plain
    return min(plain, float(np.linalg.norm(beta_hat + beta_star)))


def trial_rng(cfg: RunConfig, param_value: float, n: int, p: int, s: int | None, trial: int):
    """Derived stream for one trial of one grid point (order-independent)."""
    return derive_rng(
        cfg.seed, cfg.experiment, cfg.model, float(param_value),
        int(n), int(p), -1 if s is None else int(s), int(trial),
    )


def eigs_trial(cfg: RunConfig, param_value: float, trial: int) -> ExperimentRow:
    n, p = cfg.n[0], cfg.p[0]
    rng = trial_rng(cfg, param_value, n, p, None, trial)
    model = _make_model(cfg, param_value)
    truth = sample_beta_dense(p, rng)
    data = generate_dataset(model, truth, n, rng)
    kind = select_matrix_kind(model, cfg.matrix, cfg.quad_order)
    lam1, lam2, _ = top_two_eigs(_build_moment(data, kind))
    return ExperimentRow(
        experiment="eigs", model=cfg.model, param_name=_PARAM_NAMES[cfg.model],
        param_value=param_value, n=n, p=p, s=None, trial=trial,
        abscissa=param_value, lambda1_over4=lam1 / 4.0, lambda2_over4=lam2 / 4.0,
    )


def run_eigenstructure(cfg: RunConfig) -> list[ExperimentRow]:
    """Top-two eigenvalues of the auto-selected estimator over a noise grid."""
    _validate(cfg)
    if len(cfg.n) != 1 or len(cfg.p) != 1:
        raise ConfigError(
            f"the eigs experiment varies the noise parameter at one (n, p); "
            f"got n grid {cfg.n}, p grid {cfg.p}"
        )
    return [
        eigs_trial(cfg, value, t)
        for value in _noise_grid(cfg)
        for t in range(cfg.trials)
    ]


def lowdim_trial(cfg: RunConfig, param_value: float, n: int, p: int, trial: int) -> ExperimentRow:
    rng = trial_rng(cfg, param_value, n, p, None, trial)
    model = _make_model(cfg, param_value)
    truth = sample_beta_dense(p, rng)
    data = generate_dataset(model, truth, n, rng)
    kind = select_matrix_kind(model, cfg.matrix, cfg.quad_order)
    mtx = _build_moment(data, kind)
    beta0 = rng.standard_normal(p)
    beta0 /= np.linalg.norm(beta0)
    report = power_method(mtx, beta0, t_max=cfg.tmax, tol=cfg.tol)
    err_signfree = estimation_error(report.beta_hat, truth.beta_star, True)
    err = err_signfree if cfg.model == "pr" else estimation_error(
        report.beta_hat, truth.beta_star, False
    )
    return ExperimentRow(
        experiment="lowdim", model=cfg.model, param_name=_PARAM_NAMES[cfg.model],
        param_value=param_value, n=n, p=p, s=None, trial=trial,
        abscissa=math.sqrt(p / n), err=err, err_signfree=err_signfree,
        iters=report.iterations, converged=report.converged,
    )


def run_lowdim(cfg: RunConfig) -> list[ExperimentRow]:
    """Dense recovery error over a (p, n) grid at a fixed noise setting."""
    _validate(cfg)
    param_value = _single_noise_value(cfg)
    return [
        lowdim_trial(cfg, param_value, n, p, t)
        for p in cfg.p
        for n in cfg.n
        for t in range(cfg.trials)
    ]


def sparse_trial(cfg: RunConfig, param_value: float, s: int, p: int, n: int, trial: int) -> ExperimentRow:
    rng = trial_rng(cfg, param_value, n, p, s, trial)
    model = _make_model(cfg, param_value)
    truth = sample_beta_sparse(p, s, rng)
    data = generate_dataset(model, truth, n, rng)
    kind = select_matrix_kind(model, cfg.matrix, cfg.quad_order)
    s_hat = cfg.shat if cfg.shat is not None else min(2 * s, p)
    scfg = SparseConfig(
        rho=cfg.rho_const * math.sqrt(math.log(p) / n),
        s_hat=s_hat, t_max=cfg.tmax, admm_penalty=cfg.admm_penalty,
        admm_tol=cfg.admm_tol, admm_max_iter=cfg.admm_max_iter,
    )
    report = sparse_recover(data, scfg, kind=kind)
    err_signfree = estimation_error(report.beta_hat, truth.beta_star, True)
    err = err_signfree if cfg.model == "pr" else estimation_error(
        report.beta_hat, truth.beta_star, False
    )
    return ExperimentRow(
        experiment="sparse", model=cfg.model, param_name=_PARAM_NAMES[cfg.model],
        param_value=param_value, n=n, p=p, s=s, trial=trial,
        abscissa=math.sqrt(s * math.log(p) / n), err=err, err_signfree=err_signfree,
        iters=report.iterations, converged=report.converged,
    )


def run_sparse(cfg: RunConfig) -> list[ExperimentRow]:
    """Sparse-pipeline recovery error over an (s, p, n) grid."""
    _validate(cfg)
    param_value = _single_noise_value(cfg)
    for s in cfg.s:
        if s < 1 or s > max(cfg.p):
            raise ConfigError(f"sparsity grid value {s} out of range for p grid {cfg.p}")
    return [
        sparse_trial(cfg, param_value, s, p, n, t)
        for s in cfg.s
        for p in cfg.p
        for n in cfg.n
        for t in range(cfg.trials)
    ]


def _single_noise_value(cfg: RunConfig) -> float:
    grid = _noise_grid(cfg)
    if len(grid) != 1:
        raise ConfigError(
            f"experiment {cfg.experiment!r} takes a single noise value, got grid {grid}"
        )
    return grid[0]


def run_diag(cfg: RunConfig, stream=None) -> list[ExperimentRow]:
    """Print the moment summary and theory constants; pure computation.

    A non-positive eigengap statistic is reported with the sum-estimator
    advisory rather than raised.  Emits no CSV rows.
    """
    _validate(cfg)
    out = stream if stream is not None else sys.stdout
    param_value = _single_noise_value(cfg)
    model = _make_model(cfg, param_value)
    if len(cfg.p) != 1 or len(cfg.s) > 1:
        raise ConfigError(
            f"diag takes a single p and at most one s; got p grid {cfg.p}, s grid {cfg.s}"
        )
    p = cfg.p[0]
    s = cfg.s[0] if cfg.s else None
    summ = moments(model, quad_order=cfg.quad_order)
    print(f"model={cfg.model} {_PARAM_NAMES[cfg.model]}={param_value:.17g} "
          f"p={p} s={'-' if s is None else s}", file=out)
    print(f"mu0={summ.mu0:.12g} mu1={summ.mu1:.12g} mu2={summ.mu2:.12g} "
          f"phi={summ.phi:.12g} method={summ.method}", file=out)
    try:
        diag = theory_diagnostics(model, p, s, quad_order=cfg.quad_order)
    except ConfigError as exc:
        print(f"advisory: {exc}", file=out)
        return []
    print(f"gamma={diag.gamma:.12g} xi={diag.xi:.12g} kappa={diag.kappa:.12g} "
          f"n_min_as_printed={diag.n_min:.12g} theta_m={diag.theta_m:.12g}", file=out)
    if diag.kappa > 0.99:
        print("advisory: kappa near 1 -- expect slow sparse-stage convergence", file=out)
    return []


def run_experiment(cfg: RunConfig) -> list[ExperimentRow]:
    """Dispatch on cfg.experiment."""
    runner = {
        "eigs": run_eigenstructure,
        "lowdim": run_lowdim,
        "sparse": run_sparse,
        "diag": run_diag,
    }[cfg.experiment]
    return runner(cfg)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    """Render rows deterministically: header plus one line per row, LF endings."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_cell(v) for v in (
            r.experiment, r.model, r.param_name, r.param_value, r.n, r.p, r.s,
            r.trial, r.abscissa, r.lambda1_over4, r.lambda2_over4, r.err,
            r.err_signfree, r.iters, r.converged,
        )))
    return "\n".join(lines) + "\n"


def write_csv(rows: list[ExperimentRow], path: str | None) -> None:
    text = rows_to_csv(rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
