"""Command-line interface.

Subcommands: ``eigs``, ``lowdim``, ``sparse``, ``diag``.  Flags mirror the
fields of ``harness.RunConfig``; ``--config FILE`` supplies the same settings
as JSON, with explicit flags taking precedence over the file.  Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import json
import sys

from .errors import ConfigError, NumericalError
from .harness import RunConfig, default_config, run_experiment, write_csv

_GRID_FLOAT_KEYS = ("pe", "sigma", "theta")
_GRID_INT_KEYS = ("n", "p", "s")
_SCALAR_KEYS = {
    "zeta": float, "trials": int, "seed": int, "tmax": int, "tol": float,
    "rho_const": float, "shat": int, "admm_tol": float, "admm_penalty": float,
    "admm_max_iter": int, "quad_order": int, "matrix": str, "model": str,
    "out": str,
}


def _parse_grid(raw, cast) -> tuple:
    if isinstance(raw, (list, tuple)):
        return tuple(cast(v) for v in raw)
    if isinstance(raw, (int, float)):
        return (cast(raw),)
    try:
        return tuple(cast(tok) for tok in str(raw).split(",") if tok != "")
    except ValueError as exc:
        raise ConfigError(f"bad grid value {raw!r}: {exc}") from None


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", choices=("flr", "cs", "pr"), default=None)
    sub.add_argument("--pe", default=None, help="flip probability (comma grid for eigs)")
    sub.add_argument("--sigma", default=None,
                     help="noise standard deviation; variance v means sigma=sqrt(v)")
    sub.add_argument("--theta", default=None, help="quantization threshold (> 0)")
    sub.add_argument("--zeta", type=float, default=None, help="logistic intercept")
    sub.add_argument("--n", default=None, help="sample-size grid, comma separated")
    sub.add_argument("--p", default=None, help="dimension grid, comma separated")
    sub.add_argument("--s", default=None, help="sparsity grid, comma separated")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--tmax", type=int, default=None, help="power-iteration cap")
    sub.add_argument("--tol", type=float, default=None, help="power-iteration stop tolerance")
    sub.add_argument("--rho-const", dest="rho_const", type=float, default=None,
                     help="rho = rho_const * sqrt(log p / n)")
    sub.add_argument("--shat", type=int, default=None,
                     help="truncation sparsity (default min(2 s, p))")
    sub.add_argument("--admm-tol", dest="admm_tol", type=float, default=None)
    sub.add_argument("--admm-penalty", dest="admm_penalty", type=float, default=None)
    sub.add_argument("--admm-max-iter", dest="admm_max_iter", type=int, default=None)
    sub.add_argument("--matrix", choices=("auto", "diff", "sum"), default=None,
                     help="force the difference or sum estimator")
    sub.add_argument("--quad-order", dest="quad_order", type=int, default=None)
    sub.add_argument("--out", default=None, help="output CSV path (default stdout)")
    sub.add_argument("--config", default=None, help="JSON file mirroring these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitspectral",
        description="Spectral recovery experiments for one-bit single-index data",
    )
    subs = parser.add_subparsers(dest="experiment", required=True)
    for name, doc in (
        ("eigs", "top-two eigenvalues of the second moment over a noise grid"),
        ("lowdim", "dense recovery error over a (p, n) grid"),
        ("sparse", "sparse recovery error over an (s, p, n) grid"),
        ("diag", "moment summary and theory constants (no sampling)"),
    ):
        _add_common_flags(subs.add_parser(name, help=doc))
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return raw


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = _load_config_file(args.config) if args.config else {}
    for key in file_values:
        if key not in _SCALAR_KEYS and key not in _GRID_FLOAT_KEYS and key not in _GRID_INT_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    def pick(key):
        flag = getattr(args, key, None)
        return flag if flag is not None else file_values.get(key)

    model = pick("model") or "cs"
    cfg = default_config(args.experiment, model)
    updates = {}
    for key in _GRID_FLOAT_KEYS:
        raw = pick(key)
        if raw is not None:
            updates[key] = _parse_grid(raw, float)
    for key in _GRID_INT_KEYS:
        raw = pick(key)
        if raw is not None:
            updates[key] = _parse_grid(raw, int)
    for key, cast in _SCALAR_KEYS.items():
        if key in ("model", "out"):
            continue
        raw = pick(key)
        if raw is not None:
            try:
                updates[key] = cast(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from None
    updates["out"] = pick("out")
    try:
        return RunConfig(**{**cfg.__dict__, **updates})
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        rows = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if cfg.experiment != "diag" or cfg.out is not None:
        write_csv(rows, cfg.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
