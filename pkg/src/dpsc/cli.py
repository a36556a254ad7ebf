"""Command-line harness: sweep execution, single runs, bound curves, data emission.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bounds import (
    BoundInputs,
    privacy_cost_output,
    rmse_bound_nonprivate,
    rmse_bound_objective,
    rmse_bound_objective_closed_form,
    rmse_bound_output,
    rmse_bound_output_closed_form,
)
from .datagen import generate_linear_panel_detailed
from .harness import ConfigError, SweepConfig, write_sweep
from .mechanisms import DpscObjConfig, DpscOutConfig, dpsc_obj, dpsc_out
from .model import (
    DataError,
    LatentModelSpec,
    dataset_to_csv,
    panel_to_json,
    rmse_post,
    target_to_json,
    validate_bounds,
)
from .ridge import sc_fit_predict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_model_args(parser: argparse.ArgumentParser):
    parser.add_argument("--theta-mean", type=float, default=4.0)
    parser.add_argument("--theta-var", type=float, default=1.0)
    parser.add_argument("--theta-lo", type=float, default=3.0)
    parser.add_argument("--theta-hi", type=float, default=5.0)
    parser.add_argument("--noise-var", type=float, default=0.1)
    parser.add_argument("--noise-support", type=float, default=1.0)


def _model_from_args(args) -> LatentModelSpec:
    return LatentModelSpec(
        theta_mean=args.theta_mean,
        theta_var=args.theta_var,
        theta_lo=args.theta_lo,
        theta_hi=args.theta_hi,
        noise_var=args.noise_var,
        noise_support=args.noise_support,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpsc",
        description="Differentially private synthetic control harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a grid sweep from a JSON config")
    p_sweep.add_argument("--config", required=True, help="path to the JSON sweep config")

    p_run = sub.add_parser("run", help="run one algorithm once on generated data")
    p_run.add_argument("--algo", required=True, choices=["nonprivate", "out", "obj"])
    p_run.add_argument("--n", type=int, required=True)
    p_run.add_argument("--t0", type=int, required=True)
    p_run.add_argument("--horizon", type=int, default=3)
    p_run.add_argument("--lambda", dest="lam", type=float, required=True)
    p_run.add_argument("--eps", type=float, default=None,
                       help="total privacy budget, split evenly between steps")
    p_run.add_argument("--delta", type=float, default=0.0)
    p_run.add_argument("--c", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    _add_model_args(p_run)

    p_bounds = sub.add_parser("bounds", help="evaluate the theoretical RMSE bounds")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--t0", type=int, required=True)
    p_bounds.add_argument("--T", type=int, required=True)
    p_bounds.add_argument("--lambda", dest="lam", type=float, required=True)
    p_bounds.add_argument("--eps1", type=float, required=True)
    p_bounds.add_argument("--eps2", type=float, required=True)
    p_bounds.add_argument("--delta", type=float, default=0.0)
    p_bounds.add_argument("--sigma2", type=float, default=0.1)
    p_bounds.add_argument("--s", type=float, default=1.0)
    p_bounds.add_argument("--psi", type=float, default=1.0)
    p_bounds.add_argument("--xi", type=float, default=0.5)
    p_bounds.add_argument("--t-conf", type=float, default=1.0)
    p_bounds.add_argument("--k", type=int, default=1)
    p_bounds.add_argument("--m-post-norm", type=float, default=None)
    p_bounds.add_argument("--f-gap", type=float, default=None)
    p_bounds.add_argument("--c", type=float, default=None)

    p_gen = sub.add_parser("gen", help="emit a synthetic dataset")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--t0", type=int, required=True)
    p_gen.add_argument("--T", type=int, default=None, help="defaults to t0 + 3")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="JSON dataset path")
    p_gen.add_argument("--csv", default=None,
                       help="optional CSV path (donor rows plus a target row)")
    _add_model_args(p_gen)
    return parser


def _cmd_sweep(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        print(f"dpsc: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"dpsc: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    config = SweepConfig.from_dict(doc)
    records_path, agg_path = write_sweep(config)
    print(f"wrote {records_path} and {agg_path}")
    return EXIT_OK


def _cmd_run(args) -> int:
    T = args.t0 + args.horizon
    data = generate_linear_panel_detailed(
        args.n, args.t0, T, _model_from_args(args), seed=np.random.SeedSequence(
            entropy=args.seed, spawn_key=(0, 0))
    )
    panel, target = data.panel, data.target
    m_post = target.truth.m[args.t0:]
    report = validate_bounds(panel, target)
    out = {
        "algorithm": args.algo,
        "n": args.n,
        "t0": args.t0,
        "T": T,
        "lambda": args.lam,
        "seed": args.seed,
        "bounded": report.bounded,
    }
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=args.seed, spawn_key=(2, 0, 0)))
    if args.algo == "nonprivate":
        fit, prediction = sc_fit_predict(panel, target, args.lam)
        coeffs = fit.coeffs
    else:
        if args.eps is None:
            raise ConfigError("--eps is required for private algorithms")
        eps1 = eps2 = args.eps / 2.0
        out.update({"eps1": eps1, "eps2": eps2})
        if args.algo == "out":
            result = dpsc_out(panel, target,
                              DpscOutConfig(lam=args.lam, eps1=eps1, eps2=eps2,
                                            release_coeffs=True), rng)
        else:
            result = dpsc_obj(
                panel, target,
                DpscObjConfig(lam=args.lam, eps1=eps1, eps2=eps2,
                              delta=args.delta, c=args.c), rng)
            out.update({
                "delta": args.delta,
                "eps0": result.meta.eps0,
                "delta_reg": result.meta.delta_reg,
                "c": result.meta.c,
            })
        prediction = result.prediction
        coeffs = result.fit.coeffs
    out["prediction"] = list(prediction)
    out["rmse_post"] = rmse_post(prediction, m_post)
    X_pre = panel.values[:, : args.t0]
    out["rmse_pre"] = rmse_post(X_pre.T @ coeffs, target.truth.m[: args.t0])
    print(json.dumps(out))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    inp = BoundInputs(
        n=args.n, t0=args.t0, T=args.T, lam=args.lam, eps1=args.eps1,
        eps2=args.eps2, delta=args.delta, sigma2=args.sigma2, s=args.s,
        psi=args.psi, m_post_norm=args.m_post_norm, f_gap=args.f_gap,
        xi=args.xi, t_conf=args.t_conf, k=args.k, c=args.c,
    )
    out_cf, out_ok = rmse_bound_output_closed_form(inp)
    obj_cf, obj_ok = rmse_bound_objective_closed_form(inp)
    cost, regime_ok = privacy_cost_output(args.n, args.eps1 + args.eps2,
                                          args.sigma2, args.psi)
    doc = {
        "nonprivate": rmse_bound_nonprivate(inp),
        "output": rmse_bound_output(inp),
        "output_closed_form": {"value": out_cf, "sample_size_ok": out_ok},
        "objective": rmse_bound_objective(inp),
        "objective_closed_form": {"value": obj_cf, "sample_size_ok": obj_ok},
        "privacy_cost_output": {"value": cost, "regime_ok": regime_ok},
    }
    print(json.dumps(doc))
    return EXIT_OK


def _cmd_gen(args) -> int:
    T = args.T if args.T is not None else args.t0 + 3
    data = generate_linear_panel_detailed(
        args.n, args.t0, T, _model_from_args(args), seed=args.seed)
    doc = {
        "panel": json.loads(panel_to_json(data.panel)),
        "target": json.loads(target_to_json(data.target)),
        "params": {
            "seed": args.seed,
            "theta": data.theta.tolist(),
            "theta0": data.theta0,
            "theta_mean": data.spec.theta_mean,
            "theta_var": data.spec.theta_var,
            "theta_lo": data.spec.theta_lo,
            "theta_hi": data.spec.theta_hi,
            "noise_var": data.spec.noise_var,
            "noise_support": data.spec.noise_support,
        },
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(dataset_to_csv(data.panel, data.target))
    print(f"wrote {args.out}" + (f" and {args.csv}" if args.csv else ""))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "run": _cmd_run,
        "bounds": _cmd_bounds,
        "gen": _cmd_gen,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, DataError, ValueError) as exc:
        print(f"dpsc: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dpsc: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
