"""Command-line interface: llr, decide, verify, simulate, lr-distribution.

Structured results go to stdout as JSON (or CSV files for curves); every run
echoes its fully resolved configuration so outputs are regenerable. Config
precedence is flags > config file > built-in defaults.

Exit codes: 0 success, 2 input parsing, 3 validation or precondition,
4 output I/O, 5 verification tolerance breach.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conjugate import NONINFORMATIVE_WEIGHT, NormalGammaParams
from .errors import ScoreFileError, ValidationError
from .experiment import (
    DEFAULT_PRIOR_GRID,
    ExperimentConfig,
    GeneratorConfig,
    confidence_curve,
    run_experiment,
)
from .lr import (
    DecisionPolicy,
    TrialPrior,
    bayes_log_lr,
    decide,
    lr_distribution_demo,
    plugin_log_lr,
    posterior_log_odds,
)
from .scores import DEFAULT_VARIANCE_FLOOR, fit_plugin, load_background_csv
from .verification import QuadratureSpec, run_verification_suite

_LOG10 = math.log(10.0)

_PRIOR_DEFAULTS = {
    "mu0": 0.0,
    "beta": NONINFORMATIVE_WEIGHT,
    "a": NONINFORMATIVE_WEIGHT,
    "b": NONINFORMATIVE_WEIGHT,
}

_GENERATOR_DEFAULTS = {
    "mu1_true": 2.0,
    "mu2_true": -2.0,
    "sigma1_true": 1.0,
    "sigma2_true": 1.0,
    "shift_location": 0.0,
    "shift_scale": 1.0,
}

_EXPERIMENT_DEFAULTS = {
    "n1": 9,
    "n2": 27,
    "trials": 1000,
    "n_test_per_class": 10000,
    "seed": 0,
    "prior_grid": [float(g) for g in DEFAULT_PRIOR_GRID],
}

_CONFIDENCE_DEFAULTS = {
    "sizes": [[9, 27], [30, 405], [300, 4050]],
    "trials": 200,
    "n_test_per_class": 2000,
    "seed": 1,
}


def _print_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScoreFileError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config file must hold a JSON object")
    return cfg


def _merge(defaults: dict, *layers: dict) -> dict:
    out = dict(defaults)
    for layer in layers:
        out.update({k: v for k, v in layer.items() if v is not None})
    return out


def _resolve_prior(args, file_cfg: dict) -> dict:
    flags = {k: getattr(args, k) for k in ("mu0", "beta", "a", "b")}
    return _merge(_PRIOR_DEFAULTS, file_cfg.get("prior", {}), flags)


def _resolve_variance_floor(args, file_cfg: dict) -> float:
    if args.variance_floor is not None:
        return args.variance_floor
    return float(file_cfg.get("variance_floor", DEFAULT_VARIANCE_FLOOR))


def _prior_from(resolved: dict) -> NormalGammaParams:
    return NormalGammaParams(
        float(resolved["mu0"]), float(resolved["beta"]), float(resolved["a"]), float(resolved["b"])
    )


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu0", type=float, default=None, help="prior location")
    p.add_argument("--beta", type=float, default=None, help="prior location-precision scaling")
    p.add_argument("--a", type=float, default=None, help="prior gamma shape")
    p.add_argument("--b", type=float, default=None, help="prior gamma rate")
    p.add_argument("--variance-floor", type=float, default=None, help="plugin ML variance floor")
    p.add_argument("--config", default=None, help="JSON config file")


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen-mu1", type=float, default=None, help="true H1 score mean")
    p.add_argument("--gen-mu2", type=float, default=None, help="true H2 score mean")
    p.add_argument("--gen-sigma1", type=float, default=None, help="true H1 score std")
    p.add_argument("--gen-sigma2", type=float, default=None, help="true H2 score std")
    p.add_argument("--shift-location", type=float, default=None, help="test-set shift offset")
    p.add_argument("--shift-scale", type=float, default=None, help="test-set shift scale")


def _resolve_generator(args, file_cfg: dict) -> dict:
    flags = {
        "mu1_true": args.gen_mu1,
        "mu2_true": args.gen_mu2,
        "sigma1_true": args.gen_sigma1,
        "sigma2_true": args.gen_sigma2,
        "shift_location": args.shift_location,
        "shift_scale": args.shift_scale,
    }
    return _merge(_GENERATOR_DEFAULTS, file_cfg.get("generator", {}), flags)


def cmd_llr(args) -> int:
    file_cfg = _load_config(args.config)
    prior_cfg = _resolve_prior(args, file_cfg)
    floor = _resolve_variance_floor(args, file_cfg)
    data = load_background_csv(args.background)
    payload: dict = {
        "score": float(args.score),
        "method": args.method,
        "n1": data.n1,
        "n2": data.n2,
        "prior": prior_cfg,
        "variance_floor": floor,
    }
    if args.method in ("plugin", "both"):
        llr_p = plugin_log_lr(args.score, fit_plugin(data, floor))
        payload["log_lr_plugin"] = llr_p.value
        payload["log10_lr_plugin"] = llr_p.log10
    if args.method in ("bayes", "both"):
        llr_b = bayes_log_lr(args.score, data, _prior_from(prior_cfg))
        payload["log_lr_bayes"] = llr_b.value
        payload["log10_lr_bayes"] = llr_b.log10
    _print_json(payload)
    return 0


def cmd_decide(args) -> int:
    file_cfg = _load_config(args.config)
    prior_cfg = _resolve_prior(args, file_cfg)
    floor = _resolve_variance_floor(args, file_cfg)
    trial_prior = TrialPrior(args.pi1)
    policy = DecisionPolicy(args.cost_false_convict, args.cost_false_acquit)
    data = load_background_csv(args.background)
    if args.method == "plugin":
        llr = plugin_log_lr(args.score, fit_plugin(data, floor))
    else:
        llr = bayes_log_lr(args.score, data, _prior_from(prior_cfg))
    post = posterior_log_odds(llr, trial_prior)
    verdict = decide(post, policy)
    _print_json(
        {
            "score": float(args.score),
            "method": args.method,
            "pi1": trial_prior.pi1,
            "cost_false_convict": policy.cost_false_convict,
            "cost_false_acquit": policy.cost_false_acquit,
            "prior": prior_cfg,
            "variance_floor": floor,
            "log_lr": llr.value,
            "log10_lr": llr.log10,
            "posterior_log_odds": post,
            "threshold_log": policy.log_threshold,
            "decision": verdict.value,
        }
    )
    return 0


def cmd_verify(args) -> int:
    spec = QuadratureSpec(
        mu_halfwidth_sds=args.mu_halfwidth,
        lambda_quantile_eps=args.lambda_quantile_eps,
        grid_mu=args.grid_mu,
        grid_lambda=args.grid_lambda,
    )
    report = run_verification_suite(
        seed=args.seed,
        n_posteriors=args.posteriors,
        n_e=args.e_points,
        n_joint_cases=args.joint_cases,
        n_theta_samples=args.theta_samples,
        n_theta_datasets=args.theta_datasets,
        n_pitfall_trials=args.pitfall_trials,
        spec=spec,
    )
    payload = report.to_dict()
    _print_json(payload)
    if args.report is not None:
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.ok else 5


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_simulate(args) -> int:
    file_cfg = _load_config(args.config)
    prior_cfg = _resolve_prior(args, file_cfg)
    floor = _resolve_variance_floor(args, file_cfg)
    gen_cfg = _resolve_generator(args, file_cfg)
    exp_cfg = _merge(
        _EXPERIMENT_DEFAULTS,
        file_cfg.get("experiment", {}),
        {"n1": args.n1, "n2": args.n2, "trials": args.trials,
         "n_test_per_class": args.n_test, "seed": args.seed},
    )
    conf_cfg = _merge(_CONFIDENCE_DEFAULTS, file_cfg.get("confidence", {}))

    gen = GeneratorConfig(**{k: float(v) for k, v in gen_cfg.items()})
    exp = ExperimentConfig(
        n1=int(exp_cfg["n1"]),
        n2=int(exp_cfg["n2"]),
        trials=int(exp_cfg["trials"]),
        prior_grid=tuple(float(g) for g in exp_cfg["prior_grid"]),
        n_test_per_class=int(exp_cfg["n_test_per_class"]),
        seed=int(exp_cfg["seed"]),
    )
    prior = _prior_from(prior_cfg)

    curve = run_experiment(gen, exp, prior, floor)
    points = confidence_curve(
        gen,
        [(int(n1), int(n2)) for n1, n2 in conf_cfg["sizes"]],
        trials=int(conf_cfg["trials"]),
        seed=int(conf_cfg["seed"]),
        n_test_per_class=int(conf_cfg["n_test_per_class"]),
        prior=prior,
        variance_floor=floor,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "curve.csv",
        ["prior_log_odds", "prior_log10_odds", "error_plugin", "error_bayes",
         "error_prior_only", "stderr_plugin", "stderr_bayes"],
        (
            [repr(float(plo)), repr(float(plo) / _LOG10), repr(float(ep)), repr(float(eb)),
             repr(float(e0)), repr(float(sp)), repr(float(sb))]
            for plo, ep, eb, e0, sp, sb in zip(
                curve.prior_log_odds, curve.error_plugin, curve.error_bayes,
                curve.error_prior_only, curve.stderr_plugin, curve.stderr_bayes,
            )
        ),
    )
    _write_csv(
        out_dir / "confidence.csv",
        ["n1", "n2", "method", "hypothesis", "mean_log_lr", "mean_log10_lr", "stderr"],
        (
            [p.n1, p.n2, p.method.value, p.hypothesis.value,
             repr(p.mean_log_lr), repr(p.mean_log_lr / _LOG10), repr(p.stderr)]
            for p in points
        ),
    )
    meta = {
        "version": __version__,
        "generator": gen_cfg,
        "experiment": exp_cfg,
        "confidence": conf_cfg,
        "prior": prior_cfg,
        "variance_floor": floor,
        "trials_used": curve.trials_used,
        "degenerate_trials": curve.degenerate_trials,
    }
    with open(out_dir / "run_meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_lr_distribution(args) -> int:
    file_cfg = _load_config(args.config)
    prior_cfg = _resolve_prior(args, file_cfg)
    floor = _resolve_variance_floor(args, file_cfg)
    gen_cfg = _resolve_generator(args, file_cfg)
    world = GeneratorConfig(**{k: float(v) for k, v in gen_cfg.items()})
    report = lr_distribution_demo(
        e=args.score,
        world=world,
        n1=args.n1,
        n2=args.n2,
        trials=args.trials,
        seed=args.seed,
        prior=_prior_from(prior_cfg),
        variance_floor=floor,
    )
    bayes_vals = [float(v) for v in report.bayes_log_lr_per_trial]
    _print_json(
        {
            "score": float(args.score),
            "generator": gen_cfg,
            "prior": prior_cfg,
            "variance_floor": floor,
            "n1": args.n1,
            "n2": args.n2,
            "trials": args.trials,
            "seed": args.seed,
            "mu": report.mu,
            "sigma": report.sigma,
            "mean_bayes_log_lr": float(np.mean(bayes_vals)),
            "bayes_log_lr_per_trial": bayes_vals,
        }
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayescal",
        description="Likelihood-ratio calibration for recognizer scores: "
        "plugin and fully Bayesian, with decisions, verification and simulation.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("llr", help="log likelihood-ratio(s) for one score")
    p.add_argument("--background", required=True, help="CSV of labeled scores")
    p.add_argument("--score", type=float, required=True, help="trial score")
    p.add_argument("--method", choices=["plugin", "bayes", "both"], default="both")
    _add_prior_flags(p)
    p.set_defaults(func=cmd_llr)

    p = sub.add_parser("decide", help="posterior-odds Bayes decision for one score")
    p.add_argument("--background", required=True)
    p.add_argument("--score", type=float, required=True)
    p.add_argument("--method", choices=["plugin", "bayes"], default="bayes")
    p.add_argument("--pi1", type=float, required=True, help="prior P(H1), in (0,1)")
    p.add_argument("--cost-false-convict", type=float, default=1.0)
    p.add_argument("--cost-false-acquit", type=float, default=1.0)
    _add_prior_flags(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("verify", help="run the quadrature oracle suite")
    p.add_argument("--report", default=None, help="write the JSON report here too")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--posteriors", type=int, default=50)
    p.add_argument("--e-points", type=int, default=17)
    p.add_argument("--joint-cases", type=int, default=20)
    p.add_argument("--theta-samples", type=int, default=10_000)
    p.add_argument("--theta-datasets", type=int, default=5)
    p.add_argument("--pitfall-trials", type=int, default=200)
    p.add_argument("--mu-halfwidth", type=float, default=12.0)
    p.add_argument("--lambda-quantile-eps", type=float, default=1e-8)
    p.add_argument("--grid-mu", type=int, default=2001)
    p.add_argument("--grid-lambda", type=int, default=2001)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="error-rate and confidence experiments")
    p.add_argument("--out-dir", required=True, help="directory for curve.csv etc.")
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--n-test", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_generator_flags(p)
    _add_prior_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "lr-distribution",
        help="plugin log-LR spread over resampled backgrounds vs Bayesian log-LR",
    )
    p.add_argument("--score", type=float, required=True)
    p.add_argument("--n1", type=int, default=9)
    p.add_argument("--n2", type=int, default=27)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_generator_flags(p)
    _add_prior_flags(p)
    p.set_defaults(func=cmd_lr_distribution)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except ScoreFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
