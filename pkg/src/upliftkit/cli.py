"""Command-line pipeline: evaluate | importance | segments | ols | synth.

Each command reads one JSON config (see the config module), applies flag
overrides, runs the corresponding analysis, and writes CSV/JSON (and
optionally SVG) reports into the output directory. All commands are
deterministic given (config, seed): repeated runs produce byte-identical
data files.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import RunConfig, apply_seed_override, load_config
from .data import save_csv
from .encoding import encode_codes
from .errors import ConfigError, DataError, NumericalError, UpliftKitError
from .evaluation import run_bootstrap_analyses, build_quantile_report, finalize_segment_reports
from .importance import build_importance_report
from .plots import (
    render_group_cate_plot,
    render_importance_plot,
    render_quantile_plot,
    render_segment_plot,
)
from .sampling import mix_seed
from .segments import group_cate_table, targeting_policy
from .serialize import (
    write_group_cate_table,
    write_importance_report,
    write_json,
    write_ols_summary,
    write_quantile_report,
    write_segment_report,
)
from .ols import fit_interaction_ols
from .tlearner import TLearner


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--out", help="override the output directory")


def _add_eval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        help="worker processes for replicates (default: all cores)",
    )
    parser.add_argument("--replicates", type=int, help="bootstrap replicate count")
    parser.add_argument(
        "--train-fraction", type=float, help="train share of each replicate"
    )
    parser.add_argument(
        "--plots", action="store_true", help="also write SVG charts"
    )


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="upliftkit",
        description="Estimate and validate heterogeneous treatment effects "
        "from randomized-experiment data.",
    )
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="decile-uplift validation report")
    _add_common_flags(p)
    _add_eval_flags(p)
    p.add_argument("--quantiles", type=int, help="number of quantile bins")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("importance", help="meta-model variable importances")
    _add_common_flags(p)
    _add_eval_flags(p)
    p.set_defaults(handler=cmd_importance)

    p = sub.add_parser("segments", help="extreme-segment profiles and group tables")
    _add_common_flags(p)
    _add_eval_flags(p)
    p.add_argument(
        "--variable",
        action="append",
        help="variable to profile (repeatable; default: config segments.variables)",
    )
    p.add_argument(
        "--fraction", type=float, help="extreme-segment fraction (default 0.1)"
    )
    p.add_argument(
        "--threshold",
        type=float,
        help="targeting threshold on the predicted effect",
    )
    p.set_defaults(handler=cmd_segments)

    p = sub.add_parser("ols", help="interaction OLS summary tables")
    _add_common_flags(p)
    p.add_argument(
        "--variable",
        action="append",
        help="variable to interact with the condition (repeatable)",
    )
    p.set_defaults(handler=cmd_ols)

    p = sub.add_parser("synth", help="write a synthetic cohort CSV")
    _add_common_flags(p)
    p.set_defaults(handler=cmd_synth)

    return root


def _prepare(args) -> RunConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = apply_seed_override(config, args.seed)
    evaluation = config.evaluation
    if getattr(args, "replicates", None) is not None:
        evaluation = replace(evaluation, n_replicates=args.replicates)
    if getattr(args, "quantiles", None) is not None:
        evaluation = replace(evaluation, n_quantiles=args.quantiles)
    if getattr(args, "train_fraction", None) is not None:
        evaluation = replace(evaluation, train_fraction=args.train_fraction)
    if evaluation is not config.evaluation:
        config = replace(config, evaluation=evaluation)
    if args.out is not None:
        config = replace(config, output_dir=Path(args.out))
    if getattr(args, "plots", False):
        config = replace(config, emit_plots=True)
    return config


def _out_dir(config: RunConfig) -> Path:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config.output_dir


def cmd_evaluate(args) -> int:
    config = _prepare(args)
    cohort = config.load_cohort()
    results = run_bootstrap_analyses(
        cohort,
        config.evaluation,
        base_classifier=config.base_classifier(),
        collect_uplift=True,
        n_jobs=args.threads,
    )
    report = build_quantile_report(results)
    out = _out_dir(config)
    write_quantile_report(report, out)
    if config.emit_plots:
        (out / "quantile_uplift.svg").write_text(
            render_quantile_plot(report), encoding="utf-8"
        )
    print(f"wrote quantile uplift report to {out}")
    return 0


def cmd_importance(args) -> int:
    config = _prepare(args)
    cohort = config.load_cohort()
    results = run_bootstrap_analyses(
        cohort,
        config.evaluation,
        base_classifier=config.base_classifier(),
        base_regressor=config.base_regressor(),
        collect_uplift=False,
        collect_meta=True,
        n_jobs=args.threads,
    )
    report = build_importance_report(
        cohort.schema, results, renormalize=config.renormalize_importance
    )
    out = _out_dir(config)
    write_importance_report(report, out)
    if config.emit_plots:
        (out / "importance.svg").write_text(
            render_importance_plot(report), encoding="utf-8"
        )
    print(f"wrote importance report to {out}")
    return 0


def cmd_segments(args) -> int:
    config = _prepare(args)
    variables = tuple(args.variable) if args.variable else config.segment_variables
    if not variables:
        raise ConfigError(
            "no segment variables: pass --variable or set segments.variables"
        )
    for name in variables:
        if name not in config.schema.variable_names:
            raise ConfigError(f"unknown variable {name!r}")
    fraction = args.fraction if args.fraction is not None else config.segment_fraction
    threshold = (
        args.threshold if args.threshold is not None else config.targeting_threshold
    )
    cohort = config.load_cohort()
    results = run_bootstrap_analyses(
        cohort,
        config.evaluation,
        base_classifier=config.base_classifier(),
        collect_uplift=False,
        segment_variables=variables,
        segment_fraction=fraction,
        n_jobs=args.threads,
    )
    reports = finalize_segment_reports(cohort, results)
    out = _out_dir(config)
    for name in variables:
        write_segment_report(reports[name], out)
        table = group_cate_table(cohort, name)
        write_group_cate_table(table, out)
        if config.emit_plots:
            (out / f"segments_{name}.svg").write_text(
                render_segment_plot(reports[name]), encoding="utf-8"
            )
            (out / f"group_cate_{name}.svg").write_text(
                render_group_cate_plot(table), encoding="utf-8"
            )

    if threshold is not None:
        learner = TLearner(
            base_classifier=config.base_classifier(),
            random_state=mix_seed(config.evaluation.master_seed, -1),
        )
        x = encode_codes(cohort.schema, cohort.codes)
        learner.fit(x, cohort.treatment, cohort.outcome)
        tau_hat = learner.predict(x)
        selected = targeting_policy(tau_hat, threshold)
        excluded = cohort.n_rows - selected.shape[0]
        write_json(
            out / "targeting.json",
            {
                "threshold": threshold,
                "n_selected": int(selected.shape[0]),
                "n_excluded": int(excluded),
                "share_selected": selected.shape[0] / cohort.n_rows,
                "mean_predicted_effect_selected": (
                    float(tau_hat[selected].mean()) if selected.shape[0] else None
                ),
            },
        )
    print(f"wrote segment reports to {out}")
    return 0


def cmd_ols(args) -> int:
    config = _prepare(args)
    variables = tuple(args.variable) if args.variable else config.ols_variables
    if not variables:
        raise ConfigError("no variables: pass --variable or set ols.variables")
    for name in variables:
        if name not in config.schema.variable_names:
            raise ConfigError(f"unknown variable {name!r}")
    cohort = config.load_cohort()
    out = _out_dir(config)
    for name in variables:
        summary = fit_interaction_ols(cohort, name)
        write_ols_summary(summary, name, out)
    print(f"wrote OLS summaries to {out}")
    return 0


def cmd_synth(args) -> int:
    config = _prepare(args)
    if config.synthesis is None:
        raise ConfigError("synth requires an input.synthesis block")
    cohort = config.load_cohort()
    out = _out_dir(config)
    save_csv(cohort, out / "cohort.csv")
    print(f"wrote {cohort.n_rows} rows to {out / 'cohort.csv'}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except UpliftKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
