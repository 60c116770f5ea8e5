"""Run configuration: JSON config files plus command-line overrides.

A run is described by one JSON document: the categorical schema, exactly
one input source (a cohort CSV or a synthetic-data recipe), optional
estimator and evaluation settings, and per-analysis options. Flags given
on the command line override the corresponding config values.

Seeding: an explicit --seed sets the evaluation master seed directly and
re-seeds the synthetic generator with a derived child seed, so data
generation and replicate sampling never share a stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .boosting import GradientBoostingClassifier, GradientBoostingRegressor
from .data import (
    DEFAULT_OUTCOME_LABELS,
    DEFAULT_TREATMENT_LABELS,
    CategoricalSchema,
    Cohort,
    Variable,
    load_csv,
)
from .errors import ConfigError
from .evaluation import EvalConfig
from .sampling import mix_seed
from .synthesis import Rule, SyntheticSpec, generate_cohort

_TOP_LEVEL_KEYS = {
    "schema",
    "input",
    "gbt",
    "evaluation",
    "segments",
    "ols",
    "importance",
    "output_dir",
    "plots",
    "outcome_labels",
    "treatment_labels",
}

_GBT_KEYS = {
    "n_estimators",
    "learning_rate",
    "max_depth",
    "min_samples_split",
    "min_samples_leaf",
    "subsample",
}

_EVAL_KEYS = {
    "n_replicates",
    "population_size",
    "train_fraction",
    "n_quantiles",
    "ci_level",
    "master_seed",
}

_SYNTHESIS_KEYS = {
    "n_rows",
    "seed",
    "base_rate",
    "treatment_probability",
    "base_adjustments",
    "effect_rules",
    "category_probabilities",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, fully validated."""

    schema: CategoricalSchema
    input_csv: Path | None
    synthesis: SyntheticSpec | None
    n_synthesis_rows: int | None
    gbt_params: dict
    evaluation: EvalConfig
    segment_variables: tuple[str, ...]
    segment_fraction: float
    targeting_threshold: float | None
    ols_variables: tuple[str, ...]
    renormalize_importance: bool
    output_dir: Path
    emit_plots: bool
    outcome_labels: dict
    treatment_labels: dict

    def __post_init__(self):
        if (self.input_csv is None) == (self.synthesis is None):
            raise ConfigError(
                "exactly one input source is required: input.csv or input.synthesis"
            )
        for name in (*self.segment_variables, *self.ols_variables):
            if name not in self.schema.variable_names:
                raise ConfigError(f"config references unknown variable {name!r}")
        if not 0.0 < self.segment_fraction <= 0.5:
            raise ConfigError("segments.fraction must be in (0, 0.5]")

    def base_classifier(self) -> GradientBoostingClassifier:
        return GradientBoostingClassifier(**self.gbt_params)

    def base_regressor(self) -> GradientBoostingRegressor:
        return GradientBoostingRegressor(**self.gbt_params)

    def load_cohort(self) -> Cohort:
        if self.input_csv is not None:
            return load_csv(
                self.input_csv,
                self.schema,
                outcome_labels=self.outcome_labels,
                treatment_labels=self.treatment_labels,
            )
        return generate_cohort(self.synthesis, self.n_synthesis_rows)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing {context} key {key!r}")
    return mapping[key]


def _check_keys(mapping: dict, allowed: set, context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown {context} key(s): {', '.join(sorted(unknown))}"
        )


def _parse_schema(raw) -> CategoricalSchema:
    if not isinstance(raw, dict):
        raise ConfigError("schema must be an object")
    _check_keys(raw, {"variables", "treatment_column", "outcome_column"}, "schema")
    raw_vars = _require(raw, "variables", "schema")
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ConfigError("schema.variables must be a non-empty list")
    variables = []
    for item in raw_vars:
        if not isinstance(item, dict):
            raise ConfigError("each schema variable must be an object")
        _check_keys(item, {"name", "categories"}, "schema variable")
        name = _require(item, "name", "schema variable")
        categories = _require(item, "categories", "schema variable")
        if not isinstance(categories, list) or not all(
            isinstance(c, str) for c in categories
        ):
            raise ConfigError(f"categories of {name!r} must be a list of strings")
        variables.append(Variable(name=str(name), categories=tuple(categories)))
    return CategoricalSchema(
        variables=tuple(variables),
        treatment_column=str(raw.get("treatment_column", "treatment")),
        outcome_column=str(raw.get("outcome_column", "outcome")),
    )


def _parse_rules(raw, context: str) -> tuple[Rule, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ConfigError(f"{context} must be a list")
    rules = []
    for item in raw:
        if not isinstance(item, dict):
            raise ConfigError(f"each {context} entry must be an object")
        _check_keys(item, {"where", "effect"}, context)
        where = item.get("where", {})
        if not isinstance(where, dict):
            raise ConfigError(f"{context} 'where' must be an object")
        effect = _require(item, "effect", context)
        rules.append(
            Rule(
                where=tuple((str(k), str(v)) for k, v in where.items()),
                effect=float(effect),
            )
        )
    return tuple(rules)


def _parse_synthesis(raw, schema: CategoricalSchema) -> tuple[SyntheticSpec, int]:
    if not isinstance(raw, dict):
        raise ConfigError("input.synthesis must be an object")
    _check_keys(raw, _SYNTHESIS_KEYS, "input.synthesis")
    n_rows = int(_require(raw, "n_rows", "input.synthesis"))
    category_probabilities = raw.get("category_probabilities")
    if category_probabilities is not None:
        if not isinstance(category_probabilities, dict):
            raise ConfigError("category_probabilities must be an object")
        category_probabilities = {
            str(name): tuple(float(p) for p in probs)
            for name, probs in category_probabilities.items()
        }
    spec = SyntheticSpec(
        schema=schema,
        base_rate=float(raw.get("base_rate", 0.5)),
        base_adjustments=_parse_rules(
            raw.get("base_adjustments"), "base_adjustments"
        ),
        effect_rules=_parse_rules(raw.get("effect_rules"), "effect_rules"),
        category_probabilities=category_probabilities,
        treatment_probability=float(raw.get("treatment_probability", 0.5)),
        seed=int(raw.get("seed", 0)),
    )
    return spec, n_rows


def _parse_labels(raw, default, context: str) -> dict:
    if raw is None:
        return dict(default)
    if not isinstance(raw, dict):
        raise ConfigError(f"{context} must be an object")
    out = {}
    for key, value in raw.items():
        if value not in (0, 1):
            raise ConfigError(f"{context}[{key!r}] must map to 0 or 1")
        out[str(key)] = int(value)
    return out


def parse_config(raw: dict, base_dir: Path) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig.

    Relative paths are resolved against the config file's directory.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _check_keys(raw, _TOP_LEVEL_KEYS, "config")
    schema = _parse_schema(_require(raw, "schema", "config"))

    input_block = _require(raw, "input", "config")
    if not isinstance(input_block, dict):
        raise ConfigError("input must be an object")
    _check_keys(input_block, {"csv", "synthesis"}, "input")
    input_csv = None
    synthesis = None
    n_synthesis_rows = None
    if "csv" in input_block and "synthesis" in input_block:
        raise ConfigError("input must name exactly one of csv or synthesis")
    if "csv" in input_block:
        input_csv = Path(input_block["csv"])
        if not input_csv.is_absolute():
            input_csv = base_dir / input_csv
    elif "synthesis" in input_block:
        synthesis, n_synthesis_rows = _parse_synthesis(
            input_block["synthesis"], schema
        )
    else:
        raise ConfigError("input must name one of csv or synthesis")

    gbt_raw = raw.get("gbt", {})
    if not isinstance(gbt_raw, dict):
        raise ConfigError("gbt must be an object")
    _check_keys(gbt_raw, _GBT_KEYS, "gbt")
    gbt_params = dict(gbt_raw)
    try:
        GradientBoostingClassifier(**gbt_params)._validate_hyperparameters()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid gbt settings: {exc}") from None

    eval_raw = raw.get("evaluation", {})
    if not isinstance(eval_raw, dict):
        raise ConfigError("evaluation must be an object")
    _check_keys(eval_raw, _EVAL_KEYS, "evaluation")
    eval_kwargs = {}
    for key in ("n_replicates", "population_size", "n_quantiles", "master_seed"):
        if key in eval_raw:
            eval_kwargs[key] = int(eval_raw[key])
    for key in ("train_fraction", "ci_level"):
        if key in eval_raw:
            eval_kwargs[key] = float(eval_raw[key])
    evaluation = EvalConfig(**eval_kwargs)

    segments_raw = raw.get("segments", {})
    if not isinstance(segments_raw, dict):
        raise ConfigError("segments must be an object")
    _check_keys(segments_raw, {"variables", "fraction", "threshold"}, "segments")
    segment_variables = tuple(
        str(v) for v in segments_raw.get("variables", [])
    )
    segment_fraction = float(segments_raw.get("fraction", 0.1))
    threshold = segments_raw.get("threshold")
    targeting_threshold = None if threshold is None else float(threshold)

    ols_raw = raw.get("ols", {})
    if not isinstance(ols_raw, dict):
        raise ConfigError("ols must be an object")
    _check_keys(ols_raw, {"variables"}, "ols")
    ols_variables = tuple(str(v) for v in ols_raw.get("variables", []))

    importance_raw = raw.get("importance", {})
    if not isinstance(importance_raw, dict):
        raise ConfigError("importance must be an object")
    _check_keys(importance_raw, {"renormalize"}, "importance")
    renormalize = bool(importance_raw.get("renormalize", False))

    output_dir = Path(raw.get("output_dir", "reports"))
    if not output_dir.is_absolute():
        output_dir = base_dir / output_dir

    return RunConfig(
        schema=schema,
        input_csv=input_csv,
        synthesis=synthesis,
        n_synthesis_rows=n_synthesis_rows,
        gbt_params=gbt_params,
        evaluation=evaluation,
        segment_variables=segment_variables,
        segment_fraction=segment_fraction,
        targeting_threshold=targeting_threshold,
        ols_variables=ols_variables,
        renormalize_importance=renormalize,
        output_dir=output_dir,
        emit_plots=bool(raw.get("plots", False)),
        outcome_labels=_parse_labels(
            raw.get("outcome_labels"), DEFAULT_OUTCOME_LABELS, "outcome_labels"
        ),
        treatment_labels=_parse_labels(
            raw.get("treatment_labels"), DEFAULT_TREATMENT_LABELS, "treatment_labels"
        ),
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return parse_config(raw, path.parent.resolve())


def apply_seed_override(config: RunConfig, seed: int) -> RunConfig:
    """Re-seed a run: master seed directly, synthesis via a child seed."""
    evaluation = replace(config.evaluation, master_seed=int(seed))
    synthesis = config.synthesis
    if synthesis is not None:
        synthesis = replace(synthesis, seed=mix_seed(int(seed), 0))
    return replace(config, evaluation=evaluation, synthesis=synthesis)
