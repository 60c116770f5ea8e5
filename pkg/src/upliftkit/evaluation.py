"""Bootstrap decile-uplift validation.

The protocol: form many bootstrap populations from the input cohort, fit a
T-learner on an 80/20 split of each, sort the held-out rows into quantiles
of predicted effect, and compare the observed arm difference per quantile.
Means and empirical percentile intervals are taken across replicates.

A single replicate loop also serves the meta-importance and segment-profile
analyses so each replicate's T-learner is fitted exactly once.

Seeding scheme (splittable, parallel-safe): replicate r draws its sampling
generator from mix_seed(master_seed, r); within a replicate, sub-seed 1
seeds the T-learner (which derives per-arm seeds) and sub-seed 2 seeds the
meta-regressor.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np
from sklearn.base import clone

from .boosting import GradientBoostingRegressor
from .data import Cohort
from .encoding import encode_codes
from .errors import ConfigError, DataError, NumericalError
from .sampling import bootstrap_resample, estimator_seed, mix_seed, split_train_test
from .segments import (
    SEGMENT_BOTTOM,
    SEGMENT_TOP,
    SegmentProfile,
    extreme_deciles,
)
from .tlearner import TLearner, observed_uplift
from .validation import check_vector


@dataclass(frozen=True)
class EvalConfig:
    """Sizes and seeds for the bootstrap protocol."""

    n_replicates: int = 1000
    population_size: int = 1600
    train_fraction: float = 0.8
    n_quantiles: int = 10
    ci_level: float = 0.95
    master_seed: int = 0

    def __post_init__(self):
        if self.n_replicates < 1:
            raise ConfigError("n_replicates must be >= 1")
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.n_quantiles < 2:
            raise ConfigError("n_quantiles must be >= 2")
        if not 0.0 < self.ci_level < 1.0:
            raise ConfigError("ci_level must be in (0, 1)")


def assign_quantiles(tau_hat, n_quantiles: int) -> np.ndarray:
    """Quantile index (1..Q) per row, ascending in predicted effect.

    Rows are sorted by tau_hat with ties broken by original row index,
    then cut into Q contiguous bins whose sizes differ by at most one,
    larger bins first. Quantile 1 holds the most negative predictions.
    """
    if n_quantiles < 1:
        raise ConfigError("n_quantiles must be >= 1")
    tau_hat = check_vector(tau_hat, name="tau_hat")
    n = tau_hat.shape[0]
    if n < n_quantiles:
        raise DataError(f"cannot cut {n} rows into {n_quantiles} quantiles")
    order = np.argsort(tau_hat, kind="stable")
    out = np.empty(n, dtype=np.int64)
    base, remainder = divmod(n, n_quantiles)
    start = 0
    for q in range(1, n_quantiles + 1):
        size = base + (1 if q <= remainder else 0)
        out[order[start:start + size]] = q
        start += size
    return out


def percentile_ci(samples, level: float) -> tuple[float, float]:
    """Empirical two-sided interval via linear-interpolation percentiles."""
    if not 0.0 <= level < 1.0:
        raise ConfigError("ci level must be in [0, 1)")
    samples = check_vector(samples, name="samples")
    if samples.shape[0] == 0:
        raise DataError("cannot form a percentile interval from no samples")
    alpha = (1.0 - level) / 2.0
    low = float(np.quantile(samples, alpha))
    high = float(np.quantile(samples, 1.0 - alpha))
    return low, high


@dataclass(frozen=True)
class ReplicateOutcome:
    """Everything one replicate contributes to the aggregations."""

    index: int
    skipped: bool = False
    skip_reason: str | None = None
    # (Q,) observed uplift per quantile, NaN where a quantile is single-arm
    quantile_uplift: np.ndarray | None = None
    # (n_encoded_columns,) meta-regressor Gini importances
    meta_columns: np.ndarray | None = None
    meta_skipped: bool = False
    # variable name -> (segment label -> (k,) category proportions)
    profiles: dict | None = None
    segment_size: int = 0
    segments_skipped: bool = False


@dataclass(frozen=True)
class _ReplicateSpec:
    """Immutable work order shared by every replicate."""

    cohort: Cohort
    config: EvalConfig
    base_classifier: object
    base_regressor: object
    collect_uplift: bool
    collect_meta: bool
    segment_variables: tuple[str, ...]
    segment_fraction: float


def _run_replicate(spec: _ReplicateSpec, index: int) -> ReplicateOutcome:
    config = spec.config
    seed = mix_seed(config.master_seed, index)
    rng = np.random.default_rng(seed)

    sample = bootstrap_resample(spec.cohort, config.population_size, rng)
    try:
        train, test = split_train_test(sample, config.train_fraction, rng)
    except DataError as exc:
        return ReplicateOutcome(index=index, skipped=True, skip_reason=str(exc))

    schema = spec.cohort.schema
    learner = TLearner(
        base_classifier=spec.base_classifier, random_state=mix_seed(seed, 1)
    )
    x_train = encode_codes(schema, train.codes)
    try:
        learner.fit(x_train, train.treatment, train.outcome)
    except DataError as exc:
        return ReplicateOutcome(index=index, skipped=True, skip_reason=str(exc))

    x_test = encode_codes(schema, test.codes)
    tau_hat = learner.predict(x_test)

    quantile_uplift = None
    if spec.collect_uplift:
        quantiles = assign_quantiles(tau_hat, config.n_quantiles)
        quantile_uplift = np.empty(config.n_quantiles, dtype=np.float64)
        for q in range(1, config.n_quantiles + 1):
            mask = quantiles == q
            quantile_uplift[q - 1] = observed_uplift(
                test.treatment[mask], test.outcome[mask]
            )

    meta_columns = None
    meta_skipped = False
    if spec.collect_meta:
        regressor = clone(spec.base_regressor)
        if "random_state" in regressor.get_params():
            regressor.set_params(random_state=estimator_seed(seed, 2))
        regressor.fit(x_test, tau_hat)
        try:
            meta_columns = regressor.feature_importances_
        except NumericalError:
            meta_skipped = True

    profiles = None
    segment_size = 0
    segments_skipped = False
    if spec.segment_variables:
        try:
            bottom, top = extreme_deciles(tau_hat, spec.segment_fraction)
        except DataError:
            segments_skipped = True
        else:
            segment_size = bottom.shape[0]
            profiles = {}
            for name in spec.segment_variables:
                vi = schema.variable_index(name)
                k = len(schema.variable(name).categories)
                profiles[name] = {
                    SEGMENT_BOTTOM: np.bincount(
                        test.codes[bottom, vi], minlength=k
                    ) / segment_size,
                    SEGMENT_TOP: np.bincount(
                        test.codes[top, vi], minlength=k
                    ) / segment_size,
                }

    return ReplicateOutcome(
        index=index,
        quantile_uplift=quantile_uplift,
        meta_columns=meta_columns,
        meta_skipped=meta_skipped,
        profiles=profiles,
        segment_size=segment_size,
        segments_skipped=segments_skipped,
    )


# Worker-process state for the parallel path; populated once per worker so
# the cohort is not re-pickled for every replicate.
_WORKER_SPEC: list = []


def _init_worker(spec: _ReplicateSpec) -> None:
    _WORKER_SPEC.clear()
    _WORKER_SPEC.append(spec)


def _worker_run(index: int) -> ReplicateOutcome:
    return _run_replicate(_WORKER_SPEC[0], index)


@dataclass(frozen=True)
class BootstrapResults:
    """Raw per-replicate outcomes, ordered by replicate index."""

    config: EvalConfig
    outcomes: tuple[ReplicateOutcome, ...]
    segment_variables: tuple[str, ...] = ()
    segment_fraction: float = 0.1

    @property
    def n_skipped_replicates(self) -> int:
        return sum(1 for o in self.outcomes if o.skipped)

    def valid_outcomes(self) -> list[ReplicateOutcome]:
        return [o for o in self.outcomes if not o.skipped]


def run_bootstrap_analyses(
    cohort: Cohort,
    config: EvalConfig,
    *,
    base_classifier=None,
    base_regressor=None,
    collect_uplift: bool = True,
    collect_meta: bool = False,
    segment_variables: tuple[str, ...] = (),
    segment_fraction: float = 0.1,
    n_jobs: int | None = 1,
) -> BootstrapResults:
    """Run the replicate loop once, collecting the requested analyses.

    Replicates are independent; with n_jobs != 1 they are distributed over
    a process pool. Aggregation is keyed by replicate index, so results do
    not depend on completion order. n_jobs=None uses all available cores.
    """
    if cohort.n_rows < 2:
        raise DataError("bootstrap evaluation needs at least 2 cohort rows")
    for name in segment_variables:
        cohort.schema.variable_index(name)
    if segment_variables and not 0.0 < segment_fraction <= 0.5:
        raise ConfigError("segment fraction must be in (0, 0.5]")
    if collect_uplift:
        n_test = config.population_size - math.floor(
            config.population_size * config.train_fraction
        )
        if n_test < config.n_quantiles:
            raise ConfigError(
                f"test split of {n_test} rows cannot fill {config.n_quantiles} "
                "quantiles; lower n_quantiles or raise population_size"
            )

    spec = _ReplicateSpec(
        cohort=cohort,
        config=config,
        base_classifier=base_classifier,
        base_regressor=(
            base_regressor if base_regressor is not None else GradientBoostingRegressor()
        ),
        collect_uplift=collect_uplift,
        collect_meta=collect_meta,
        segment_variables=tuple(segment_variables),
        segment_fraction=segment_fraction,
    )

    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs < 1:
        raise ConfigError("n_jobs must be >= 1")

    indices = range(config.n_replicates)
    if n_jobs == 1 or config.n_replicates == 1:
        outcomes = [_run_replicate(spec, r) for r in indices]
    else:
        chunk = max(1, config.n_replicates // (4 * n_jobs))
        with ProcessPoolExecutor(
            max_workers=n_jobs,
            mp_context=get_context("spawn"),
            initializer=_init_worker,
            initargs=(spec,),
        ) as pool:
            outcomes = list(pool.map(_worker_run, indices, chunksize=chunk))
    outcomes.sort(key=lambda o: o.index)
    return BootstrapResults(
        config=config,
        outcomes=tuple(outcomes),
        segment_variables=tuple(segment_variables),
        segment_fraction=segment_fraction,
    )


@dataclass(frozen=True)
class QuantileRow:
    quantile: int
    mean_uplift: float
    ci_low: float
    ci_high: float
    n_valid_replicates: int


@dataclass(frozen=True)
class QuantileUpliftReport:
    """Per-quantile observed uplift with empirical interval bounds."""

    rows: tuple[QuantileRow, ...]
    ci_level: float
    n_replicates: int
    n_skipped_replicates: int
    # per quantile: replicates where that quantile's uplift was undefined
    undefined_counts: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "quantiles": [
                {
                    "quantile": row.quantile,
                    "mean_uplift": row.mean_uplift,
                    "ci_low": row.ci_low,
                    "ci_high": row.ci_high,
                    "n_valid_replicates": row.n_valid_replicates,
                }
                for row in self.rows
            ],
            "ci_level": self.ci_level,
            "n_replicates": self.n_replicates,
            "n_skipped_replicates": self.n_skipped_replicates,
            "undefined_quantile_counts": list(self.undefined_counts),
        }


def build_quantile_report(results: BootstrapResults) -> QuantileUpliftReport:
    config = results.config
    valid = [o for o in results.valid_outcomes() if o.quantile_uplift is not None]
    if valid:
        uplift = np.stack([o.quantile_uplift for o in valid])
    else:
        uplift = np.empty((0, config.n_quantiles), dtype=np.float64)

    rows = []
    undefined_counts = []
    for q in range(config.n_quantiles):
        samples = uplift[:, q]
        defined = samples[~np.isnan(samples)]
        undefined_counts.append(int(samples.shape[0] - defined.shape[0]))
        if defined.shape[0] == 0:
            rows.append(
                QuantileRow(q + 1, float("nan"), float("nan"), float("nan"), 0)
            )
            continue
        low, high = percentile_ci(defined, config.ci_level)
        rows.append(
            QuantileRow(
                quantile=q + 1,
                mean_uplift=float(defined.mean()),
                ci_low=low,
                ci_high=high,
                n_valid_replicates=int(defined.shape[0]),
            )
        )
    return QuantileUpliftReport(
        rows=tuple(rows),
        ci_level=config.ci_level,
        n_replicates=config.n_replicates,
        n_skipped_replicates=results.n_skipped_replicates,
        undefined_counts=tuple(undefined_counts),
    )


def run_quantile_evaluation(
    cohort: Cohort,
    config: EvalConfig,
    *,
    base_classifier=None,
    n_jobs: int | None = 1,
) -> QuantileUpliftReport:
    """The full decile-uplift validation protocol."""
    results = run_bootstrap_analyses(
        cohort,
        config,
        base_classifier=base_classifier,
        collect_uplift=True,
        n_jobs=n_jobs,
    )
    return build_quantile_report(results)


@dataclass(frozen=True)
class SegmentReport:
    """Bootstrap-averaged extreme-segment profiles for one variable."""

    variable: str
    bottom: SegmentProfile
    top: SegmentProfile
    fraction: float
    n_replicates: int
    n_skipped_replicates: int
    n_segment_skipped: int

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "fraction": self.fraction,
            "profiles": [self.bottom.to_dict(), self.top.to_dict()],
            "n_replicates": self.n_replicates,
            "n_skipped_replicates": self.n_skipped_replicates,
            "n_segment_skipped": self.n_segment_skipped,
        }


def run_segment_profiles(
    cohort: Cohort,
    config: EvalConfig,
    variables: tuple[str, ...],
    *,
    fraction: float = 0.1,
    base_classifier=None,
    n_jobs: int | None = 1,
) -> dict[str, SegmentReport]:
    """Bootstrap-averaged extreme-segment profiles per requested variable."""
    results = run_bootstrap_analyses(
        cohort,
        config,
        base_classifier=base_classifier,
        collect_uplift=False,
        segment_variables=tuple(variables),
        segment_fraction=fraction,
        n_jobs=n_jobs,
    )
    return finalize_segment_reports(cohort, results)


def finalize_segment_reports(
    cohort: Cohort, results: BootstrapResults
) -> dict[str, SegmentReport]:
    """Average per-replicate profiles and attach category labels."""
    contributing = [
        o
        for o in results.valid_outcomes()
        if o.profiles is not None and not o.segments_skipped
    ]
    n_segment_skipped = sum(
        1 for o in results.valid_outcomes() if o.segments_skipped
    )
    reports: dict[str, SegmentReport] = {}
    for name in results.segment_variables:
        if not contributing:
            raise DataError(
                f"no replicate produced a segment profile for {name!r}"
            )
        categories = cohort.schema.variable(name).categories
        bottom = np.zeros(len(categories), dtype=np.float64)
        top = np.zeros(len(categories), dtype=np.float64)
        mean_size = 0.0
        for o in contributing:
            bottom += o.profiles[name][SEGMENT_BOTTOM]
            top += o.profiles[name][SEGMENT_TOP]
            mean_size += o.segment_size
        bottom /= len(contributing)
        top /= len(contributing)
        mean_size /= len(contributing)
        reports[name] = SegmentReport(
            variable=name,
            bottom=SegmentProfile(
                segment=SEGMENT_BOTTOM,
                variable=name,
                categories=categories,
                proportions=tuple(float(p) for p in bottom),
                n_rows=mean_size,
            ),
            top=SegmentProfile(
                segment=SEGMENT_TOP,
                variable=name,
                categories=categories,
                proportions=tuple(float(p) for p in top),
                n_rows=mean_size,
            ),
            fraction=results.segment_fraction,
            n_replicates=results.config.n_replicates,
            n_skipped_replicates=results.n_skipped_replicates,
            n_segment_skipped=n_segment_skipped,
        )
    return reports
