"""Heterogeneous treatment effect estimation for randomized experiments.

A T-learner over natively implemented gradient-boosted trees estimates
per-profile effects of a binary treatment on a binary outcome; bootstrap
decile-uplift reports validate the estimates, meta-model importances and
interaction OLS explain where effects vary, and segment tools extract
the audiences that respond or backfire.
"""

from .boosting import (
    GradientBoostingClassifier,
    GradientBoostingRegressor,
    gini_importances,
)
from .config import RunConfig, load_config, parse_config
from .data import (
    DEFAULT_OUTCOME_LABELS,
    DEFAULT_TREATMENT_LABELS,
    CategoricalSchema,
    Cohort,
    Variable,
    binarize_outcome,
    load_csv,
    save_csv,
)
from .encoding import CohortEncoder, EncodedMatrix, encode_codes, one_hot_encode
from .errors import ConfigError, DataError, NumericalError, UpliftKitError
from .evaluation import (
    BootstrapResults,
    EvalConfig,
    QuantileRow,
    QuantileUpliftReport,
    ReplicateOutcome,
    SegmentReport,
    assign_quantiles,
    build_quantile_report,
    finalize_segment_reports,
    percentile_ci,
    run_bootstrap_analyses,
    run_quantile_evaluation,
    run_segment_profiles,
)
from .importance import (
    ImportanceReport,
    VariableImportance,
    build_importance_report,
    compute_meta_importances,
)
from .ols import (
    Coefficient,
    DesignMatrix,
    OlsSummary,
    betainc,
    build_interaction_design,
    f_sf,
    fit_interaction_ols,
    fit_ols,
    t_sf,
)
from .sampling import bootstrap_resample, mix_seed, split_train_test
from .segments import (
    SEGMENT_BOTTOM,
    SEGMENT_TOP,
    GroupCateRow,
    GroupCateTable,
    SegmentProfile,
    extreme_deciles,
    group_cate_table,
    segment_profile,
    targeting_policy,
)
from .synthesis import (
    Rule,
    SyntheticSpec,
    generate_cohort,
    potential_probabilities,
    true_cate,
    true_effect_for_codes,
)
from .tlearner import TLearner, average_treatment_effect, observed_uplift

__version__ = "0.1.0"

__all__ = [
    "BootstrapResults",
    "CategoricalSchema",
    "Coefficient",
    "Cohort",
    "CohortEncoder",
    "ConfigError",
    "DEFAULT_OUTCOME_LABELS",
    "DEFAULT_TREATMENT_LABELS",
    "DataError",
    "DesignMatrix",
    "EncodedMatrix",
    "EvalConfig",
    "GradientBoostingClassifier",
    "GradientBoostingRegressor",
    "GroupCateRow",
    "GroupCateTable",
    "ImportanceReport",
    "NumericalError",
    "OlsSummary",
    "QuantileRow",
    "QuantileUpliftReport",
    "ReplicateOutcome",
    "Rule",
    "RunConfig",
    "SEGMENT_BOTTOM",
    "SEGMENT_TOP",
    "SegmentProfile",
    "SegmentReport",
    "SyntheticSpec",
    "TLearner",
    "UpliftKitError",
    "Variable",
    "VariableImportance",
    "assign_quantiles",
    "average_treatment_effect",
    "betainc",
    "binarize_outcome",
    "bootstrap_resample",
    "build_importance_report",
    "build_interaction_design",
    "build_quantile_report",
    "compute_meta_importances",
    "encode_codes",
    "extreme_deciles",
    "f_sf",
    "finalize_segment_reports",
    "fit_interaction_ols",
    "fit_ols",
    "generate_cohort",
    "gini_importances",
    "group_cate_table",
    "load_config",
    "load_csv",
    "mix_seed",
    "observed_uplift",
    "one_hot_encode",
    "parse_config",
    "percentile_ci",
    "potential_probabilities",
    "run_bootstrap_analyses",
    "run_quantile_evaluation",
    "run_segment_profiles",
    "save_csv",
    "segment_profile",
    "split_train_test",
    "t_sf",
    "targeting_policy",
    "true_cate",
    "true_effect_for_codes",
]
