"""Multiplicative (and additive) Shapley-value feature attributions.

Any strictly positive prediction can be decomposed into a baseline times one
factor per feature; the classical additive decomposition is available next to
it from the same machinery.  Budgeted regression estimators, exact
small-scale oracles, a closed form for log-link GLMs, and aggregate metrics
(group factors, importance, partial dependence) are exposed as a library and
as the ``xshap`` command line.
"""

from .coalitions import (
    CoalitionPlan,
    complement,
    enumerate_coalitions,
    kernel_weight,
    shapley_weight,
)
from .data import (
    DataTable,
    EncodedTable,
    SplitPlan,
    TabularFile,
    decode_one_hot,
    encode_table,
    load_csv,
    split_and_sample,
    synthesize,
)
from .errors import (
    ConfigError,
    ExplanationError,
    ExternalModelError,
    IngestionError,
    InvalidArgumentError,
    NonPositivePredictionError,
    NonPositiveValueError,
    RankDeficientError,
    ShapeError,
    TooManyFeaturesError,
    XShapError,
)
from .explain import (
    AdditiveExplanation,
    MultiplicativeExplanation,
    ReferenceSet,
    build_perturbed_dataset,
    coalition_value_additive,
    coalition_value_multiplicative,
    exact_additive_shapley,
    exact_multiplicative_shapley,
    explain_batch,
    glm_closed_form_contributions,
    kernel_shap_explain,
    x_shap_explain,
)
from .metrics import (
    ExplanationBatch,
    GroupSpec,
    PartialDependenceCurve,
    SummaryData,
    global_importance,
    group_contribution,
    local_importance,
    partial_dependence,
    summary_data,
)
from .models import ExternalModel, LogGlm, TreeEnsemble, fit_gbt, fit_log_glm
from .numerics import (
    WlsProblem,
    arithmetic_mean,
    geometric_mean,
    solve_wls,
    solve_wls_constrained,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveExplanation",
    "CoalitionPlan",
    "ConfigError",
    "DataTable",
    "EncodedTable",
    "ExplanationBatch",
    "ExplanationError",
    "ExternalModel",
    "ExternalModelError",
    "GroupSpec",
    "IngestionError",
    "InvalidArgumentError",
    "LogGlm",
    "MultiplicativeExplanation",
    "NonPositivePredictionError",
    "NonPositiveValueError",
    "PartialDependenceCurve",
    "RankDeficientError",
    "ReferenceSet",
    "ShapeError",
    "SplitPlan",
    "SummaryData",
    "TabularFile",
    "TooManyFeaturesError",
    "TreeEnsemble",
    "WlsProblem",
    "XShapError",
    "arithmetic_mean",
    "build_perturbed_dataset",
    "coalition_value_additive",
    "coalition_value_multiplicative",
    "complement",
    "decode_one_hot",
    "enumerate_coalitions",
    "encode_table",
    "exact_additive_shapley",
    "exact_multiplicative_shapley",
    "explain_batch",
    "fit_gbt",
    "fit_log_glm",
    "geometric_mean",
    "glm_closed_form_contributions",
    "global_importance",
    "group_contribution",
    "kernel_shap_explain",
    "kernel_weight",
    "load_csv",
    "local_importance",
    "partial_dependence",
    "shapley_weight",
    "solve_wls",
    "solve_wls_constrained",
    "split_and_sample",
    "summary_data",
    "synthesize",
    "x_shap_explain",
]
