"""Fuzzy rule-based differentiable representation learning.

A TSK fuzzy antecedent maps tabular data into a fuzzy feature space; the
consequent parameters are produced by an unrolled, learnable
iterative-shrinkage solver whose layers start at the classical iteration and
are trained against classification or clustering heads. Geometry-preserving
graph operators set the solver's initialization and step size, and the
trained model exports as an interpretable fuzzy rule base.
"""

from .antecedent import (
    FuzzyAntecedent,
    estimate_widths,
    fcm_cluster,
    firing_levels,
    fuzzy_map,
    membership,
)
from .data import Dataset, FoldPlan, load_csv, minmax_normalize, one_hot, stratified_kfold
from .errors import ConfigError, DataError, DivergenceError, FrdrlError
from .geometry import (
    GeometryOperators,
    build_geometry,
    combined_operator,
    knn_similarity,
    laplacian,
    lipschitz_estimate,
    second_order_operator,
)
from .heads import (
    ClusterState,
    Model,
    TrainConfig,
    TrainTrace,
    classification_grad,
    classification_loss,
    clustering_loss,
    predict,
    softmax_rows,
    train_classifier,
    train_clusterer,
    update_centers,
    update_partition,
)
from .metrics import MetricReport, accuracy, ari, macro_f1, nmi
from .model_io import load_model, save_model
from .rules import linguistic_terms, render_rulebase, render_rulebase_markdown
from .solver import (
    AdamState,
    ForwardCache,
    StackGradients,
    UnrolledStack,
    backward,
    classical_ista,
    forward,
    init_stack,
    ista_objective,
    outer_update,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ClusterState",
    "ConfigError",
    "DataError",
    "Dataset",
    "DivergenceError",
    "FoldPlan",
    "ForwardCache",
    "FrdrlError",
    "FuzzyAntecedent",
    "GeometryOperators",
    "MetricReport",
    "Model",
    "StackGradients",
    "TrainConfig",
    "TrainTrace",
    "UnrolledStack",
    "accuracy",
    "ari",
    "backward",
    "build_geometry",
    "classical_ista",
    "classification_grad",
    "classification_loss",
    "clustering_loss",
    "combined_operator",
    "estimate_widths",
    "fcm_cluster",
    "firing_levels",
    "forward",
    "fuzzy_map",
    "init_stack",
    "ista_objective",
    "knn_similarity",
    "laplacian",
    "linguistic_terms",
    "lipschitz_estimate",
    "load_csv",
    "load_model",
    "macro_f1",
    "membership",
    "minmax_normalize",
    "nmi",
    "one_hot",
    "outer_update",
    "predict",
    "render_rulebase",
    "render_rulebase_markdown",
    "save_model",
    "second_order_operator",
    "soft_threshold",
    "softmax_rows",
    "stratified_kfold",
    "train_classifier",
    "train_clusterer",
    "update_centers",
    "update_partition",
]
