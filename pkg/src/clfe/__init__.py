"""clfe: linear feature extraction by contrastive learning on sample graphs.

Learns a projection matrix by minimizing a contrastive loss defined over a
pair of positive/negative sample graphs. Three graph constructions are
provided: unsupervised k-nearest-neighbor graphs (u-cl), class-indicator
graphs (s-cl1), and within-class k-nearest-neighbor graphs (s-cl2).
Includes PCA/standardization preprocessing and a repeated-random-split
1-nearest-neighbor benchmark harness.
"""

__version__ = "0.1.0"

from . import errors
from .core import (
    DataMatrix,
    LabelVector,
    ProjectionMatrix,
    init_projection,
    project,
    remap_labels,
    validate_dataset,
)
from .evaluate import (
    EvaluationReport,
    GridSpec,
    SplitSpec,
    confusion_matrix,
    grid_search,
    knn_classify,
    recall_rate,
    recognition_accuracy,
    run_experiment,
    split_indices,
)
from .graphs import (
    ContrastiveGraphPair,
    NeighborIndex,
    build_neighbor_index,
    build_s_cl1,
    build_s_cl2,
    build_u_cl,
    thermal_weight,
)
from .objective import (
    ObjectiveEvaluator,
    ObjectiveParams,
    finite_diff_gradient,
    gradient,
    gradient_disagreement,
    loss,
    loss_and_gradient,
    sim,
)
from .optimizer import AdamHyperparams, AdamState, FitResult, adam_step, fit
from .preprocess import (
    PcaModel,
    PreprocessConfig,
    PreprocessModel,
    StandardizeModel,
    pca_fit,
    pca_transform,
    preprocess_apply,
    preprocess_fit,
    standardize_apply,
    standardize_fit,
)

__all__ = [
    "AdamHyperparams",
    "AdamState",
    "ContrastiveGraphPair",
    "DataMatrix",
    "EvaluationReport",
    "FitResult",
    "GridSpec",
    "LabelVector",
    "NeighborIndex",
    "ObjectiveEvaluator",
    "ObjectiveParams",
    "PcaModel",
    "PreprocessConfig",
    "PreprocessModel",
    "ProjectionMatrix",
    "SplitSpec",
    "StandardizeModel",
    "adam_step",
    "build_neighbor_index",
    "build_s_cl1",
    "build_s_cl2",
    "build_u_cl",
    "confusion_matrix",
    "errors",
    "finite_diff_gradient",
    "fit",
    "gradient",
    "gradient_disagreement",
    "grid_search",
    "init_projection",
    "knn_classify",
    "loss",
    "loss_and_gradient",
    "pca_fit",
    "pca_transform",
    "preprocess_apply",
    "preprocess_fit",
    "project",
    "recall_rate",
    "recognition_accuracy",
    "remap_labels",
    "run_experiment",
    "sim",
    "split_indices",
    "standardize_apply",
    "standardize_fit",
    "thermal_weight",
    "validate_dataset",
]
