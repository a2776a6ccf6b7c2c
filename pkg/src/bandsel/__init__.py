"""Hyperspectral band selection toolkit.

Pipeline: standardize non-background pixels, prune multicollinear band
pairs with a pairwise variance-inflation-factor gate, score the surviving
bands by mean absolute inter-band correlation and by mutual information
with the ground-truth labels, cluster the 2-D score space with restarted
k-means and keep the band nearest each centroid.  An evaluation harness
scores band subsets by repeated stratified classification runs.
"""

from .containers import (
    GroundTruth,
    HsiCube,
    PixelMatrix,
    load_cube,
    load_ground_truth,
    mask_and_standardize,
    write_cube,
    write_ground_truth,
)
from .errors import BandselError, ContainerError, InfeasibleError, ValidationError
from .evaluation import (
    EvalConfig,
    EvalReport,
    KnnClassifier,
    classify,
    cohens_kappa,
    evaluate_bands,
    overall_accuracy,
    stratified_split,
    sweep,
    ubs_baseline,
)
from .selection import (
    BandScores,
    SelectionConfig,
    SelectionResult,
    build_abc_mi_space,
    kmeans,
    run_pipeline,
    select_representatives,
    vif_limit,
    vif_preselect,
)
from .stats import (
    CorrelationMatrix,
    abc_scores,
    correlation_matrix,
    entropy,
    mi_from_joint,
    mutual_information,
    pairwise_vif,
    vif_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BandScores",
    "BandselError",
    "ContainerError",
    "CorrelationMatrix",
    "EvalConfig",
    "EvalReport",
    "GroundTruth",
    "HsiCube",
    "InfeasibleError",
    "KnnClassifier",
    "PixelMatrix",
    "SelectionConfig",
    "SelectionResult",
    "ValidationError",
    "abc_scores",
    "build_abc_mi_space",
    "classify",
    "cohens_kappa",
    "correlation_matrix",
    "entropy",
    "evaluate_bands",
    "kmeans",
    "load_cube",
    "load_ground_truth",
    "mask_and_standardize",
    "mi_from_joint",
    "mutual_information",
    "overall_accuracy",
    "pairwise_vif",
    "run_pipeline",
    "select_representatives",
    "stratified_split",
    "sweep",
    "ubs_baseline",
    "vif_limit",
    "vif_matrix",
    "vif_preselect",
    "write_cube",
    "write_ground_truth",
]
