"""salda: saliency-weighted linear discriminant analysis.

Per-class sample saliency probabilities (solved on a heat-kernel affinity
graph with a misclassification prior) re-weight class representations and
scatter matrices; a regularized generalized eigensolver and a nearest
centroid classifier complete the pipeline.  Classical LDA and three
weighted-LDA baselines share the same harness for cross-validated
comparison.
"""

from ._core import BACKEND
from .classify import CentroidModel, fit_centroids, predict
from .dataset import (
    ClassPartition,
    Dataset,
    FoldPlan,
    Standardizer,
    apply_standardizer,
    fit_standardizer,
    load_csv,
    make_folds,
    partition_by_class,
)
from .graph import (
    AffinityGraph,
    build_full_graph,
    build_knn_graph,
    class_sigma,
    default_knn_k,
)
from .harness import (
    ExperimentConfig,
    ResultTable,
    compare_report,
    cross_validate,
    run_experiment,
    self_test,
)
from .saliency import (
    SaliencyPrior,
    SaliencyResult,
    all_class_saliency,
    class_representation,
    misclassification_prior,
    solve_saliency,
)
from .scatter import (
    VARIANTS,
    ClassStats,
    ScatterPair,
    assemble,
    classic_scatters,
    compute_class_stats,
    jarchi_delta,
    jarchi_scatters,
    loog_between,
    swlda_between,
    swlda_within,
    tang_within,
)
from .solver import Projection, project, solve_fisher

__version__ = "0.1.0"
