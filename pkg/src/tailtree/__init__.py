"""tailtree: tree graphical models for multivariate extremes.

Learn the tree-structured extremal dependence of multivariate data from
raw samples (rank-based extremal correlations and extremal variograms,
minimum spanning trees), simulate exact max-stable and domain-of-
attraction samples from tree models, and validate everything against
closed forms and Monte Carlo oracles.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AllZeroWeights,
    DegeneracyError,
    DimensionMismatch,
    DimensionTooLarge,
    Disconnected,
    DuplicateEdge,
    EdgeModelMismatch,
    InputError,
    InvalidNode,
    InvalidParameter,
    KOutOfRange,
    NegativeGamma,
    NoFiniteTree,
    NonNumericCell,
    NotSymmetric,
    ParseError,
    SelfLoop,
    SimulationBudgetExceeded,
    TailTreeError,
    TooFewColumns,
    TooFewRows,
    WrongEdgeCount,
)
from .jsonio import canonical_json, dump_json, load_json
from .rng import RandomStream, as_generator
from .trees import (
    LabeledTree,
    WeightMatrix,
    enumerate_labeled_trees,
    path_edges,
    prufer_decode,
    random_tree,
    tree_equal,
    tree_from_dict,
    tree_to_dict,
    validate_tree,
)
from .models import (
    Dirichlet,
    EdgeDistribution,
    ExtremalTreeModel,
    HuslerReiss,
    Logistic,
    model_from_dict,
    model_to_dict,
)
from .variogram import (
    VariogramMatrix,
    directed_edge_variogram,
    edge_variogram,
    hr_chi_from_gamma,
    is_conditionally_negative_definite,
    model_variogram,
    path_sum_matrix,
    sigma_from_gamma,
    trigamma,
    variogram_from_dict,
    variogram_to_dict,
)
from .sampling import (
    IndependentNoise,
    NoiseSpec,
    TreeNoise,
    sample_domain_of_attraction,
    sample_edge_w,
    sample_max_stable,
    sample_noise,
    sample_w_vector,
    sample_y_rooted,
)
from .oracles import MaxStableGenerator, McEstimate, mc_chi, mc_variogram_pre
from .estimators import (
    RankMatrix,
    VariogramEstimate,
    chi_curve,
    chi_hat,
    chi_matrix,
    default_k,
    gamma_hat_combined,
    gamma_hat_rooted,
    k_from_tail_fraction,
    rank_transform,
)
from .learn import (
    FittedHrTree,
    fit_hr_tree,
    learn_tree_chi,
    learn_tree_gamma,
    mst,
    mst_bruteforce,
)
from .experiments import (
    EdgeStability,
    ExperimentConfig,
    ExperimentResult,
    ExperimentRow,
    bootstrap_stability,
    edge_error,
    gen_model_m1,
    gen_model_m2,
    run_experiment,
)
from .pipeline import (
    DataMatrix,
    DEFAULT_CURVE_LEVELS,
    PipelineReport,
    ingest_csv,
    run_pipeline,
    write_data_csv,
)
