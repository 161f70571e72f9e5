"""Nearest-neighbor preserving embeddings via the fast JL transform.

The pipeline: pick parameters from (n, d, eps, delta, doubling
constant), sample the structured transform (sign flips, Walsh-Hadamard
mixing, sparse Gaussian projection), embed, and check what survived.
Analytic tail bounds and their Monte-Carlo counterparts live side by
side so every bound can be confronted with simulation.
"""

from .bench import BenchRow, bench_point, run_benchmark
from .bounds import (
    KHINTCHINE_CHERNOFF_CROSSOVER,
    TailBound,
    chi_square_lower_tail,
    chi_square_lower_tail_loose,
    dataset_smoothness_failure_bound,
    khintchine_constant,
    khintchine_constant_bound,
    shrinkage_bound,
    smoothness_tail_chernoff,
    smoothness_tail_khintchine,
)
from .core import (
    DataSet,
    EmbedParams,
    derive_rng,
    is_power_of_two,
    make_dataset,
    next_power_of_two,
    select_params,
    standard_normals,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyInput,
    NonFinite,
    NonPowerOfTwo,
    NoReductionWarning,
    ParseError,
    PreconditionError,
    RaggedInput,
    SizeMismatch,
    TooLarge,
    ZeroVector,
)
from .fjlt import (
    FjltTransform,
    GaussianTransform,
    SignDiagonal,
    SparseProjection,
    sample_fjlt,
    sample_gaussian,
    sample_sign_diagonal,
    sample_sparse_projection,
    transform_from_dict,
    transform_to_dict,
)
from .fwht import fwht_inplace, hadamard_matrix, naive_hadamard
from .io import load_dataset, load_transform, make_report, save_dataset, save_transform, write_report
from .metrics import (
    DoublingEstimate,
    NnTable,
    brute_force_nn,
    doubling_constant_exact,
    doubling_constant_greedy,
)
from .suites import (
    gaussian_dataset,
    planted_plane_dataset,
    run_calibration,
    run_distortion_suite,
    run_gaussian_appendix_suite,
    run_nn_suite,
    run_shrinkage_suite,
    run_smoothness_suite,
    run_suite,
    run_zi_suite,
)
from .verification import (
    McEstimate,
    NnPreservationReport,
    SmoothnessReport,
    TwoStabilityReport,
    ZiReport,
    check_smoothness,
    dominance_holds,
    mc_distortion,
    mc_gaussian_dominance,
    mc_shrinkage,
    mc_two_stability,
    mc_zi_concentration,
    sample_smooth_diagonal,
    smooth_unit_vector,
    verify_nn_preservation,
    zi_report,
)

__version__ = "0.1.0"
