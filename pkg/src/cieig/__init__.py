"""Contour-integral eigensolver toolkit for sparse generalized problems."""

from .bench import (
    BenchConfig,
    BenchRecord,
    BenchReport,
    match_found,
    run_pipeline,
    run_sensitivity,
    run_strategy,
    speedup,
)
from .contours import (
    Contour,
    IntervalPartition,
    QuadratureRule,
    SpectrumPrediction,
    construct_contours,
    contour_area,
    find_cut,
    kde_sparsity,
    quadrature_for,
    random_contours,
)
from .errors import (
    CieigError,
    ConvergenceError,
    CutUndefinedError,
    DatasetError,
    DimensionError,
    EmptyPredictionError,
    FormatError,
    IndefiniteBError,
    MetricError,
    NoEigenvaluesFound,
    OracleCapError,
    ParameterError,
    ParameterWarning,
    RankZeroError,
    SingularShiftError,
    ValidationError,
    VersionError,
)
from .linalg import (
    ShiftedFactorization,
    dense_hermitian_gep,
    orthonormalize,
    rank_truncate_svd,
    shifted_factorize,
    solve_block,
)
from .predictions import (
    load_prediction,
    noisy_oracle_predict,
    ritz_as_prediction,
    write_prediction,
)
from .problems import (
    CoefficientField,
    Grid2D,
    GroundTruth,
    assemble_em_cavity,
    assemble_plate,
    assemble_thermal,
    dense_ground_truth,
    grf_sample,
    read_dataset,
    target_count,
    write_dataset,
)
from .scouting import (
    RitzEstimate,
    calibrate_margin,
    scout,
    scout_contour,
)
from .solvers import (
    EigenResult,
    MultiResult,
    SolverConfig,
    apply_projector,
    cirr_solve,
    feast_solve,
    read_eigenvectors,
    solve_multi,
    write_eigenvectors,
)
from .sparse import (
    MatrixPencil,
    SparseMatrix,
    read_matrix_market,
    sparse_matmat,
    sparse_matvec,
    write_matrix_market,
)

__version__ = "0.1.0"
