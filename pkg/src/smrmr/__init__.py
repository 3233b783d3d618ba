"""Sparse mRMR feature screening with knockoff-filter FDR control."""

__version__ = "0.1.0"

from .bench import (
    BenchResult,
    SelectionMetrics,
    downstream_fit,
    fdr_experiment,
    greedy_mrmr,
    score_selection,
)
from .config import load_pipeline_config, pipeline_config_from_dict
from .dgp import DgpSpec, SynthDataset, generate, sample_ar_gaussian
from .errors import (
    DegenerateFeature,
    InvalidInput,
    NumericalFailure,
    ResourceLimit,
    SampleTooSmall,
    SmrmrError,
)
from .knockoffs import (
    KnockoffMatrix,
    KnockoffReport,
    importance_scores,
    knockoff_threshold,
    sample_knockoffs,
    select,
)
from .measures import (
    AngleTensor,
    CenteredGram,
    MeasureSpec,
    angle_tensor,
    center_gram,
    dependence,
    gaussian_kernel_matrix,
    hsic_u,
    hsic_v,
    median_heuristic_bandwidth,
    nr_hsic_v,
    pc_squared_v,
)
from .penalties import PenaltySpec, penalty_derivative, penalty_value
from .pipeline import PipelineConfig, ScreenOutput, knockoff_stage, run, screen, tune
from .solver import (
    AssocSystem,
    Coefficients,
    SolverConfig,
    build_joint_system,
    build_system,
    loss_value,
    solve_smrmr,
    solve_weighted_l1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
