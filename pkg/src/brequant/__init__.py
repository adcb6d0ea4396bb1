"""Minimax quantization of prior probabilities under the Bayes risk error divergence."""

from .analysis import (
    SlopeFit,
    SweepEntry,
    SweepResult,
    grid_oracle_centroid_simplex,
    grid_oracle_scalar,
    loglog_slope,
    sweep,
)
from .divergence import bre_divergence, minimax_weight, worst_vertex_divergence
from .estimators import MeanBREQuantizer, MinimaxQuantizer
from .exceptions import (
    BracketError,
    BREQuantError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    InsufficientDataError,
    KinkError,
    OutOfImageError,
    ThresholdOrderError,
)
from .models import (
    BinaryGaussianModel,
    DetectionModel,
    ErrorProbabilities,
    ExponentialTernaryModel,
    SimplexPoint,
    model_from_params,
)
from .quantizer_scalar import (
    DesignReport,
    ScalarQuantizer,
    boundary,
    centroid,
    design_mean_bre,
    design_minimax,
    quantize,
)
from .quantizer_simplex import (
    CellPolygon,
    Halfplane,
    SimplexQuantizer,
    WeightVector,
    bisector,
    cell_max_divergence,
    cell_polygon,
    design_minimax_simplex,
    inverse_gradient,
    minimax_centroid,
    quantize_simplex,
)

__version__ = "0.1.0"
