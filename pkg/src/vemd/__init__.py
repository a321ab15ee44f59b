"""Vector-valued and multivariate empirical mode decomposition."""

__version__ = "0.1.0"

from .directions import DirectionSet, direction_set, hammersley_set, radical_inverse
from .signals import ExtremaSet, VectorSignal, extrema_count, find_extrema, project
from .envelope import envelopes_1d, envelopes_memd
from .backprojection import BackProjectionProblem, solve_backprojection, vemd_envelopes
from .sifting import Decomposition, SiftConfig, decompose, local_mean, sift
from .metrics import prd, projection_residual, sweep_base, sweep_directions

__all__ = [
    "BackProjectionProblem",
    "Decomposition",
    "DirectionSet",
    "ExtremaSet",
    "SiftConfig",
    "VectorSignal",
    "decompose",
    "direction_set",
    "envelopes_1d",
    "envelopes_memd",
    "extrema_count",
    "find_extrema",
    "hammersley_set",
    "local_mean",
    "prd",
    "project",
    "projection_residual",
    "radical_inverse",
    "sift",
    "solve_backprojection",
    "sweep_base",
    "sweep_directions",
    "vemd_envelopes",
]
