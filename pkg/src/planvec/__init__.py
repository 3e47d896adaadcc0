"""Raster floor plan to structured SVG vectorizer.

Pipeline: threshold -> Shi-Tomasi corners -> axis snapping -> greedy wall
rectangle selection -> containment/merge cleanup -> one SVG path per wall.
The :mod:`planvec.guidance` module holds the white-background guidance math
used upstream of the vectorizer when plans come from a diffusion model.
"""

from planvec.errors import (
    ConfigError,
    GuidanceNumericError,
    PlanvecError,
    SvgParseError,
    TooDenseError,
    TooSmallError,
    UnsupportedFormatError,
)
from planvec.geometry import VectorPlan, WallRect
from planvec.pipeline import PipelineConfig, vectorize, vectorize_file

__all__ = [
    "ConfigError",
    "GuidanceNumericError",
    "PipelineConfig",
    "PlanvecError",
    "SvgParseError",
    "TooDenseError",
    "TooSmallError",
    "UnsupportedFormatError",
    "VectorPlan",
    "WallRect",
    "vectorize",
    "vectorize_file",
]

__version__ = "0.1.0"
