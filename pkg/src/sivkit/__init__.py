"""Scale-invariant vacuum gauge, background cosmology and two-body dynamics."""

from sivkit.errors import (
    CollisionError,
    DomainError,
    IllConditionedFitError,
    SIVError,
    ToleranceError,
    UnsupportedModelError,
)
from sivkit.gauge import CosmologyParams, TimeScales

__version__ = "0.1.0"

__all__ = [
    "CollisionError",
    "CosmologyParams",
    "DomainError",
    "IllConditionedFitError",
    "SIVError",
    "TimeScales",
    "ToleranceError",
    "UnsupportedModelError",
]
