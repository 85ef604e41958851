"""Static models of pneumatic artificial muscles and antagonist muscle actuators."""

from .core import (
    BAR,
    DomainError,
    FittingError,
    MuscleGeometry,
    PamError,
    PoleError,
    UnitError,
    convert,
    derive_braid_constants,
)
from .cubic import CubicCoefficients, CubicRoots, solve_cubic

__version__ = "0.1.0"
