"""Units, braid geometry and the error types shared across the package.

Everything inside the package works in SI units (Pa, m, rad, N, N*m/rad).
Human units (bar, cm, deg) only appear at the CLI and file boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

BAR = 1e5
MAGIC_ANGLE = math.atan(math.sqrt(2.0))  # 54.7356 deg, where a == b


class PamError(Exception):
    """Base class for all errors raised by pamstat."""


class DomainError(PamError, ValueError):
    """An input lies outside the validity domain of a model.

    ``eps_max`` carries the maximum contraction ratio at the offending
    pressure when the model has one, so callers can report or clip.
    """

    def __init__(self, message: str, eps_max: float | None = None):
        super().__init__(message)
        self.eps_max = eps_max


class PoleError(DomainError):
    """Evaluation too close to a pole of the rational force model."""


class FittingError(PamError, ValueError):
    """Parameter identification failed (singular or degenerate system)."""


class UnitError(PamError, ValueError):
    """Unknown unit or dimension mismatch."""


# unit -> (dimension, multiplier to SI, divisor to SI)
# Exact integer factors keep x -> SI -> x within one ulp.
_UNITS: dict[str, tuple[str, float, float]] = {
    "Pa": ("pressure", 1.0, 1.0),
    "kPa": ("pressure", 1e3, 1.0),
    "bar": ("pressure", 1e5, 1.0),
    "m": ("length", 1.0, 1.0),
    "cm": ("length", 1.0, 100.0),
    "mm": ("length", 1.0, 1000.0),
    "rad": ("angle", 1.0, 1.0),
    "deg": ("angle", 1.0, 1.0),  # handled through math.radians
    "N": ("force", 1.0, 1.0),
    "N*m/rad": ("rotational_stiffness", 1.0, 1.0),
}
_ALIASES = {"N·m/rad": "N*m/rad", "Nm/rad": "N*m/rad", "N.m/rad": "N*m/rad"}


def _lookup(unit: str) -> tuple[str, float, float]:
    unit = _ALIASES.get(unit, unit)
    try:
        return _UNITS[unit]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}; supported: {sorted(_UNITS)}") from None


def convert(value: float, unit_in: str, unit_out: str) -> float:
    """Convert ``value`` from ``unit_in`` to ``unit_out`` by exact linear scaling."""
    dim_in, mul_in, div_in = _lookup(unit_in)
    dim_out, mul_out, div_out = _lookup(unit_out)
    if dim_in != dim_out:
        raise UnitError(f"cannot convert {dim_in} ({unit_in}) to {dim_out} ({unit_out})")
    unit_in = _ALIASES.get(unit_in, unit_in)
    unit_out = _ALIASES.get(unit_out, unit_out)
    if unit_in == unit_out:
        return float(value)
    if dim_in == "angle":
        return math.radians(value) if unit_in == "deg" else math.degrees(value)
    si = value * mul_in / div_in
    return si * div_out / mul_out


def derive_braid_constants(alpha0: float) -> tuple[float, float, float]:
    """Return ``(a, b, eps_max)`` for an initial braid angle in radians.

    a = 3/tan^2(alpha0), b = 1/sin^2(alpha0), eps_max = 1 - sqrt(b/a).
    ``eps_max`` may be <= 0 for angles at or above the magic angle; the
    caller decides whether that is an error.
    """
    if not (0.0 < alpha0 < math.pi / 2):
        raise DomainError(f"braid angle must lie in (0, 90) deg, got {math.degrees(alpha0)!r} deg")
    a = 3.0 / math.tan(alpha0) ** 2
    b = 1.0 / math.sin(alpha0) ** 2
    return a, b, 1.0 - math.sqrt(b / a)


@dataclass(frozen=True)
class MuscleGeometry:
    """Initial radius, active length and braid angle of a McKibben muscle (SI)."""

    r0: float
    l0: float
    alpha0: float
    a: float = field(init=False, repr=False)
    b: float = field(init=False, repr=False)
    eps_max_theoretical: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.r0 > 0:
            raise DomainError(f"r0 must be positive, got {self.r0!r}")
        if not self.l0 > 0:
            raise DomainError(f"l0 must be positive, got {self.l0!r}")
        a, b, eps_max = derive_braid_constants(self.alpha0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eps_max_theoretical", eps_max)

    @classmethod
    def from_human(cls, r0_cm: float, l0_cm: float, alpha0_deg: float) -> "MuscleGeometry":
        return cls(
            r0=convert(r0_cm, "cm", "m"),
            l0=convert(l0_cm, "cm", "m"),
            alpha0=convert(alpha0_deg, "deg", "rad"),
        )

    @property
    def area(self) -> float:
        """Initial cross-section pi*r0^2."""
        return math.pi * self.r0**2

    @property
    def a_minus_b(self) -> float:
        return self.a - self.b

    def max_force(self, pressure: float) -> float:
        """Isometric (zero-contraction) force at ``pressure``."""
        return self.area * self.a_minus_b * pressure
