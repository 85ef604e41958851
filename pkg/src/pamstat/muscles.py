"""Static contraction force and stiffness of pneumatic muscle models.

Every model takes a contraction ratio ``eps = (l0 - l)/l0`` and a control
input (pressure in Pa, or the normalized activation ``u`` for Hogan's
model). Force is counted positive when the muscle pulls.

Stiffness is reported as ``-(1/l0) dF/deps`` (N/m), i.e. the force gained
per meter of stretch, which is positive for every physically sensible
operating point. The Wickramatunge model is parameterized directly by the
stretched length and its stiffness is ``dF/dl_s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import DomainError, MuscleGeometry, PoleError

# absolute slack on eps bounds, so that eps_max itself is admissible
EPS_TOL = 1e-12
POLE_TOL = 1e-9
HILDEBRANDT_MIN_EPS = 1e-6


def _check_pressure(p: float) -> None:
    if not (p >= 0.0 and math.isfinite(p)):
        raise DomainError(f"pressure must be finite and >= 0, got {p!r}")


def _check_eps(eps: float, eps_max: float, what: str = "contraction ratio") -> None:
    if not math.isfinite(eps) or eps < -EPS_TOL or eps > eps_max + EPS_TOL:
        raise DomainError(f"{what} {eps!r} outside [0, {eps_max!r}]", eps_max=eps_max)


# --------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class HoganParams:
    """Linear force model ``u*f_max*(1 - eps/eps_max)``; ``l0`` sets stiffness units."""

    f_max: float
    eps_max: float
    l0: float

    def __post_init__(self):
        if not self.f_max > 0:
            raise DomainError(f"f_max must be positive, got {self.f_max!r}")
        if not 0.0 < self.eps_max < 1.0:
            raise DomainError(f"eps_max must lie in (0, 1), got {self.eps_max!r}")
        if not self.l0 > 0:
            raise DomainError(f"l0 must be positive, got {self.l0!r}")

    def force(self, eps, u):
        return hogan_force(eps, u, self)

    def stiffness(self, eps, u):
        _check_eps(eps, self.eps_max)
        return u * self.f_max / (self.l0 * self.eps_max)

    def eps_max_at(self, u):
        return self.eps_max


@dataclass(frozen=True)
class TheoreticalMcKibben:
    """Cylindrical McKibben muscle with no friction and thin walls."""

    geometry: MuscleGeometry

    def __post_init__(self):
        if self.geometry.eps_max_theoretical <= 0:
            raise DomainError("braid angle at or above 54.7356 deg: the muscle cannot contract")

    def force(self, eps, p):
        return theoretical_mckibben_force(eps, p, self.geometry)

    def stiffness(self, eps, p):
        g = self.geometry
        _check_pressure(p)
        _check_eps(eps, g.eps_max_theoretical)
        return 2.0 * g.a * g.area * p * (1.0 - eps) / g.l0

    def eps_max_at(self, p):
        return self.geometry.eps_max_theoretical


@dataclass(frozen=True)
class KTable:
    """Pressure -> k anchors, interpolated piecewise-linearly and clamped at the ends."""

    pressures: tuple[float, ...]
    ks: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "pressures", tuple(float(p) for p in self.pressures))
        object.__setattr__(self, "ks", tuple(float(k) for k in self.ks))
        if len(self.pressures) == 0 or len(self.pressures) != len(self.ks):
            raise ValueError("k-table needs the same non-zero number of pressures and k values")
        if any(k <= 0 for k in self.ks):
            raise ValueError(f"k values must be positive, got {self.ks}")
        if any(p1 >= p2 for p1, p2 in zip(self.pressures, self.pressures[1:])):
            raise ValueError("k-table pressures must be strictly increasing")

    def __call__(self, p: float) -> float:
        return float(np.interp(p, self.pressures, self.ks))


@dataclass(frozen=True)
class ModifiedMcKibbenParams:
    geometry: MuscleGeometry
    k_table: KTable

    def eps_max_at(self, p):
        return self.geometry.eps_max_theoretical / self.k_table(p)

    def force(self, eps, p):
        return modified_mckibben_force(eps, p, self)

    def stiffness(self, eps, p):
        g = self.geometry
        _check_pressure(p)
        _check_eps(eps, self.eps_max_at(p))
        k = self.k_table(p)
        return 2.0 * g.a * g.area * p * k * (1.0 - k * eps) / g.l0


@dataclass(frozen=True)
class AndrikopoulosParams:
    geometry: MuscleGeometry
    q: float
    k_table: KTable

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise DomainError(f"q must lie in (0, 1], got {self.q!r}")

    @property
    def _base(self) -> ModifiedMcKibbenParams:
        return ModifiedMcKibbenParams(self.geometry, self.k_table)

    def eps_max_at(self, p):
        return self._base.eps_max_at(p)

    def force(self, eps, p):
        return andrikopoulos_force(eps, p, self)

    def stiffness(self, eps, p):
        return self.q * self._base.stiffness(eps, p)


@dataclass(frozen=True)
class RationalFestoParams:
    """Force ``pi*r0^2*[(a-b)P - eps*(cP+e)/(P+d)]``; c and d in Pa, e in Pa^2."""

    geometry: MuscleGeometry
    c: float
    d: float
    e: float

    def g(self, p: float) -> float:
        """The contraction slope term (cP + e)/(P + d)."""
        den = p + self.d
        if abs(den) <= POLE_TOL * max(1.0, abs(p), abs(self.d)):
            raise PoleError(f"P + d = {den!r} Pa is at the pole of (cP+e)/(P+d)")
        return (self.c * p + self.e) / den

    def eps_max_at(self, p):
        _check_pressure(p)
        num = self.c * p + self.e
        if num == 0.0:
            raise PoleError(f"cP + e vanishes at P = {p!r} Pa")
        self.g(p)  # pole check
        return self.geometry.a_minus_b * p * (p + self.d) / num

    def check_pressure_box(self, p_min: float, p_max: float) -> None:
        """Raise unless the force decreases with contraction everywhere in the box."""
        if -self.d >= p_min and -self.d <= p_max:
            raise PoleError(f"pole P = {-self.d!r} Pa lies inside [{p_min}, {p_max}]")
        for p in np.linspace(p_min, p_max, 101):
            if not self.g(float(p)) > 0:
                raise DomainError(f"(cP+e)/(P+d) must stay positive; fails at P = {p!r} Pa")

    def force(self, eps, p):
        return rational_festo_force(eps, p, self)

    def stiffness(self, eps, p):
        _check_pressure(p)
        _check_eps(eps, self.eps_max_at(p))
        return self.geometry.area / self.geometry.l0 * self.g(p)


@dataclass(frozen=True)
class PolynomialFestoParams:
    """Force ``pi*r0^2*[(a-b)P - eps*f(eps)]`` with ``f`` a polynomial (coefficients in Pa)."""

    geometry: MuscleGeometry
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("polynomial model needs at least one coefficient")

    @property
    def polynomial(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(self.coeffs)

    def eps_max_at(self, p):
        """Smallest positive contraction at which the force vanishes, or None."""
        _check_pressure(p)
        zero_force = np.polynomial.Polynomial((self.geometry.a_minus_b * p, *(-c for c in self.coeffs)))
        candidates = [
            r.real for r in zero_force.roots() if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and r.real > 0
        ]
        return min(candidates) if candidates else None

    def force(self, eps, p):
        return polynomial_festo_force(eps, p, self)

    def stiffness(self, eps, p):
        _check_pressure(p)
        _check_eps(eps, math.inf)
        f = self.polynomial
        return self.geometry.area / self.geometry.l0 * (f(eps) + eps * f.deriv()(eps))


@dataclass(frozen=True)
class HildebrandtModel:
    """``(c0 + c1 e + c2 e^2) P - (d0 + d1 e + d2 e^2 + d3 e^3 + d4 e^(2/3))``."""

    c: tuple[float, float, float]
    d: tuple[float, float, float, float, float]
    l0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.c) != 3 or len(self.d) != 5:
            raise ValueError(f"Hildebrandt model needs 3 c and 5 d coefficients, got {len(self.c)} and {len(self.d)}")

    def force(self, eps, p):
        return reference_model_force(eps, p, self)

    def stiffness(self, eps, p):
        if self.l0 is None:
            raise ValueError("stiffness needs l0")
        if eps < HILDEBRANDT_MIN_EPS:
            raise DomainError(
                f"Hildebrandt stiffness is unbounded as eps -> 0; need eps >= {HILDEBRANDT_MIN_EPS}"
            )
        c0, c1, c2 = self.c
        d0, d1, d2, d3, d4 = self.d
        dfde = (c1 + 2 * c2 * eps) * p - (d1 + 2 * d2 * eps + 3 * d3 * eps**2 + (2 / 3) * d4 * eps ** (-1 / 3))
        return -dfde / self.l0

    def eps_max_at(self, p):
        return None


@dataclass(frozen=True)
class SarosiModel:
    """``(c1 exp(c6 e) + c2 e + c3) P - (c4 exp(c6 e) - c5)``."""

    c: tuple[float, float, float, float, float, float]
    l0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if len(self.c) != 6:
            raise ValueError(f"Sarosi model needs 6 coefficients, got {len(self.c)}")

    def force(self, eps, p):
        return reference_model_force(eps, p, self)

    def stiffness(self, eps, p):
        if self.l0 is None:
            raise ValueError("stiffness needs l0")
        c1, c2, _, c4, _, c6 = self.c
        ex = math.exp(c6 * eps)
        dfde = (c1 * c6 * ex + c2) * p - c4 * c6 * ex
        return -dfde / self.l0

    def eps_max_at(self, p):
        return None


@dataclass(frozen=True)
class WickramatungeModel:
    """``K_M(l_s, P) * l_s`` with ``K_M = c3 P^2 + c2 P l_s + c1 l_s^2 + c0``.

    The first argument of ``force``/``stiffness`` is the stretched length
    ``l_s = l - min_length`` in meters, not a contraction ratio.
    ``l0`` is only needed to convert contraction ratios (``stretched_length``).
    """

    c: tuple[float, float, float, float]
    min_length: float
    l0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if len(self.c) != 4:
            raise ValueError(f"Wickramatunge model needs 4 coefficients, got {len(self.c)}")
        if not self.min_length >= 0:
            raise ValueError(f"min_length must be >= 0, got {self.min_length!r}")

    def stretched_length(self, eps: float) -> float:
        if self.l0 is None:
            raise ValueError("converting a contraction ratio needs l0")
        return self.l0 * (1.0 - eps) - self.min_length

    def force(self, l_s, p):
        return reference_model_force(l_s, p, self)

    def stiffness(self, l_s, p):
        if l_s < 0:
            raise DomainError(f"stretched length must be >= 0, got {l_s!r}")
        c0, c1, c2, c3 = self.c
        return c3 * p * p + 2 * c2 * p * l_s + 3 * c1 * l_s * l_s + c0

    def eps_max_at(self, p):
        return None


ReferenceModelSpec = Union[HildebrandtModel, SarosiModel, WickramatungeModel]

MuscleModel = Union[
    HoganParams,
    TheoreticalMcKibben,
    ModifiedMcKibbenParams,
    AndrikopoulosParams,
    RationalFestoParams,
    PolynomialFestoParams,
    HildebrandtModel,
    SarosiModel,
    WickramatungeModel,
]


# --------------------------------------------------------------------------
# force laws


def hogan_force(eps: float, u: float, params: HoganParams) -> float:
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"activation u must lie in [0, 1], got {u!r}")
    _check_eps(eps, params.eps_max)
    return u * params.f_max * (1.0 - eps / params.eps_max)


def theoretical_mckibben_force(eps: float, p: float, geom: MuscleGeometry) -> float:
    _check_pressure(p)
    if geom.eps_max_theoretical <= 0:
        raise DomainError("braid angle at or above 54.7356 deg: the muscle cannot contract", eps_max=0.0)
    _check_eps(eps, geom.eps_max_theoretical)
    return geom.area * p * (geom.a * (1.0 - eps) ** 2 - geom.b)


def modified_mckibben_force(eps: float, p: float, params: ModifiedMcKibbenParams) -> float:
    g = params.geometry
    _check_pressure(p)
    _check_eps(eps, params.eps_max_at(p))
    k = params.k_table(p)
    return g.area * p * (g.a * (1.0 - k * eps) ** 2 - g.b)


def andrikopoulos_force(eps: float, p: float, params: AndrikopoulosParams) -> float:
    return params.q * modified_mckibben_force(eps, p, params._base)


def rational_festo_force(eps: float, p: float, params: RationalFestoParams) -> float:
    _check_eps(eps, params.eps_max_at(p))
    g = params.geometry
    return g.area * (g.a_minus_b * p - eps * params.g(p))


def polynomial_festo_force(eps: float, p: float, params: PolynomialFestoParams) -> float:
    _check_pressure(p)
    _check_eps(eps, math.inf)
    g = params.geometry
    return g.area * (g.a_minus_b * p - eps * params.polynomial(eps))


def reference_model_force(x: float, p: float, spec: ReferenceModelSpec) -> float:
    """Evaluate one of the literature models with user-supplied coefficients.

    ``x`` is the contraction ratio for Hildebrandt and Sarosi, and the
    stretched length in meters for Wickramatunge.
    """
    if isinstance(spec, HildebrandtModel):
        if x < 0:
            raise DomainError(f"contraction ratio must be >= 0, got {x!r}")
        c0, c1, c2 = spec.c
        d0, d1, d2, d3, d4 = spec.d
        f1 = c0 + c1 * x + c2 * x * x
        f2 = d0 + d1 * x + d2 * x * x + d3 * x**3 + d4 * x ** (2 / 3)
        return f1 * p - f2
    if isinstance(spec, SarosiModel):
        c1, c2, c3, c4, c5, c6 = spec.c
        ex = math.exp(c6 * x)
        return (c1 * ex + c2 * x + c3) * p - (c4 * ex - c5)
    if isinstance(spec, WickramatungeModel):
        if x < 0:
            raise DomainError(f"stretched length must be >= 0, got {x!r}")
        c0, c1, c2, c3 = spec.c
        return (c3 * p * p + c2 * p * x + c1 * x * x + c0) * x
    raise TypeError(f"not a reference model: {type(spec).__name__}")


# --------------------------------------------------------------------------
# generic entry points


def muscle_force(model: MuscleModel, eps: float, control: float) -> float:
    return model.force(eps, control)


def muscle_stiffness(model: MuscleModel, eps: float, control: float) -> float:
    """Muscle stiffness in N/m at ``(eps, control)`` from the closed-form derivative."""
    return model.stiffness(eps, control)


def finite_difference_stiffness(model: MuscleModel, eps: float, control: float, rel_step: float = 1e-6) -> float:
    """Central-difference estimate of the stiffness returned by :func:`muscle_stiffness`.

    Raises DomainError when the stencil would leave the model's domain.
    """
    h = rel_step * max(1.0, abs(eps))
    force: Callable[[float], float] = lambda x: model.force(x, control)
    try:
        f_hi = force(eps + h)
        f_lo = force(eps - h)
    except DomainError as exc:
        raise DomainError(f"eps = {eps!r} is within one finite-difference step of the domain boundary") from exc
    slope = (f_hi - f_lo) / (2 * h)
    if isinstance(model, WickramatungeModel):
        return slope
    l0 = model.geometry.l0 if hasattr(model, "geometry") else model.l0
    return -slope / l0
