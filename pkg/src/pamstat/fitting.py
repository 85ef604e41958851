"""Parameter identification from datasheet anchors and measured curves."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import DomainError, FittingError, MuscleGeometry
from .muscles import (
    KTable,
    MuscleModel,
    PolynomialFestoParams,
    RationalFestoParams,
    WickramatungeModel,
)

MAX_POLY_ANCHORS = 6
MAX_CONDITION = 1e12
# more slope reversals than this on [0, max eps_max] means the fit oscillates
MAX_SLOPE_REVERSALS = 2


class WanderingWarning(UserWarning):
    """High-order polynomial fit oscillates between its anchors."""


@dataclass(frozen=True)
class ContractionAnchor:
    """Measured maximum contraction ratio at a constant pressure (Pa)."""

    pressure: float
    eps_max: float

    def __post_init__(self):
        if not self.pressure > 0:
            raise ValueError(f"anchor pressure must be positive, got {self.pressure!r}")
        if not 0.0 < self.eps_max < 1.0:
            raise ValueError(f"anchor eps_max must lie in (0, 1), got {self.eps_max!r}")


@dataclass(frozen=True)
class GeometryMeasurement:
    r_int: float
    t0: float
    f_max: float | None = None
    p_ref: float | None = None

    def __post_init__(self):
        if not self.r_int > 0:
            raise ValueError(f"r_int must be positive, got {self.r_int!r}")
        if not self.t0 >= 0:
            raise ValueError(f"t0 must be >= 0, got {self.t0!r}")


@dataclass(frozen=True)
class FitReport:
    model: MuscleModel
    residuals: tuple[float, ...]
    rmse: float
    max_abs_error: float
    out_of_domain_rows: tuple[int, ...] = field(default_factory=tuple)

    @property
    def n_evaluated(self) -> int:
        return len(self.residuals)

    @property
    def n_out_of_domain(self) -> int:
        return len(self.out_of_domain_rows)


def estimate_r0(m: GeometryMeasurement) -> float:
    """Braid radius, taking the braid to sit mid-way through the tube wall."""
    return m.r_int + m.t0 / 2.0


def estimate_alpha0(f_max: float, pressure: float, r0: float) -> float:
    """Braid angle (rad) reproducing the isometric force ``f_max`` at ``pressure``.

    From pi*r0^2*P*(a - b) = f_max and a - b = 2/sin^2(alpha0) - 3.
    """
    if not (f_max > 0 and pressure > 0 and r0 > 0):
        raise FittingError("f_max, pressure and r0 must all be positive")
    g = f_max / (math.pi * r0**2 * pressure)
    if not g > 0:
        raise FittingError(f"infeasible normalized force {g!r}")
    return math.asin(math.sqrt(2.0 / (3.0 + g)))


def _anchor_matrix(anchors: Sequence[ContractionAnchor]) -> np.ndarray:
    eps = np.array([an.eps_max for an in anchors])
    return np.column_stack([eps ** (j + 1) for j in range(len(anchors))])


def vandermonde_condition(anchors: Sequence[ContractionAnchor]) -> float:
    return float(np.linalg.cond(_anchor_matrix(anchors)))


def fit_polynomial_coeffs(
    anchors: Sequence[ContractionAnchor], geom: MuscleGeometry
) -> PolynomialFestoParams:
    """Polynomial f(eps) of order len(anchors) whose force vanishes at every anchor.

    Emits :class:`WanderingWarning` when the fitted f(eps) oscillates.
    """
    anchors = list(anchors)
    n = len(anchors)
    if n < 1:
        raise FittingError("need at least one anchor")
    if n > MAX_POLY_ANCHORS:
        raise FittingError(f"at most {MAX_POLY_ANCHORS} anchors are supported, got {n}")
    eps = sorted(an.eps_max for an in anchors)
    for lo, hi in zip(eps, eps[1:]):
        if hi - lo <= 1e-12 * hi:
            raise FittingError(f"duplicate eps_max {lo!r}: the anchor matrix is singular (condition = inf)")
    mat = _anchor_matrix(anchors)
    cond = float(np.linalg.cond(mat))
    if not cond < MAX_CONDITION:
        raise FittingError(f"anchor matrix is near-singular (condition = {cond:.3g})")
    rhs = geom.a_minus_b * np.array([an.pressure for an in anchors])
    coeffs = np.linalg.solve(mat, rhs)
    params = PolynomialFestoParams(geom, tuple(coeffs))
    reversals = slope_reversals(params, max(eps))
    if reversals > MAX_SLOPE_REVERSALS:
        warnings.warn(
            f"fitted f(eps) reverses slope {reversals} times on [0, {max(eps):.4g}]: "
            "the interpolant wanders between anchors",
            WanderingWarning,
            stacklevel=2,
        )
    return params


def slope_reversals(params: PolynomialFestoParams, eps_hi: float) -> int:
    """Number of sign changes of f'(eps) on the open interval (0, eps_hi)."""
    df = params.polynomial.deriv()
    if df.degree() < 1:
        return 0
    count = 0
    for r in df.roots():
        if abs(r.imag) > 1e-9 * max(1.0, abs(r)) or not 0.0 < r.real < eps_hi:
            continue
        # only odd-multiplicity crossings flip the sign of the slope
        h = 1e-7 * max(eps_hi, 1e-12)
        if np.sign(df(r.real - h)) != np.sign(df(r.real + h)):
            count += 1
    return count


def _rational_printed_form(
    anchor_i: ContractionAnchor, anchor_ii: ContractionAnchor, c: float, a_minus_b: float
) -> tuple[float, float]:
    p1, e1 = anchor_i.pressure, anchor_i.eps_max
    p2, e2 = anchor_ii.pressure, anchor_ii.eps_max
    rho = e2 / e1
    den = p2 - rho * p1
    d = -(p2**2 - rho * p1**2) / den + c / a_minus_b * (p2 - p1) * e2 / den
    e = a_minus_b * p1 * (p1 + d) / e1 - c * p1
    return d, e


def fit_rational_params(
    anchor_i: ContractionAnchor, anchor_ii: ContractionAnchor, c: float, geom: MuscleGeometry
) -> RationalFestoParams:
    """Solve for (d, e) so that the force vanishes at both anchors, with c fixed.

    The zero-force condition eps_max*(cP + e) = (a-b)*P*(P + d) is linear in
    (d, e), so the two anchors give a 2x2 system.
    """
    k = geom.a_minus_b
    p1, e1 = anchor_i.pressure, anchor_i.eps_max
    p2, e2 = anchor_ii.pressure, anchor_ii.eps_max
    if p1 == p2:
        raise FittingError("anchors must have distinct pressures")
    # rows: -k*P*d + eps*e = k*P^2 - eps*c*P
    det = k * (e1 * p2 - e2 * p1)
    if abs(det) <= 1e-12 * k * max(e1 * p2, e2 * p1):
        raise FittingError("degenerate anchors: P_II - (eps_II/eps_I)*P_I is zero")
    r1 = k * p1 * p1 - e1 * c * p1
    r2 = k * p2 * p2 - e2 * c * p2
    d = (r1 * e2 - r2 * e1) / det
    e = (-k * p1 * r2 + k * p2 * r1) / det

    d_chk, e_chk = _rational_printed_form(anchor_i, anchor_ii, c, k)
    if not (math.isclose(d, d_chk, rel_tol=1e-9, abs_tol=1e-6) and math.isclose(e, e_chk, rel_tol=1e-9, abs_tol=1e-3)):
        raise FittingError(f"closed-form cross-check failed: ({d}, {e}) vs ({d_chk}, {e_chk})")
    return RationalFestoParams(geom, c=c, d=d, e=e)


def grid_search_c(
    anchor_i: ContractionAnchor,
    anchor_ii: ContractionAnchor,
    others: Sequence[ContractionAnchor],
    c_values: Iterable[float],
    geom: MuscleGeometry,
) -> tuple[RationalFestoParams, float]:
    """Advisory helper: pick c minimizing the worst eps_max error on ``others``.

    Returns the best parameters and that worst-case error. Candidates that
    are degenerate or hit the pole at an anchor are skipped.
    """
    best: tuple[RationalFestoParams, float] | None = None
    for c in c_values:
        try:
            params = fit_rational_params(anchor_i, anchor_ii, c, geom)
            err = max((abs(params.eps_max_at(an.pressure) - an.eps_max) for an in others), default=0.0)
        except (FittingError, DomainError):
            continue
        if best is None or err < best[1]:
            best = (params, err)
    if best is None:
        raise FittingError("no admissible c value in the grid")
    return best


def fit_k_table(anchors: Sequence[ContractionAnchor], geom: MuscleGeometry) -> KTable:
    """k(P_i) = eps_max_theoretical / eps_max(P_i), sorted by pressure."""
    pairs = sorted((an.pressure, geom.eps_max_theoretical / an.eps_max) for an in anchors)
    if not pairs:
        raise FittingError("need at least one anchor")
    return KTable(tuple(p for p, _ in pairs), tuple(k for _, k in pairs))


def residual_report(model: MuscleModel, data) -> FitReport:
    """Residuals ``F_model - F_measured`` over a :class:`ForceCurveDataset`.

    Samples outside the model domain are listed by row, never dropped
    silently; RMSE and max error cover the evaluated samples only.
    """
    if len(data.samples) == 0:
        raise FittingError("dataset is empty")
    residuals = []
    skipped = []
    for s in data.samples:
        x = model.stretched_length(s.eps) if isinstance(model, WickramatungeModel) else s.eps
        try:
            residuals.append(model.force(x, s.pressure) - s.force)
        except DomainError:
            skipped.append(s.row)
    if residuals:
        arr = np.asarray(residuals)
        rmse = float(np.sqrt(np.mean(arr**2)))
        max_abs = float(np.max(np.abs(arr)))
    else:
        rmse = max_abs = math.nan
    return FitReport(model, tuple(residuals), rmse, max_abs, tuple(skipped))
