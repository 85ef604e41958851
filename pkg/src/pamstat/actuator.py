"""Direct and inverse statics of the antagonist pulley actuator.

Two identical muscles pull on a pulley of radius R. Muscle 1 is the
agonist: its contraction grows with positive joint angle,

    eps1 = eps0 + R*theta/l0,    eps2 = eps0 - R*theta/l0,

and the joint torque is T = R*(F1 - F2). The actuator stiffness is
K = -dT/dtheta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .core import BAR, DomainError, PoleError
from .cubic import solve_cubic
from .muscles import (
    EPS_TOL,
    HoganParams,
    MuscleModel,
    RationalFestoParams,
    TheoreticalMcKibben,
)

ANGLE_TOL = 1e-12
PRESSURE_TOL = 1e-9  # Pa


class Feasibility(str, Enum):
    FEASIBLE = "feasible"
    CLIPPED = "clipped-infeasible"
    NO_REAL_ROOT = "no-real-root"


@dataclass(frozen=True)
class ActuatorConfig:
    """Pulley radius, initial contraction and pressure box of a symmetric actuator.

    ``muscle`` drives both sides. Pressures are in Pa; for a Hogan muscle
    the pressure box is ignored and activations live in [0, 1].
    """

    R: float
    eps0: float
    muscle: MuscleModel
    eps_threshold: float = 0.025
    p_min: float = 0.0
    p_max: float = 5.0 * BAR

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"pulley radius must be positive, got {self.R!r}")
        if not 0.0 <= self.eps_threshold <= self.eps0:
            raise DomainError(
                f"need 0 <= eps_threshold <= eps0, got eps_threshold={self.eps_threshold!r}, eps0={self.eps0!r}"
            )
        if not self.p_min < self.p_max:
            raise DomainError(f"need p_min < p_max, got [{self.p_min!r}, {self.p_max!r}]")
        if isinstance(self.muscle, RationalFestoParams):
            self.muscle.check_pressure_box(self.p_min, self.p_max)
        if self.eps0 > self.eps_upper:
            raise DomainError(f"eps0 = {self.eps0!r} exceeds the maximum contraction {self.eps_upper!r}")

    @property
    def l0(self) -> float:
        m = self.muscle
        return m.l0 if isinstance(m, HoganParams) else m.geometry.l0

    @property
    def eps_upper(self) -> float:
        """Largest contraction either muscle may reach (at the top of the pressure box)."""
        m = self.muscle
        if isinstance(m, HoganParams):
            return m.eps_max
        return m.eps_max_at(self.p_max)


@dataclass(frozen=True)
class TorqueStiffness:
    torque: float  # N*m
    stiffness: float  # N*m/rad


@dataclass(frozen=True)
class InverseSolution:
    """Pressure pair (Pa) answering an inverse query, with its forward check.

    Infeasible solutions keep the unclipped algebraic pressures in
    ``p1``/``p2`` (NaN when no real root exists); :attr:`clipped` gives the
    nearest commandable pair.
    """

    p1: float
    p2: float
    tag: Feasibility
    torque_residual: float
    stiffness_residual: float
    p_min: float = 0.0
    p_max: float = 5.0 * BAR
    message: str = ""

    @property
    def feasible(self) -> bool:
        return self.tag is Feasibility.FEASIBLE

    @property
    def clipped(self) -> tuple[float, float]:
        return (
            float(np.clip(self.p1, self.p_min, self.p_max)),
            float(np.clip(self.p2, self.p_min, self.p_max)),
        )


@dataclass(frozen=True)
class ActivationSolution:
    """Hogan-model inverse: activations u1, u2 in [0, 1] when feasible."""

    u1: float
    u2: float
    tag: Feasibility
    torque_residual: float
    stiffness_residual: float
    message: str = ""

    @property
    def feasible(self) -> bool:
        return self.tag is Feasibility.FEASIBLE

    @property
    def clipped(self) -> tuple[float, float]:
        return float(np.clip(self.u1, 0.0, 1.0)), float(np.clip(self.u2, 0.0, 1.0))


# --------------------------------------------------------------------------
# kinematics


def joint_limits(cfg: ActuatorConfig) -> tuple[float, float]:
    """Symmetric joint range (rad) keeping both contractions above the threshold."""
    theta_max = cfg.l0 / cfg.R * (cfg.eps0 - cfg.eps_threshold)
    return -theta_max, theta_max


def contraction_ratios(theta: float, cfg: ActuatorConfig) -> tuple[float, float]:
    _, theta_max = joint_limits(cfg)
    if abs(theta) > theta_max + ANGLE_TOL * max(1.0, theta_max):
        raise DomainError(f"joint angle {math.degrees(theta):.6g} deg outside +/-{math.degrees(theta_max):.6g} deg")
    x = cfg.R * theta / cfg.l0
    eps1, eps2 = cfg.eps0 + x, cfg.eps0 - x
    if max(eps1, eps2) > cfg.eps_upper + EPS_TOL:
        raise DomainError(
            f"contraction {max(eps1, eps2)!r} exceeds the maximum {cfg.eps_upper!r}", eps_max=cfg.eps_upper
        )
    return eps1, eps2


def _check_box(cfg: ActuatorConfig, *pressures: float) -> None:
    for p in pressures:
        if not cfg.p_min - PRESSURE_TOL <= p <= cfg.p_max + PRESSURE_TOL:
            raise DomainError(f"pressure {p / BAR:.6g} bar outside [{cfg.p_min / BAR:g}, {cfg.p_max / BAR:g}] bar")


def _in_box(cfg: ActuatorConfig, p: float) -> bool:
    return cfg.p_min - PRESSURE_TOL <= p <= cfg.p_max + PRESSURE_TOL


def _muscle_of(cfg: ActuatorConfig, kind: type):
    if not isinstance(cfg.muscle, kind):
        raise TypeError(f"this actuator model needs a {kind.__name__} muscle, got {type(cfg.muscle).__name__}")
    return cfg.muscle


# --------------------------------------------------------------------------
# Hogan actuator


def _hogan_ts(u1: float, u2: float, theta: float, cfg: ActuatorConfig) -> TorqueStiffness:
    hp = cfg.muscle
    R, l0 = cfg.R, cfg.l0
    torque = R * hp.f_max * (
        (1.0 - cfg.eps0 / hp.eps_max) * (u1 - u2) - (R * theta / (l0 * hp.eps_max)) * (u1 + u2)
    )
    stiffness = R * R * hp.f_max / (l0 * hp.eps_max) * (u1 + u2)
    return TorqueStiffness(torque, stiffness)


def hogan_direct(u1: float, u2: float, theta: float, cfg: ActuatorConfig) -> TorqueStiffness:
    _muscle_of(cfg, HoganParams)
    for u in (u1, u2):
        if not 0.0 <= u <= 1.0:
            raise DomainError(f"activation {u!r} outside [0, 1]")
    contraction_ratios(theta, cfg)
    return _hogan_ts(u1, u2, theta, cfg)


def hogan_equilibrium(u1: float, u2: float, cfg: ActuatorConfig) -> float:
    hp = _muscle_of(cfg, HoganParams)
    if not u1 + u2 > 0:
        raise DomainError("equilibrium undefined for u1 + u2 = 0")
    stiffness = _hogan_ts(u1, u2, 0.0, cfg).stiffness
    return (1.0 - cfg.eps0 / hp.eps_max) * cfg.R * hp.f_max * (u1 - u2) / stiffness


def hogan_inverse(theta: float, K: float, cfg: ActuatorConfig, torque: float = 0.0) -> ActivationSolution:
    """Activations producing stiffness ``K`` and torque ``torque`` at ``theta``."""
    hp = _muscle_of(cfg, HoganParams)
    R, l0 = cfg.R, cfg.l0
    total = K * l0 * hp.eps_max / (R * R * hp.f_max)
    diff = (torque + K * theta) / (R * hp.f_max * (1.0 - cfg.eps0 / hp.eps_max))
    u1, u2 = (total + diff) / 2.0, (total - diff) / 2.0
    check = _hogan_ts(u1, u2, theta, cfg)
    t_res, k_res = abs(check.torque - torque), abs(check.stiffness - K)
    problems = []
    if not 0.0 < total <= 2.0:
        problems.append(f"u1 + u2 = {total:.6g} outside (0, 2]")
    if not (-EPS_TOL <= u1 <= 1 + EPS_TOL and -EPS_TOL <= u2 <= 1 + EPS_TOL):
        problems.append(f"(u1, u2) = ({u1:.6g}, {u2:.6g}) outside [0, 1]")
    try:
        contraction_ratios(theta, cfg)
    except DomainError as exc:
        problems.append(str(exc))
    if problems:
        return ActivationSolution(u1, u2, Feasibility.CLIPPED, t_res, k_res, "; ".join(problems))
    return ActivationSolution(u1, u2, Feasibility.FEASIBLE, t_res, k_res)


# --------------------------------------------------------------------------
# theoretical McKibben actuator


def _mckibben_ts(p1: float, p2: float, theta: float, cfg: ActuatorConfig) -> TorqueStiffness:
    g = cfg.muscle.geometry
    R, l0, e0 = cfg.R, g.l0, cfg.eps0
    x = R * theta / l0
    diff, total = p1 - p2, p1 + p2
    torque = g.area * R * (
        (g.a * ((1 - e0) ** 2 + x * x) - g.b) * diff - 2 * g.a * (1 - e0) * x * total
    )
    stiffness = 2 * g.a * g.area * R * R / l0 * ((1 - e0) * total - x * diff)
    return TorqueStiffness(torque, stiffness)


def mckibben_direct(p1: float, p2: float, theta: float, cfg: ActuatorConfig) -> TorqueStiffness:
    _muscle_of(cfg, TheoreticalMcKibben)
    _check_box(cfg, p1, p2)
    contraction_ratios(theta, cfg)
    return _mckibben_ts(p1, p2, theta, cfg)


def mckibben_inverse(theta: float, K: float, cfg: ActuatorConfig, torque: float = 0.0) -> InverseSolution:
    """Pressures giving stiffness ``K`` and torque ``torque`` at ``theta`` (closed form)."""
    g = _muscle_of(cfg, TheoreticalMcKibben).geometry
    R, l0, e0 = cfg.R, g.l0, cfg.eps0
    x = R * theta / l0
    f_theta = g.a * ((1 - e0) ** 2 - x * x) - g.b
    if abs(f_theta) <= 1e-12 * g.a:
        raise DomainError(f"f(theta) vanishes at theta = {math.degrees(theta):.6g} deg")
    diff = (torque + K * theta) / (g.area * R * f_theta)
    A = 2 * g.a * g.area * R * R * (1 - e0) / l0
    total = (K + 2 * g.a * R * R * theta / (l0 * l0 * f_theta) * (torque + K * theta)) / A
    p1, p2 = (total + diff) / 2.0, (total - diff) / 2.0
    check = _mckibben_ts(p1, p2, theta, cfg)
    t_res, k_res = abs(check.torque - torque), abs(check.stiffness - K)
    problems = []
    if not total > 0:
        problems.append(f"P1 + P2 = {total / BAR:.6g} bar is not positive")
    for name, p in (("P1", p1), ("P2", p2)):
        if not _in_box(cfg, p):
            problems.append(f"{name} = {p / BAR:.6g} bar outside the pressure box")
    try:
        contraction_ratios(theta, cfg)
    except DomainError as exc:
        problems.append(str(exc))
    tag = Feasibility.CLIPPED if problems else Feasibility.FEASIBLE
    return InverseSolution(p1, p2, tag, t_res, k_res, cfg.p_min, cfg.p_max, "; ".join(problems))


# --------------------------------------------------------------------------
# rational Festo actuator


def _festo_ts(p1: float, p2: float, theta: float, cfg: ActuatorConfig) -> TorqueStiffness:
    m = cfg.muscle
    geo = m.geometry
    R, l0 = cfg.R, geo.l0
    g1, g2 = m.g(p1), m.g(p2)
    x = R * theta / l0
    torque = geo.area * R * (geo.a_minus_b * (p1 - p2) - cfg.eps0 * (g1 - g2) - x * (g1 + g2))
    stiffness = geo.area * R * R / l0 * (g1 + g2)
    return TorqueStiffness(torque, stiffness)


def festo_direct(
    p1: float, p2: float, theta: float, cfg: ActuatorConfig, strict: bool = False
) -> TorqueStiffness:
    """Torque and stiffness of the rational-model actuator.

    With ``strict`` each contraction must also stay below the zero-force
    contraction eps_max(P_i) of its own muscle.
    """
    m = _muscle_of(cfg, RationalFestoParams)
    _check_box(cfg, p1, p2)
    eps1, eps2 = contraction_ratios(theta, cfg)
    if strict:
        for eps, p in ((eps1, p1), (eps2, p2)):
            em = m.eps_max_at(p)
            if eps > em + EPS_TOL:
                raise DomainError(
                    f"contraction {eps:.6g} beyond eps_max({p / BAR:.6g} bar) = {em:.6g}", eps_max=em
                )
    return _festo_ts(p1, p2, theta, cfg)


def festo_equilibrium(p1: float, p2: float, cfg: ActuatorConfig) -> float:
    """Joint angle where the rational-model torque vanishes.

    With E = e - c*d, u = P1 + d, v = P2 + d:
    theta = (l0/R) (u - v) (eps0 + (a-b) u v / E) / (u + v + 2 c u v / E),
    which is the familiar (P1-P2)/(P1+P2+2d) form when c = 0.
    """
    m = _muscle_of(cfg, RationalFestoParams)
    geo = m.geometry
    m.g(p1), m.g(p2)  # pole checks
    E = m.e - m.c * m.d
    u, v = p1 + m.d, p2 + m.d
    uv = u * v
    den = u + v + 2.0 * m.c * uv / E
    if abs(den) <= 1e-12 * max(abs(u), abs(v), 1.0):
        raise DomainError("degenerate equilibrium: P1 + P2 + 2d (+ 2c(P1+d)(P2+d)/E) vanishes")
    return geo.l0 / cfg.R * (u - v) * (cfg.eps0 + geo.a_minus_b * uv / E) / den


def init_contraction(params: RationalFestoParams, p_max: float = 5.0 * BAR) -> float:
    """Initial contraction eps0 = eps_max(p_max) / 2."""
    return params.eps_max_at(p_max) / 2.0


def _festo_cubic_candidates(theta: float, K: float, cfg: ActuatorConfig) -> list[tuple[float, float]]:
    """All real pressure pairs satisfying T = 0 and stiffness K at ``theta``.

    With u = P+d, v = P2+d, m = uv, s = u+v, delta = u-v, E = e - c*d and
    A0 = pi*r0^2*R^2/l0, the stiffness gives s = k*m with
    k = K/(A0*E) - 2c/E, and T = 0 gives
    delta*(eps0 + beta*m) = x*kappa*m with beta = (a-b)/E, kappa = K/(A0*E).
    Eliminating delta through delta^2 = s^2 - 4m leaves a cubic in m:
    x^2 kappa^2 m = (k^2 m - 4)(eps0 + beta m)^2.
    """
    prm = cfg.muscle
    geo = prm.geometry
    R, l0, e0 = cfg.R, geo.l0, cfg.eps0
    x = R * theta / l0
    A0 = geo.area * R * R / l0
    E = prm.e - prm.c * prm.d
    kappa = K / (A0 * E)
    k = kappa - 2.0 * prm.c / E
    beta = geo.a_minus_b / E
    if k == 0.0 or beta == 0.0:
        return []

    # solve for m in bar^2 so the coefficients stay O(1); k and kappa are 1/Pa
    sc = BAR * BAR
    kt, bt, kat = k * BAR, beta * sc, kappa * BAR
    lead = kt * kt * bt * bt
    a2 = (2 * kt * kt * e0 * bt - 4 * bt * bt) / lead
    a1 = (kt * kt * e0 * e0 - 8 * e0 * bt - x * x * kat * kat) / lead
    a0 = (-4 * e0 * e0) / lead

    pairs = []
    for mt in solve_cubic((a2, a1, a0)).roots:
        m_uv = mt * sc
        s = k * m_uv
        disc = s * s - 4 * m_uv
        if disc < -1e-9 * max(s * s, abs(m_uv)):
            continue
        root_disc = math.sqrt(max(disc, 0.0))
        den = e0 + beta * m_uv
        if abs(den) > 1e-9 * max(e0, abs(beta * m_uv)):
            deltas = [x * kappa * m_uv / den]
        elif abs(x * kappa * m_uv) <= 1e-12 * max(abs(s), 1.0):
            # theta = 0 with a vanishing bracket: any split of s works
            deltas = [root_disc, -root_disc]
        else:
            continue
        for delta in deltas:
            u, v = (s + delta) / 2.0, (s - delta) / 2.0
            pairs.append((u - prm.d, v - prm.d))
    return pairs


def festo_inverse(theta: float, K: float, cfg: ActuatorConfig) -> InverseSolution:
    """Pressures holding the rational-model actuator in equilibrium at ``theta`` with stiffness ``K``.

    Every real root of the elimination cubic is turned into a candidate
    pair and checked against :func:`festo_direct`. Among candidates inside
    the pressure box and contraction domain the one with the smallest
    forward residual wins, ties going to the lower P1 + P2.
    """
    prm = _muscle_of(cfg, RationalFestoParams)
    if not K > 0:
        return InverseSolution(
            math.nan, math.nan, Feasibility.NO_REAL_ROOT, math.nan, math.nan, cfg.p_min, cfg.p_max,
            f"requested stiffness {K!r} must be positive",
        )
    eps1, eps2 = cfg.eps0 + cfg.R * theta / cfg.l0, cfg.eps0 - cfg.R * theta / cfg.l0
    _, theta_max = joint_limits(cfg)
    angle_ok = abs(theta) <= theta_max + ANGLE_TOL * max(1.0, theta_max)

    scored = []
    for p1, p2 in _festo_cubic_candidates(theta, K, cfg):
        try:
            ts = _festo_ts(p1, p2, theta, cfg)
        except PoleError:
            continue
        t_res, k_res = abs(ts.torque), abs(ts.stiffness - K)
        problems = []
        if not angle_ok:
            problems.append(f"joint angle outside +/-{math.degrees(theta_max):.6g} deg")
        for name, p, eps in (("P1", p1, eps1), ("P2", p2, eps2)):
            if not _in_box(cfg, p):
                problems.append(f"{name} = {p / BAR:.6g} bar outside the pressure box")
                continue
            em = prm.eps_max_at(max(p, cfg.p_min))
            if not cfg.eps_threshold - EPS_TOL <= eps <= em + EPS_TOL:
                problems.append(f"eps = {eps:.6g} outside [{cfg.eps_threshold:g}, eps_max({p / BAR:.4g} bar) = {em:.6g}]")
        score = k_res / K + t_res / K
        scored.append((bool(problems), score, p1 + p2, p1, p2, t_res, k_res, "; ".join(problems)))

    if not scored:
        return InverseSolution(
            math.nan, math.nan, Feasibility.NO_REAL_ROOT, math.nan, math.nan, cfg.p_min, cfg.p_max,
            "no real pressure pair satisfies the equilibrium and stiffness constraints",
        )
    # residuals below 1e-9 are round-off; treat them as ties
    scored.sort(key=lambda c: (c[0], c[1] if c[1] > 1e-9 else 0.0, c[2]))
    bad, _, _, p1, p2, t_res, k_res, msg = scored[0]
    tag = Feasibility.CLIPPED if bad else Feasibility.FEASIBLE
    return InverseSolution(p1, p2, tag, t_res, k_res, cfg.p_min, cfg.p_max, msg)


# --------------------------------------------------------------------------
# stiffness range and sweeps


def stiffness_interval(cfg: ActuatorConfig) -> tuple[float, float]:
    """Stiffness at theta = 0 with both pressures at p_min and at p_max."""
    if isinstance(cfg.muscle, RationalFestoParams):
        ts = _festo_ts
    elif isinstance(cfg.muscle, TheoreticalMcKibben):
        ts = _mckibben_ts
    else:
        raise TypeError("stiffness_interval needs a pressure-driven muscle model")
    lo = ts(cfg.p_min, cfg.p_min, 0.0, cfg).stiffness
    hi = ts(cfg.p_max, cfg.p_max, 0.0, cfg).stiffness
    return min(lo, hi), max(lo, hi)


@dataclass(frozen=True)
class SweepRow:
    stiffness: float
    theta: float
    p1: float
    p2: float
    tag: Feasibility

    @property
    def diff(self) -> float:
        return self.p1 - self.p2

    @property
    def total(self) -> float:
        return self.p1 + self.p2

    @property
    def feasible(self) -> bool:
        return self.tag is Feasibility.FEASIBLE


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, robust to floating-point step accumulation."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    if stop < start:
        raise ValueError(f"empty grid: stop {stop!r} < start {start!r}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + i * step for i in range(n + 1)]


def sweep_inverse(
    kind: str, k_values: Iterable[float], theta_values: Sequence[float], cfg: ActuatorConfig
) -> list[SweepRow]:
    """Inverse model on a (K, theta) grid, K-major and theta-minor, both ascending.

    Infeasible points are kept with their tag.
    """
    solvers = {"mckibben": mckibben_inverse, "festo": festo_inverse}
    try:
        solve = solvers[kind]
    except KeyError:
        raise ValueError(f"unknown sweep model {kind!r}; expected one of {sorted(solvers)}") from None
    ks = sorted(k_values)
    thetas = sorted(theta_values)
    if not ks or not thetas:
        raise ValueError("empty sweep grid")
    rows = []
    for K in ks:
        for theta in thetas:
            sol = solve(theta, K, cfg)
            rows.append(SweepRow(K, theta, sol.p1, sol.p2, sol.tag))
    return rows
