"""Closed-form real roots of monic cubics x^3 + a2*x^2 + a1*x + a0 = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

_D_GUARD = 1e-12


class CubicBranch(str, Enum):
    ONE_REAL = "one-real"
    THREE_REAL = "three-real"
    MULTIPLE = "multiple"


@dataclass(frozen=True)
class CubicCoefficients:
    a2: float
    a1: float
    a0: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a2, self.a1, self.a0)):
            raise ValueError(f"cubic coefficients must be finite, got {self}")

    def __call__(self, x: float) -> float:
        return ((x + self.a2) * x + self.a1) * x + self.a0

    def derivative(self, x: float) -> float:
        return (3.0 * x + 2.0 * self.a2) * x + self.a1

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.a0), abs(self.a1), abs(self.a2))


@dataclass(frozen=True)
class CubicRoots:
    roots: tuple[float, ...]
    discriminant: float
    branch: CubicBranch

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _newton_polish(c: CubicCoefficients, x: float, steps: int = 4) -> float:
    fx = c(x)
    for _ in range(steps):
        dfx = c.derivative(x)
        if fx == 0.0 or dfx == 0.0 or not math.isfinite(dfx):
            break
        x_new = x - fx / dfx
        f_new = c(x_new)
        # keep a step only if it helps; near multiple roots Newton can overshoot
        if not abs(f_new) < abs(fx):
            break
        x, fx = x_new, f_new
    return x


def _scale_exponent(a2: float, a1: float, a0: float) -> int:
    """Binary exponent of the root magnitude; scaling by 2**k is exact."""
    size = max(abs(a2), math.sqrt(abs(a1)), abs(a0) ** (1.0 / 3.0))
    return math.frexp(size)[1] if size > 0.0 else 0


def _ldexp(x: float, k: int) -> float:
    try:
        return math.ldexp(x, k)
    except OverflowError:
        return math.copysign(math.inf, x)


def solve_cubic(coeffs: CubicCoefficients | tuple[float, float, float]) -> CubicRoots:
    """Real roots of a monic cubic, in ascending order.

    Uses the depressed form y^3 + p*y + q = 0 with y = x + a2/3 and the
    discriminant D = q^2/4 + p^3/27. D > 0 gives one real root (Cardano),
    D < 0 three (trigonometric form). When |D| is within round-off of zero
    the multiple-root formulas are used instead.
    """
    c = coeffs if isinstance(coeffs, CubicCoefficients) else CubicCoefficients(*coeffs)
    # solve for z = x / s so that p^3 and q^2 neither overflow nor underflow
    k = _scale_exponent(c.a2, c.a1, c.a0)
    a2, a1, a0 = math.ldexp(c.a2, -k), math.ldexp(c.a1, -2 * k), math.ldexp(c.a0, -3 * k)
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = a0 - a1 * a2 / 3.0 + 2.0 * a2**3 / 27.0
    disc = q * q / 4.0 + p**3 / 27.0

    # scale-free guard: compare D with the two terms it is made of
    if abs(disc) <= _D_GUARD * max(q * q / 4.0, abs(p) ** 3 / 27.0):
        branch = CubicBranch.MULTIPLE
        if abs(p) <= _D_GUARD * max(a2 * a2, abs(a1)):
            ys = [0.0]
        else:
            # simple root 3q/p, double root -3q/(2p)
            ys = [3.0 * q / p, -1.5 * q / p]
    elif disc > 0.0:
        branch = CubicBranch.ONE_REAL
        # cube root of the larger-magnitude term first, the other from u*v = -p/3
        w = -q / 2.0 - math.copysign(math.sqrt(disc), q)
        u = float(np.cbrt(w))
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        ys = [u + v]
    else:
        branch = CubicBranch.THREE_REAL
        r = math.sqrt(-(p**3) / 27.0)
        arg = -q / (2.0 * r)
        arg = min(1.0, max(-1.0, arg))
        t = math.acos(arg)
        m = 2.0 * math.sqrt(-p / 3.0)
        ys = [m * math.cos(t / 3.0 + 2.0 * math.pi * k / 3.0) for k in range(3)]

    roots = sorted(_newton_polish(c, math.ldexp(y - shift, k)) for y in ys)
    return CubicRoots(tuple(roots), _ldexp(disc, 6 * k), branch)
