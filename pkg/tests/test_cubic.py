import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from pamstat.cubic import CubicBranch, CubicCoefficients, solve_cubic


def _real_roots_by_bracketing(c: CubicCoefficients) -> list[float]:
    """Independent oracle: bracket sign changes between the critical points."""
    size = max(abs(c.a2), math.sqrt(abs(c.a1)), abs(c.a0) ** (1 / 3))
    bound = 2 * size  # Fujiwara bound on |x|
    if bound == 0:
        return [0.0]
    disc = c.a2 * c.a2 - 3 * c.a1
    knots = [-bound]
    if disc > 0:
        r = math.sqrt(disc)
        knots += sorted([(-c.a2 - r) / 3, (-c.a2 + r) / 3])
    knots.append(bound)
    roots = []
    for lo, hi in zip(knots, knots[1:]):
        flo, fhi = c(lo), c(hi)
        if flo == 0:
            roots.append(lo)
        elif flo * fhi < 0:
            roots.append(brentq(c, lo, hi, xtol=1e-300 + 1e-16 * size, rtol=4 * np.finfo(float).eps, maxiter=500))
    return roots


@pytest.mark.parametrize(
    "coeffs,expected,branch",
    [
        ((-6.0, 11.0, -6.0), [1.0, 2.0, 3.0], CubicBranch.THREE_REAL),
        ((0.0, 0.0, -8.0), [2.0], CubicBranch.ONE_REAL),
        ((-3.0, 3.0, -1.0), [1.0], CubicBranch.MULTIPLE),
        ((0.0, -3.0, 2.0), [-2.0, 1.0], CubicBranch.MULTIPLE),
        ((0.0, 1.0, 0.0), [0.0], CubicBranch.ONE_REAL),
    ],
)
def test_known_cubics(coeffs, expected, branch):
    res = solve_cubic(coeffs)
    assert res.branch is branch
    assert list(res.roots) == pytest.approx(expected, abs=1e-12)


def test_roots_sorted_and_accepts_dataclass():
    res = solve_cubic(CubicCoefficients(-6.0, 11.0, -6.0))
    assert list(res.roots) == sorted(res.roots)
    assert len(res) == 3


def test_rejects_nonfinite_coefficients():
    with pytest.raises(ValueError):
        CubicCoefficients(float("nan"), 0.0, 1.0)


def test_large_cancellation_case_stays_accurate():
    # x^3 - 1e6 x^2 + ... with roots 1e-3, 1, 1e6 - naive Cardano loses the small one
    r = (1e-3, 1.0, 1e6)
    a2 = -sum(r)
    a1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
    a0 = -r[0] * r[1] * r[2]
    res = solve_cubic((a2, a1, a0))
    assert list(res.roots) == pytest.approx(r, rel=1e-9)


# magnitudes below 1e-100 make the oracle's own polynomial evaluation underflow
_coeff = st.floats(min_value=-50, max_value=50, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-100)


@settings(max_examples=300, deadline=None)
@given(st.lists(_coeff, min_size=3, max_size=3))
def test_random_cubics_agree_with_bracketing(c):
    coeffs = CubicCoefficients(*c)
    res = solve_cubic(coeffs)
    scale = max(1.0, abs(coeffs.a2), abs(coeffs.a1), abs(coeffs.a0))
    size = max(abs(coeffs.a2), math.sqrt(abs(coeffs.a1)), abs(coeffs.a0) ** (1 / 3))
    for x in res.roots:
        assert abs(coeffs(x)) <= 1e-9 * scale * max(1.0, abs(x)) ** 3
    if res.branch is CubicBranch.ONE_REAL:
        assert res.discriminant >= 0 and len(res.roots) == 1
    elif res.branch is CubicBranch.THREE_REAL:
        assert res.discriminant <= 0 and len(res.roots) == 3
    if res.branch is not CubicBranch.MULTIPLE:
        oracle = _real_roots_by_bracketing(coeffs)
        assert len(oracle) == len(res.roots)
        for x, y in zip(res.roots, oracle):
            assert x == pytest.approx(y, rel=1e-9, abs=1e-9 * size)


@given(st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=3, max_size=3))
def test_vieta_for_three_distinct_real_roots(r):
    r = sorted(r)
    if min(b - a for a, b in zip(r, r[1:])) < 1e-2:
        return
    a2 = -sum(r)
    a1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
    a0 = -r[0] * r[1] * r[2]
    res = solve_cubic((a2, a1, a0))
    assert res.branch is CubicBranch.THREE_REAL
    x = res.roots
    assert sum(x) == pytest.approx(-a2, rel=1e-8, abs=1e-8)
    assert x[0] * x[1] + x[0] * x[2] + x[1] * x[2] == pytest.approx(a1, rel=1e-8, abs=1e-8)
    assert x[0] * x[1] * x[2] == pytest.approx(-a0, rel=1e-8, abs=1e-8)
