import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperbaker.baker import (
    BakerEvaluator, DegenerateDivisor, SymmetricDivisor, baker_interpolate, baker_matrix,
)
from hyperbaker.curve import symbolic_curve, validate_curve
from hyperbaker.periods import branch_points, random_points
from hyperbaker.verify import baker_properties, g1_anchor_baker, random_rational_curve


def test_genus1_closed_form():
    assert g1_anchor_baker()


@pytest.mark.parametrize("g", [1, 2])
def test_symbolic_symmetry_and_bounds(g):
    bm = baker_matrix(symbolic_curve(g))
    for i in range(g):
        for j in range(g):
            assert bm.entries[i][j] == bm.entries[j][i]
    assert baker_properties(symbolic_curve(g))


@pytest.mark.parametrize("g", [1, 2, 3])
def test_exact_matrix_matches_interpolation(g):
    """The exact construction against a direct numerical sampling of F."""
    curve = random_rational_curve(g, random.Random(7 + g))
    ev = BakerEvaluator(baker_matrix(curve))
    rng = np.random.default_rng(g)
    br = branch_points(curve)
    for _ in range(5):
        pts = random_points(curve, br, g, rng)
        A = ev(pts)
        B = baker_interpolate(curve, pts)
        assert np.abs(A - B).max() <= 1e-7 * max(1.0, np.abs(A).max())


@settings(max_examples=15, deadline=None)
@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=7), min_size=2, max_size=2, unique=True))
def test_divisibility_random_rational_divisors(xs):
    curve = validate_curve(2, [1, 2, 0, -1, 3, 0, -5], 1)
    if any(x == curve.a or curve.N(x) == 0 for x in xs):
        return
    # raises NonDivisible if F is not divisible
    assert baker_properties(curve, SymmetricDivisor(tuple(xs), (None, None)))


def test_degenerate_divisors():
    curve = validate_curve(2, [1, 2, 0, -1, 3, 0, -5], 1)
    with pytest.raises(DegenerateDivisor):
        baker_matrix(curve, SymmetricDivisor((Fraction(2), Fraction(2)), (None, None)))
    with pytest.raises(DegenerateDivisor):
        baker_matrix(curve, SymmetricDivisor((Fraction(1), Fraction(3)), (None, None)))
    ev = BakerEvaluator(baker_matrix(curve))
    with pytest.raises(DegenerateDivisor):
        ev([(2.0, 1.0)])
