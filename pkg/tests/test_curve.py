import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperbaker.curve import (
    MultipleRoots, NotABranchPoint, Nu0Zero, ScaledModel, ScalingError, AtBasePoint, chi_factor, d_matrix_numeric,
    lambda_tilde, numeric_roots, symbolic_curve, validate_curve, zeta_transform,
)


def test_validation_errors():
    assert validate_curve(1, ["1", "0", "0", "0", "-1"], "1").a == 1
    with pytest.raises(Nu0Zero):
        validate_curve(1, [0, 1, 0, 0, -1], 1)
    with pytest.raises(MultipleRoots):
        validate_curve(1, [1, 0, -2, 0, 1], 1)  # (x^2-1)^2
    with pytest.raises(NotABranchPoint):
        validate_curve(1, [1, 0, 0, 0, -1], 2)
    with pytest.raises(ValueError):
        validate_curve(1, [1, 0, 0, -1], 1)


def test_branch_point_by_index_and_snapping():
    c = validate_curve(1, [1, 0, 0, 0, -1], 1.0 + 1e-12)
    assert c.a == 1
    roots = sorted(numeric_roots([1, 0, 0, 0, -1]), key=lambda z: (z.real, z.imag))
    c2 = validate_curve(1, [1, 0, 0, 0, -1], ("index", 0))
    assert abs(complex(c2.a) - roots[0]) < 1e-12


def test_roots_residual():
    rng = np.random.default_rng(3)
    for g in (1, 2, 3):
        nu = rng.integers(-5, 6, 2 * g + 3).astype(float)
        nu[0] = 1 + abs(nu[0])
        r = numeric_roots(nu)
        scale = np.abs(nu).sum()
        for z in r:
            assert abs(np.polyval(nu, z)) < 1e-12 * scale * max(1, abs(z)) ** (2 * g + 2)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.complex_numbers(min_magnitude=0.3, max_magnitude=3))
def test_transformed_curve_equation(xr, xi, s):
    """(X, Y) = zeta(x, y) lies on Y^2 = M(X) with the lambda-tilde coefficients."""
    c = validate_curve(2, [2, -1, 0, 3, 1, 0, -5], 1)
    m = ScaledModel.numeric(c, s=s)
    x = complex(xr, xi)
    if abs(x - 1) < 0.05:
        return
    y = cmath.sqrt(np.polyval([float(v) for v in c.nu], x))
    X, Y = zeta_transform(m, (x, y))
    lam = lambda_tilde(m)
    M = sum(l * X ** (5 - i) for i, l in enumerate(lam))
    assert abs(Y * Y - M) <= 1e-9 * max(1.0, abs(M))


def test_lambda_tilde_exact_leading_term():
    for g in (1, 2, 3):
        lam = lambda_tilde(ScaledModel.symbolic(symbolic_curve(g)))
        assert lam[0] == 1


def test_scaling_constraint_enforced():
    c = validate_curve(1, [1, 0, 0, 0, -1], 1)
    m = ScaledModel.numeric(c, s=2.0)
    assert abs(m.s ** 3 / m.t ** 2 - 4) < 1e-12
    with pytest.raises(ScalingError):
        ScaledModel.numeric(c, 1.0, 1.0)
    with pytest.raises(ScalingError):
        ScaledModel.exact_values(c, Fraction(1), Fraction(1))
    ScaledModel.exact_values(c, Fraction(4), Fraction(4))


def test_d_matrix_and_chi():
    c = validate_curve(2, [1, 0, 0, 0, 0, 0, -1], 1)
    m = ScaledModel.numeric(c, s=1.5)
    D = d_matrix_numeric(m)
    assert np.allclose(np.triu(D, 1), 0)
    assert abs(D[0, 0] - m.s ** 2 / m.t) < 1e-12
    assert abs(D[1, 0] + m.s * c.a / m.t) < 1e-12
    # g(g+1)/2 = 3 is odd at genus 2: chi = s^((4-6-2)/4) t
    assert abs(chi_factor(m) - m.t / m.s) < 1e-12


def test_zeta_at_base_point():
    c = validate_curve(1, [1, 0, 0, 0, -1], 1)
    with pytest.raises(AtBasePoint):
        zeta_transform(ScaledModel.numeric(c), (1, 0))
