import cmath
import itertools

import numpy as np
import pytest

from hyperbaker.curve import ScaledModel, lambda_tilde
from hyperbaker.hfunc import (
    ConstantsUndefined, HEvaluator, baker_values, conditioned_grid, kp_h_constants, pde_residual,
)
from hyperbaker.periods import abel_jacobi, curve_periods, random_points
from hyperbaker.verify import reference_curve


@pytest.fixture(scope="module", params=[1, 2])
def he(request):
    return HEvaluator(curve_periods(reference_curve(request.param)))


def test_routes_agree(he):
    rng = np.random.default_rng(0)
    for _ in range(5):
        v = he.generic_point(rng)
        a, b = he.h_eval(v, "definition"), he.h_eval(v, "theta")
        assert abs(a - b) <= 1e-8 * abs(b)


def test_vanishes_at_origin_and_parity(he):
    g = he.genus
    assert abs(he.h_eval(np.zeros(g))) < 1e-12
    v = he.generic_point(np.random.default_rng(1))
    sgn = (-1) ** (g * (g + 1) // 2)
    assert abs(he.h_eval(-v) - sgn * he.h_eval(v)) <= 1e-8 * abs(he.h_eval(v))


def test_quasi_periodicity(he):
    v = he.generic_point(np.random.default_rng(2), scale=0.5)
    g = he.genus
    for m in itertools.product(range(-1, 2), repeat=2 * g):
        assert he.quasi_periodicity_check(v, m[:g], m[g:]) < 1e-7


def test_linear_term_of_h():
    """H(v) = v_2 + O(|v|^3) at genus 1."""
    he = HEvaluator(curve_periods(reference_curve(1)))
    for eps in (1e-3, 2e-3):
        assert abs(he.h_eval(np.array([eps])) / eps - 1) < 1e-4


def test_baker_wp_relation(he):
    rng = np.random.default_rng(3)
    for _ in range(3):
        pts = random_points(he.pd.curve, he.pd.branch, he.genus, rng)
        assert he.p_wp_relation_check(pts) < 1e-6


def test_hessian_and_baker_differ_by_omega(he):
    """The algebraic Baker matrix equals -d2 log H + Omega at Abel images."""
    rng = np.random.default_rng(4)
    pts = random_points(he.pd.curve, he.pd.branch, he.genus, rng)
    B = baker_values(he.pd.curve, pts)
    Hs = he.baker_from_h(abel_jacobi(he.pd, pts))
    assert np.abs(B - (Hs + he.Omega)).max() <= 1e-7 * max(1.0, np.abs(B).max())


def test_scaling_independence():
    c = reference_curve(2)
    a = HEvaluator(curve_periods(c))
    b = HEvaluator(curve_periods(c, ScaledModel.numeric(c, s=0.7 - 1.1j)))
    v = a.generic_point(np.random.default_rng(5))
    assert abs(a.h_eval(v) - b.h_eval(v)) <= 1e-8 * abs(a.h_eval(v))


def test_kp_constants_principal_branch():
    c = reference_curve(3)
    k = kp_h_constants(c)
    nu0, nu2 = complex(c.nu[0]), complex(c.nu[1])
    assert k["alpha"] == -16 * nu0
    assert k["beta"] == 2 * cmath.sqrt(-3 * nu0)
    assert abs(k["gamma"] - nu2 / cmath.sqrt(-3 * nu0)) < 1e-15


def test_kdv_and_control():
    he = HEvaluator(curve_periods(reference_curve(1)))
    base, res = conditioned_grid(he, "KdV", np.random.default_rng(6))
    assert max(r.residual for r in res) < 1e-5
    lam = [complex(x) for x in lambda_tilde(he.pd.model)]
    bad = pde_residual(he, "KdV", base, (0.0,), constants={"shift": 1.1 * 2 * lam[1] / 3})
    assert bad[0].residual > 1e-1


def test_kp_needs_genus():
    he = HEvaluator(curve_periods(reference_curve(2)))
    with pytest.raises(ConstantsUndefined):
        pde_residual(he, "KP-H", np.zeros(2))
    with pytest.raises(ValueError):
        pde_residual(he, "Boussinesq", np.zeros(2))
