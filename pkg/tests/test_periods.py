import random

import numpy as np
import pytest

from hyperbaker.curve import ScaledModel, lambda_tilde, validate_curve
from hyperbaker.periods import (
    AbelMap, abel_jacobi, branch_points, curve_periods, random_points, riemann_constant, symplectic_reduce,
)
from hyperbaker.theta import ThetaFunction
from hyperbaker.verify import random_rational_curve, reference_curve, sigma_oracle_residual


def _sigma_k(n, k):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@pytest.mark.parametrize("curve", [reference_curve(1), random_rational_curve(1, random.Random(11))])
def test_genus1_invariants_from_eisenstein_series(curve):
    """g2, g3 of the shifted cubic recovered from the period lattice."""
    pd = curve_periods(curve)
    lam = [complex(x) for x in lambda_tilde(pd.model)]
    g2 = -4 * (lam[2] - lam[1] ** 2 / 3)
    g3 = -4 * (lam[3] - lam[1] * lam[2] / 3 + 2 * lam[1] ** 3 / 27)
    w1, w3 = pd.omega1[0, 0], pd.omega2[0, 0]
    q = np.exp(2j * np.pi * w3 / w1)
    E4 = 1 + 240 * sum(_sigma_k(n, 3) * q ** n for n in range(1, 80))
    E6 = 1 - 504 * sum(_sigma_k(n, 5) * q ** n for n in range(1, 80))
    scale = max(1.0, abs(g2), abs(g3))
    assert abs(4 * np.pi ** 4 / 3 * E4 / (2 * w1) ** 4 - g2) < 1e-10 * scale
    assert abs(8 * np.pi ** 6 / 27 * E6 / (2 * w1) ** 6 - g3) < 1e-10 * scale


@pytest.mark.parametrize("g", [1, 2])
def test_period_relations(g):
    pd = curve_periods(reference_curve(g))
    assert pd.legendre_residual("omega") < 1e-8
    assert pd.legendre_residual("kappa") < 1e-8
    assert np.abs(pd.D @ pd.mu1 - pd.omega1).max() < 1e-9 * np.abs(pd.omega1).max()
    assert np.abs(pd.kappa1 - pd.kappa1_direct).max() < 1e-7 * np.abs(pd.kappa1_direct).max()
    assert np.abs(pd.tau - pd.tau.T).max() < 1e-10
    assert np.linalg.eigvalsh(pd.tau.imag).min() > 0


def test_extended_precision_agrees():
    c = reference_curve(2)
    a = curve_periods(c)
    b = curve_periods(c, precision="extended")
    assert np.abs(a.tau - b.tau).max() < 1e-11
    assert b.legendre_residual("omega") <= 1e-12


def test_scaling_changes_periods_consistently():
    c = reference_curve(2)
    a = curve_periods(c)
    b = curve_periods(c, ScaledModel.numeric(c, s=2.0 + 0.5j))
    # the curve-side holomorphic periods do not depend on the scaling
    assert np.allclose(a.mu1, b.mu1, atol=1e-12)
    assert np.allclose(a.tau, b.tau, atol=1e-10)


def test_symplectic_reduce():
    rng = np.random.default_rng(0)
    g = 2
    J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]]).astype(int)
    U = np.eye(2 * g, dtype=int)
    U[0, 1] = 1
    U[3, 2] = -2
    J0 = U @ J @ U.T
    A, B = symplectic_reduce(J0)
    C = np.vstack([A, B])
    assert np.array_equal(C @ J0 @ C.T, J)


def test_riemann_constant_vanishing():
    pd = curve_periods(reference_curve(2))
    d1, d2 = riemann_constant(pd, seed=5)
    assert np.allclose(d1, pd.delta1) and np.allclose(d2, pd.delta2)
    th = ThetaFunction.make(pd.tau, d1, d2)
    rng = np.random.default_rng(1)
    for pts in (random_points(pd.curve, pd.branch, 1, rng) for _ in range(3)):
        z = np.linalg.solve(2 * pd.mu1, abel_jacobi(pd, pts))
        assert th.relative_size(z) < 1e-8


def test_abel_map_involution_and_branch_points():
    pd = curve_periods(reference_curve(2))
    am = AbelMap(pd.curve, pd.branch)
    rng = np.random.default_rng(2)
    (x, y), = random_points(pd.curve, pd.branch, 1, rng)
    # P + iota(P) maps to 0, a branch point to a half period
    assert pd.lattice_residual(am.point(x, y) + am.point(x, -y)) < 1e-8
    e = pd.branch.roots[(pd.branch.a_index + 1) % len(pd.branch.roots)]
    assert pd.lattice_residual(2 * am.point(e, 0)) < 1e-8


def test_genus1_sigma_oracle():
    pd = curve_periods(reference_curve(1))
    assert sigma_oracle_residual(pd) < 1e-8


def test_branch_points_of_quartic():
    br = branch_points(validate_curve(1, [1, 0, 0, 0, -1], 1))
    assert abs(br.a - 1) < 1e-14
    assert len(br.roots) == 4
