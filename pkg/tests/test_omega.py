import random

import numpy as np
import pytest

from hyperbaker.curve import ScaledModel, lambda_tilde, symbolic_curve
from hyperbaker.omega import (
    f_bar, generic_omega, kappa_numeric, omega_numeric, omega_recursion, ring_values, taylor_f,
)
from hyperbaker.verify import g1_anchor_kappa, g1_anchor_omega, omega_properties, random_rational_curve


def test_genus1_closed_forms():
    assert g1_anchor_omega()
    assert g1_anchor_kappa()


@pytest.mark.parametrize("g", [1, 2])
def test_symmetry_weights_and_identity(g):
    assert omega_properties(g)


@pytest.mark.parametrize("g", [1, 2])
def test_f_bar_two_routes(g):
    m = ScaledModel.symbolic(symbolic_curve(g))
    assert f_bar(m) == taylor_f(symbolic_curve(g)).embed(f_bar(m).vars)


def _f_numeric(nu, g, e1, e2):
    acc = 0j
    for i in range(g + 2):
        hi = 2 * nu[2 * g + 2 - 2 * i]
        k = 2 * g + 1 - 2 * i
        lo = nu[k] if k >= 0 else 0
        acc += (e1 * e2) ** i * (hi + lo * (e1 + e2))
    return acc


@pytest.mark.parametrize("g", [1, 2, 3])
def test_generating_identity_numerically(g):
    """f_bar - f = (e1-e2)^2 sum Omega_ij e1^(i-1) e2^(j-1), with f_bar
    computed from the transformed curve at a complex scaling."""
    curve = random_rational_curve(g, random.Random(50 + g))
    m = ScaledModel.numeric(curve, s=1.3 - 0.4j)
    lam = lambda_tilde(m)
    nu = [complex(c) for c in curve.nu]
    a = complex(curve.a)
    Om = omega_numeric(curve)
    rng = np.random.default_rng(g)
    for _ in range(4):
        e1, e2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        E1, E2 = m.s / (e1 - a), m.s / (e2 - a)
        ft = sum((E1 * E2) ** i * (2 * lam[2 * g + 1 - 2 * i] + lam[2 * g - 2 * i] * (E1 + E2)) for i in range(g + 1))
        fb = ((e1 - a) * (e2 - a)) ** (g + 1) * ft / m.t ** 2
        rhs = (e1 - e2) ** 2 * sum(Om[i, j] * e1 ** i * e2 ** j for i in range(g) for j in range(g))
        lhs = fb - _f_numeric(nu, g, e1, e2)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_numeric_omega_matches_generic():
    curve = random_rational_curve(2, random.Random(3))
    vals = ring_values(curve)
    gen = generic_omega(2)
    ref = np.array([[complex(e.evaluate(vals)) for e in row] for row in gen])
    assert np.allclose(omega_numeric(curve), ref, atol=1e-12)
    exact = omega_recursion(ScaledModel.symbolic(curve))
    assert np.allclose(np.array([[complex(e.constant_value()) for e in row] for row in exact]), ref)


def test_kappa_numeric_shape():
    curve = random_rational_curve(2, random.Random(4))
    ks = kappa_numeric(curve)
    assert len(ks) == 2
