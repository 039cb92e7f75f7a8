import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperbaker.jets import Jet
from hyperbaker.theta import ThetaFunction, half_characteristics


def _random_tau(g, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(g, g))
    Y = A @ A.T + 0.8 * np.eye(g)
    X = rng.normal(size=(g, g))
    return (X + X.T) / 2 + 1j * Y


def _brute_theta(tau, d1, d2, z, box=7):
    g = len(z)
    total = 0j
    for n in itertools.product(range(-box, box + 1), repeat=g):
        k = np.array(n) + d1
        total += np.exp(1j * math.pi * k @ tau @ k + 2j * math.pi * k @ (z + d2))
    return total


@pytest.mark.parametrize("g", [1, 2, 3])
def test_theta_against_brute_force(g):
    tau = _random_tau(g, g)
    rng = np.random.default_rng(10 + g)
    box = 7 if g < 3 else 5
    for d1, d2 in list(half_characteristics(g))[:4]:
        th = ThetaFunction.make(tau, d1, d2)
        z = (rng.normal(size=g) + 1j * rng.normal(size=g)) * 0.3
        ref = _brute_theta(tau, d1, d2, z, box)
        assert abs(th(z) - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 15), st.integers(0, 2 ** 16))
def test_parity_and_quasi_periodicity(char, seed):
    g = 2
    d1, d2 = list(half_characteristics(g))[char]
    th = ThetaFunction.make(_random_tau(g, 1), d1, d2)
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=g) + 1j * rng.normal(size=g)) * 0.4
    assert abs(th(-z) - th.parity() * th(z)) <= 1e-11 * max(1.0, abs(th(z)))
    e = np.eye(g)[0]
    # shift by a period of the integer lattice: sign from the characteristic
    sgn = np.exp(2j * math.pi * d1 @ e)
    assert abs(th(z + e) - sgn * th(z)) <= 1e-11 * max(1.0, abs(th(z)))
    # shift by tau e
    fac = np.exp(-1j * math.pi * e @ th.tau @ e - 2j * math.pi * e @ (z + d2))
    assert abs(th(z + th.tau @ e) - fac * th(z)) <= 1e-10 * max(1.0, abs(fac * th(z)))


def test_odd_theta_vanishes_at_origin():
    th = ThetaFunction.make(_random_tau(2, 5), [0.5, 0.5], [0.5, 0.0])
    assert th.parity() == -1
    assert abs(th(np.zeros(2))) < 1e-14


def test_jet_arithmetic_and_log_exp():
    rng = np.random.default_rng(0)
    order = 5
    a = Jet(rng.normal(size=(order + 1, order + 1)) + 0j, order).truncate()
    a.c[0, 0] = 2.0
    b = a.log().exp()
    assert np.allclose(b.c, a.c)
    lin = Jet.linear(0.0, [1.0, 0.0], order)
    e = lin.exp()
    for k in range(order + 1):
        assert abs(e.derivative((k, 0)) - 1.0) < 1e-13


def test_theta_jet_derivatives():
    g = 2
    th = ThetaFunction.make(_random_tau(g, 2))
    z = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    j, M = th.jet(z, np.eye(g), 3)
    # d/dz1 of theta by a brute-force termwise derivative
    ref = 0j
    for n in itertools.product(range(-7, 8), repeat=g):
        k = np.array(n, dtype=float)
        ref += (2j * math.pi * k[0]) ** 2 * (2j * math.pi * k[1]) * np.exp(
            1j * math.pi * k @ th.tau @ k + 2j * math.pi * k @ z)
    assert abs(j.derivative((2, 1)) * math.exp(M) - ref) <= 1e-10 * abs(ref)


def test_quadratic_jet():
    A = np.array([[1.0, 2.0], [2.0, -1.0]])
    p = np.array([0.3, -0.2])
    D = np.array([[1.0, 1.0], [0.0, 2.0]])
    j = Jet.quadratic(A, p, D, 3)
    t = np.array([1e-3, -2e-3])
    v = p + t @ D
    approx = sum(j.c[a, b] * t[0] ** a * t[1] ** b for a in range(4) for b in range(4) if a + b <= 3)
    assert abs(approx - v @ A @ v) < 1e-14
