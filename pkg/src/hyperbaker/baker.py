"""Exact Baker functions on the g-th symmetric power of the curve.

For a divisor ``{(x_i, y_i)}`` put ``R(e) = (e - a) prod (e - x_i)`` and

    nabla = sum_i y_i / ((e1 - x_i)(e2 - x_i) R'(x_i)),
    F = f R(e1) R(e2) + (e1-e2)^2 R(e1)^2 R(e2)^2 nabla^2
        - N(e1) R(e2)^2 - N(e2) R(e1)^2.

``F`` is divisible by ``(e1-e2)^2 R(e1) R(e2)``; the quotient ``G`` has
degree ``< g`` in each variable and its coefficients are the Baker
functions.  ``nabla`` is cleared over the denominator
``Delta = prod (x_k - a) * prod_{i<k} (x_k - x_i)``, so all intermediate
objects are polynomials and the divisions are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import MultiPoly, RatFunc, exact_divide, reduce_powers, to_mpq
from .curve import Curve, lift


class DegenerateDivisor(ValueError):
    pass


class PoleAtDivisor(ZeroDivisionError):
    pass


def build_f(curve: Curve) -> MultiPoly:
    """``f(e1,e2) = sum_{i<=g+1} (e1 e2)^i (2 nu_{4g+4-4i} + nu_{4g+2-4i}(e1+e2))``
    with ``nu_{-2} = 0``."""
    g = curve.genus
    variables = ("e1", "e2") + curve.ring_vars
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    nu = curve.nu  # nu[k] is nu_{2k}
    acc = MultiPoly.const(0, variables)
    for i in range(g + 2):
        hi = lift(nu[2 * g + 2 - 2 * i], variables) * 2
        k = 2 * g + 1 - 2 * i
        lo = lift(nu[k], variables) if k >= 0 else MultiPoly.const(0, variables)
        acc = acc + (e1 * e2) ** i * (hi + lo * (e1 + e2))
    return acc


@dataclass(frozen=True)
class SymmetricDivisor:
    """``g`` points; coordinates are ``None`` for indeterminates.

    In exact mode the ``x`` values may be rationals while the ``y`` stay
    symbolic subject to ``y_i^2 = N(x_i)``.
    """

    xs: tuple
    ys: tuple

    @classmethod
    def symbolic(cls, g: int) -> "SymmetricDivisor":
        return cls((None,) * g, (None,) * g)

    @property
    def size(self) -> int:
        return len(self.xs)

    def names(self):
        g = self.size
        return tuple(f"x{i}" for i in range(1, g + 1)), tuple(f"y{i}" for i in range(1, g + 1))


def _variables(curve: Curve, d: SymmetricDivisor):
    xn, yn = d.names()
    xs = tuple(n for n, v in zip(xn, d.xs) if v is None)
    ys = tuple(n for n, v in zip(yn, d.ys) if v is None)
    return ("e1", "e2") + xs + ys + curve.ring_vars


def _coords(curve: Curve, d: SymmetricDivisor, variables):
    xn, yn = d.names()
    X = [MultiPoly.var(n, variables) if v is None else MultiPoly.const(v, variables) for n, v in zip(xn, d.xs)]
    Y = [MultiPoly.var(n, variables) if v is None else MultiPoly.const(v, variables) for n, v in zip(yn, d.ys)]
    return X, Y


def _check_generic(curve: Curve, d: SymmetricDivisor):
    known = [v for v in d.xs if v is not None]
    if curve.a is not None and not curve.symbolic:
        if any(v == curve.a for v in known):
            raise DegenerateDivisor("divisor contains the base point x = a")
    if len(set(known)) != len(known):
        raise DegenerateDivisor("repeated x-coordinates in the divisor")
    for x, y in zip(d.xs, d.ys):
        if x is not None and y is not None and not curve.symbolic:
            if y * y != curve.N(x):
                raise ValueError("point not on the curve")


def _delta(curve, X, variables):
    g = len(X)
    a = lift(curve.a, variables)
    delta = MultiPoly.const(1, variables)
    for k in range(g):
        delta = delta * (X[k] - a)
    for i in range(g):
        for k in range(i + 1, g):
            delta = delta * (X[k] - X[i])
    return delta


def _weights(curve, X, variables):
    """``Delta / R'(x_i)`` as polynomials."""
    g = len(X)
    a = lift(curve.a, variables)
    out = []
    for i in range(g):
        w = MultiPoly.const(1, variables)
        for k in range(g):
            if k != i:
                w = w * (X[k] - a)
        # Vandermonde of the remaining points, with the sign of prod_{k != i}(x_k - x_i)/(x_i - x_k)
        for p in range(g):
            for q in range(p + 1, g):
                if p != i and q != i:
                    w = w * (X[q] - X[p])
        sign = (-1) ** (g - 1 - i)
        out.append(w * sign)
    return out


def build_F_scaled(curve: Curve, d: SymmetricDivisor):
    """Return ``(Delta^2 F, Delta, variables)`` with every ``y_i^2`` reduced."""
    _check_generic(curve, d)
    variables = _variables(curve, d)
    g = curve.genus
    if d.size != g:
        raise DegenerateDivisor(f"divisor must have {g} points")
    X, Y = _coords(curve, d, variables)
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    a = lift(curve.a, variables)
    delta = _delta(curve, X, variables)
    if delta.is_zero():
        raise DegenerateDivisor("R'(x_i) vanishes")
    R1 = e1 - a
    R2 = e2 - a
    for xk in X:
        R1 = R1 * (e1 - xk)
        R2 = R2 * (e2 - xk)
    f = build_f(curve).embed(variables)
    N1 = curve.poly("e1", variables)
    N2 = curve.poly("e2", variables)
    W = MultiPoly.const(0, variables)
    for i, w in enumerate(_weights(curve, X, variables)):
        L1 = exact_divide(R1, e1 - X[i])
        L2 = exact_divide(R2, e2 - X[i])
        W = W + Y[i] * w * L1 * L2
    W2 = W * W
    xn, yn = d.names()
    for i in range(g):
        if d.ys[i] is None:
            W2 = reduce_powers(W2, yn[i], _n_at(curve, X[i], variables))
    d2 = delta * delta
    body = (f * R1 * R2 - N1 * R2 * R2 - N2 * R1 * R1) * d2
    return body + (e1 - e2) ** 2 * W2, delta, variables


def _n_at(curve, x: MultiPoly, variables):
    acc = MultiPoly.const(0, variables)
    for c in curve.nu:
        acc = acc * x + lift(c, variables)
    return acc


def build_F(curve: Curve, d: SymmetricDivisor) -> RatFunc:
    """``F`` as a RatFunc (polynomial in e1, e2 over the divisor ring)."""
    scaled, delta, _ = build_F_scaled(curve, d)
    return RatFunc(scaled, delta * delta)


def divide_G(curve: Curve, F_scaled: MultiPoly, d: SymmetricDivisor) -> MultiPoly:
    """Exact quotient ``Delta^2 F / ((e1-e2)^2 R(e1) R(e2))``.

    Raises :class:`~hyperbaker.algebra.NonDivisible` if a factor fails to
    divide.
    """
    variables = F_scaled.vars
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    X, _ = _coords(curve, d, variables)
    a = lift(curve.a, variables)
    q = F_scaled
    q = exact_divide(q, e1 - e2)
    q = exact_divide(q, e1 - e2)
    for r in [a] + X:
        q = exact_divide(q, e1 - r)
    for r in [a] + X:
        q = exact_divide(q, e2 - r)
    return q


@dataclass
class BakerMatrix:
    """Matrix ``P[i][j]`` of the Baker function with indices
    ``(2g+2-2(i+1), 2g+2-2(j+1))``; entries are RatFuncs."""

    genus: int
    entries: list
    G: MultiPoly
    delta: MultiPoly
    curve: Curve
    divisor: SymmetricDivisor

    def index_label(self, i: int, j: int) -> str:
        g = self.genus
        return f"P_{2 * g - 2 * i},{2 * g - 2 * j}"

    @property
    def variables(self):
        return self.G.vars


def baker_matrix(curve: Curve, d: SymmetricDivisor | None = None) -> BakerMatrix:
    """Build ``G`` and read off the Baker functions as its coefficients."""
    g = curve.genus
    d = SymmetricDivisor.symbolic(g) if d is None else d
    Fs, delta, variables = build_F_scaled(curve, d)
    G = divide_G(curve, Fs, d)
    parts = G.coefficients(("e1", "e2"))
    den = delta * delta
    zero = MultiPoly.const(0, variables)
    entries = []
    for i in range(g):
        row = []
        for j in range(g):
            c = parts.get((i, j), zero)
            row.append(RatFunc(c, den).simplified())
        entries.append(row)
    for (p, q) in parts:
        if p >= g or q >= g:
            raise ArithmeticError("G exceeds the degree bound g-1")
    return BakerMatrix(g, entries, G, delta, curve, d)


def _poly_to_callable(p: MultiPoly, order: tuple[str, ...]):
    coeffs, exps = p.numeric(order)

    def ev(vals):
        vals = np.asarray(vals, dtype=complex)
        return complex(np.sum(coeffs * np.prod(vals[None, :] ** exps, axis=1))) if len(coeffs) else 0j

    return ev


class BakerEvaluator:
    """Fast numerical evaluation of a BakerMatrix at concrete divisors."""

    def __init__(self, bm: BakerMatrix):
        self.bm = bm
        g = bm.genus
        xn, yn = bm.divisor.names()
        self.order = tuple(v for v in bm.variables if v not in ("e1", "e2"))
        self._num = [[_poly_to_callable(e.num, self.order) for e in row] for row in bm.entries]
        self._den = [[_poly_to_callable(e.den, self.order) for e in row] for row in bm.entries]
        self.names = xn, yn

    def __call__(self, points, ring_values: dict | None = None) -> np.ndarray:
        """``points`` is a list of ``(x, y)``; ``ring_values`` binds ``a`` and
        ``nu`` for a BakerMatrix built over the symbolic curve."""
        g = self.bm.genus
        if len(points) != g:
            raise DegenerateDivisor(f"need {g} points")
        curve = self.bm.curve
        xs = [complex(p[0]) for p in points]
        a = complex(ring_values["a"]) if ring_values else complex(curve.a)
        scale = max(1.0, max(abs(x) for x in xs), abs(a))
        for i in range(g):
            if abs(xs[i] - a) < 1e-12 * scale:
                raise DegenerateDivisor("point at the base point")
            for k in range(i):
                if abs(xs[i] - xs[k]) < 1e-12 * scale:
                    raise DegenerateDivisor("repeated x-coordinates")
        vals = {}
        xn, yn = self.names
        for i, (x, y) in enumerate(points):
            vals[xn[i]] = complex(x)
            vals[yn[i]] = complex(y)
        if ring_values:
            vals.update({k: complex(v) for k, v in ring_values.items()})
        vec = [vals[v] for v in self.order]
        out = np.empty((g, g), dtype=complex)
        for i in range(g):
            for j in range(g):
                den = self._den[i][j](vec)
                if den == 0:
                    raise PoleAtDivisor("denominator vanishes at the divisor")
                out[i, j] = self._num[i][j](vec) / den
        return out


def baker_evaluate(bm: BakerMatrix, points, ring_values: dict | None = None) -> np.ndarray:
    return BakerEvaluator(bm)(points, ring_values)


def baker_interpolate(curve: Curve, points) -> np.ndarray:
    """Baker matrix at a numeric divisor by sampling ``F`` directly.

    Independent of the exact construction: ``G`` is evaluated on a g x g
    grid of ``(e1, e2)`` nodes as ``F/((e1-e2)^2 R(e1) R(e2))`` and the
    coefficient matrix is recovered from two Vandermonde solves.
    """
    g = curve.genus
    nu = [complex(c) for c in curve.nu]
    a = complex(curve.a)
    xs = np.array([complex(p[0]) for p in points])
    ys = np.array([complex(p[1]) for p in points])

    def N(e):
        return np.polyval(nu, e)

    def R(e):
        return (e - a) * np.prod(e - xs)

    def Rp(i):
        return (xs[i] - a) * np.prod([xs[i] - xs[k] for k in range(g) if k != i])

    rps = [Rp(i) for i in range(g)]

    def f(e1, e2):
        acc = 0j
        for i in range(g + 2):
            hi = 2 * nu[2 * g + 2 - 2 * i]
            k = 2 * g + 1 - 2 * i
            lo = nu[k] if k >= 0 else 0
            acc += (e1 * e2) ** i * (hi + lo * (e1 + e2))
        return acc

    def G(e1, e2):
        r1, r2 = R(e1), R(e2)
        nab = sum(ys[i] / ((e1 - xs[i]) * (e2 - xs[i]) * rps[i]) for i in range(g))
        F = f(e1, e2) * r1 * r2 + (e1 - e2) ** 2 * r1 ** 2 * r2 ** 2 * nab ** 2 - N(e1) * r2 ** 2 - N(e2) * r1 ** 2
        return F / ((e1 - e2) ** 2 * r1 * r2)

    scale = max(1.0, np.max(np.abs(xs)), abs(a))
    n1 = scale * (0.9 + 0.37 * np.exp(2j * np.pi * (np.arange(g) + 0.3) / max(g, 1)))
    n2 = scale * (1.7 + 0.53 * np.exp(2j * np.pi * (np.arange(g) + 0.1) / max(g, 1)))
    vals = np.array([[G(p, q) for q in n2] for p in n1])
    V1 = np.vander(n1, g, increasing=True)
    V2 = np.vander(n2, g, increasing=True)
    # vals = V1 P V2^T
    P = np.linalg.solve(V1, vals)
    P = np.linalg.solve(V2, P.T).T
    return P
