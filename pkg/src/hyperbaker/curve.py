"""Hyperelliptic curves y^2 = N(x) with two points at infinity.

A :class:`Curve` carries the coefficients ``nu[0..2g+2]`` (so that
``N(x) = nu[0] x^(2g+2) + nu[1] x^(2g+1) + ... + nu[2g+2]``) and a marked
root ``a`` of ``N``.  The coefficients are either exact rationals, or (in
symbolic mode) polynomials over the indeterminates ``a, nu0, nu2, ...`` with
the constant term eliminated through ``N(a) = 0``.

A :class:`ScaledModel` adds the pair ``(s, t)`` with ``s^(2g+1)/t^2 = N'(a)``
and everything that depends on it: the Moebius change of coordinates to the
curve ``Y^2 = M(X)`` with a single point at infinity, the transformed
coefficients, the matrix relating the holomorphic differentials, and the
normalising factor used by the entire function built in :mod:`hfunc`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import MultiPoly, NonDivisible, RatFunc, exact_divide, parse_rational


class CurveError(ValueError):
    pass


class Nu0Zero(CurveError):
    pass


class MultipleRoots(CurveError):
    pass


class NotABranchPoint(CurveError):
    pass


class AtBasePoint(ValueError):
    pass


class ScalingError(ValueError):
    pass


class SimplificationFailure(ArithmeticError):
    pass


def nu_names(g: int) -> list[str]:
    return [f"nu{2 * j}" for j in range(2 * g + 3)]


def symbolic_ring(g: int) -> tuple[str, ...]:
    """Indeterminates of the coefficient ring in symbolic mode."""
    return ("a",) + tuple(nu_names(g)[:-1])


def lift(c, variables: tuple[str, ...]) -> MultiPoly:
    """Embed a ring element (number or MultiPoly) into ``variables``."""
    if isinstance(c, MultiPoly):
        return c.embed(tuple(variables) + tuple(v for v in c.vars if v not in variables))
    return MultiPoly.const(c, variables)


# ---------------------------------------------------------------------------
# univariate helpers over Q


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
        a = _trim(a[:-1])
    return a


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def numeric_roots(coeffs_desc: Sequence, polish: int = 3) -> np.ndarray:
    """Roots of a polynomial (descending coefficients) via the companion
    matrix, Newton-polished, sorted by real then imaginary part."""
    c = np.array([complex(x) for x in coeffs_desc])
    roots = np.roots(c)
    dc = np.polyder(c)
    for _ in range(polish):
        d = np.polyval(dc, roots)
        step = np.where(d != 0, np.polyval(c, roots) / np.where(d != 0, d, 1), 0)
        roots = roots - step
    order = sorted(range(len(roots)), key=lambda k: (round(roots[k].real, 12), round(roots[k].imag, 12)))
    return roots[order]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """The curve ``y^2 = N(x)`` of genus ``g`` with marked root ``a``."""

    genus: int
    nu: tuple
    a: object
    symbolic: bool = False

    @property
    def ring_vars(self) -> tuple[str, ...]:
        return symbolic_ring(self.genus) if self.symbolic else ()

    @property
    def is_exact(self) -> bool:
        return self.symbolic or isinstance(self.a, Fraction)

    def coeffs(self) -> list:
        """Coefficients of ``x^k`` in ascending order of ``k``."""
        return list(reversed(self.nu))

    def N(self, x):
        acc = 0
        for c in self.nu:
            acc = acc * x + c
        return acc

    def N_derivative(self, k: int, x):
        """k-th derivative of N at ``x``."""
        d = 2 * self.genus + 2
        acc = 0
        for j, c in enumerate(self.nu):
            p = d - j
            if p >= k:
                acc = acc + c * math.perm(p, k) * x ** (p - k)
        return acc

    def N_prime_a(self):
        return self.N_derivative(1, self.a)

    def taylor_at_a(self) -> list:
        """Coefficients ``N^(m)(a)/m!`` for ``m = 0 .. 2g+2``."""
        return [self.N_derivative(m, self.a) / math.factorial(m) if m else self.N(self.a)
                for m in range(2 * self.genus + 3)]

    def poly(self, name: str, variables: tuple[str, ...]) -> MultiPoly:
        """N as a MultiPoly in ``name`` over ``variables``."""
        x = MultiPoly.var(name, variables)
        acc = MultiPoly.const(0, variables)
        for c in self.nu:
            acc = acc * x + lift(c, variables)
        return acc

    def numeric(self) -> "Curve":
        """Same curve with complex coefficients (for the numerical layer)."""
        if self.symbolic:
            raise TypeError("symbolic curve has no numeric values")
        return Curve(self.genus, tuple(complex(c) for c in self.nu), complex(self.a))

    def with_values(self, values: dict) -> "Curve":
        """Bind the symbolic ring to values ``{'a': .., 'nu0': .., ...}``."""
        if not self.symbolic:
            return self
        nu = tuple(c.evaluate(values) if isinstance(c, MultiPoly) else c for c in self.nu)
        return Curve(self.genus, nu, values["a"])

    def fingerprint_data(self) -> dict:
        def enc(c):
            if isinstance(c, Fraction):
                return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
            if isinstance(c, complex):
                return [c.real, c.imag]
            return str(c)

        return {"genus": self.genus, "nu": [enc(c) for c in self.nu], "branch_point": enc(self.a)}


def validate_curve(g: int, nu: Sequence, a, snap_tol: float = 1e-9) -> Curve:
    """Build a :class:`Curve` from exact coefficients, checking that
    ``nu0 != 0``, that ``N`` is square-free and that ``a`` is a root.

    ``a`` may be exact, a complex number close to a root (snapped) or an
    ``int`` index into the roots sorted by (real, imag) when passed as
    ``("index", k)``.
    """
    if g < 1:
        raise CurveError("genus must be positive")
    if len(nu) != 2 * g + 3:
        raise CurveError(f"expected {2 * g + 3} coefficients, got {len(nu)}")
    nu = tuple(parse_rational(c) for c in nu)
    if nu[0] == 0:
        raise Nu0Zero("leading coefficient nu0 is zero")
    asc = list(reversed(nu))
    deriv = [k * c for k, c in enumerate(asc)][1:]
    if len(_poly_gcd(asc, deriv)) > 1:
        raise MultipleRoots("N has a repeated root")
    curve = Curve(g, nu, None)
    if isinstance(a, tuple) and a and a[0] == "index":
        roots = numeric_roots(nu)
        k = int(a[1])
        if not 0 <= k < len(roots):
            raise NotABranchPoint(f"root index {k} out of range")
        a = _exact_or_numeric(roots[k], curve)
    elif isinstance(a, (complex, float)):
        roots = numeric_roots(nu)
        k = int(np.argmin(abs(roots - a)))
        if abs(roots[k] - a) > snap_tol * max(1.0, abs(a)):
            raise NotABranchPoint(f"{a} is not within {snap_tol} of a root of N")
        a = _exact_or_numeric(roots[k], curve)
    else:
        a = parse_rational(a)
        if curve.N(a) != 0:
            raise NotABranchPoint(f"N({a}) = {curve.N(a)} != 0")
    return Curve(g, nu, a)


def _exact_or_numeric(root: complex, curve: Curve):
    if abs(root.imag) < 1e-12:
        cand = Fraction(root.real).limit_denominator(10 ** 6)
        if curve.N(cand) == 0:
            return cand
    return complex(root)


def symbolic_curve(g: int) -> Curve:
    """Generic curve of genus ``g``: ``a`` and ``nu0 .. nu_{4g+2}`` are
    indeterminates and ``nu_{4g+4} = -sum nu_{2j} a^(2g+2-j)``."""
    ring = symbolic_ring(g)
    a = MultiPoly.var("a", ring)
    nus = [MultiPoly.var(n, ring) for n in nu_names(g)[:-1]]
    last = MultiPoly.const(0, ring)
    for j, c in enumerate(nus):
        last = last - c * a ** (2 * g + 2 - j)
    return Curve(g, tuple(nus) + (last,), a, symbolic=True)


# ---------------------------------------------------------------------------
# scaled model


@dataclass(frozen=True)
class ScaledModel:
    """Curve plus a scaling pair ``(s, t)`` with ``s^(2g+1)/t^2 = N'(a)``.

    In exact mode ``s`` and ``t`` are indeterminates and the constraint is
    used as the rewriting rule ``t^2 -> s^(2g+1)/N'(a)``.
    """

    curve: Curve
    s: object
    t: object
    exact: bool = False
    ring: tuple = field(default=(), compare=False)

    @classmethod
    def symbolic(cls, curve: Curve) -> "ScaledModel":
        ring = ("s", "t") + curve.ring_vars
        return cls(curve, MultiPoly.var("s", ring), MultiPoly.var("t", ring), True, ring)

    @classmethod
    def numeric(cls, curve: Curve, s=1.0, t=None, tol: float = 1e-12) -> "ScaledModel":
        if curve.symbolic:
            raise TypeError("numeric scaling needs a concrete curve")
        g = curve.genus
        npa = complex(curve.N_prime_a())
        s = complex(s)
        if s == 0:
            raise ScalingError("s must be non-zero")
        if t is None:
            t = cmath.sqrt(s ** (2 * g + 1) / npa)
        t = complex(t)
        if t == 0 or abs(s ** (2 * g + 1) / t ** 2 - npa) > tol * max(1.0, abs(npa)):
            raise ScalingError("s^(2g+1)/t^2 != N'(a)")
        return cls(curve, s, t, False)

    @classmethod
    def exact_values(cls, curve: Curve, s, t) -> "ScaledModel":
        s, t = parse_rational(s), parse_rational(t)
        if s == 0 or t == 0 or s ** (2 * curve.genus + 1) / t ** 2 != curve.N_prime_a():
            raise ScalingError("s^(2g+1)/t^2 != N'(a) exactly")
        return cls(curve, s, t, False)

    @property
    def genus(self) -> int:
        return self.curve.genus

    def _num(self, c, variables):
        return lift(c, variables)


def lambda_tilde(m: ScaledModel) -> list:
    """Coefficients of ``M(X) = X^(2g+1) + l2 X^(2g) + ... + l_{4g+2}``.

    ``l_{2i} = s^i N^(i+1)(a) / ((i+1)! N'(a))``; returned as a list indexed
    by ``i`` (so entry ``i`` is the coefficient of weight ``2i``).
    """
    c = m.curve
    g = c.genus
    npa = c.N_prime_a()
    out = []
    for i in range(2 * g + 2):
        top = c.N_derivative(i + 1, c.a)
        if m.exact:
            num = lift(top, m.ring) * m.s ** i
            val = RatFunc(num, lift(npa, m.ring) * math.factorial(i + 1))
            out.append(val.simplified())
        elif isinstance(npa, Fraction) and isinstance(m.s, Fraction):
            out.append(m.s ** i * top / (math.factorial(i + 1) * npa))
        else:
            out.append(complex(m.s) ** i * complex(top) / (math.factorial(i + 1) * complex(npa)))
    return out


def d_matrix(m: ScaledModel) -> list[list]:
    """Lower-triangular matrix ``D`` with ``D_ij = s^(g+1-i) C(i-1,j-1) (-a)^(i-j) / t``."""
    g = m.genus
    a = m.curve.a
    rows = []
    for i in range(1, g + 1):
        row = []
        for j in range(1, g + 1):
            if j > i:
                row.append(0)
                continue
            coef = math.comb(i - 1, j - 1)
            if m.exact:
                e = lift(a, m.ring)
                val = RatFunc(m.s ** (g + 1 - i) * (-e) ** (i - j) * coef, m.t)
            else:
                val = m.s ** (g + 1 - i) * coef * (-a) ** (i - j) / m.t
            row.append(val)
        rows.append(row)
    return rows


def d_matrix_numeric(m: ScaledModel) -> np.ndarray:
    return np.array([[complex(v) for v in row] for row in d_matrix(m)])


def chi_factor(m: ScaledModel):
    """``s^((g^2-3g-2)/4) t`` when ``g(g+1)/2`` is odd, else ``s^(g(g+1)/4)``."""
    g = m.genus
    if (g * (g + 1) // 2) % 2:
        k = (g * g - 3 * g - 2) // 4
        if m.exact:
            return RatFunc(m.t) * (RatFunc(m.s) ** k)
        return m.s ** k * m.t
    k = g * (g + 1) // 4
    return RatFunc(m.s ** k) if m.exact else m.s ** k


def zeta_transform(m: ScaledModel, point):
    """Map ``(x, y)`` on the curve to ``(X, Y) = (s/(x-a), t y/(x-a)^(g+1))``."""
    x, y = point
    d = x - m.curve.a
    if d == 0:
        raise AtBasePoint("x = a maps to the point at infinity")
    return m.s / d, m.t * y / d ** (m.genus + 1)


def inverse_zeta_x(m: ScaledModel, X):
    return m.curve.a + m.s / X


def transformed_poly(m: ScaledModel, name: str = "X", variables=None):
    """``M(X)`` as a RatFunc (exact mode) or list of numbers (numeric mode)."""
    lam = lambda_tilde(m)
    g = m.genus
    if not m.exact and variables is None:
        return lam
    variables = variables or ((name,) + m.ring)
    X = MultiPoly.var(name, variables)
    acc = RatFunc(MultiPoly.const(0, variables))
    for i, c in enumerate(lam):
        acc = acc + RatFunc(X ** (2 * g + 1 - i)) * c
    return acc


# ---------------------------------------------------------------------------
# differential forms


@dataclass(frozen=True)
class DifferentialForm:
    """``coefficient * d(var) / (2 w)`` with ``w`` = y (var x) or Y (var X).

    ``kind`` is one of ``holomorphic-V``, ``holomorphic-C``,
    ``second-kind-C``, ``second-kind-V``.
    """

    kind: str
    index: int
    coefficient: object
    var: str

    def __str__(self) -> str:
        w = "y" if self.var == "x" else "Y"
        return f"({self.coefficient}) d{self.var}/(2{w})"


def _xvars(m: ScaledModel, name: str) -> tuple[str, ...]:
    return (name,) + (m.ring if m.exact else m.curve.ring_vars)


def holomorphic_differentials(m: ScaledModel):
    """Bases ``mu_i = x^(i-1) dx/(2y)`` and ``omega_i = -X^(g-i) dX/(2Y)``."""
    g = m.genus
    vx, vX = _xvars(m, "x"), _xvars(m, "X")
    x = MultiPoly.var("x", vx)
    X = MultiPoly.var("X", vX)
    mu = [DifferentialForm("holomorphic-V", i, RatFunc(x ** (i - 1)), "x") for i in range(1, g + 1)]
    om = [DifferentialForm("holomorphic-C", i, RatFunc(-(X ** (g - i))), "X") for i in range(1, g + 1)]
    return mu, om


def second_kind_eta(m: ScaledModel) -> list[DifferentialForm]:
    """``eta_i = -(1/2Y) sum_k (k+i-g) l_{2g+2i-2k-2} X^k dX`` over
    ``g-i+1 <= k <= g+i-1``."""
    g = m.genus
    lam = lambda_tilde(m)
    vX = _xvars(m, "X")
    X = MultiPoly.var("X", vX)
    out = []
    for i in range(1, g + 1):
        acc = RatFunc(MultiPoly.const(0, vX))
        for k in range(g - i + 1, g + i):
            acc = acc + RatFunc(X ** k) * lam[g + i - k - 1] * (k + i - g)
        out.append(DifferentialForm("second-kind-C", i, -acc, "X"))
    return out


def pullback(m: ScaledModel, form: DifferentialForm) -> DifferentialForm:
    """Pull a form on ``Y^2 = M(X)`` back along the coordinate change.

    ``c(X) dX/(2Y) -> -s c(s/(x-a)) (x-a)^(g-1) / t * dx/(2y)``.
    """
    if form.var != "X":
        raise ValueError("only forms in X can be pulled back")
    if not m.exact:
        raise NotImplementedError("pullbacks are exact-mode constructions")
    g = m.genus
    vx = ("x",) + m.ring
    x = MultiPoly.var("x", vx)
    a = lift(m.curve.a, vx)
    s = lift(m.s, vx)
    t = lift(m.t, vx)
    Xsub = RatFunc(s, x - a)
    c = form.coefficient
    c = c if isinstance(c, RatFunc) else RatFunc(c)
    pulled = c.substitute({"X": Xsub})
    factor = RatFunc(-s * (x - a) ** (g - 1), t) if g >= 1 else None
    res = eliminate_t(pulled * factor, m)
    kind = "holomorphic-V" if form.kind == "holomorphic-C" else "second-kind-V"
    return DifferentialForm(kind, form.index, res, "x")


def eliminate_t(r: RatFunc, m: ScaledModel) -> RatFunc:
    """Rewrite even powers of ``t`` with ``t^2 = s^(2g+1)/N'(a)``.

    The denominator must be a monomial in ``t`` times a ``t``-free factor.
    The result has ``t`` to at most the first power in the numerator.
    """
    if "t" not in r.vars:
        return r
    g = m.genus
    dparts = r.den.coefficients(("t",))
    if len(dparts) != 1:
        raise SimplificationFailure("denominator is not monomial in t")
    ((md,), dcoef), = dparts.items()
    variables = r.vars
    npa = lift(m.curve.N_prime_a(), variables)
    s = MultiPoly.var("s", variables)
    t = MultiPoly.var("t", variables)
    sq = s ** (2 * g + 1)
    total = RatFunc(MultiPoly.const(0, variables))
    for (k,), coef in r.num.coefficients(("t",)).items():
        e = k - md
        q, odd = divmod(e, 2)
        term = RatFunc(coef)
        if q > 0:
            term = term * RatFunc(sq ** q, npa ** q)
        elif q < 0:
            term = term * RatFunc(npa ** (-q), sq ** (-q))
        if odd:
            term = term * RatFunc(t)
        total = total + term
    return (total / RatFunc(dcoef)).simplified()


def strip_scaling(r, m: ScaledModel, what: str = "expression"):
    """Eliminate ``t``, simplify, and check neither ``s`` nor ``t`` survives."""
    r = eliminate_t(r if isinstance(r, RatFunc) else RatFunc(r), m).reduced()
    used = set(r.used_variables())
    if used & {"s", "t"}:
        raise SimplificationFailure(f"scaling symbols survive in {what}")
    return r


def pullback_matrix_check(m: ScaledModel) -> bool:
    """Exact check that the pulled-back ``omega_i`` equal ``sum_j D_ij mu_j``."""
    mu, om = holomorphic_differentials(m)
    D = d_matrix(m)
    vx = ("x",) + m.ring
    for i, w in enumerate(om):
        lhs = pullback(m, w).coefficient
        rhs = RatFunc(MultiPoly.const(0, vx))
        for j, mj in enumerate(mu):
            if D[i][j] != 0:
                rhs = rhs + D[i][j] * mj.coefficient
        rhs = eliminate_t(rhs, m)
        if not lhs == rhs:
            return False
    return True


def as_polynomial(r: RatFunc) -> MultiPoly:
    try:
        return r.as_poly()
    except NonDivisible as exc:
        raise SimplificationFailure("expected a polynomial") from exc
