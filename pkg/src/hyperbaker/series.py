"""Schur-type polynomials and exact genus-1 expansions.

``p_n(T)`` are the coefficients of ``exp(sum_j T_j k^j)`` in ``k``, and the
determinant ``S = det(p_{g+j+1-2i})`` gives the lowest-order part of the
sigma function.  At genus one the full expansion of sigma is available from
the Weierstrass recursion, which makes exact expansions of the entire
function possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache


from .algebra import MultiPoly, RatFunc, exact_divide, NonDivisible, graded_weight, WeightTable
from .curve import Curve, ScaledModel, chi_factor, d_matrix, eliminate_t, lambda_tilde, lift


class EvenVariableSurvives(ArithmeticError):
    pass


class ScalingResidue(ArithmeticError):
    pass


def _tnames(n: int) -> tuple[str, ...]:
    return tuple(f"T{j}" for j in range(1, n + 1))


def p_polynomials(n_max: int, variables=None) -> list[MultiPoly]:
    """``p_0 .. p_{n_max}`` via ``n p_n = sum_j j T_j p_{n-j}``."""
    variables = tuple(variables) if variables else _tnames(max(n_max, 1))
    T = [None] + [MultiPoly.var(v, variables) for v in variables]
    p = [MultiPoly.const(1, variables)]
    for n in range(1, n_max + 1):
        acc = MultiPoly.const(0, variables)
        for j in range(1, n + 1):
            if j < len(T):
                acc = acc + T[j] * p[n - j] * j
        p.append(acc * Fraction(1, n))
    return p


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = None
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        term = mat[0][c] * _det(minor)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total


def schur_det(g: int) -> MultiPoly:
    """``det(p_{g+j+1-2i}(T))_{1<=i,j<=g}``; raises if an even ``T`` survives."""
    nmax = 2 * g
    variables = _tnames(2 * g)
    p = p_polynomials(nmax, variables)
    zero = MultiPoly.const(0, variables)

    def pn(n):
        return p[n] if 0 <= n <= nmax else zero

    mat = [[pn(g + j + 1 - 2 * i) for j in range(1, g + 1)] for i in range(1, g + 1)]
    S = _det(mat)
    used = S.used_variables()
    if any(int(v[1:]) % 2 == 0 for v in used):
        raise EvenVariableSurvives(f"even variables in S: {used}")
    return S


def schur_u(g: int) -> MultiPoly:
    """``S`` in ``u1, u3, ..., u_{2g-1}``."""
    S = schur_det(g)
    names = tuple(f"u{2 * i - 1}" for i in range(1, g + 1))
    odd = tuple(f"T{2 * i - 1}" for i in range(1, g + 1))
    out = {}
    idx = [S.vars.index(t) for t in odd]
    for exps, c in S.terms().items():
        out[tuple(exps[k] for k in idx)] = c
    return MultiPoly(names, out)


# ---------------------------------------------------------------------------
# genus one


@lru_cache(maxsize=None)
def _weierstrass_table(max_deg: int) -> dict:
    """``a_{m,n}`` of the Weierstrass sigma recursion for ``4m+6n+1 <= max_deg``."""
    a: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def get(m, n):
        return a.get((m, n), Fraction(0)) if m >= 0 and n >= 0 else Fraction(0)

    for total in range(1, max_deg + 1):
        for n in range(0, total // 6 + 1):
            rem = total - 6 * n
            if rem % 4:
                continue
            m = rem // 4
            if 4 * m + 6 * n + 1 > max_deg:
                continue
            val = (3 * (m + 1) * get(m + 1, n - 1)
                   + Fraction(16, 3) * (n + 1) * get(m - 2, n + 1)
                   - Fraction(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * get(m - 1, n))
            a[(m, n)] = val
    return a


def weierstrass_sigma_coeffs(max_deg: int):
    """Coefficients of ``u^k`` in the Weierstrass sigma function as
    polynomials in ``g2, g3``: list of dicts ``{(i, j): c}`` meaning
    ``c g2^i g3^j``."""
    table = _weierstrass_table(max_deg)
    out = [dict() for _ in range(max_deg + 1)]
    for (m, n), c in table.items():
        k = 4 * m + 6 * n + 1
        if k <= max_deg and c:
            coef = c * Fraction(1, 2 ** m) * Fraction(2 ** n) / math.factorial(k)
            out[k][(m, n)] = out[k].get((m, n), 0) + coef
    return out


@dataclass
class TruncatedSeries:
    """Power series in one variable with exact coefficients up to ``order``."""

    var: str
    order: int
    coeffs: dict = field(default_factory=dict)
    weight: int = -1

    def __getitem__(self, n):
        return self.coeffs.get(n, 0)

    def evaluate(self, x, values: dict | None = None):
        total = 0
        for n, c in self.coeffs.items():
            if isinstance(c, (RatFunc, MultiPoly)):
                c = c.evaluate(values or {})
            total = total + c * x ** n
        return total

    def text(self) -> str:
        parts = []
        for n in sorted(self.coeffs):
            c = self.coeffs[n]
            parts.append(f"({c})*{self.var}^{n}")
        return " + ".join(parts) if parts else "0"


def genus1_sigma_oracle(l2, l4, l6, W: int = 20) -> TruncatedSeries:
    """Genus-1 sigma for ``Y^2 = X^3 + l2 X^2 + l4 X + l6`` up to ``u^W``.

    ``exp(l2 u^2/6) sigma_W(u; g2, g3)`` with the Weierstrass invariants of
    the shifted cubic.  Coefficients may be numbers or ring elements.
    """
    third = Fraction(1, 3)
    g2 = (l4 - l2 * l2 * third) * (-4)
    g3 = (l6 - l2 * l4 * third + l2 * l2 * l2 * Fraction(2, 27)) * (-4)
    sw = weierstrass_sigma_coeffs(W)
    sig = {}
    for k in range(W + 1):
        acc = 0
        for (i, j), c in sw[k].items():
            acc = acc + g2 ** i * g3 ** j * c
        if not _is_zero(acc):
            sig[k] = acc
    # exp(l2 u^2 / 6)
    ex = {0: 1}
    term = 1
    for r in range(1, W // 2 + 1):
        term = term * l2 * Fraction(1, 6) * Fraction(1, r)
        ex[2 * r] = term
    out = {}
    for k1, c1 in sig.items():
        for k2, c2 in ex.items():
            k = k1 + k2
            if k <= W:
                out[k] = out.get(k, 0) + c1 * c2
    out = {k: c for k, c in out.items() if not _is_zero(c)}
    return TruncatedSeries("u1", W, out)


def _is_zero(c) -> bool:
    if isinstance(c, (MultiPoly, RatFunc)):
        return c == 0
    return c == 0


def h_series_genus1(curve: Curve, W: int = 20, scaling=None, check: bool = True) -> TruncatedSeries:
    """Exact expansion of ``chi exp(n11 v^2) sigma(D v)`` in ``v = v2``.

    With ``scaling = (s, t)`` given as exact rationals the expansion is
    computed for that pair (concrete curves only).  Otherwise ``s`` is kept
    as an indeterminate next to its inverse ``si`` and ``w = 1/N'(a)``;
    ``t`` only ever occurs squared and is rewritten as ``s^3 w``.  The
    returned coefficients are RatFuncs over the curve ring; a surviving
    ``s`` raises :class:`ScalingResidue`.
    """
    from .omega import omega_recursion

    if curve.genus != 1:
        raise ValueError("genus-1 only")
    omega = omega_recursion(ScaledModel.symbolic(curve))
    if scaling is not None:
        m = ScaledModel.exact_values(curve, *scaling)
        lam = lambda_tilde(m)
        D = m.s / m.t
        chi = chi_factor(m)
        n11 = omega[0][0].constant_value()
        n11 = Fraction(int(n11.numerator), int(n11.denominator))
        sig = genus1_sigma_oracle(lam[1], lam[2], lam[3], W)
        coeffs = _compose_h(sig, lambda k: chi * D ** k, n11, W, Fraction(1))
        return TruncatedSeries("v2", W, {k: c for k, c in coeffs.items() if c != 0}, weight=-2)

    ring = ("s", "si", "w") + curve.ring_vars
    s, si, w = (MultiPoly.var(v, ring) for v in ("s", "si", "w"))
    lam = []
    for i in range(4):
        top = lift(curve.N_derivative(i + 1, curve.a), ring) * Fraction(1, math.factorial(i + 1))
        lam.append(top * w * s ** i)
    sig = genus1_sigma_oracle(lam[1], lam[2], lam[3], W)
    npa = lift(curve.N_prime_a(), ring)

    def scale(k):
        # chi D^k = s^(k-1) t^(1-k) and t^-2 = N'(a) / s^3
        if k % 2 == 0:
            raise ScalingResidue("odd power of t in an even term")
        j = (k - 1) // 2
        return s ** (k - 1) * (npa * si ** 3) ** j

    one = MultiPoly.const(1, ring)
    coeffs = _compose_h(sig, scale, lift(omega[0][0], ring), W, one)
    result = {}
    for k, c in coeffs.items():
        c = _cancel_inverse(c, "s", "si")
        if set(c.used_variables()) & {"s", "si"}:
            raise ScalingResidue(f"scaling symbols survive in coefficient of v^{k}")
        r = _clear_w(c, npa, curve)
        if not r == 0:
            result[k] = r
    return TruncatedSeries("v2", W, result, weight=-2)


def _compose_h(sig: TruncatedSeries, scale, n11, W: int, one):
    sv = {k: c * scale(k) for k, c in sig.coeffs.items()}
    ex = {0: one}
    term = one
    for r in range(1, W // 2 + 1):
        term = term * n11 * Fraction(1, r)
        ex[2 * r] = term
    out = {}
    for k1, c1 in sv.items():
        for k2, c2 in ex.items():
            k = k1 + k2
            if k <= W:
                out[k] = out.get(k, 0) + c1 * c2
    return out


def _cancel_inverse(p: MultiPoly, v: str, vi: str) -> MultiPoly:
    terms = {}
    iv, ii = p.vars.index(v), p.vars.index(vi)
    for exps, c in p.terms().items():
        e = list(exps)
        k = min(e[iv], e[ii])
        e[iv] -= k
        e[ii] -= k
        terms[tuple(e)] = terms.get(tuple(e), 0) + c
    return MultiPoly(p.vars, terms)


def _clear_w(p: MultiPoly, npa: MultiPoly, curve: Curve) -> RatFunc:
    """Turn a polynomial in ``w = 1/N'(a)`` into ``poly / N'(a)^m``."""
    ring = curve.ring_vars
    parts = p.coefficients(("w",))
    m = max(e[0] for e in parts) if parts else 0
    npa_r = npa.embed_used(ring)
    num = MultiPoly.const(0, ring)
    for (k,), c in parts.items():
        num = num + c.embed_used(ring) * npa_r ** (m - k)
    return RatFunc(num, npa_r ** m)


def npa_power(c: RatFunc, curve: Curve):
    """``m`` with ``c = poly / N'(a)^m`` up to a rational constant, else None."""
    ring = curve.ring_vars
    npa = lift(curve.N_prime_a(), ring)
    den = c.den.embed_used(ring) if set(c.den.used_variables()) <= set(ring) else None
    if den is None:
        return None
    m = 0
    while not den.is_constant():
        try:
            den = exact_divide(den, npa)
        except NonDivisible:
            return None
        m += 1
        if m > 200:
            return None
    return m


def series_weights_ok(series: TruncatedSeries, curve: Curve, total: int) -> bool:
    """All terms ``c_k v^k`` have weight ``total`` (``wt(v2) = -2``)."""
    w = WeightTable(curve.genus)
    for k, c in series.coeffs.items():
        wt = graded_weight(c, w)
        if not isinstance(wt, int) or wt - 2 * k != total:
            return False
    return True
