"""The quadratic-form matrix Omega, its generating polynomial, and the
second-kind differentials on the two-point curve.

Everything here is exact.  The scaling pair ``(s, t)`` enters through the
transformed coefficients and is eliminated with ``t^2 = s^(2g+1)/N'(a)``;
that it disappears completely is checked, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .algebra import MultiPoly, RatFunc, exact_divide, NonDivisible
from .baker import build_f
from .curve import (
    Curve,
    DifferentialForm,
    ScaledModel,
    SimplificationFailure,
    eliminate_t,
    holomorphic_differentials,
    lambda_tilde,
    d_matrix,
    lift,
    pullback,
    second_kind_eta,
    strip_scaling,
)


class ClosedFormMismatch(ArithmeticError):
    pass


class ReconstructionFailure(ArithmeticError):
    pass


def _evars(m: ScaledModel) -> tuple[str, ...]:
    return ("e1", "e2") + m.ring


def f_tilde(m: ScaledModel, names=("E1", "E2")):
    """``sum_{i<=g} E1^i E2^i (2 l_{4g+2-4i} + l_{4g-4i} (E1+E2))`` as a
    RatFunc over ``names`` and the model ring."""
    g = m.genus
    lam = lambda_tilde(m)
    variables = tuple(names) + m.ring
    E1, E2 = (MultiPoly.var(n, variables) for n in names)
    acc = RatFunc(MultiPoly.const(0, variables))
    for i in range(g + 1):
        mono = RatFunc((E1 * E2) ** i)
        acc = acc + mono * (lam[2 * g + 1 - 2 * i] * 2 + RatFunc(E1 + E2) * lam[2 * g - 2 * i])
    return acc


def f_bar(m: ScaledModel) -> MultiPoly:
    """``t^-2 (e1-a)^(g+1) (e2-a)^(g+1) f~(s/(e1-a), s/(e2-a))`` as a
    polynomial in ``e1, e2`` over the curve ring (``s`` and ``t`` removed)."""
    if not m.exact:
        raise TypeError("f_bar needs an exact scaled model")
    g = m.genus
    variables = _evars(m)
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    a = lift(m.curve.a, variables)
    s = lift(m.s, variables)
    t = lift(m.t, variables)
    ft = f_tilde(m)
    sub = ft.substitute({"E1": RatFunc(s, e1 - a), "E2": RatFunc(s, e2 - a)})
    pref = RatFunc(((e1 - a) * (e2 - a)) ** (g + 1), t * t)
    r = eliminate_t(sub * pref, m)
    if set(r.used_variables()) & {"s", "t"}:
        raise SimplificationFailure("scaling symbols survive in f_bar")
    try:
        p = r.as_poly()
    except NonDivisible as exc:
        raise SimplificationFailure("f_bar is not a polynomial") from exc
    target = ("e1", "e2") + m.curve.ring_vars
    if not _subset(p, target):
        raise SimplificationFailure("f_bar depends on unexpected variables")
    return p.embed_used(target)


def _subset(p: MultiPoly, variables) -> bool:
    return set(p.used_variables()) <= set(variables)


def taylor_f(curve: Curve) -> MultiPoly:
    """Same construction as :func:`~hyperbaker.baker.build_f` with the
    coefficients of N expanded around ``a`` (and the constant one dropped),
    then shifted back; an independent route to ``f_bar``."""
    g = curve.genus
    variables = ("e1", "e2") + curve.ring_vars
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    a = lift(curve.a, variables)
    c = curve.taylor_at_a()
    d1, d2 = e1 - a, e2 - a
    acc = MultiPoly.const(0, variables)
    for i in range(g + 2):
        top = 2 * i
        hi = lift(c[top], variables) if top <= 2 * g + 2 else 0
        lo = lift(c[top + 1], variables) if top + 1 <= 2 * g + 2 else 0
        if top == 0:
            hi = MultiPoly.const(0, variables)
        acc = acc + (d1 * d2) ** i * (hi * 2 + (d1 + d2) * lo)
    return acc


@dataclass(frozen=True)
class NTildeTable:
    """Coefficients ``n~_{i,j}`` (1-based) of ``f_bar = sum n~_ij e1^(i-1) e2^(j-1)``."""

    size: int
    entries: dict

    def __getitem__(self, ij):
        return self.entries.get(ij, MultiPoly.const(0))

    def matrix(self):
        return [[self[(i, j)] for j in range(1, self.size + 1)] for i in range(1, self.size + 1)]


def n_tilde(m: ScaledModel, fb: MultiPoly | None = None, check: bool = True) -> NTildeTable:
    """Read ``n~`` off ``f_bar`` and cross-check the lower triangle
    ``1 <= j <= i <= g`` (shifted by two rows) against the closed form."""
    fb = f_bar(m) if fb is None else fb
    g = m.genus
    zero = MultiPoly.const(0, fb.vars)
    entries = {}
    for (p, q), coeff in fb.coefficients(("e1", "e2")).items():
        entries[(p + 1, q + 1)] = coeff
    table = NTildeTable(g + 2, entries)
    if check:
        for i in range(1, g + 1):
            for j in range(1, i + 1):
                closed = n_tilde_closed_form(m, i, j)
                got = entries.get((i + 2, j), zero)
                if not closed == RatFunc(got):
                    raise ClosedFormMismatch(f"n~[{i + 2},{j}] differs from the closed form")
    return table


def n_tilde_closed_form(m: ScaledModel, i: int, j: int) -> RatFunc:
    """Closed-form triple sum for ``n~_{i+2,j}``, ``1 <= j <= i <= g``."""
    g = m.genus
    lam = lambda_tilde(m)
    ring = m.ring
    s = RatFunc(lift(m.s, ring))
    a = RatFunc(lift(m.curve.a, ring))
    C = math.comb
    acc = RatFunc(MultiPoly.const(0, ring))
    for k in range(0, g - i + 1):
        acc = acc + lam[2 * g + 1 - 2 * k] * 2 * s ** (2 * k) * (C(g + 1 - k, i + 1) * C(g + 1 - k, j - 1)) \
            * (-a) ** (2 * g + 2 - 2 * k - i - j)
    for k in range(0, g - i):
        acc = acc + lam[2 * g - 2 * k] * s ** (2 * k + 1) * (C(g - k, i + 1) * C(g + 1 - k, j - 1)) \
            * (-a) ** (2 * g + 1 - 2 * k - i - j)
    for k in range(0, g - i + 1):
        acc = acc + lam[2 * g - 2 * k] * s ** (2 * k + 1) * (C(g + 1 - k, i + 1) * C(g - k, j - 1)) \
            * (-a) ** (2 * g + 1 - 2 * k - i - j)
    t = RatFunc(lift(m.t, ring))
    return eliminate_t(acc / (t * t), m)


def omega_recursion(m: ScaledModel, verify: bool = True):
    """Matrix ``Omega = (n_ij)`` from the three-term recursion, filled
    column by column starting at ``j = 1`` and symmetrised.

    Returns a g x g list of MultiPolys over the curve ring.  With ``verify``
    the recursion is re-checked on every entry and the generating identity
    ``f_bar - f = (e1-e2)^2 sum n_ij e1^(i-1) e2^(j-1)`` is checked exactly.
    """
    g = m.genus
    fb = f_bar(m)
    table = n_tilde(m, fb, check=verify)
    variables = fb.vars
    zero = MultiPoly.const(0, variables)
    n: dict[tuple[int, int], MultiPoly] = {}

    def get(i, j):
        if 1 <= i <= g and 1 <= j <= g:
            return n[(i, j)] if (i, j) in n else n[(j, i)]
        return zero

    for j in range(1, g + 1):
        for i in range(j, g + 1):
            nt = table[(i + 2, j)]
            nt = nt.embed(variables) if nt.vars != variables else nt
            n[(i, j)] = get(i + 1, j - 1) * 2 - get(i + 2, j - 2) + nt
    omega = [[get(i, j) for j in range(1, g + 1)] for i in range(1, g + 1)]
    if verify:
        for i in range(1, g + 1):
            for j in range(1, i + 1):
                rhs = get(i + 1, j - 1) * 2 - get(i + 2, j - 2) + table[(i + 2, j)]
                if not get(i, j) == rhs:
                    raise ReconstructionFailure(f"recursion fails at ({i},{j})")
        if not master_identity_holds(m.curve, fb, omega):
            raise ReconstructionFailure("f_bar - f != (e1-e2)^2 sum n_ij e1^(i-1) e2^(j-1)")
    ring = m.curve.ring_vars
    return [[_to_ring(x, ring) for x in row] for row in omega]


def _to_ring(p: MultiPoly, ring) -> MultiPoly:
    used = p.used_variables()
    if set(used) & {"s", "t", "e1", "e2"}:
        raise SimplificationFailure("Omega entry depends on scaling or e variables")
    return p.embed_used(ring) if ring else p.embed_used(())


def master_identity_holds(curve: Curve, fb: MultiPoly, omega) -> bool:
    g = curve.genus
    f = build_f(curve)
    variables = tuple(dict.fromkeys(fb.vars + f.vars))
    e1, e2 = MultiPoly.var("e1", variables), MultiPoly.var("e2", variables)
    acc = MultiPoly.const(0, variables)
    for i in range(g):
        for j in range(g):
            acc = acc + omega[i][j] * e1 ** i * e2 ** j
    return (fb - f) == (e1 - e2) ** 2 * acc


def omega_numeric(curve: Curve) -> "np.ndarray":
    """Omega for a concrete curve as a complex matrix.

    Rational curves are handled exactly; otherwise the generic symbolic
    Omega of the genus is evaluated at the curve's ``a`` and ``nu``.
    """
    import numpy as np

    if curve.is_exact and not curve.symbolic:
        om = omega_recursion(ScaledModel.symbolic(curve))
        return np.array([[complex(e.constant_value()) for e in row] for row in om])
    om = generic_omega(curve.genus)
    vals = ring_values(curve)
    return np.array([[complex(e.evaluate(vals)) for e in row] for row in om])


@lru_cache(maxsize=None)
def generic_omega(g: int):
    from .curve import symbolic_curve

    return omega_recursion(ScaledModel.symbolic(symbolic_curve(g)))


@lru_cache(maxsize=None)
def generic_kappa(g: int):
    from .curve import symbolic_curve

    m = ScaledModel.symbolic(symbolic_curve(g))
    return kappa_forms(m, generic_omega(g))


def kappa_coefficients(curve: Curve):
    """Numerators of ``kappa_i = r_i(x)/(x-a)^g dx/(2y)`` as lists of
    x-coefficients (ascending) over the curve ring, plus the ring values
    binding them for a concrete curve (empty for rational curves)."""
    if curve.is_exact and not curve.symbolic:
        forms, vals = kappa_forms(ScaledModel.symbolic(curve)), {}
    else:
        forms, vals = generic_kappa(curve.genus), ring_values(curve)
    out = []
    for f in forms:
        parts = f.coefficient.num.coefficients(("x",))
        deg = max(e[0] for e in parts) if parts else 0
        row = [None] * (deg + 1)
        for (k,), coeff in parts.items():
            row[k] = coeff
        out.append(row)
    return out, vals


def kappa_numeric(curve: Curve):
    """Ascending x-coefficients of the numerators ``r_i`` of
    ``kappa_i = r_i(x)/(x-a)^g dx/(2y)`` for a concrete curve."""
    import numpy as np

    rows, vals = kappa_coefficients(curve)
    out = []
    for row in rows:
        c = np.zeros(len(row), dtype=complex)
        for k, coeff in enumerate(row):
            if coeff is not None:
                c[k] = complex(coeff.evaluate(vals)) if vals else complex(coeff.constant_value())
        out.append(c)
    return out


def ring_values(curve: Curve) -> dict:
    """Values for the symbolic ring indeterminates of a concrete curve."""
    names = ["a"] + [f"nu{2 * j}" for j in range(2 * curve.genus + 2)]
    vals = [curve.a] + list(curve.nu[:-1])
    return dict(zip(names, vals))


def kappa_forms(m: ScaledModel, omega=None) -> list[DifferentialForm]:
    """Second-kind forms ``kappa_j = sum_k D_kj pullback(eta_k) - 2 sum_l n_jl mu_l``.

    Returned coefficients are RatFuncs in ``x`` over the curve ring, of the
    shape ``r(x)/(x-a)^g``, free of ``s`` and ``t``.
    """
    g = m.genus
    if omega is None:
        omega = omega_recursion(m)
    D = d_matrix(m)
    etas = [pullback(m, e).coefficient for e in second_kind_eta(m)]
    mu, _ = holomorphic_differentials(m)
    vx = ("x",) + m.ring
    out = []
    for j in range(g):
        acc = RatFunc(MultiPoly.const(0, vx))
        for k in range(g):
            if D[k][j] != 0:
                acc = acc + etas[k] * D[k][j]
        acc = eliminate_t(acc, m)
        for l in range(g):
            acc = acc - RatFunc(mu[l].coefficient) * lift(omega[j][l], vx) * 2
        r = strip_scaling(acc, m, f"kappa_{j + 1}")
        r = _normalise_kappa(r, m.curve)
        out.append(DifferentialForm("second-kind-V", j + 1, r, "x"))
    return out


def _normalise_kappa(r: RatFunc, curve: Curve) -> RatFunc:
    """Bring ``r`` to the form ``num / (x-a)^g`` with a polynomial ``num``."""
    g = curve.genus
    vx = ("x",) + curve.ring_vars
    x = MultiPoly.var("x", vx)
    a = lift(curve.a, vx)
    target = (x - a) ** g
    num = r.num.compact()
    den = r.den.compact()
    allv = tuple(dict.fromkeys(vx + num.vars + den.vars))
    num, den, target = num.embed(allv), den.embed(allv), target.embed(allv)
    try:
        cof = exact_divide(target, den)
    except NonDivisible as exc:
        raise SimplificationFailure("kappa denominator is not a divisor of (x-a)^g") from exc
    return RatFunc(num * cof, target)


def kappa_numerators(forms: list[DifferentialForm]) -> list[MultiPoly]:
    """The polynomials ``r`` with ``kappa_i = r/(x-a)^g dx/(2y)``."""
    return [f.coefficient.num for f in forms]
