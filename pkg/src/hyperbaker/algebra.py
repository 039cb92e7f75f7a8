"""Exact multivariate polynomials and rational functions over Q.

Monomials are packed into a single Python int: one 16-bit field per
variable, the first variable in the highest field.  Integer order on packed
keys is then lexicographic order with the first variable largest, which is
what the division routines use.  Printing uses graded-lex order.

Coefficients are ``gmpy2.mpq``; floating point never enters this module
except through :meth:`MultiPoly.evaluate`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import gmpy2
from gmpy2 import mpq

_BITS = 16
_FIELD = (1 << _BITS) - 1
_MAX_EXP = 1 << (_BITS - 1)


class NonDivisible(ArithmeticError):
    """Raised by :func:`exact_divide` when the divisor does not divide."""

    def __init__(self, remainder: "MultiPoly"):
        super().__init__(f"non-zero remainder with {len(remainder)} terms")
        self.remainder = remainder


class DenominatorVanishes(ZeroDivisionError):
    pass


def to_mpq(c) -> mpq:
    if isinstance(c, type(mpq())):
        return c
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    if isinstance(c, str):
        return mpq(Fraction(c.strip()))
    if isinstance(c, float):
        raise TypeError("floats are not allowed in exact arithmetic")
    return mpq(c)


def _guard(n: int) -> int:
    g = 0
    for i in range(n):
        g |= 1 << (i * _BITS + _BITS - 1)
    return g


def _pack(exps: Iterable[int], n: int) -> int:
    key = 0
    for e in exps:
        if not 0 <= e < _MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        key = (key << _BITS) | e
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & _FIELD
        key >>= _BITS
    return tuple(out)


def _union(v1: tuple[str, ...], v2: tuple[str, ...]) -> tuple[str, ...]:
    if v1 == v2:
        return v1
    s1 = set(v1)
    extra = tuple(v for v in v2 if v not in s1)
    return v1 + extra


class MultiPoly:
    """Sparse polynomial with exact rational coefficients.

    Immutable by convention: no method mutates ``self``.
    """

    __slots__ = ("vars", "_t", "_guard")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping | None = None):
        self.vars = tuple(variables)
        n = len(self.vars)
        self._guard = _guard(n)
        t: dict[int, mpq] = {}
        if terms:
            for exps, c in terms.items():
                c = to_mpq(c)
                if c:
                    if isinstance(exps, int):
                        k = exps
                    else:
                        if len(exps) != n:
                            raise ValueError("exponent arity mismatch")
                        k = _pack(exps, n)
                    t[k] = t.get(k, 0) + c
            t = {k: c for k, c in t.items() if c}
        self._t = t

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, variables: tuple[str, ...], packed: dict[int, mpq]) -> "MultiPoly":
        p = cls.__new__(cls)
        p.vars = variables
        p._guard = _guard(len(variables))
        p._t = packed
        return p

    @classmethod
    def const(cls, c, variables: Iterable[str] = ()) -> "MultiPoly":
        variables = tuple(variables)
        c = to_mpq(c)
        return cls._raw(variables, {0: c} if c else {})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        n = len(variables)
        i = variables.index(name)
        return cls._raw(variables, {1 << (_BITS * (n - 1 - i)): mpq(1)})

    # basic protocol -------------------------------------------------------
    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self._t.get(0, mpq(0))

    def terms(self) -> dict[tuple[int, ...], mpq]:
        n = len(self.vars)
        return {_unpack(k, n): c for k, c in self._t.items()}

    def used_variables(self) -> tuple[str, ...]:
        n = len(self.vars)
        mask = 0
        for k in self._t:
            mask |= k
        out = []
        for i, v in enumerate(self.vars):
            if (mask >> (_BITS * (n - 1 - i))) & _FIELD:
                out.append(v)
        return tuple(out)

    def _shift(self, name: str) -> int:
        return _BITS * (len(self.vars) - 1 - self.vars.index(name))

    def degree(self, name: str) -> int:
        if name not in self.vars or not self._t:
            return 0 if self._t else -1
        sh = self._shift(name)
        return max((k >> sh) & _FIELD for k in self._t)

    def total_degree(self) -> int:
        n = len(self.vars)
        return max((sum(_unpack(k, n)) for k in self._t), default=-1)

    def embed(self, variables: tuple[str, ...]) -> "MultiPoly":
        """Re-express over a (super)set of variables."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        n_old, n_new = len(self.vars), len(variables)
        pos = [variables.index(v) for v in self.vars]
        t = {}
        for k, c in self._t.items():
            exps = _unpack(k, n_old)
            new = [0] * n_new
            for i, e in enumerate(exps):
                new[pos[i]] = e
            t[_pack(new, n_new)] = c
        return MultiPoly._raw(variables, t)

    def _align(self, other: "MultiPoly"):
        if self.vars == other.vars:
            return self, other
        v = _union(self.vars, other.vars)
        return self.embed(v), other.embed(v)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.vars)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, RatFunc):
            return RatFunc(self) + other
        a, b = self._align(self._coerce(other))
        t = dict(a._t)
        for k, c in b._t.items():
            s = t.get(k)
            if s is None:
                t[k] = c
            else:
                s = s + c
                if s:
                    t[k] = s
                else:
                    del t[k]
        return MultiPoly._raw(a.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.vars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        if isinstance(other, RatFunc):
            return RatFunc(self) - other
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return RatFunc(self) * other
        if not isinstance(other, MultiPoly):
            c = to_mpq(other)
            if not c:
                return MultiPoly._raw(self.vars, {})
            return MultiPoly._raw(self.vars, {k: v * c for k, v in self._t.items()})
        a, b = self._align(other)
        if len(a._t) < len(b._t):
            a, b = b, a
        t: dict[int, mpq] = {}
        get = t.get
        bt = list(b._t.items())
        for k1, c1 in a._t.items():
            for k2, c2 in bt:
                k = k1 + k2
                t[k] = get(k, 0) + c1 * c2
        res = MultiPoly._raw(a.vars, {k: c for k, c in t.items() if c})
        if res._t and (max(res._t) >> (_BITS * len(a.vars))):
            raise OverflowError("exponent overflow")
        return res

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (MultiPoly, RatFunc)):
            return RatFunc(self) / other
        return self * (1 / to_mpq(other))

    def __rtruediv__(self, other):
        return RatFunc(MultiPoly.const(other, self.vars)) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc(self) ** n
        result = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return RatFunc(self) == other
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.const(other, self.vars)
            except TypeError:
                return NotImplemented
        a, b = self._align(other)
        return a._t == b._t

    def __hash__(self):
        used = self.used_variables()
        return hash(frozenset(self.embed_used(used)._t.items()) if used else frozenset(self._t.items()))

    def embed_used(self, used) -> "MultiPoly":
        n = len(self.vars)
        pos = [self.vars.index(v) for v in used]
        t = {}
        for k, c in self._t.items():
            e = _unpack(k, n)
            t[_pack([e[i] for i in pos], len(used))] = c
        return MultiPoly._raw(tuple(used), t)

    def compact(self) -> "MultiPoly":
        """Drop variables that do not occur."""
        return self.embed_used(self.used_variables())

    # calculus and substitution ------------------------------------------
    def differentiate(self, name: str, order: int = 1) -> "MultiPoly":
        if order < 1:
            raise ValueError("order must be positive")
        if name not in self.vars:
            return MultiPoly._raw(self.vars, {})
        sh = self._shift(name)
        t = {}
        for k, c in self._t.items():
            e = (k >> sh) & _FIELD
            if e < order:
                continue
            f = math.perm(e, order)
            t[k - (order << sh)] = c * f
        return MultiPoly._raw(self.vars, t)

    def coefficients(self, names: Iterable[str]) -> dict[tuple[int, ...], "MultiPoly"]:
        """Split into coefficients with respect to the variables ``names``.

        Returned coefficients are polynomials over the same variable list with
        the ``names`` exponents zeroed.
        """
        names = tuple(names)
        shifts = [self._shift(v) if v in self.vars else None for v in names]
        out: dict[tuple[int, ...], dict[int, mpq]] = {}
        for k, c in self._t.items():
            exps = []
            rest = k
            for sh in shifts:
                if sh is None:
                    exps.append(0)
                    continue
                e = (k >> sh) & _FIELD
                exps.append(e)
                rest -= e << sh
            out.setdefault(tuple(exps), {})[rest] = c
        return {e: MultiPoly._raw(self.vars, t) for e, t in out.items()}

    def coefficient(self, monomial: Mapping[str, int]) -> "MultiPoly":
        names = tuple(monomial)
        key = tuple(monomial[v] for v in names)
        return self.coefficients(names).get(key, MultiPoly._raw(self.vars, {}))

    def substitute(self, bindings: Mapping[str, object]):
        """Compose with ``bindings``; polynomial bindings give a MultiPoly,
        any RatFunc binding gives a RatFunc."""
        bindings = {v: b for v, b in bindings.items() if v in self.vars}
        if not bindings:
            return self
        if any(isinstance(b, RatFunc) for b in bindings.values()):
            return _substitute_rational(self, bindings)
        names = tuple(bindings)
        keep = tuple(v for v in self.vars if v not in bindings)
        all_vars = keep
        for b in bindings.values():
            if isinstance(b, MultiPoly):
                all_vars = _union(all_vars, b.vars)
        vals = {v: (b.embed(all_vars) if isinstance(b, MultiPoly) else MultiPoly.const(b, all_vars))
                for v, b in bindings.items()}
        cache: dict[tuple[str, int], MultiPoly] = {}

        def power(v, e):
            if (v, e) not in cache:
                cache[(v, e)] = vals[v] ** e
            return cache[(v, e)]

        result = MultiPoly._raw(all_vars, {})
        for exps, coeff in self.coefficients(names).items():
            term = coeff.compact().embed(all_vars) if coeff.used_variables() else coeff.embed_used(()).embed(all_vars)
            for v, e in zip(names, exps):
                if e:
                    term = term * power(v, e)
            result = result + term
        return result

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at numeric (int, Fraction, mpq, float or complex) values."""
        n = len(self.vars)
        vals = [values[v] if v in values else None for v in self.vars]
        total = 0
        for k, c in self._t.items():
            e = _unpack(k, n)
            term = c
            for x, ei in zip(vals, e):
                if ei:
                    if x is None:
                        raise KeyError("unbound variable in evaluation")
                    term = term * x ** ei
            total = total + term
        return total

    def numeric(self, variables: tuple[str, ...] | None = None):
        """Return ``(coeffs, exponents)`` arrays for fast vectorised evaluation."""
        import numpy as np

        variables = self.vars if variables is None else tuple(variables)
        p = self.embed(_union(variables, self.vars))
        if p.vars != variables:
            extra = set(p.used_variables()) - set(variables)
            if extra:
                raise KeyError(f"unbound variables {sorted(extra)}")
            p = p.embed_used(variables)
        n = len(variables)
        exps = np.array([_unpack(k, n) for k in p._t], dtype=np.int64).reshape(len(p._t), n)
        coeffs = np.array([float(c) for c in p._t.values()], dtype=float)
        return coeffs, exps

    # ordering and printing ------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, ...], mpq]]:
        """Terms in descending graded-lex order."""
        n = len(self.vars)
        items = [(_unpack(k, n), c) for k, c in self._t.items()]
        items.sort(key=lambda it: (sum(it[0]), it[0]), reverse=True)
        return items

    def leading_coefficient(self) -> mpq:
        if not self._t:
            return mpq(0)
        return self.sorted_terms()[0][1]

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"MultiPoly({to_text(self)!r})"


def _coef_text(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def to_text(p: MultiPoly) -> str:
    """Canonical text: graded-lex descending, ``*`` products, ``^`` powers."""
    if not p._t:
        return "0"
    parts = []
    for exps, c in p.sorted_terms():
        mono = "*".join(
            (v if e == 1 else f"{v}^{e}") for v, e in zip(p.vars, exps) if e
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{_coef_text(a)}*{mono}"
        else:
            body = _coef_text(a)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def symbols(names: str | Iterable[str], variables: Iterable[str] | None = None):
    """Create polynomials for ``names`` over a shared variable list."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    names = tuple(names)
    variables = names if variables is None else tuple(variables)
    return tuple(MultiPoly.var(v, variables) for v in names)


# ---------------------------------------------------------------------------
# exact division


def exact_divide(num: MultiPoly, den: MultiPoly) -> MultiPoly:
    """Return ``q`` with ``num == q * den`` or raise :class:`NonDivisible`.

    Lex-order division by a single divisor; the remainder is zero exactly
    when ``den`` divides ``num``.
    """
    if not isinstance(num, MultiPoly):
        num = MultiPoly.const(num)
    if not isinstance(den, MultiPoly):
        den = MultiPoly.const(den)
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    num, den = num._align(den)
    if den.is_constant():
        return num * (1 / den.constant_value())
    guard = num._guard
    lm = max(den._t)
    lc = den._t[lm]
    dterms = [(k - lm, c) for k, c in den._t.items() if k != lm]
    rem = dict(num._t)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot: dict[int, mpq] = {}
    while heap:
        k = -heapq.heappop(heap)
        c = rem.pop(k, None)
        if c is None:
            continue
        # lm | k  <=>  no borrow in any field of k - lm
        if ((k | guard) - lm) & guard != guard:
            rem[k] = c
            raise NonDivisible(MultiPoly._raw(num.vars, rem))
        m = k - lm
        qc = c / lc
        quot[m] = qc
        for dk, dc in dterms:
            kk = m + lm + dk
            old = rem.get(kk)
            if old is None:
                rem[kk] = -qc * dc
                heapq.heappush(heap, -kk)
            else:
                new = old - qc * dc
                if new:
                    rem[kk] = new
                else:
                    del rem[kk]
    return MultiPoly._raw(num.vars, quot)


def divides(den: MultiPoly, num: MultiPoly) -> bool:
    try:
        exact_divide(num, den)
    except NonDivisible:
        return False
    return True


def poly_arithmetic(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown op {op!r}")


def reduce_powers(p: MultiPoly, name: str, square: MultiPoly) -> MultiPoly:
    """Rewrite ``name**2 -> square`` until ``name`` has degree <= 1."""
    if name not in p.vars or p.degree(name) < 2:
        return p
    v = MultiPoly.var(name, p.vars)
    sq = square.embed(_union(p.vars, square.vars))
    p = p.embed(sq.vars)
    v = v.embed(sq.vars)
    parts = p.coefficients((name,))
    maxk = max(e[0] for e in parts) // 2
    powers = [MultiPoly.const(1, sq.vars)]
    for _ in range(maxk):
        powers.append(powers[-1] * sq)
    out = MultiPoly._raw(sq.vars, {})
    for (e,), coeff in parts.items():
        term = coeff * powers[e // 2]
        if e % 2:
            term = term * v
        out = out + term
    return out


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Quotient of two MultiPolys.

    Normalised so the denominator's graded-lex leading coefficient is 1; not
    reduced by gcd unless :meth:`reduced` is called.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RatFunc):
            if den is not None:
                raise TypeError
            self.num, self.den = num.num, num.den
            return
        if not isinstance(num, MultiPoly):
            num = MultiPoly.const(num)
        if den is None:
            den = MultiPoly.const(1, num.vars)
        elif not isinstance(den, MultiPoly):
            den = MultiPoly.const(den, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = num._align(den)
        if den.is_constant():
            num = num * (1 / den.constant_value())
            den = MultiPoly.const(1, num.vars)
        else:
            lc = den.leading_coefficient()
            if lc != 1:
                num = num * (1 / lc)
                den = den * (1 / lc)
        self.num, self.den = num, den

    @property
    def vars(self):
        return self.num.vars

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MultiPoly:
        """The polynomial value; attempts exact division first."""
        if self.den.is_constant():
            return self.num
        return exact_divide(self.num, self.den)

    def simplified(self) -> "RatFunc":
        """Cancel the denominator if it divides the numerator, and strip
        common monomial factors."""
        if self.den.is_constant():
            return self
        try:
            return RatFunc(exact_divide(self.num, self.den))
        except NonDivisible:
            pass
        mono = _common_monomial(self.num, self.den)
        if mono:
            return RatFunc(_shift_down(self.num, mono), _shift_down(self.den, mono))
        return self

    def reduced(self, max_terms: int = 4000) -> "RatFunc":
        """Full gcd reduction (via sympy) when the operands are small enough."""
        r = self.simplified()
        if r.den.is_constant() or len(r.num) + len(r.den) > max_terms:
            return r
        import sympy

        gens = [sympy.Symbol(v) for v in r.vars]
        n = sympy.Poly.from_dict({e: sympy.Rational(int(c.numerator), int(c.denominator))
                                  for e, c in r.num.terms().items()}, *gens, domain="QQ")
        d = sympy.Poly.from_dict({e: sympy.Rational(int(c.numerator), int(c.denominator))
                                  for e, c in r.den.terms().items()}, *gens, domain="QQ")
        g = n.gcd(d)
        if g.total_degree() <= 0:
            return r
        gp = MultiPoly(r.vars, {e: Fraction(int(c.p), int(c.q)) for e, c in g.as_dict().items()})
        return RatFunc(exact_divide(r.num, gp), exact_divide(r.den, gp))

    def _coerce(self, other) -> "RatFunc":
        return other if isinstance(other, RatFunc) else RatFunc(other)

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if o.den.is_constant():
            return RatFunc(self.num + o.num * self.den, self.den)
        if self.den.is_constant():
            return RatFunc(self.num * o.den + o.num, o.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if not isinstance(other, (RatFunc, MultiPoly)):
            try:
                other = RatFunc(other)
            except TypeError:
                return NotImplemented
        o = self._coerce(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    __hash__ = None

    def substitute(self, bindings: Mapping[str, object]) -> "RatFunc":
        n = self.num.substitute(bindings)
        d = self.den.substitute(bindings)
        return RatFunc(n) / RatFunc(d)

    def differentiate(self, name: str) -> "RatFunc":
        return RatFunc(self.num.differentiate(name) * self.den - self.num * self.den.differentiate(name),
                       self.den * self.den)

    def evaluate(self, values: Mapping[str, object]):
        d = self.den.evaluate(values)
        if d == 0:
            raise DenominatorVanishes("denominator vanishes at the given point")
        return self.num.evaluate(values) / d

    def used_variables(self) -> tuple[str, ...]:
        u = set(self.num.used_variables()) | set(self.den.used_variables())
        return tuple(v for v in self.vars if v in u)

    def __str__(self) -> str:
        if self.den.is_constant():
            return to_text(self.num)
        return f"({to_text(self.num)})/({to_text(self.den)})"

    __repr__ = __str__


def _common_monomial(a: MultiPoly, b: MultiPoly) -> int:
    n = len(a.vars)
    mins = None
    for k in list(a._t) + list(b._t):
        e = _unpack(k, n)
        mins = list(e) if mins is None else [min(x, y) for x, y in zip(mins, e)]
    if not mins or not any(mins):
        return 0
    return _pack(mins, n)


def _shift_down(p: MultiPoly, mono: int) -> MultiPoly:
    return MultiPoly._raw(p.vars, {k - mono: c for k, c in p._t.items()})


def _substitute_rational(p: MultiPoly, bindings: Mapping[str, object]) -> RatFunc:
    names = tuple(bindings)
    parts = p.coefficients(names)
    rb = {v: (b if isinstance(b, RatFunc) else RatFunc(b)) for v, b in bindings.items()}
    maxdeg = {v: max(e[i] for e in parts) for i, v in enumerate(names)}
    all_vars = tuple(v for v in p.vars if v not in bindings)
    for b in rb.values():
        all_vars = _union(all_vars, b.vars)
    nums = {v: rb[v].num.embed(all_vars) for v in names}
    dens = {v: rb[v].den.embed(all_vars) for v in names}
    cache: dict = {}

    def pw(kind, v, e):
        key = (kind, v, e)
        if key not in cache:
            base = nums[v] if kind == "n" else dens[v]
            cache[key] = base ** e
        return cache[key]

    common = MultiPoly.const(1, all_vars)
    for v in names:
        if maxdeg[v]:
            common = common * pw("d", v, maxdeg[v])
    out = MultiPoly._raw(all_vars, {})
    for exps, coeff in parts.items():
        term = coeff.embed(_union(coeff.vars, all_vars)).embed_used(all_vars) if coeff else MultiPoly._raw(all_vars, {})
        for v, e in zip(names, exps):
            if e:
                term = term * pw("n", v, e)
            if maxdeg[v] - e:
                term = term * pw("d", v, maxdeg[v] - e)
        out = out + term
    return RatFunc(out, common)


def substitute(p, bindings: Mapping[str, object]):
    if isinstance(p, RatFunc):
        return p.substitute(bindings)
    return p.substitute(bindings)


def differentiate(p: MultiPoly, name: str, order: int = 1) -> MultiPoly:
    return p.differentiate(name, order)


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class NotHomogeneous:
    weights: tuple[int, ...]
    offending: tuple[str, ...]

    def __bool__(self) -> bool:
        return False


def weight_of(name: str, g: int) -> int:
    """Default weight of a named indeterminate at genus ``g``."""
    if name.startswith("nu") or name.startswith("lam"):
        return int(name.lstrip("nulam"))
    if name in ("x", "a", "X") or (name[0] in "xe" and name[1:].isdigit()):
        return 2
    if name == "y" or (name[0] == "y" and name[1:].isdigit()):
        return 2 * g + 2
    if name == "Y":
        return 2 * g + 1
    if name == "s":
        return 4
    if name == "t":
        return 2 * g + 1
    if name[0] in "uv" and name[1:].isdigit():
        return -int(name[1:])
    raise KeyError(f"no default weight for {name!r}")


class WeightTable(dict):
    """Mapping variable -> weight with genus-dependent defaults."""

    def __init__(self, genus: int, overrides: Mapping[str, int] | None = None):
        super().__init__(overrides or {})
        self.genus = genus

    def __missing__(self, key):
        return weight_of(key, self.genus)


def graded_weight(p, w: Mapping[str, int]):
    """Common weight of every term of ``p`` or a :class:`NotHomogeneous`."""
    if isinstance(p, RatFunc):
        wn = graded_weight(p.num, w)
        wd = graded_weight(p.den, w)
        if isinstance(wn, NotHomogeneous) or isinstance(wd, NotHomogeneous):
            return wn if isinstance(wn, NotHomogeneous) else wd
        return wn - wd
    if p.is_zero():
        return 0
    ws = [w[v] for v in p.vars]
    seen: dict[int, tuple[int, ...]] = {}
    n = len(p.vars)
    for k in p._t:
        e = _unpack(k, n)
        wt = sum(a * b for a, b in zip(ws, e))
        seen.setdefault(wt, e)
    if len(seen) == 1:
        return next(iter(seen))
    offending = []
    for wt, e in sorted(seen.items()):
        offending.append(to_text(MultiPoly._raw(p.vars, {_pack(e, n): mpq(1)})))
    return NotHomogeneous(tuple(sorted(seen)), tuple(offending))


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, integers or decimal strings into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, type(mpq())):
        return Fraction(int(text.numerator), int(text.denominator))
    return Fraction(str(text).strip())


def mpq_to_fraction(c: mpq) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def gcd_content(p: MultiPoly) -> mpq:
    g = 0
    for c in p._t.values():
        g = gmpy2.gcd(g, c.numerator)
    return mpq(g)
