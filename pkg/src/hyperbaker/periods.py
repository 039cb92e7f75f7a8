"""Periods, Abel map, Riemann constant and sigma normalisation.

Cycles: the branch points other than ``a`` are ordered by angle around
``a`` (starting after the widest angular gap), giving a fan of 2g+1 points.
The lift of the segment between consecutive points is a closed cycle; the 2g
such cycles span homology.  Their intersection numbers are computed from the
local behaviour of ``y`` at the shared endpoint and the basis is reduced to a
canonical one by integral symplectic reduction.

Segment integrals use the Gauss-Chebyshev rule after ``x = c + h t`` which
absorbs the two square-root endpoints exactly.  Abel integrals use adaptive
Gauss-Legendre on straight segments with ``y`` continued analytically.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .curve import (
    Curve,
    ScaledModel,
    d_matrix_numeric,
    lambda_tilde,
    numeric_roots,
)
from .jets import Jet
from .omega import kappa_numeric, omega_numeric
from .series import schur_u
from .theta import OnThetaDivisor, ThetaFunction, half_characteristics

log = logging.getLogger(__name__)


class RootClustering(ValueError):
    pass


class SymplecticCheckFailed(ArithmeticError):
    pass


class CrossCheckFailed(ArithmeticError):
    pass


class NoCharacteristicFound(ArithmeticError):
    pass


class MultipleCharacteristicsFound(ArithmeticError):
    pass


class DirectionInconsistent(ArithmeticError):
    pass


class PathThroughBranchPoint(ValueError):
    pass


class SheetAmbiguity(ValueError):
    pass


# ---------------------------------------------------------------------------
# branch points


@dataclass(frozen=True)
class BranchData:
    roots: np.ndarray  # all 2g+2 roots, sorted by (Re, Im)
    a_index: int
    chain: np.ndarray  # the other 2g+1 roots in fan order around a
    min_gap: float
    scale: float
    bends: tuple = ()  # bulge parameter of each fan segment (0 = straight)

    @property
    def a(self) -> complex:
        return complex(self.roots[self.a_index])


def branch_points(curve: Curve, threshold: float = 1e-10) -> BranchData:
    c = curve.numeric()
    roots = numeric_roots(c.nu)
    scale = max(1.0, float(np.abs(roots).max()))
    diff = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diff, np.inf)
    gap = float(diff.min())
    if gap < threshold * scale:
        raise RootClustering(f"roots closer than {gap:.3g}")
    ai = int(np.argmin(np.abs(roots - c.a)))
    a = roots[ai]
    others = np.delete(roots, ai)
    ang = np.angle(others - a)
    ang[ang <= -math.pi + 1e-12] += 2 * math.pi  # the negative axis is a single ray
    ang = np.round(ang, 12)
    order = np.lexsort((np.abs(others - a), ang))  # by angle, then outwards along a ray
    ang = ang[order]
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    start = (int(np.argmax(gaps)) + 1) % len(ang)
    chain = others[np.roll(order, -start)]
    return BranchData(roots, ai, chain, gap, scale, _fan_bends(a, roots, chain, gap))


def _fan_bends(a: complex, roots: np.ndarray, chain: np.ndarray, min_gap: float) -> tuple:
    """Segments whose chord passes within ``min_gap/4`` of ``a`` (possible
    when the fan has an opening of exactly pi) bulge away from ``a``."""
    out = []
    t = np.linspace(-1, 1, 401)
    for e0, e1 in zip(chain[:-1], chain[1:]):
        d = e1 - e0
        u = min(1.0, max(0.0, ((a - e0) / d).real))
        # the fan runs counterclockwise around a; b < 0 keeps the apex on
        # the side that preserves the sweep
        b = 0.0 if abs(a - e0 - u * d) >= 0.25 * min_gap else -0.5
        path = (e0 + e1) / 2 + d / 2 * t + 0.5j * b * d * (1 - t * t)
        rest = [r for r in roots if abs(r - e0) > 0 and abs(r - e1) > 0]
        if min(np.abs(path[:, None] - np.array(rest)).min(axis=0)) < 0.1 * min_gap:
            raise PathThroughBranchPoint("fan segment passes too close to a branch point")
        out.append(b)
    return tuple(out)


# ---------------------------------------------------------------------------
# numeric forms


def _poly_ascending(coeffs, x):
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class Forms:
    """The differentials integrated on V, as vectorised ``phi(x)`` with the
    form being ``phi(x) dx/(2y)``."""

    def __init__(self, curve: Curve, m: ScaledModel):
        self.g = g = curve.genus
        self.a = complex(curve.a)
        self.s = complex(m.s)
        self.t = complex(m.t)
        lam = [complex(v) for v in lambda_tilde(m)]
        # X-polynomials (ascending) of omega_i and eta_i on the transformed curve
        self.omega_c = []
        self.eta_c = []
        for i in range(1, g + 1):
            om = np.zeros(g, dtype=complex)
            om[g - i] = -1
            self.omega_c.append(om)
            et = np.zeros(g + i, dtype=complex)
            for k in range(g - i + 1, g + i):
                et[k] = -(k + i - g) * lam[g + i - k - 1]
            self.eta_c.append(et)
        self.kappa_c = kappa_numeric(curve)

    def _pull(self, coeffs, x):
        X = self.s / (x - self.a)
        return -self.s * _poly_ascending(coeffs, X) * (x - self.a) ** (self.g - 1) / self.t

    def mu(self, x):
        return np.array([x ** i for i in range(self.g)])

    def omega(self, x):
        return np.array([self._pull(c, x) for c in self.omega_c])

    def eta(self, x):
        return np.array([self._pull(c, x) for c in self.eta_c])

    def kappa(self, x):
        d = (x - self.a) ** self.g
        return np.array([_poly_ascending(c, x) / d for c in self.kappa_c])

    def all(self, x):
        return np.concatenate([self.mu(x), self.omega(x), self.eta(x), self.kappa(x)])


# ---------------------------------------------------------------------------
# cycles


class _Segment:
    """Path between consecutive fan points, ``x(t) = c + h t + i b h (1-t^2)``
    (a straight chord when ``b = 0``), with ``y`` continued from the chart
    ``y = i h sqrt(1-t^2) s(t)``."""

    def __init__(self, roots, e0, e1, nu0, bend: float = 0.0):
        self.c = (e0 + e1) / 2
        self.h = (e1 - e0) / 2
        self.b = bend
        self.ref = self.c + 1j * bend * self.h
        others = [r for r in roots if abs(r - e0) > 0 and abs(r - e1) > 0]
        self.others = np.array(others)
        self.base = np.sqrt(nu0) * np.prod(np.sqrt(self.ref - self.others))

    def x_of(self, t):
        return self.c + self.h * t + 1j * self.b * self.h * (1 - t * t)

    def s_of(self, t):
        x = self.x_of(t)
        ratio = (x[:, None] - self.others) / (self.ref - self.others)
        q = np.sqrt(1 + 1j * self.b * (1 - t)) * np.sqrt(1 - 1j * self.b * (1 + t))
        return self.base * q * np.prod(np.sqrt(ratio), axis=1)

    def y_of(self, t):
        t = np.asarray(t, dtype=float)
        return 1j * self.h * np.sqrt(1 - t * t) * self.s_of(t)

    def integrate(self, fn, tol=1e-15, n0=32, n_max=1 << 15):
        prev = None
        n = n0
        while n <= n_max:
            th = (2 * np.arange(1, n + 1) - 1) * math.pi / (2 * n)
            t = np.cos(th)
            x = self.x_of(t)
            dx = 1 - 2j * self.b * t  # x'(t) / h
            terms = fn(x) * dx / (2j * self.s_of(t))
            val = (math.pi / n) * terms.sum(axis=1)
            # stop at the tolerance or at the rounding floor of the sum
            floor = 100 * np.finfo(float).eps * (math.pi / n) * np.abs(terms).sum(axis=1).max()
            if prev is not None and np.abs(val - prev).max() <= max(tol * max(1.0, np.abs(val).max()), floor):
                return val
            prev = val
            n *= 2
        log.warning("segment quadrature did not converge to %g", tol)
        return val


def _intersection(seg_a: _Segment, seg_b: _Segment, r=1e-6) -> int:
    """Intersection number of consecutive cycles meeting at the end of
    ``seg_a`` / start of ``seg_b``."""
    ya = seg_a.y_of(np.array([1 - 2 * r]))[0]
    yb = seg_b.y_of(np.array([-1 + 2 * r]))[0]
    v = (-np.conj(ya) * yb).imag
    return 1 if v > 0 else -1


def symplectic_reduce(J0: np.ndarray):
    """Integer change of basis turning the intersection form ``J0`` into the
    standard one.  Returns ``(A, B)`` with rows the a- and b-cycles."""
    n = J0.shape[0]
    pair = lambda u, v: int(u @ J0 @ v)
    vecs = [np.eye(n, dtype=np.int64)[k] for k in range(n)]
    A, B = [], []
    while vecs:
        v = vecs.pop(0)
        for idx, w in enumerate(vecs):
            p = pair(v, w)
            if abs(p) == 1:
                break
        else:
            raise SymplecticCheckFailed("intersection form is not unimodular")
        w = vecs.pop(idx)
        if p == -1:
            w = -w
        A.append(v)
        B.append(w)
        vecs = [u - pair(u, w) * v + pair(u, v) * w for u in vecs]
    return np.array(A), np.array(B)


# ---------------------------------------------------------------------------
# period data


@dataclass
class PeriodData:
    curve: Curve
    model: ScaledModel
    branch: BranchData
    mu1: np.ndarray
    mu2: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    kappa1_direct: np.ndarray
    kappa2_direct: np.ndarray
    tau: np.ndarray
    D: np.ndarray
    Omega: np.ndarray
    cycles: np.ndarray  # rows: a_1..a_g, b_1..b_g in terms of the fan cycles
    fan_integrals: np.ndarray = field(repr=False)
    delta1: np.ndarray | None = None
    delta2: np.ndarray | None = None
    epsilon: complex | None = None
    epsilon_spread: float | None = None
    seed: int = 0

    @property
    def genus(self) -> int:
        return self.curve.genus

    @cached_property
    def theta(self) -> ThetaFunction:
        return ThetaFunction.make(self.tau, self.delta1, self.delta2)

    def theta_plain(self, d1, d2) -> ThetaFunction:
        return ThetaFunction.make(self.tau, d1, d2)

    @cached_property
    def mu1_inv(self) -> np.ndarray:
        return np.linalg.inv(self.mu1)

    @cached_property
    def omega1_inv(self) -> np.ndarray:
        return np.linalg.inv(self.omega1)

    def K(self) -> np.ndarray:
        return np.block([[self.omega1, self.omega2], [self.eta1, self.eta2]])

    def K_curve(self) -> np.ndarray:
        return np.block([[self.mu1, self.mu2], [self.kappa1, self.kappa2]])

    def legendre_residual(self, which: str = "omega") -> float:
        K = self.K() if which == "omega" else self.K_curve()
        g = self.genus
        J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
        return float(np.abs(K.T @ J @ K + 0.5j * math.pi * J).max())

    # -- lattice -----------------------------------------------------------

    def lattice_coordinates(self, v, which: str = "mu") -> np.ndarray:
        """Real coordinates of ``v`` in the basis of the columns of
        ``(2w', 2w'')`` for ``w = mu`` (V-periods) or ``omega``."""
        P1, P2 = (self.mu1, self.mu2) if which == "mu" else (self.omega1, self.omega2)
        M = np.hstack([2 * P1, 2 * P2])
        R = np.vstack([M.real, M.imag])
        v = np.asarray(v, dtype=complex)
        return np.linalg.solve(R, np.concatenate([v.real, v.imag]))

    def lattice_residual(self, v, which: str = "mu") -> float:
        c = self.lattice_coordinates(v, which)
        return float(np.abs(c - np.round(c)).max())

    # -- sigma -------------------------------------------------------------

    @cached_property
    def sigma_quadratic(self) -> np.ndarray:
        Q = 0.5 * self.eta1 @ self.omega1_inv
        return 0.5 * (Q + Q.T)

    def sigma(self, u) -> complex:
        u = np.asarray(u, dtype=complex)
        Winv = np.linalg.inv(2 * self.omega1)
        q = u @ self.sigma_quadratic @ u
        m, s = self.theta.value(Winv @ u)
        return self.epsilon * m * cmath.exp(q + s)

    def sigma_log_jet(self, u, order: int, floor: float = 1e-10) -> Jet:
        u = np.asarray(u, dtype=complex)
        g = self.genus
        Winv = np.linalg.inv(2 * self.omega1)
        lj = self.theta.log_jet(Winv @ u, Winv.T, order, floor)
        q = Jet.quadratic(self.sigma_quadratic, u, np.eye(g), order)
        return lj + q + complex(np.log(self.epsilon))


def _fan_cycles(curve: Curve, branch: BranchData, forms: Forms):
    nu0 = complex(curve.nu[0])
    chain = branch.chain
    segs = [_Segment(branch.roots, chain[k], chain[k + 1], nu0, branch.bends[k]) for k in range(len(chain) - 1)]
    n = len(segs)
    J0 = np.zeros((n, n), dtype=np.int64)
    for k in range(n - 1):
        s = _intersection(segs[k], segs[k + 1])
        J0[k, k + 1] = s
        J0[k + 1, k] = -s
    ints = np.array([2 * seg.integrate(forms.all) for seg in segs])  # (2g, 4g)
    return segs, J0, ints


def _mp_poly(p, values, mp):
    total = mp.mpc(0)
    names = p.vars
    for exps, c in p.terms().items():
        term = mp.mpf(int(c.numerator)) / int(c.denominator)
        for name, e in zip(names, exps):
            if e:
                term = term * values[name] ** e
        total += term
    return total


def _fan_integrals_extended(curve: Curve, branch: BranchData, m: ScaledModel, prec: int = 106):
    """Fan-cycle integrals of all forms with roots, scaling constants and
    quadrature carried at ``prec`` bits (results rounded to double)."""
    import mpmath

    from .omega import kappa_coefficients

    g = curve.genus
    mp = mpmath.mp
    with mpmath.workprec(prec):
        def mpv(c):
            if isinstance(c, Fraction):
                return mp.mpf(c.numerator) / c.denominator
            return mp.mpc(complex(c))

        nu = [mpv(c) for c in curve.nu]
        N = lambda x: mpmath.polyval(nu, x)
        dN = lambda x: mpmath.polyval([c * (len(nu) - 1 - k) for k, c in enumerate(nu[:-1])], x)

        def polish(r):
            r = mp.mpc(complex(r))
            for _ in range(8):
                r = r - N(r) / dN(r)
            return r

        roots = [polish(r) for r in branch.roots]
        chain = [roots[int(np.argmin(np.abs(branch.roots - e)))] for e in branch.chain]
        a = mpv(curve.a) if isinstance(curve.a, Fraction) else roots[branch.a_index]
        npa = dN(a)
        sc = mp.mpc(complex(m.s))
        tc = mpmath.sqrt(sc ** (2 * g + 1) / npa)
        if abs(complex(tc) - complex(m.t)) > abs(complex(tc) + complex(m.t)):
            tc = -tc

        def deriv(k, x):
            d = len(nu) - 1
            return sum(c * mpmath.ff(d - j, k) * x ** (d - j - k) for j, c in enumerate(nu) if d - j >= k)

        lam = [sc ** i * deriv(i + 1, a) / (mpmath.factorial(i + 1) * npa) for i in range(2 * g + 2)]
        rows, vals = kappa_coefficients(curve)
        mvals = {k: (a if k == "a" else mpv(v)) for k, v in vals.items()}
        kap = [[mp.mpc(0) if c is None else _mp_poly(c, mvals, mp) for c in row] for row in rows]

        def polyval_asc(cs, x):
            acc = mp.mpc(0)
            for c in reversed(cs):
                acc = acc * x + c
            return acc

        def forms(x):
            X = sc / (x - a)
            pull = lambda cs: -sc * polyval_asc(cs, X) * (x - a) ** (g - 1) / tc
            out = [x ** i for i in range(g)]
            out += [pull([0] * (g - i) + [-1]) for i in range(1, g + 1)]
            for i in range(1, g + 1):
                cs = [0] * (g + i)
                for k in range(g - i + 1, g + i):
                    cs[k] = -(k + i - g) * lam[g + i - k - 1]
                out.append(pull(cs))
            out += [polyval_asc(row, x) / (x - a) ** g for row in kap]
            return out

        ints = []
        for k in range(len(chain) - 1):
            e0, e1 = chain[k], chain[k + 1]
            c, h, b = (e0 + e1) / 2, (e1 - e0) / 2, mp.mpf(branch.bends[k])
            ref = c + 1j * b * h
            others = [r for r in roots if r is not e0 and r is not e1]
            base = mpmath.sqrt(nu[0]) * mpmath.fprod([mpmath.sqrt(ref - r) for r in others])
            prev, n = None, 32
            while True:
                acc = [mp.mpc(0)] * (4 * g)
                for j in range(1, n + 1):
                    tt = mpmath.cos((2 * j - 1) * mp.pi / (2 * n))
                    x = c + h * tt + 1j * b * h * (1 - tt * tt)
                    qf = mpmath.sqrt(1 + 1j * b * (1 - tt)) * mpmath.sqrt(1 - 1j * b * (1 + tt))
                    sv = base * qf * mpmath.fprod([mpmath.sqrt((x - r) / (ref - r)) for r in others])
                    dx = 1 - 2j * b * tt
                    vals_x = forms(x)
                    for q in range(4 * g):
                        acc[q] += vals_x[q] * dx / sv
                val = [2 * (mp.pi / n) * v / 2j for v in acc]
                if prev is not None and max(abs(u - w) for u, w in zip(val, prev)) < mp.mpf(2) ** (-prec + 12) * max(1, max(abs(u) for u in val)):
                    break
                prev, n = val, 2 * n
                if n > 1 << 13:
                    log.warning("extended segment quadrature did not converge")
                    break
            ints.append([complex(v) for v in val])
    return np.array(ints)


def curve_periods(curve: Curve, m: ScaledModel | None = None, *, seed: int = 0,
                  calibrate: bool = True, kappa_tol: float = 1e-7, precision: str = "double") -> PeriodData:
    """Periods, characteristic and sigma normalisation of ``curve``.

    ``precision="extended"`` computes the cycle integrals with 106-bit
    arithmetic before rounding; everything downstream is double precision.
    """
    g = curve.genus
    if m is None:
        m = ScaledModel.numeric(curve)
    branch = branch_points(curve)
    forms = Forms(curve, m)
    segs, J0, ints = _fan_cycles(curve, branch, forms)
    if precision == "extended":
        ints = _fan_integrals_extended(curve, branch, m)
    elif precision != "double":
        raise ValueError(f"unknown precision {precision!r}")
    A, B = symplectic_reduce(J0)
    cyc = np.vstack([A, B])
    per = cyc @ ints  # rows: cycles, columns: forms

    def block(k, rows):
        return per[rows][:, k * g:(k + 1) * g].T  # (form i, cycle j)

    a_rows, b_rows = range(g), range(g, 2 * g)
    mu1, mu2 = block(0, a_rows) / 2, block(0, b_rows) / 2
    tau = np.linalg.solve(mu1, mu2)
    if np.linalg.eigvalsh(tau.imag).max() < 0:
        # orientation convention opposite to the one assumed: negate b-cycles
        cyc[g:] *= -1
        per = cyc @ ints
        mu1, mu2 = block(0, a_rows) / 2, block(0, b_rows) / 2
        tau = np.linalg.solve(mu1, mu2)
    om1, om2 = block(1, a_rows) / 2, block(1, b_rows) / 2
    et1, et2 = -block(2, a_rows) / 2, -block(2, b_rows) / 2
    k1d, k2d = -block(3, a_rows) / 2, -block(3, b_rows) / 2
    D = d_matrix_numeric(m)
    Om = omega_numeric(curve)
    k1 = D.T @ et1 + 2 * Om @ mu1
    k2 = D.T @ et2 + 2 * Om @ mu2
    if np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T)).min() <= 0:
        raise SymplecticCheckFailed("Im tau is not positive definite")
    if np.abs(tau - tau.T).max() > 1e-8 * max(1.0, np.abs(tau).max()):
        raise SymplecticCheckFailed("tau is not symmetric")
    scale = max(1.0, np.abs(k1d).max(), np.abs(k2d).max())
    dk = max(np.abs(k1 - k1d).max(), np.abs(k2 - k2d).max()) / scale
    if dk > kappa_tol:
        raise CrossCheckFailed(f"kappa periods disagree by {dk:.3g}")
    pd = PeriodData(curve, m, branch, mu1, mu2, om1, om2, et1, et2, k1, k2, k1d, k2d,
                    tau, D, Om, cyc, ints, seed=seed)
    pd.delta1, pd.delta2 = riemann_constant(pd, seed=seed)
    if calibrate:
        pd.epsilon, pd.epsilon_spread = epsilon_calibrate(pd)
    return pd


# ---------------------------------------------------------------------------
# Abel map


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _gl_adaptive(fn, lo=0.0, hi=1.0, tol=1e-14, depth=0):
    def rule(a, b):
        x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        return 0.5 * (b - a) * (fn(x) * _GL_WEIGHTS).sum(axis=-1)

    whole = rule(lo, hi)
    mid = 0.5 * (lo + hi)
    halves = rule(lo, mid) + rule(mid, hi)
    if depth > 40 or np.abs(halves - whole).max() <= tol * max(1.0, np.abs(halves).max()):
        return halves
    return _gl_adaptive(fn, lo, mid, tol, depth + 1) + _gl_adaptive(fn, mid, hi, tol, depth + 1)


class AbelMap:
    """``v(Q) = int_{(a,0)}^{Q} mu`` along straight segments with detours."""

    def __init__(self, curve: Curve, branch: BranchData):
        self.g = curve.genus
        self.nu0 = complex(curve.nu[0])
        self.curve = curve.numeric()
        self.roots = branch.roots
        self.a = branch.a
        self.rho = 0.25 * branch.min_gap

    def _others(self, exclude):
        return np.array([r for r in self.roots if abs(r - exclude) > 1e-300])

    def _mu(self, x):
        return np.array([x ** i for i in range(self.g)])

    def _from_branch(self, e, Q, yQ):
        """Integral over the straight segment from the branch point ``e`` to
        ``Q`` on the sheet with ``y(Q) = yQ``."""
        others = self._others(e)
        d = Q - e

        def fn(sig):
            x = e + d * sig * sig
            ratio = np.prod(np.sqrt((x[:, None] - others) / (Q - others)), axis=1)
            return self._mu(x) * d / (yQ * ratio)

        return _gl_adaptive(fn)

    def _straight(self, P, Q, yP):
        """Integral from ``P`` to ``Q`` (neither a branch point) and ``y(Q)``."""
        d = Q - P

        def yfun(x):
            return yP * np.prod(np.sqrt((x[:, None] - self.roots) / (P - self.roots)), axis=1)

        def fn(tt):
            x = P + d * tt
            return self._mu(x) * d / (2 * yfun(x))

        return _gl_adaptive(fn), complex(yfun(np.array([Q]))[0])

    def _waypoints(self, P, Q, skip=()):
        """Detour points keeping the path at least ``rho`` from branch points."""
        pts = [P, Q]
        for _ in range(20):
            changed = False
            out = [pts[0]]
            for A, B in zip(pts[:-1], pts[1:]):
                d = B - A
                bad = None
                for e in self.roots:
                    if any(abs(e - s) < 1e-14 for s in skip) and (abs(e - A) < 1e-14 or abs(e - B) < 1e-14):
                        continue
                    lam = ((e - A) * np.conj(d)).real / abs(d) ** 2 if d != 0 else 0.0
                    if 0 < lam < 1:
                        close = A + lam * d
                        if abs(close - e) < self.rho:
                            bad = (e, close)
                            break
                if bad is not None:
                    e, close = bad
                    n = close - e
                    n = n / abs(n) if abs(n) > 1e-14 else 1j * d / abs(d)
                    out.append(e + 2 * self.rho * n)
                    changed = True
                out.append(B)
            pts = out
            if not changed:
                return pts
        raise PathThroughBranchPoint("could not route around branch points")

    def point(self, x, y) -> np.ndarray:
        x, y = complex(x), complex(y)
        scale = max(1.0, abs(x)) ** (self.g + 1)
        if abs(y * y - complex(self.curve.N(x))) > 1e-8 * max(1.0, abs(y) ** 2, scale ** 2):
            raise SheetAmbiguity("point is not on the curve")
        if abs(x - self.a) < 1e-14:
            return np.zeros(self.g, dtype=complex)
        ends_at_branch = any(abs(x - e) < 1e-12 for e in self.roots)
        pts = self._waypoints(self.a, x, skip=(self.a, x) if ends_at_branch else (self.a,))
        # first leg from a, with a provisional sheet at its far end
        W = pts[1]
        if len(pts) == 2 and ends_at_branch:
            return self._branch_to_branch(W)
        yW = cmath.sqrt(complex(self.curve.N(W)))
        total = self._from_branch(self.a, W, yW)
        cur, ycur = W, yW
        for nxt in pts[2:]:
            if ends_at_branch and nxt is pts[-1]:
                total = total - self._from_branch(nxt, cur, ycur)
                return total  # sheet is immaterial at a branch point
            inc, ycur = self._straight(cur, nxt, ycur)
            total = total + inc
            cur = nxt
        if abs(ycur - y) > abs(ycur + y):
            total = -total
        if min(abs(ycur - y), abs(ycur + y)) > 1e-6 * max(1.0, abs(y)):
            raise SheetAmbiguity("continued y does not match either sheet")
        return total

    def _branch_to_branch(self, e):
        mid = 0.5 * (self.a + e)
        ym = cmath.sqrt(complex(self.curve.N(mid)))
        return self._from_branch(self.a, mid, ym) - self._from_branch(e, mid, ym)

    def path(self, x0, y0, waypoints) -> tuple[np.ndarray, complex]:
        """Integral of ``mu`` along a polygon starting at ``(x0, y0)``; returns
        the integral and the continued ``y`` at the end."""
        total = np.zeros(self.g, dtype=complex)
        cur, ycur = complex(x0), complex(y0)
        for w in waypoints:
            inc, ycur = self._straight(cur, complex(w), ycur)
            total = total + inc
            cur = complex(w)
        return total, ycur

    def divisor(self, points) -> np.ndarray:
        v = np.zeros(self.g, dtype=complex)
        for x, y in points:
            v = v + self.point(x, y)
        return v


def abel_jacobi(pd: PeriodData, points) -> np.ndarray:
    return pd_abel(pd).divisor(points)


_ABEL_CACHE: list = []  # [(pd, AbelMap)], holds the last one only


def pd_abel(pd: PeriodData) -> AbelMap:
    if not _ABEL_CACHE or _ABEL_CACHE[0][0] is not pd:
        _ABEL_CACHE[:] = [(pd, AbelMap(pd.curve, pd.branch))]
    return _ABEL_CACHE[0][1]


def random_points(curve: Curve, branch: BranchData, count: int, rng: np.random.Generator,
                  margin: float = 0.05):
    """Random curve points in a box around the branch points, kept away from
    them by ``margin`` times the box size."""
    c = curve.numeric()
    lo = branch.roots.real.min() - 0.5, branch.roots.imag.min() - 0.5
    hi = branch.roots.real.max() + 0.5, branch.roots.imag.max() + 0.5
    size = max(hi[0] - lo[0], hi[1] - lo[1])
    out = []
    while len(out) < count:
        x = complex(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]))
        if np.abs(branch.roots - x).min() < margin * size:
            continue
        y = cmath.sqrt(complex(c.N(x)))
        if rng.random() < 0.5:
            y = -y
        out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# Riemann constant and epsilon


def riemann_constant(pd: PeriodData, seed: int = 0, samples: int = 12,
                     win_tol: float = 1e-8, lose_tol: float = 1e-3):
    """Half-characteristic whose theta vanishes on Abel images of effective
    divisors of degree ``g-1``."""
    g = pd.genus
    rng = np.random.default_rng(seed)
    am = AbelMap(pd.curve, pd.branch)
    zs = []
    for _ in range(samples):
        pts = random_points(pd.curve, pd.branch, g - 1, rng)
        zs.append(np.linalg.solve(2 * pd.mu1, am.divisor(pts)))
    want = (-1) ** (g * (g + 1) // 2)
    winners, residuals = [], {}
    for d1, d2 in half_characteristics(g):
        th = ThetaFunction.make(pd.tau, d1, d2)
        if th.parity() != want:
            continue
        r = max(th.relative_size(z) for z in zs)
        residuals[(tuple(d1), tuple(d2))] = r
        if r < win_tol:
            winners.append((d1, d2))
    if not winners:
        raise NoCharacteristicFound(f"best residual {min(residuals.values()):.3g}")
    if len(winners) > 1:
        raise MultipleCharacteristicsFound(f"{len(winners)} characteristics vanish")
    d1, d2 = winners[0]
    losers = [r for k, r in residuals.items() if k != (tuple(d1), tuple(d2))]
    if losers and min(losers) <= lose_tol:
        log.warning("a losing characteristic has residual %.3g", min(losers))
    return d1, d2


def _unnormalised_sigma_jet(pd: PeriodData, order: int) -> Jet:
    g = pd.genus
    Winv = np.linalg.inv(2 * pd.omega1)
    th, M = pd.theta.jet(np.zeros(g), Winv.T, order)
    q = Jet.quadratic(pd.sigma_quadratic, np.zeros(g), np.eye(g), order)
    return th * q.exp() * math.exp(M)


def epsilon_calibrate(pd: PeriodData, rel_tol: float = 1e-6):
    """``epsilon`` matching the Taylor jet of the theta expression at 0 with
    the Schur polynomial; returns ``(epsilon, relative spread)`` across its
    monomials.  Lower-degree coefficients must vanish."""
    g = pd.genus
    S = schur_u(g)
    order = g * (g + 1) // 2
    jet = _unnormalised_sigma_jet(pd, order)
    ratios = []
    for exps, c in S.terms().items():
        ratios.append(complex(float(c)) / jet.c[exps])
    eps = ratios[0]
    spread = max(abs(r / eps - 1) for r in ratios)
    if spread > rel_tol:
        raise DirectionInconsistent(f"epsilon ratios spread {spread:.3g}")
    return complex(eps), float(spread)


def epsilon_directional(pd: PeriodData, direction=None, h0: float = 1e-2) -> complex:
    """Cross-check of ``epsilon``: ``S(h d)/F(h d)`` along a ray, Richardson
    extrapolated from ``h0, h0/2, h0/4`` (removing O(h), O(h^2))."""
    g = pd.genus
    if direction is None:
        direction = [math.pi ** -k for k in range(g)]
        if g >= 3:
            direction[-1] = 0.0
    d = np.asarray(direction, dtype=complex)
    d = d / np.linalg.norm(d)
    S = schur_u(g)
    names = S.vars
    Winv = np.linalg.inv(2 * pd.omega1)
    vals = []
    for h in (h0, h0 / 2, h0 / 4):
        u = h * d
        s_val = complex(S.evaluate({n: complex(x) for n, x in zip(names, u)}))
        m, sc = pd.theta.value(Winv @ u)
        F = m * cmath.exp(u @ pd.sigma_quadratic @ u + sc)
        vals.append(s_val / F)
    return complex(vals[0] / 3 - 2 * vals[1] + 8 * vals[2] / 3)
