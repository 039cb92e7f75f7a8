"""Numerical evaluation of H, its logarithmic derivatives and the identities
relating them to the Baker functions, the sigma function and integrable PDEs.

Coordinates: ``v = (v_{2g}, ..., v_2)`` so matrix index ``(i, j)`` of a Hessian
in ``v`` is the function with subscripts ``(2g+2-2i, 2g+2-2j)``; the sigma
variables are ``u = (u_1, u_3, ..., u_{2g-1}) = D v``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .baker import BakerEvaluator, baker_matrix
from .curve import Curve, ScaledModel, chi_factor, lambda_tilde, symbolic_curve
from .jets import Jet
from .omega import ring_values
from .periods import PeriodData, abel_jacobi, random_points
from .theta import OnThetaDivisor


class ConstantsUndefined(ValueError):
    pass


@lru_cache(maxsize=None)
def _generic_baker(g: int) -> BakerEvaluator:
    return BakerEvaluator(baker_matrix(symbolic_curve(g)))


def baker_values(curve: Curve, points) -> np.ndarray:
    """Baker matrix from the algebraic (coefficient extraction) route."""
    if curve.is_exact and not curve.symbolic and curve.genus <= 2:
        return _exact_baker(curve)(points)
    return _generic_baker(curve.genus)(points, ring_values(curve))


_EXACT: dict = {}


def _exact_baker(curve: Curve) -> BakerEvaluator:
    key = (curve.genus, curve.nu, curve.a)
    if key not in _EXACT:
        _EXACT[key] = BakerEvaluator(baker_matrix(curve))
    return _EXACT[key]


@dataclass
class HEvaluator:
    pd: PeriodData

    @property
    def genus(self) -> int:
        return self.pd.genus

    @cached_property
    def chi(self) -> complex:
        return complex(chi_factor(self.pd.model))

    @property
    def D(self) -> np.ndarray:
        return self.pd.D

    @property
    def Omega(self) -> np.ndarray:
        return self.pd.Omega

    @cached_property
    def theta_quadratic(self) -> np.ndarray:
        """Symmetric ``Q`` with ``1/2 v^T kappa' mu'^-1 v = v^T Q v`` (kappa'
        from direct integration)."""
        Q = 0.5 * self.pd.kappa1_direct @ self.pd.mu1_inv
        return 0.5 * (Q + Q.T)

    @cached_property
    def Winv(self) -> np.ndarray:
        return np.linalg.inv(2 * self.pd.mu1)

    # -- values ------------------------------------------------------------

    def h_log(self, v, route: str = "theta") -> tuple[complex, complex]:
        """``(mantissa, log_factor)`` with ``H = mantissa * exp(log_factor)``."""
        v = np.asarray(v, dtype=complex)
        pd = self.pd
        if route == "definition":
            u = self.D @ v
            m, s = pd.theta.value(np.linalg.solve(2 * pd.omega1, u))
            q = v @ self.Omega @ v + u @ pd.sigma_quadratic @ u
            return self.chi * pd.epsilon * m, q + s
        if route == "theta":
            m, s = pd.theta.value(self.Winv @ v)
            return self.chi * pd.epsilon * m, v @ self.theta_quadratic @ v + s
        raise ValueError(f"unknown route {route!r}")

    def h_eval(self, v, route: str = "theta") -> complex:
        m, q = self.h_log(v, route)
        return m * cmath.exp(q)

    # -- derivatives -------------------------------------------------------

    def log_h_jet(self, v, directions=None, order: int = 2, route: str = "theta",
                  floor: float = 1e-10) -> Jet:
        """Jet of ``log H(v + sum_r t_r d_r)`` (default: coordinate directions)."""
        v = np.asarray(v, dtype=complex)
        g = self.genus
        Dm = np.eye(g, dtype=complex) if directions is None else np.atleast_2d(np.asarray(directions, dtype=complex))
        pd = self.pd
        if route == "theta":
            lj = pd.theta.log_jet(self.Winv @ v, Dm @ self.Winv.T, order, floor)
            q = Jet.quadratic(self.theta_quadratic, v, Dm, order)
        else:
            Wi = np.linalg.inv(2 * pd.omega1)
            u = self.D @ v
            Du = Dm @ self.D.T  # directions in u
            lj = pd.theta.log_jet(Wi @ u, Du @ Wi.T, order, floor)
            q = Jet.quadratic(self.Omega, v, Dm, order) + Jet.quadratic(pd.sigma_quadratic, u, Du, order)
        return lj + q + complex(np.log(self.chi * pd.epsilon))

    def log_h_derivatives(self, v, max_order: int = 4, route: str = "theta") -> list[np.ndarray]:
        j = self.log_h_jet(v, order=max_order, route=route)
        return [j.tensor(k) for k in range(1, max_order + 1)]

    def baker_from_h(self, v, route: str = "theta") -> np.ndarray:
        """``-d^2 log H / dv dv``."""
        j = self.log_h_jet(v, order=2, route=route)
        return -j.tensor(2)

    def wp_from_sigma(self, u) -> np.ndarray:
        j = self.pd.sigma_log_jet(u, 2)
        return -j.tensor(2)

    # -- identities --------------------------------------------------------

    def p_wp_rhs(self, v) -> np.ndarray:
        """``-n_ij + t^-2 sum s^(2g+2-k-l) C(k-1,i-1) C(l-1,j-1) (-a)^(k+l-i-j) wp(Dv)``;
        equivalently ``-Omega + D^T wp D``."""
        wp = self.wp_from_sigma(self.D @ np.asarray(v, dtype=complex))
        g = self.genus
        m = self.pd.model
        s, t, a = complex(m.s), complex(m.t), complex(m.curve.a)
        out = np.empty((g, g), dtype=complex)
        for i in range(1, g + 1):
            for j in range(1, g + 1):
                acc = 0
                for k in range(i, g + 1):
                    for l in range(j, g + 1):
                        acc += (s ** (2 * g + 2 - k - l) * math.comb(k - 1, i - 1) * math.comb(l - 1, j - 1)
                                * (-a) ** (k + l - i - j) * wp[k - 1, l - 1])
                out[i - 1, j - 1] = acc / t ** 2 - self.Omega[i - 1, j - 1]
        return out

    def p_wp_relation_check(self, points) -> float:
        """Relative residual of the Baker/wp relation at the Abel image of a
        divisor, with the Baker side from the algebraic route."""
        v = abel_jacobi(self.pd, points)
        lhs = baker_values(self.pd.curve, points)
        rhs = self.p_wp_rhs(v)
        return float(np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))

    def quasi_periodicity_factor(self, v, m1, m2) -> complex:
        """Logarithm of the predicted ``H(v + 2mu'm1 + 2mu''m2) / H(v)``."""
        pd = self.pd
        m1 = np.asarray(m1)
        m2 = np.asarray(m2)
        sign_exp = 2 * (pd.delta1 @ m1 - pd.delta2 @ m2) + m1 @ m2
        shift = pd.mu1 @ m1 + pd.mu2 @ m2
        lin = 2 * pd.kappa1 @ m1 + 2 * pd.kappa2 @ m2
        return 1j * math.pi * round(sign_exp) + lin @ (np.asarray(v) + shift)

    def quasi_periodicity_check(self, v, m1, m2) -> float:
        v = np.asarray(v, dtype=complex)
        shifted = v + 2 * self.pd.mu1 @ np.asarray(m1) + 2 * self.pd.mu2 @ np.asarray(m2)
        a, qa = self.h_log(shifted)
        b, qb = self.h_log(v)
        pred = self.quasi_periodicity_factor(v, m1, m2)
        ratio = (a / b) * cmath.exp(qa - qb - pred)
        return abs(ratio - 1)

    # -- sampling ----------------------------------------------------------

    def generic_point(self, rng: np.random.Generator, threshold: float = 1e-3, scale: float = 1.0) -> np.ndarray:
        """Uniform point of the period cell (scaled towards 0 by ``scale``)
        away from the zero set of theta."""
        g = self.genus
        for _ in range(1000):
            c1 = rng.uniform(-0.5, 0.5, g) * scale
            c2 = rng.uniform(-0.5, 0.5, g) * scale
            v = 2 * self.pd.mu1 @ c1 + 2 * self.pd.mu2 @ c2
            if self.pd.theta.relative_size(self.Winv @ v) > threshold:
                return v
        raise OnThetaDivisor("no generic point found")


def h_evaluator(pd: PeriodData) -> HEvaluator:
    return HEvaluator(pd)


# ---------------------------------------------------------------------------
# PDEs


@dataclass(frozen=True)
class PDEResult:
    residual: float  # |lhs - rhs|
    normalized: float  # residual / sum |terms|
    raw: complex
    terms: tuple


def _result(terms) -> PDEResult:
    raw = sum(terms)
    return PDEResult(abs(raw), abs(raw) / sum(abs(x) for x in terms), raw, tuple(terms))


def _kp_residual(L: Jet, c2: complex, shift: complex) -> PDEResult:
    """KP residual of ``phi = c2 * L_11 + shift`` where ``L`` is a jet in
    ``(t1, t2, t3)``: ``d1(phi_3 + 6 phi phi_1 + phi_111) - phi_22``."""
    d = L.derivative
    phi = c2 * d((2, 0, 0)) + shift
    p1 = c2 * d((3, 0, 0))
    p11 = c2 * d((4, 0, 0))
    t_13 = c2 * d((3, 0, 1))
    t_nl1 = 6 * p1 * p1
    t_nl2 = 6 * phi * p11
    t_lin = c2 * d((6, 0, 0))
    t_22 = -c2 * d((2, 2, 0))
    return _result((t_13, t_nl1, t_nl2, t_lin, t_22))


def _kdv_residual(L: Jet, c2: complex, shift: complex, has_t3: bool) -> PDEResult:
    """``4 G_3 + 6 G G_1 - G_111`` for ``G = c2 * L_11 + shift`` with ``L`` a
    jet in ``(t1, t3)``."""
    d = L.derivative
    G = c2 * d((2, 0)) + shift
    G1 = c2 * d((3, 0))
    G3 = c2 * d((2, 1)) if has_t3 else 0
    return _result((4 * G3, 6 * G * G1, -c2 * d((5, 0))))


def kp_h_constants(curve: Curve) -> dict:
    """Constants of the KP solution built from the Baker function (principal
    square root)."""
    nu0, nu2, nu4 = (complex(curve.nu[k]) for k in range(3))
    root = cmath.sqrt(-3 * nu0)
    if root == 0:
        raise ConstantsUndefined("nu0 = 0")
    return {"alpha": -16 * nu0, "beta": 2 * root, "gamma": nu2 / root,
            "delta": 2 * nu4 / 3 + nu2 ** 2 / (18 * nu0)}


def kp_sigma_constants(pd: PeriodData) -> dict:
    """Constants of the KP solution built from the top sigma derivative."""
    lam = [complex(x) for x in lambda_tilde(pd.model)]
    g = pd.genus
    top = lam[2 * g + 1]
    if top == 0:
        raise ConstantsUndefined("top coefficient vanishes")
    root = cmath.sqrt(-3 * top)
    return {"c": -16 * top, "d": 2 * root, "e": lam[2 * g] / root,
            "f": 2 * lam[2 * g - 1] / 3 + lam[2 * g] ** 2 / (18 * top)}


def pde_residual(he: HEvaluator, kind: str, base, offsets=(0.0,), constants: dict | None = None,
                 baker: str = "relation") -> list[PDEResult]:
    """Residuals of one of the PDEs at ``base + grid`` where the grid is
    the cartesian product of ``offsets`` in each time variable.

    ``kind``: ``"KdV"`` (sigma, g >= 1), ``"KP-Upsilon"`` (sigma, g >= 2),
    ``"KP-sigma"`` (top sigma derivative, g >= 3), ``"KP-H"`` (g >= 3).
    For KP-H the Baker function is evaluated either through its relation
    to wp (``baker="relation"``: ``-Omega + D^T wp(Dv) D``) or as the
    Hessian ``-d^2 log H`` (``baker="hessian"``); the two differ by Omega.
    """
    pd = he.pd
    g = pd.genus
    lam = [complex(x) for x in lambda_tilde(pd.model)]
    base = np.asarray(base, dtype=complex)
    out = []
    if kind == "KdV":
        dirs = np.zeros((2, g), dtype=complex)
        dirs[0, 0] = 1
        if g >= 2:
            dirs[1, 1] = 1
        c = constants or {"shift": 2 * lam[1] / 3}
        for o1 in offsets:
            for o3 in offsets if g >= 2 else (0.0,):
                u = base + o1 * dirs[0] + o3 * dirs[1]
                L = _sigma_jet_dirs(pd, u, dirs, 5)
                out.append(_kdv_residual(L, -2.0, c["shift"], g >= 2))
        return out
    if kind in ("KP-Upsilon", "KP-sigma", "KP-H"):
        dirs = np.zeros((3, g), dtype=complex)
        if kind == "KP-Upsilon":
            if g < 2:
                raise ConstantsUndefined("needs g >= 2")
            c = constants or {"b": 2 * cmath.sqrt(lam[1]), "c3": -4.0}
            dirs[0, 0] = 1
            dirs[1, 0] = c["b"]
            dirs[2, 1] = c["c3"]
            shift = 0.0
        elif kind == "KP-sigma":
            if g < 3:
                raise ConstantsUndefined("needs g >= 3")
            c = constants or kp_sigma_constants(pd)
            dirs[0, g - 1] = 1
            dirs[1, g - 2] = c["d"]
            dirs[1, g - 1] = c["e"]
            dirs[2, g - 3] = c["c"]
            shift = -c["f"]
        else:
            if g < 3:
                raise ConstantsUndefined("needs g >= 3")
            c = constants or kp_h_constants(pd.curve)
            dirs[0, g - 1] = 1
            dirs[1, g - 2] = c["beta"]
            dirs[1, g - 1] = c["gamma"]
            dirs[2, g - 3] = c["alpha"]
            if baker == "relation":
                shift = -c["delta"] + 2 * pd.Omega[g - 1, g - 1]
            elif baker == "hessian":
                shift = -c["delta"]
            else:
                raise ValueError(f"unknown Baker route {baker!r}")
        for o1 in offsets:
            for o2 in offsets:
                for o3 in offsets:
                    p = base + o1 * dirs[0] + o2 * dirs[1] + o3 * dirs[2]
                    if kind == "KP-H" and baker == "hessian":
                        L = he.log_h_jet(p, dirs, 6)
                    elif kind == "KP-H":
                        L = _sigma_jet_dirs(pd, he.D @ p, dirs @ he.D.T, 6)
                    else:
                        L = _sigma_jet_dirs(pd, p, dirs, 6)
                    out.append(_kp_residual(L, 2.0, shift))
        return out
    raise ValueError(f"unknown PDE {kind!r}")


def conditioned_grid(he: HEvaluator, kind: str, rng: np.random.Generator, offsets=(-0.05, 0.0, 0.05),
                     bound: float = 1e8, tries: int = 20, scale: float = 0.3, **kwargs):
    """Draw a base point whose whole sample grid stays clear of the theta
    divisor: the summed term magnitude of the PDE must not exceed ``bound``
    at any grid point.  Returns ``(base, results)``; ``base`` is in the
    variable of the chosen PDE (``u`` for the sigma side, ``v`` for KP-H).
    """
    for _ in range(tries):
        v = he.generic_point(rng, scale=scale)
        base = v if kind == "KP-H" else he.D @ v
        res = pde_residual(he, kind, base, offsets, **kwargs)
        if max(sum(abs(t) for t in r.terms) for r in res) <= bound:
            return base, res
    raise OnThetaDivisor(f"no sample grid with term scale below {bound:g}")


def _sigma_jet_dirs(pd: PeriodData, u, dirs, order: int) -> Jet:
    Wi = np.linalg.inv(2 * pd.omega1)
    lj = pd.theta.log_jet(Wi @ u, dirs @ Wi.T, order)
    return lj + Jet.quadratic(pd.sigma_quadratic, u, dirs, order)

