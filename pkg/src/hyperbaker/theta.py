"""Riemann theta functions with half-integer characteristics.

    theta[d1, d2](z, tau) = sum_n exp(pi i k^T tau k + 2 pi i k^T (z + d2)),
    k = n + d1.

The lattice sum is centred on the dominant term and truncated on the
ellipsoid ``pi (k - k*)^T Im(tau) (k - k*) <= L``.  Values are returned with
a separate log-scale so large arguments do not overflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .jets import Jet, multi_indices


class TailBoundUnreachable(RuntimeError):
    pass


class OnThetaDivisor(ArithmeticError):
    pass


_MAX_POINTS = 2_000_000


def lattice_points(Y: np.ndarray, kstar: np.ndarray, shift: np.ndarray, level: float) -> np.ndarray:
    """Points ``k = n + shift`` (``n`` integral) with
    ``pi (k-kstar)^T Y (k-kstar) <= level``."""
    g = len(kstar)
    Yi = np.linalg.inv(Y)
    r2 = level / math.pi
    half = np.sqrt(r2 * np.diag(Yi))
    lo = np.floor(kstar - shift - half).astype(int)
    hi = np.ceil(kstar - shift + half).astype(int)
    count = int(np.prod(hi - lo + 1))
    if count > _MAX_POINTS:
        raise TailBoundUnreachable(f"lattice box with {count} points")
    axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(g, -1).T + shift
    d = grid - kstar
    q = np.einsum("ni,ij,nj->n", d, Y, d)
    return grid[q * math.pi <= level]


@dataclass(frozen=True)
class ThetaFunction:
    """Theta function for a fixed ``tau`` and characteristic."""

    tau: np.ndarray
    delta1: np.ndarray
    delta2: np.ndarray
    level: float = 60.0

    @classmethod
    def make(cls, tau, delta1=None, delta2=None, level: float = 60.0) -> "ThetaFunction":
        tau = np.asarray(tau, dtype=complex)
        g = tau.shape[0]
        d1 = np.zeros(g) if delta1 is None else np.asarray(delta1, dtype=float)
        d2 = np.zeros(g) if delta2 is None else np.asarray(delta2, dtype=float)
        if np.linalg.eigvalsh(tau.imag).min() <= 0:
            raise ValueError("Im tau is not positive definite")
        return cls(tau, d1, d2, level)

    @property
    def genus(self) -> int:
        return self.tau.shape[0]

    def parity(self) -> int:
        """+1 for even, -1 for odd characteristics."""
        return -1 if round(4 * float(self.delta1 @ self.delta2)) % 2 else 1

    def _terms(self, z: np.ndarray, extra_level: float = 0.0):
        Y = self.tau.imag
        kstar = -np.linalg.solve(Y, z.imag)
        ks = lattice_points(Y, kstar, self.delta1, self.level + extra_level)
        E = 1j * math.pi * np.einsum("ni,ij,nj->n", ks, self.tau, ks) + 2j * math.pi * ks @ (z + self.delta2)
        M = E.real.max()
        return ks, np.exp(E - M), M

    def value(self, z) -> tuple[complex, float]:
        """``(mantissa, log_scale)`` with theta = mantissa * exp(log_scale)."""
        z = np.asarray(z, dtype=complex)
        _, w, M = self._terms(z)
        return complex(w.sum()), float(M)

    def __call__(self, z) -> complex:
        m, s = self.value(z)
        return m * math.exp(s)

    def relative_size(self, z) -> float:
        """``|theta| / sum |terms|``: small near the theta divisor."""
        z = np.asarray(z, dtype=complex)
        _, w, _ = self._terms(z)
        return float(abs(w.sum()) / np.abs(w).sum())

    def jet(self, z, directions, order: int) -> tuple[Jet, float]:
        """Taylor jet of ``theta(z + sum_r t_r d_r)`` in ``t`` and its log-scale."""
        z = np.asarray(z, dtype=complex)
        Dm = np.atleast_2d(np.asarray(directions, dtype=complex))
        m = Dm.shape[0]
        ks, w, M = self._terms(z, extra_level=4.0 * order)
        c = 2j * math.pi * ks @ Dm.T  # (N, m)
        pw = np.ones((order + 1,) + c.shape, dtype=complex)
        for p in range(1, order + 1):
            pw[p] = pw[p - 1] * c / p
        out = np.zeros((order + 1,) * m, dtype=complex)
        for alpha in multi_indices(m, order):
            prod = w.copy()
            for r, a in enumerate(alpha):
                if a:
                    prod = prod * pw[a][:, r]
            out[alpha] = prod.sum()
        return Jet(out, order), float(M)

    def log_jet(self, z, directions, order: int, floor: float = 0.0) -> Jet:
        """Jet of ``log theta``; raises :class:`OnThetaDivisor` if the value
        is below ``floor`` relative to the sum of absolute terms."""
        j, M = self.jet(z, directions, order)
        if floor > 0 and self.relative_size(z) < floor:
            raise OnThetaDivisor("theta nearly vanishes at this point")
        lj = j.log()
        lj.c[(0,) * lj.nvars] += M
        return lj

    def gradient(self, z) -> np.ndarray:
        g = self.genus
        j, M = self.jet(z, np.eye(g), 1)
        return np.array([j.derivative([1 if r == s else 0 for s in range(g)]) for r in range(g)]) * math.exp(M)


def half_characteristics(g: int):
    """All ``4^g`` pairs ``(d1, d2)`` with entries in {0, 1/2}."""
    for bits in itertools.product((0.0, 0.5), repeat=2 * g):
        yield np.array(bits[:g]), np.array(bits[g:])
