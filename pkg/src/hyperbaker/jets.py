"""Truncated multivariate Taylor series with complex coefficients.

A jet of ``m`` variables to total order ``K`` is a dense array of shape
``(K+1,)*m`` whose entry at multi-index ``alpha`` is the Taylor coefficient
of ``t^alpha``; entries with ``|alpha| > K`` are kept at zero.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.signal import convolve


class Jet:
    __slots__ = ("c", "order")

    def __init__(self, coeffs: np.ndarray, order: int):
        self.c = coeffs
        self.order = order

    @property
    def nvars(self) -> int:
        return self.c.ndim

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        c = np.zeros((order + 1,) * nvars, dtype=complex)
        c[(0,) * nvars] = value
        return cls(c, order)

    @classmethod
    def linear(cls, value, grad, order: int) -> "Jet":
        grad = np.asarray(grad, dtype=complex)
        j = cls.constant(value, len(grad), order)
        for r, gval in enumerate(grad):
            idx = [0] * len(grad)
            idx[r] = 1
            if order >= 1:
                j.c[tuple(idx)] = gval
        return j

    @classmethod
    def quadratic(cls, matrix, point, directions, order: int) -> "Jet":
        """Jet of ``q(v) = v^T A v`` at ``v = point + sum t_r d_r``."""
        A = np.asarray(matrix, dtype=complex)
        p = np.asarray(point, dtype=complex)
        Dm = np.asarray(directions, dtype=complex)
        m = Dm.shape[0]
        j = cls.constant(p @ A @ p, m, order)
        if order >= 1:
            lin = Dm @ (A + A.T) @ p
            for r in range(m):
                idx = [0] * m
                idx[r] = 1
                j.c[tuple(idx)] += lin[r]
        if order >= 2:
            B = Dm @ A @ Dm.T
            for r in range(m):
                for s in range(m):
                    idx = [0] * m
                    idx[r] += 1
                    idx[s] += 1
                    j.c[tuple(idx)] += B[r, s]
        return j

    def _mask(self) -> np.ndarray:
        grids = np.indices(self.c.shape).sum(axis=0)
        return grids <= self.order

    def truncate(self) -> "Jet":
        self.c[~self._mask()] = 0
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c, self.order)
        c = self.c.copy()
        c[(0,) * self.nvars] += other
        return Jet(c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other, self.order)
        full = convolve(self.c, other.c, method="direct")
        sl = tuple(slice(0, self.order + 1) for _ in range(self.nvars))
        return Jet(np.ascontiguousarray(full[sl]), self.order).truncate()

    __rmul__ = __mul__

    @property
    def value(self) -> complex:
        return complex(self.c[(0,) * self.nvars])

    def log(self) -> "Jet":
        """``log`` of a jet with non-zero constant term (principal branch)."""
        c0 = self.value
        if c0 == 0:
            raise ZeroDivisionError("log of a jet with zero constant term")
        eps = Jet(self.c / c0, self.order)
        eps.c[(0,) * self.nvars] = 0
        out = Jet.constant(np.log(c0), self.nvars, self.order)
        power = Jet.constant(1.0, self.nvars, self.order)
        for k in range(1, self.order + 1):
            power = power * eps
            out = out + power * (((-1) ** (k + 1)) / k)
        return out

    def exp(self) -> "Jet":
        c0 = self.value
        eps = Jet(self.c.copy(), self.order)
        eps.c[(0,) * self.nvars] = 0
        out = Jet.constant(1.0, self.nvars, self.order)
        power = Jet.constant(1.0, self.nvars, self.order)
        for k in range(1, self.order + 1):
            power = power * eps * (1.0 / k)
            out = out + power
        return out * np.exp(c0)

    def derivative(self, alpha) -> complex:
        """Partial derivative ``d^alpha`` at the expansion point."""
        alpha = tuple(alpha)
        return complex(self.c[alpha]) * math.prod(math.factorial(a) for a in alpha)

    def tensor(self, k: int) -> np.ndarray:
        """Symmetric tensor of k-th derivatives."""
        m = self.nvars
        out = np.empty((m,) * k, dtype=complex)
        for idx in itertools.product(range(m), repeat=k):
            alpha = [0] * m
            for r in idx:
                alpha[r] += 1
            out[idx] = self.derivative(alpha)
        return out


def multi_indices(nvars: int, order: int):
    """All multi-indices with total degree ``<= order``."""
    for alpha in itertools.product(range(order + 1), repeat=nvars):
        if sum(alpha) <= order:
            yield alpha
