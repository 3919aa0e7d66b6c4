"""
Spin-weighted spherical harmonics ``sY_{n,j}``.

Production path: the lowest admissible degree ``n_j = max(|N|, |j|)`` is
seeded from the finite half-angle sum, then the three-term degree
recursion is run upward. A direct Wigner small-d evaluation is kept as a
cross-check. Phase convention::

    sY_{n,j}(t, phi) = (-1)^N sqrt((2n+1)/(4 pi)) exp(i j phi) d^n_{j,-N}(theta),

with ``t = cos(theta)``. For ``N = 0`` this reduces to the scalar ``Y_{n,j}``
with Condon-Shortley phase.

All functions accept a :class:`SpinPoint` whose ``t`` and ``phi`` are either
scalars or arrays of a common shape. The poles ``t = +-1`` are excluded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import log_factorial_table

_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class SpinPoint:
    """Point(s) on the sphere minus the poles: ``t = cos(theta)``, longitude ``phi``."""

    t: float | np.ndarray
    phi: float | np.ndarray

    def __post_init__(self):
        if not np.all(np.abs(np.asarray(self.t)) < 1.0):
            raise ValueError("SpinPoint requires |t| < 1 (poles are excluded)")

    @classmethod
    def from_angles(cls, colatitude, longitude):
        return cls(np.cos(colatitude), longitude)


@dataclass(frozen=True)
class SpinColumn:
    """Values ``sY_{n,j}(p)`` for ``n = n_min .. degree_max`` along axis 0."""

    spin: int
    order: int
    degree_max: int
    point: SpinPoint
    values: np.ndarray

    @property
    def n_min(self):
        return max(abs(self.spin), abs(self.order))

    def degree(self, n):
        """Value at degree ``n``; zero below ``n_min``."""
        if n < self.n_min:
            return np.zeros_like(self.values[0]) if len(self.values) else 0.0
        if n > self.degree_max:
            raise IndexError(f"degree {n} beyond column maximum {self.degree_max}")
        return self.values[n - self.n_min]


def _lf(k_max):
    return log_factorial_table(max(k_max, 64)).values


def alpha(N, n, j):
    """Recursion coefficient ``alpha^N_{n,j}``."""
    if n < 1 or n < abs(N) or n < abs(j):
        raise ValueError(f"alpha undefined for N={N}, n={n}, j={j}")
    return (math.sqrt((n - N) * (n + N)) / n
            * math.sqrt((n - j) * (n + j) / ((2.0 * n - 1.0) * (2.0 * n + 1.0))))


def spin_Y_sum(N, n, j, p):
    """
    ``sY_{n,j}`` from the finite sum over products of the half-angle
    functions ``o1, o2, o1hat, o2hat``.

    The sum has a single term at ``n = max(|N|, |j|)``; at higher degree it
    alternates and loses accuracy, so it only seeds the recursion.
    """
    if n < max(abs(N), abs(j)):
        raise ValueError(f"degree n={n} below max(|N|,|j|) for N={N}, j={j}")
    t = np.asarray(p.t, dtype=float)
    phi = np.asarray(p.phi, dtype=float)
    half_plus = np.sqrt(0.5 * (1.0 + t))
    half_minus = np.sqrt(0.5 * (1.0 - t))
    o1 = np.exp(-0.5j * phi) * half_plus
    o2 = np.exp(0.5j * phi) * half_minus
    o1hat = -np.exp(-0.5j * phi) * half_minus
    o2hat = np.exp(0.5j * phi) * half_plus

    lf = _lf(2 * n + 2)
    log_norm = 0.5 * (lf[n - j] + lf[n + j] + lf[n - N] + lf[n + N])
    total = np.zeros(np.broadcast(t, phi).shape, dtype=complex)
    for k in range(max(0, j - N), min(n + j, n - N) + 1):
        coef = math.exp(log_norm - lf[k] - lf[n + j - k] - lf[n - N - k] - lf[N - j + k])
        total = total + coef * (o1 ** (k + N - j) * o2 ** (n - k + j)
                                * o1hat ** (n - k - N) * o2hat ** k)
    sign = -1.0 if j % 2 else 1.0
    return sign * math.sqrt((2 * n + 1) / _FOUR_PI) * total


def seed_spin_Y(N, j, p):
    """``sY_{n0,j}(p)`` at the lowest admissible degree ``n0 = max(|N|, |j|)``."""
    value = spin_Y_sum(N, max(abs(N), abs(j)), j, p)
    return value[()] if value.ndim == 0 else value


def _recursion_shift(N, j, n):
    # N*j/(n(n+1)); the n = 0 case only occurs with N = j = 0
    return 0.0 if N * j == 0 else N * j / (n * (n + 1.0))


def spin_column(N, j, L, p):
    """
    Column ``sY_{n,j}(p)`` for ``n = n_j .. L`` by upward three-term recursion.

    Raises
    ------
    ValueError
        If ``L < max(|N|, |j|)``.
    """
    n0 = max(abs(N), abs(j))
    if L < n0:
        raise ValueError(f"bandlimit L={L} below n_j={n0} for N={N}, j={j}")
    t = np.asarray(p.t, dtype=float)
    seed = spin_Y_sum(N, n0, j, p)
    values = np.empty((L - n0 + 1,) + seed.shape, dtype=complex)
    values[0] = seed
    prev = np.zeros_like(seed)
    for i, n in enumerate(range(n0, L)):
        a_next = alpha(N, n + 1, j)
        a_here = alpha(N, n, j) if n >= 1 else 0.0
        cur = values[i]
        values[i + 1] = ((t + _recursion_shift(N, j, n)) * cur - a_here * prev) / a_next
        prev = cur
    return SpinColumn(spin=N, order=j, degree_max=L, point=p, values=values)


def spin_Y(N, n, j, p):
    """Single value ``sY_{n,j}(p)`` via :func:`spin_column`."""
    value = spin_column(N, j, n, p).values[-1]
    return value[()] if value.ndim == 0 else value


def wigner_small_d(n, m1, m2, theta):
    """Wigner small-d ``d^n_{m1,m2}(theta)`` from its explicit finite sum."""
    if abs(m1) > n or abs(m2) > n:
        raise ValueError(f"|m| exceeds degree {n}")
    lf = _lf(2 * n + 2)
    c = np.cos(0.5 * np.asarray(theta, dtype=float))
    s = np.sin(0.5 * np.asarray(theta, dtype=float))
    log_norm = 0.5 * (lf[n + m1] + lf[n - m1] + lf[n + m2] + lf[n - m2])
    total = np.zeros_like(c)
    for k in range(max(0, m2 - m1), min(n + m2, n - m1) + 1):
        coef = math.exp(log_norm - lf[n + m2 - k] - lf[k] - lf[m1 - m2 + k] - lf[n - m1 - k])
        if (m1 - m2 + k) % 2:
            coef = -coef
        total = total + coef * c ** (2 * n + m2 - m1 - 2 * k) * s ** (m1 - m2 + 2 * k)
    return total


def spin_Y_direct(N, n, j, p):
    """Cross-check evaluation of ``sY_{n,j}`` through the Wigner small-d function."""
    if n < max(abs(N), abs(j)):
        raise ValueError(f"degree n={n} below max(|N|,|j|)")
    theta = np.arccos(np.asarray(p.t, dtype=float))
    sign = -1.0 if N % 2 else 1.0
    value = (sign * math.sqrt((2 * n + 1) / _FOUR_PI)
             * np.exp(1j * j * np.asarray(p.phi, dtype=float))
             * wigner_small_d(n, j, -N, theta))
    return value[()] if np.ndim(value) == 0 else value


def dt_spin_Y(N, n, j, p, column=None):
    """
    ``d/dt sY_{n,j}`` from the first-derivative recursion.

    ``column`` may be passed to reuse an existing :class:`SpinColumn`
    covering degrees ``n-1 .. n``.
    """
    if n < max(abs(N), abs(j)):
        raise ValueError(f"degree n={n} below max(|N|,|j|)")
    if n == 0:
        return np.zeros(np.shape(p.t))[()] * 0j
    if column is None:
        column = spin_column(N, j, n, p)
    t = np.asarray(p.t, dtype=float)
    y_n = column.degree(n)
    y_prev = column.degree(n - 1)
    rhs = (n * t + N * j / n) * y_n - (2 * n + 1) * alpha(N, n, j) * y_prev
    value = rhs / (t * t - 1.0)
    return value[()] if np.ndim(value) == 0 else value


def _eth(N, n, j, p, sign):
    t = np.asarray(p.t, dtype=float)
    s = np.sqrt(1.0 - t * t)
    column = spin_column(N, j, n, p)
    y = column.degree(n)
    # -i d/dphi acting on exp(i j phi) gives +j
    value = s * dt_spin_Y(N, n, j, p, column) + sign * (N * t + j) * y / s
    return value[()] if np.ndim(value) == 0 else value


def eth_apply(N, n, j, p):
    """Spin-raising operator applied to ``sY_{n,j}``, evaluated at ``p``."""
    return _eth(N, n, j, p, +1.0)


def eth_bar_apply(N, n, j, p):
    """Spin-lowering operator applied to ``sY_{n,j}``, evaluated at ``p``."""
    return _eth(N, n, j, p, -1.0)


def christoffel_darboux_check(N, j, L, p1, p2):
    """
    Absolute residual of the Christoffel-Darboux identity

        (t1 - t2) sum_{n=n_j}^{L-1} conj(Y_n(p1)) Y_n(p2)
            = alpha_{L,j} [conj(Y_L(p1)) Y_{L-1}(p2) - conj(Y_{L-1}(p1)) Y_L(p2)].
    """
    n_j = max(abs(N), abs(j))
    if L <= n_j:
        raise ValueError(f"bandlimit L={L} must exceed n_j={n_j}")
    c1 = spin_column(N, j, L, p1)
    c2 = spin_column(N, j, L, p2)
    lhs = (np.asarray(p1.t) - np.asarray(p2.t)) * np.sum(
        np.conj(c1.values[:-1]) * c2.values[:-1], axis=0)
    rhs = alpha(N, L, j) * (np.conj(c1.degree(L)) * c2.degree(L - 1)
                            - np.conj(c1.degree(L - 1)) * c2.degree(L))
    return np.abs(lhs - rhs)
