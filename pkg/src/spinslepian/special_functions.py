"""
Legendre polynomials, fully normalized associated Legendre functions and
Wigner 3j symbols.

Conventions
-----------
``X_{n,j}(t)`` includes the Condon-Shortley phase ``(-1)^j`` and is
normalized so that ``X_{n,j}(t) exp(i j phi)`` is orthonormal on the unit
sphere. Negative orders follow ``X_{n,-j} = (-1)^j X_{n,j}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import log_factorial_table, table_for_bandlimit


@dataclass(frozen=True)
class LegendreColumn:
    degree_max: int
    argument: float
    values: np.ndarray


@dataclass(frozen=True)
class ThreeJSymbol:
    j1: int
    j2: int
    j3: int
    m1: int
    m2: int
    m3: int
    value: float


def _check_unit_interval(t):
    if np.any(np.abs(t) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")


def legendre_column(L, t):
    """
    Legendre polynomials ``P_0(t) .. P_L(t)`` by upward Bonnet recursion.

    ``t`` may be a scalar or an array; in the latter case ``values`` has
    shape ``(L + 1,) + t.shape``.
    """
    if L < 0:
        raise ValueError(f"degree must be >= 0, got {L}")
    _check_unit_interval(t)
    t_arr = np.asarray(t, dtype=float)
    values = np.empty((L + 1,) + t_arr.shape)
    values[0] = 1.0
    if L >= 1:
        values[1] = t_arr
    for n in range(1, L):
        values[n + 1] = ((2 * n + 1) * t_arr * values[n] - n * values[n - 1]) / (n + 1)
    # pin the endpoints to their exact values
    signs = ((-1.0) ** np.arange(L + 1)).reshape((L + 1,) + (1,) * t_arr.ndim)
    values = np.where(t_arr == 1.0, 1.0, values)
    values = np.where(t_arr == -1.0, signs, values)
    return LegendreColumn(degree_max=L, argument=t, values=values)


def normalized_assoc_legendre(n, j, t):
    """
    Fully normalized associated Legendre function ``X_{n,j}(t)``.

    Seeds the sectoral value ``X_{m,m}`` (``m = |j|``) and recurses upward
    in degree.
    """
    m = abs(j)
    if m > n:
        raise ValueError(f"order |j|={m} exceeds degree n={n}")
    _check_unit_interval(t)
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.maximum(0.0, 1.0 - t * t))

    x_mm = np.full(t.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        x_mm = -math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * s * x_mm
    if n == m:
        value = x_mm
    else:
        prev, cur = x_mm, math.sqrt(2.0 * m + 3.0) * t * x_mm
        for k in range(m + 2, n + 1):
            a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
            prev, cur = cur, a * (t * cur - b * prev)
        value = cur
    if j < 0 and m % 2:
        value = -value
    return value[()] if value.ndim == 0 else value


def wigner_3j(j1, j2, j3, m1, m2, m3, table=None):
    """
    Wigner 3j symbol from the Racah single-sum formula.

    Every term is formed as ``exp`` of a log-factorial combination with its
    sign carried separately. Selection-rule violations return 0. Accurate
    to roughly 1e-13 relative for arguments below ~60; beyond that the
    alternating sum loses digits.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if table is None:
        table = log_factorial_table(max(j1 + j2 + j3 + 1, 4 * 60 + 2))
    lf = table.values
    if j1 + j2 + j3 + 1 > table.k_max:
        raise IndexError(
            f"log-factorial table too small for 3j({j1},{j2},{j3})")

    log_pre = 0.5 * (lf[j1 + j2 - j3] + lf[j1 - j2 + j3] + lf[-j1 + j2 + j3]
                     - lf[j1 + j2 + j3 + 1]
                     + lf[j1 + m1] + lf[j1 - m1] + lf[j2 + m2] + lf[j2 - m2]
                     + lf[j3 + m3] + lf[j3 - m3])
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for t in range(t_min, t_max + 1):
        log_term = log_pre - (lf[t] + lf[j3 - j2 + t + m1] + lf[j3 - j1 + t - m2]
                              + lf[j1 + j2 - j3 - t] + lf[j1 - t - m1]
                              + lf[j2 - t + m2])
        term = math.exp(log_term)
        total += -term if t % 2 else term
    if (j1 - j2 - m3) % 2:
        total = -total
    return total


def three_j_symbol(j1, j2, j3, m1, m2, m3):
    """Same as :func:`wigner_3j` but returns a :class:`ThreeJSymbol`."""
    return ThreeJSymbol(j1, j2, j3, m1, m2, m3,
                        wigner_3j(j1, j2, j3, m1, m2, m3))


__all__ = [
    "LegendreColumn",
    "ThreeJSymbol",
    "legendre_column",
    "normalized_assoc_legendre",
    "wigner_3j",
    "three_j_symbol",
    "table_for_bandlimit",
]
