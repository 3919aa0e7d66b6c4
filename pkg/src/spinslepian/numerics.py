"""
Numerical kernels shared by the rest of the package.

Gauss-Legendre rules, symmetric eigensolvers (tridiagonal and dense) and
a log-factorial table. The eigensolvers are thin wrappers over LAPACK
that add input validation, ascending ordering and a named error when an
iteration fails to converge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg


class ConvergenceError(RuntimeError):
    """Raised when an eigensolver fails to converge."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def mapped(self, a, b):
        """Return (nodes, weights) affinely mapped onto [a, b]."""
        half = 0.5 * (b - a)
        return half * self.nodes + 0.5 * (a + b), half * self.weights

    def integrate(self, f):
        return np.dot(self.weights, f(self.nodes))


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Real symmetric tridiagonal matrix stored by its two diagonals."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        if len(self.off_diagonal) != max(len(self.diagonal) - 1, 0):
            raise ValueError(
                f"off-diagonal has length {len(self.off_diagonal)}, "
                f"expected {len(self.diagonal) - 1}")

    def __len__(self):
        return len(self.diagonal)

    def to_dense(self):
        return (np.diag(self.diagonal) + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with eigenvectors stored column-wise."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class LogFactorialTable:
    """``values[k] == ln(k!)`` for ``k = 0 .. k_max``."""

    values: np.ndarray

    @property
    def k_max(self):
        return len(self.values) - 1


def gauss_legendre(n_nodes):
    """
    Gauss-Legendre quadrature rule with ``n_nodes`` points on [-1, 1].

    The rule is exact for polynomials of degree ``2*n_nodes - 1``.
    """
    n_nodes = int(n_nodes)
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    # enforce exact mirror symmetry of the nodes
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes=nodes, weights=weights)


def eigh_tridiagonal(m, name=None):
    """
    Full eigendecomposition of a symmetric tridiagonal matrix.

    Parameters
    ----------
    m : TridiagonalMatrix
    name : str, optional
        Label of the block, used in the error message on failure.

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending, orthonormal eigenvectors as columns.
    """
    d = np.asarray(m.diagonal, dtype=float)
    e = np.asarray(m.off_diagonal, dtype=float)
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise ValueError(f"non-finite entries in tridiagonal block {name}")
    if len(d) == 1:
        return EigenDecomposition(values=d.copy(), vectors=np.ones((1, 1)))
    try:
        values, vectors = scipy.linalg.eigh_tridiagonal(
            d, e, lapack_driver="stev")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"tridiagonal eigensolver did not converge for block {name}"
        ) from exc
    return EigenDecomposition(values=values, vectors=vectors)


def eigh_dense(a, name=None):
    """Eigendecomposition of a dense real symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * scale:
        raise ValueError(f"matrix {name or ''} is not symmetric".strip())
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"dense eigensolver did not converge for block {name}") from exc
    return EigenDecomposition(values=values, vectors=vectors)


@lru_cache(maxsize=None)
def log_factorial_table(k_max):
    """Build (and cache) the table of ``ln(k!)`` up to ``k_max``."""
    values = np.array([math.lgamma(k + 1.0) for k in range(int(k_max) + 1)])
    values[:2] = 0.0
    values.setflags(write=False)
    return LogFactorialTable(values=values)


def table_for_bandlimit(L_max):
    """Factorial table covering every 3j symbol up to bandlimit ``L_max``."""
    return log_factorial_table(4 * int(L_max) + 2)


def log_factorial(k, table):
    """Return ``ln(k!)`` looked up in ``table``."""
    if k < 0:
        raise ValueError(f"factorial of negative integer {k}")
    if k > table.k_max:
        raise IndexError(
            f"log-factorial table too small: k={k} > k_max={table.k_max}")
    return float(table.values[k])
