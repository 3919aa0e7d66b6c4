"""
Spin-weighted concentration problem for a polar cap.

For a cap ``t >= b`` the kernel matrix splits into one block per order
``j``. Each block is diagonalized through the symmetric tridiagonal
matrix of the commuting differential operator; the concentration values
are then Rayleigh quotients of the eigenvectors against the kernel block.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .numerics import TridiagonalMatrix, eigh_dense, eigh_tridiagonal, gauss_legendre
from .special_functions import legendre_column, wigner_3j
from .spin_harmonics import SpinPoint, alpha, spin_column

log = logging.getLogger(__name__)

#: concentration values may leave [0, 1] by at most this much before clamping
LAMBDA_CLAMP = 1e-12


class ConsistencyError(RuntimeError):
    """A computed quantity violates a property guaranteed by the theory."""


@dataclass(frozen=True)
class PolarCap:
    """Cap of colatitudinal radius ``theta`` (radians) about the north pole."""

    theta: float
    #: radius as given in degrees, kept so it serializes exactly
    degrees: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi:
            raise ValueError(f"cap radius must lie in (0, pi), got {self.theta}")

    @classmethod
    def from_degrees(cls, theta_deg):
        return cls(math.radians(theta_deg), float(theta_deg))

    @property
    def b(self):
        return math.cos(self.theta)

    @property
    def theta_deg(self):
        return self.degrees if self.degrees is not None else math.degrees(self.theta)

    @property
    def area_fraction(self):
        """Area of the cap divided by 4 pi."""
        return 0.5 * (1.0 - self.b)

    @property
    def beyond_hemisphere(self):
        """True for caps of 90 degrees or more."""
        return self.theta >= 0.5 * math.pi


def _degrees(N, j, L):
    n_j = max(abs(N), abs(j))
    if abs(j) > L or abs(N) > L:
        raise ValueError(f"|N|={abs(N)} and |j|={abs(j)} must not exceed L={L}")
    return list(range(n_j, L + 1))


# ---------------------------------------------------------------------------
# kernel block

_FACTORIALS = [math.factorial(k) for k in range(512)]


@lru_cache(maxsize=None)
def _racah_sum(j1, j2, j3, m1, m2, dps):
    """Alternating Racah sum of a 3j symbol, from exact integer factorials."""
    f = _FACTORIALS
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for t in range(t_min, t_max + 1):
            denom = (f[t] * f[j3 - j2 + t + m1] * f[j3 - j1 + t - m2]
                     * f[j1 + j2 - j3 - t] * f[j1 - t - m1] * f[j2 - t + m2])
            term = mpmath.mpf(1) / denom
            total += -term if t % 2 else term
    return total


@lru_cache(maxsize=None)
def _cap_integrals(k_max, b, dps):
    """``P_{k-1}(b) - P_{k+1}(b)`` for ``k = 0 .. k_max`` with ``P_{-1} = 1``."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(b)
        P = [mpmath.mpf(1), x]
        for n in range(1, k_max + 1):
            P.append(((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1))
        return tuple((mpmath.mpf(1) if k == 0 else P[k - 1]) - P[k + 1]
                     for k in range(k_max + 1))


def _kernel_entry_extended(N, j, n, n2, b, dps):
    # Both 3j symbols share (n, k, n2); the product of their square-root
    # prefactors is Delta(n k n2) (k!)^2 sqrt(F) with F independent of k,
    # and the two Racah phases cancel the (-1)^(N+j) prefactor.
    f = _FACTORIALS
    cap = _cap_integrals(n + n2 + 1, b, dps)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for k in range(abs(n - n2), n + n2 + 1):
            s1 = _racah_sum(n, k, n2, j, 0, dps)
            s2 = _racah_sum(n, k, n2, -N, 0, dps)
            delta = mpmath.mpf(f[n + k - n2] * f[n - k + n2] * f[-n + k + n2]
                               * f[k] ** 2) / f[n + k + n2 + 1]
            total += s1 * s2 * delta * cap[k]
        F = (f[n + j] * f[n - j] * f[n2 + j] * f[n2 - j]
             * f[n - N] * f[n + N] * f[n2 + N] * f[n2 - N])
        scale = mpmath.sqrt(mpmath.mpf((2 * n + 1) * (2 * n2 + 1) * F)) / 2
        return float(scale * total)


def _kernel_entry_double(N, j, n, n2, P):
    total = 0.0
    for k in range(abs(n - n2), n + n2 + 1):
        p_lower = 1.0 if k == 0 else P[k - 1]
        total += (wigner_3j(n, k, n2, j, 0, -j) * wigner_3j(n, k, n2, -N, 0, N)
                  * (p_lower - P[k + 1]))
    sign = -1.0 if (N + j) % 2 else 1.0
    return sign * 0.5 * math.sqrt((2 * n + 1) * (2 * n2 + 1)) * total


def kernel_block(N, j, L, cap, precision="extended"):
    """
    Kernel block of order ``j``: ``int_cap conj(sY_{n,j}) sY_{n',j}``.

    Entries come from the closed form in 3j symbols and Legendre
    differences ``P_{k-1}(b) - P_{k+1}(b)``. With ``precision="extended"``
    (default) the sum over ``k`` is carried out in multiprecision so that
    tiny blocks (large ``|j|``) keep full relative accuracy; with
    ``"double"`` the log-factorial :func:`wigner_3j` is used directly and
    entries carry an absolute error of ~1e-15.

    Returns
    -------
    ndarray
        Symmetric matrix indexed by degrees ``n = max(|N|,|j|) .. L``.
    """
    degrees = _degrees(N, j, L)
    m = len(degrees)
    K = np.empty((m, m))
    b = float(cap.b)
    if precision == "extended":
        dps = 32 + L
        entry = lambda n, n2: _kernel_entry_extended(N, j, n, n2, b, dps)
    elif precision == "double":
        P = legendre_column(2 * L + 1, b).values
        entry = lambda n, n2: _kernel_entry_double(N, j, n, n2, P)
    else:
        raise ValueError(f"unknown precision {precision!r}")
    for a, n in enumerate(degrees):
        for c in range(a, m):
            K[a, c] = K[c, a] = entry(n, degrees[c])
    return K


def commuting_block(N, j, L, cap):
    """Tridiagonal block of order ``j`` of the commuting operator's matrix."""
    degrees = _degrees(N, j, L)
    b = cap.b
    LL = L * (L + 2)
    diagonal = []
    for n in degrees:
        spin_term = 0.0 if N * j == 0 else N * j * (1.0 - (LL + 1.0) / (n * (n + 1.0)))
        diagonal.append(-(n * (n + 1) * b + spin_term))
    off = [(n * (n + 2) - LL) * alpha(N, n + 1, j) for n in degrees[:-1]]
    return TridiagonalMatrix(np.array(diagonal, dtype=float), np.array(off, dtype=float))


@dataclass(frozen=True)
class BlockProblem:
    spin: int
    order: int
    bandlimit: int
    cap: PolarCap
    degrees: tuple
    kernel: np.ndarray = field(repr=False)
    commuting: TridiagonalMatrix = field(repr=False)

    @property
    def label(self):
        return f"(N={self.spin}, j={self.order})"


def build_block(N, j, L, cap, precision="extended"):
    return BlockProblem(spin=N, order=j, bandlimit=L, cap=cap,
                        degrees=tuple(_degrees(N, j, L)),
                        kernel=kernel_block(N, j, L, cap, precision),
                        commuting=commuting_block(N, j, L, cap))


# ---------------------------------------------------------------------------
# eigen-solutions

@dataclass(frozen=True)
class SpinSlepianEntry:
    """One eigenpair: concentration, commuting eigenvalue, order, coefficients."""

    lam: float
    chi: float
    order: int
    n_min: int
    coefficients: np.ndarray = field(repr=False)

    @property
    def degrees(self):
        return range(self.n_min, self.n_min + len(self.coefficients))


def _fix_sign(v):
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def solve_block(p):
    """
    Eigenpairs of one block through the tridiagonal commuting matrix.

    The concentration of each eigenvector is its Rayleigh quotient against
    the kernel block.

    Raises
    ------
    ConsistencyError
        If a concentration value falls outside ``[-1e-12, 1 + 1e-12]``.
    """
    decomposition = eigh_tridiagonal(p.commuting, name=p.label)
    entries = []
    n_min = p.degrees[0]
    for chi, v in zip(decomposition.values, decomposition.vectors.T):
        v = _fix_sign(np.ascontiguousarray(v))
        lam = float(v @ p.kernel @ v)
        if not -LAMBDA_CLAMP <= lam <= 1.0 + LAMBDA_CLAMP:
            raise ConsistencyError(
                f"concentration {lam!r} outside [0, 1] in block {p.label}")
        lam = min(max(lam, 0.0), 1.0)
        entries.append(SpinSlepianEntry(lam=lam, chi=float(chi), order=p.order,
                                        n_min=n_min, coefficients=v))
    return entries


def shannon_spin(N, L, cap):
    """Shannon number ``((L+1)^2 - N^2) (1 - b) / 2``."""
    if L < abs(N):
        raise ValueError(f"bandlimit L={L} below |N|={abs(N)}")
    return ((L + 1) ** 2 - N * N) * cap.area_fraction


@dataclass(frozen=True)
class SpinSlepianBasis:
    """All spin-``N`` Slepian eigenpairs for bandlimit ``L``, sorted by concentration."""

    spin: int
    bandlimit: int
    cap: PolarCap
    entries: tuple = field(repr=False)
    shannon: float

    def __len__(self):
        return len(self.entries)

    @property
    def eigenvalues(self):
        return np.array([e.lam for e in self.entries])

    def harmonic_index(self):
        """Ordered list of ``(n, j)`` labelling rows of :meth:`coefficient_matrix`."""
        N, L = self.spin, self.bandlimit
        return [(n, j) for n in range(abs(N), L + 1) for j in range(-n, n + 1)]

    def coefficient_matrix(self):
        """Zero-padded coefficients, one column per Slepian function."""
        index = {nj: r for r, nj in enumerate(self.harmonic_index())}
        G = np.zeros((len(index), len(self.entries)))
        for col, e in enumerate(self.entries):
            for n, c in zip(e.degrees, e.coefficients):
                G[index[(n, e.order)], col] = c
        return G

    def kernel_matrix(self, precision="extended"):
        """Full kernel matrix in the ordering of :meth:`harmonic_index`."""
        N, L = self.spin, self.bandlimit
        index = {nj: r for r, nj in enumerate(self.harmonic_index())}
        K = np.zeros((len(index), len(index)))
        for j in range(-L, L + 1):
            block = kernel_block(N, j, L, self.cap, precision)
            rows = [index[(n, j)] for n in _degrees(N, j, L)]
            K[np.ix_(rows, rows)] = block
        return K


def assemble_spin_basis(N, L, cap, precision="extended"):
    """Solve every block ``j = -L .. L`` and merge into a sorted basis."""
    if L < abs(N):
        raise ValueError(f"bandlimit L={L} below |N|={abs(N)}")
    if cap.beyond_hemisphere:
        log.warning("cap radius %.6g deg is 90 degrees or more", cap.theta_deg)
    entries = []
    for j in range(-L, L + 1):
        entries.extend(solve_block(build_block(N, j, L, cap, precision)))
    entries.sort(key=lambda e: (-e.lam, e.order, e.chi))
    return SpinSlepianBasis(spin=N, bandlimit=L, cap=cap, entries=tuple(entries),
                            shannon=shannon_spin(N, L, cap))


# ---------------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True)
class BlockReport:
    spin: int
    order: int
    commutation_residual: float
    eigvec_agreement: float
    trace_gap: float


def eigvec_agreement(kernel, vectors, lams, cluster_tol=1e-9):
    """
    Worst agreement between given eigenvectors and those of a dense solve.

    Each vector is matched to the dense eigenvalue closest to its
    concentration. Dense eigenvalues within ``cluster_tol * ||K||`` of that
    value form a cluster whose eigenvectors are numerically
    indistinguishable, and agreement is the norm of the projection onto
    the cluster's span (``|<v, w>|`` for an isolated eigenvalue).
    """
    dense = eigh_dense(kernel)
    scale = max(np.max(np.abs(dense.values)), np.finfo(float).tiny)
    worst = 1.0
    for lam, v in zip(lams, vectors.T):
        nearest = dense.values[np.argmin(np.abs(dense.values - lam))]
        cluster = np.abs(dense.values - nearest) <= cluster_tol * scale
        worst = min(worst, float(np.linalg.norm(dense.vectors[:, cluster].T @ v)))
    return worst


def verify_block(p):
    """Commutation residual, eigenvector agreement and trace gap of a block."""
    K = p.kernel
    T = p.commuting.to_dense()
    norm = np.linalg.norm(K) * np.linalg.norm(T)
    residual = float(np.linalg.norm(K @ T - T @ K) / norm) if norm > 0 else 0.0
    entries = solve_block(p)
    V = np.column_stack([e.coefficients for e in entries])
    lams = np.array([e.lam for e in entries])
    agreement = 1.0 if len(entries) == 1 else eigvec_agreement(K, V, lams)
    trace_gap = abs(float(np.trace(K)) - float(np.sum(lams)))
    return BlockReport(spin=p.spin, order=p.order, commutation_residual=residual,
                       eigvec_agreement=agreement, trace_gap=trace_gap)


def harmonic_matrix(N, L, p):
    """
    ``sY_{n,j}(p)`` for every harmonic up to ``L``; rows follow the points
    (flattened), columns follow :meth:`SpinSlepianBasis.harmonic_index`.
    """
    t = np.ravel(np.asarray(p.t, dtype=float))
    phi = np.ravel(np.asarray(p.phi, dtype=float))
    flat = SpinPoint(t, phi)
    columns = {j: spin_column(N, j, L, flat) for j in range(-L, L + 1)}
    Y = np.empty((len(t), (L + 1) ** 2 - N * N), dtype=complex)
    col = 0
    for n in range(abs(N), L + 1):
        for j in range(-n, n + 1):
            Y[:, col] = columns[j].degree(n)
            col += 1
    return Y


def spatial_gram(basis, over="cap"):
    """
    Gram matrix of the Slepian functions by quadrature over the cap or the
    whole sphere.

    Gauss-Legendre in ``t`` with ``L + 2`` nodes and ``2L + 2`` equispaced
    longitudes integrate every product of two bandlimited spin-``N``
    functions exactly.
    """
    L = basis.bandlimit
    lower = {"cap": basis.cap.b, "sphere": -1.0}[over]
    t, wt = gauss_legendre(L + 2).mapped(lower, 1.0)
    n_phi = 2 * L + 2
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(t, phi, indexing="ij")
    w = np.outer(wt, np.full(n_phi, 2.0 * math.pi / n_phi)).ravel()
    G = harmonic_matrix(basis.spin, L, SpinPoint(tt, pp)) @ basis.coefficient_matrix()
    gram = (G.conj().T * w) @ G
    return gram.real, float(np.max(np.abs(gram.imag), initial=0.0))
