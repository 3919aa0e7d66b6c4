"""
Vector and rank-2 tensor Slepian bases built from spin-weighted ones.

Every vector or tensor type multiplies a spin-weighted Slepian function by
a fixed unit vector or unit tensor of the local frame:

=====  =============================  ====
type   vector / tensor factor         spin
=====  =============================  ====
v1     xi                             0
v2     tau_+                          +1
v3     tau_-                          -1
t1     xi (x) xi                      0
t2     xi (x) tau_+                   +1
t3     xi (x) tau_-                   -1
t4     tau_+ (x) xi                   +1
t5     tau_- (x) xi                   -1
t6     i_tan / sqrt(2)                0
t7     j_tan / sqrt(2)                0
t8     tau_+ (x) tau_+                +2
t9     tau_- (x) tau_-                -2
=====  =============================  ====

All factors have unit Euclidean/Frobenius norm, so the pointwise norm of
a field sample is ``|G(p)|`` for its spin-weighted source ``G``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cap_concentration import SpinSlepianBasis, assemble_spin_basis
from .spin_harmonics import SpinPoint, spin_column

RANKS = ("spin", "scalar", "vector", "tensor")

SPIN_OF_TYPE = {
    "spin": None,
    "scalar": {1: 0},
    "vector": {1: 0, 2: +1, 3: -1},
    "tensor": {1: 0, 2: +1, 3: -1, 4: +1, 5: -1, 6: 0, 7: 0, 8: +2, 9: -2},
}

MIN_BANDLIMIT = {"spin": 0, "scalar": 0, "vector": 1, "tensor": 2}


@dataclass(frozen=True)
class LocalFrame:
    eps_r: np.ndarray
    eps_phi: np.ndarray
    eps_t: np.ndarray
    tau_plus: np.ndarray
    tau_minus: np.ndarray
    i_tan: np.ndarray
    j_tan: np.ndarray


def local_frame(p):
    """
    Local frame at ``p``; arrays carry the Cartesian component on the last
    axis (last two for tensors).
    """
    t = np.asarray(p.t, dtype=float)
    phi = np.asarray(p.phi, dtype=float)
    s = np.sqrt(1.0 - t * t)
    c, sn = np.cos(phi), np.sin(phi)
    zero = np.zeros(np.broadcast(t, phi).shape)
    eps_r = np.stack([s * c, s * sn, t + zero], axis=-1)
    eps_phi = np.stack([-sn + zero, c + zero, zero], axis=-1)
    eps_t = np.stack([-t * c, -t * sn, s + zero], axis=-1)
    tau_plus = -(eps_t + 1j * eps_phi) / math.sqrt(2.0)
    tau_minus = -(eps_t - 1j * eps_phi) / math.sqrt(2.0)
    outer = lambda a, b: a[..., :, None] * b[..., None, :]
    i_tan = outer(eps_phi, eps_phi) + outer(eps_t, eps_t)
    j_tan = outer(eps_t, eps_phi) - outer(eps_phi, eps_t)
    return LocalFrame(eps_r, eps_phi, eps_t, tau_plus, tau_minus, i_tan, j_tan)


def unit_factor(rank, type_index, frame):
    """Unit vector/tensor multiplying the spin-weighted source of a type."""
    outer = lambda a, b: a[..., :, None] * b[..., None, :]
    xi, tp, tm = frame.eps_r, frame.tau_plus, frame.tau_minus
    if rank in ("spin", "scalar"):
        return np.ones(xi.shape[:-1] + (1,))
    if rank == "vector":
        return {1: xi, 2: tp, 3: tm}[type_index]
    if rank == "tensor":
        root2 = math.sqrt(2.0)
        factors = {
            1: lambda: outer(xi, xi),
            2: lambda: outer(xi, tp),
            3: lambda: outer(xi, tm),
            4: lambda: outer(tp, xi),
            5: lambda: outer(tm, xi),
            6: lambda: frame.i_tan / root2,
            7: lambda: frame.j_tan / root2,
            8: lambda: outer(tp, tp),
            9: lambda: outer(tm, tm),
        }
        return factors[type_index]()
    raise ValueError(f"unknown rank {rank!r}")


@dataclass(frozen=True)
class RankedEntry:
    alpha: int
    lam: float
    type_index: int
    spin: int
    source_index: int
    slepian: object = field(repr=False)


@dataclass(frozen=True)
class RankedSlepianBasis:
    rank: str
    bandlimit: int
    cap: object
    entries: tuple = field(repr=False)
    shannon: float

    def __len__(self):
        return len(self.entries)

    @property
    def eigenvalues(self):
        return np.array([e.lam for e in self.entries])

    def entry(self, alpha):
        if not 1 <= alpha <= len(self.entries):
            raise IndexError(f"alpha={alpha} outside 1..{len(self.entries)}")
        return self.entries[alpha - 1]


def _check_rank(rank, L, spin):
    if rank not in RANKS:
        raise ValueError(f"rank must be one of {RANKS}, got {rank!r}")
    if rank == "spin":
        if spin is None:
            raise ValueError("rank 'spin' needs a spin weight")
        if L < abs(spin):
            raise ValueError(f"bandlimit L={L} below |N|={abs(spin)}")
    elif spin is not None:
        raise ValueError("a spin weight is only accepted with rank 'spin'")
    if L < MIN_BANDLIMIT[rank]:
        raise ValueError(
            f"rank {rank!r} needs bandlimit >= {MIN_BANDLIMIT[rank]}, got {L}")


def type_spins(rank, spin=None):
    if rank == "spin":
        return {1: spin}
    return SPIN_OF_TYPE[rank]


def shannon_ranked(rank, L, cap, spin=None):
    """Shannon number of the scalar, vector or tensor basis."""
    _check_rank(rank, L, spin)
    count = sum((L + 1) ** 2 - N * N for N in type_spins(rank, spin).values())
    return count * cap.area_fraction


def from_spin_bases(rank, L, cap, spin_bases, spin=None):
    """Merge spin-weighted bases into a ranked basis according to the type map."""
    merged = []
    for type_index, N in type_spins(rank, spin).items():
        for source_index, e in enumerate(spin_bases[N].entries):
            merged.append((e.lam, type_index, source_index, N, e))
    merged.sort(key=lambda item: (-item[0], item[1], item[2]))
    entries = tuple(
        RankedEntry(alpha=a, lam=lam, type_index=ti, spin=N,
                    source_index=si, slepian=e)
        for a, (lam, ti, si, N, e) in enumerate(merged, start=1))
    return RankedSlepianBasis(rank=rank, bandlimit=L, cap=cap, entries=entries,
                              shannon=shannon_ranked(rank, L, cap, spin))


def assemble_ranked_basis(rank, L, cap, spin=None, precision="extended"):
    """
    Build a scalar, vector or tensor Slepian basis (or a single spin basis
    with ``rank="spin"``). Each distinct spin weight is solved once and shared
    by all types that use it.
    """
    _check_rank(rank, L, spin)
    spins = sorted(set(type_spins(rank, spin).values()), key=lambda N: (abs(N), -N))
    spin_bases = {N: assemble_spin_basis(N, L, cap, precision) for N in spins}
    return from_spin_bases(rank, L, cap, spin_bases, spin)


def as_ranked(basis):
    """Wrap a :class:`SpinSlepianBasis` as a rank ``"spin"`` basis."""
    if isinstance(basis, RankedSlepianBasis):
        return basis
    if isinstance(basis, SpinSlepianBasis):
        return from_spin_bases("spin", basis.bandlimit, basis.cap,
                               {basis.spin: basis}, spin=basis.spin)
    raise TypeError(f"expected a Slepian basis, got {type(basis).__name__}")


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class FieldSample:
    point: SpinPoint
    value: complex | np.ndarray
    norm: float


def spin_slepian_values(entry, L, N, p):
    """Spin-weighted Slepian function ``sum_n c_n sY_{n,j}`` at ``p``."""
    column = spin_column(N, entry.order, L, p)
    c = entry.coefficients
    return np.tensordot(c, column.values[entry.n_min - column.n_min:], axes=(0, 0))


def evaluate(basis, alpha, p):
    """
    Vectorized evaluation of Slepian function ``alpha`` (1-based).

    Returns
    -------
    values : ndarray, complex
        Shape ``point_shape + (n_components,)``; the 3x3 tensor is flattened
        row-major.
    norms : ndarray
        Pointwise Euclidean/Frobenius norm.
    """
    basis = as_ranked(basis)
    e = basis.entry(alpha)
    g = spin_slepian_values(e.slepian, basis.bandlimit, e.spin, p)
    factor = unit_factor(basis.rank, e.type_index, local_frame(p))
    factor = factor.reshape(factor.shape[:np.ndim(g)] + (-1,))
    values = np.asarray(g)[..., None] * factor
    # every type factor has unit norm
    return values, np.abs(g)


def eval_slepian(basis, alpha, p):
    """Evaluate one Slepian function at a single point."""
    values, norm = evaluate(basis, alpha, p)
    rank = as_ranked(basis).rank
    if rank in ("spin", "scalar"):
        value = complex(values[..., 0])
    elif rank == "vector":
        value = values
    else:
        value = values.reshape(values.shape[:-1] + (3, 3))
    return FieldSample(point=p, value=value, norm=float(norm))


def grid_points(n_lat, n_lon):
    """
    Equiangular grid, offset by half a cell from the poles, row-major
    latitude (north to south) then longitude.

    Returns
    -------
    lat_deg, lon_deg : ndarray
        Flattened coordinates, length ``n_lat * n_lon``.
    """
    if n_lat < 2 or n_lon < 2:
        raise ValueError("grid needs at least 2 x 2 cells")
    lat = 90.0 - (np.arange(n_lat) + 0.5) * (180.0 / n_lat)
    lon = np.arange(n_lon) * (360.0 / n_lon)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    return lat_g.ravel(), lon_g.ravel()


def grid_spin_point(lat_deg, lon_deg):
    return SpinPoint(np.sin(np.radians(lat_deg)), np.radians(lon_deg))


def eval_grid_arrays(basis, alpha, n_lat, n_lon):
    """``(lat_deg, lon_deg, values, norms)`` on the grid of :func:`grid_points`."""
    lat, lon = grid_points(n_lat, n_lon)
    values, norms = evaluate(basis, alpha, grid_spin_point(lat, lon))
    return lat, lon, values, norms


def eval_grid(basis, alpha, n_lat, n_lon):
    """List of :class:`FieldSample` on the grid of :func:`grid_points`."""
    lat, lon, values, norms = eval_grid_arrays(basis, alpha, n_lat, n_lon)
    rank = as_ranked(basis).rank
    samples = []
    for i in range(len(lat)):
        p = grid_spin_point(lat[i], lon[i])
        v = values[i]
        if rank in ("spin", "scalar"):
            v = complex(v[0])
        elif rank == "tensor":
            v = v.reshape(3, 3)
        samples.append(FieldSample(point=p, value=v, norm=float(norms[i])))
    return samples
