"""
Invariant checks for Slepian bases.

Each check yields a :class:`Check`; a basis passes when every check does.
The checks apply both to freshly assembled bases and to bases read back
from a BasisFile.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cap_concentration import (
    SpinSlepianBasis,
    build_block,
    shannon_spin,
    spatial_gram,
    verify_block,
)
from .field_assembly import as_ranked, shannon_ranked, type_spins

COMMUTATION_TOL = 1e-10
EIGVEC_TOL = 1e-8
TRACE_TOL = 1e-9
GRAM_TOL = 1e-10
KGRAM_TOL = 1e-9
SPATIAL_TOL = 1e-7
DEEP_MAX_L = 8


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def spin_groups(basis):
    """
    Split a ranked basis into one :class:`SpinSlepianBasis` per type index.

    Returns
    -------
    dict
        ``type_index -> SpinSlepianBasis`` with entries in source order.
    """
    basis = as_ranked(basis)
    groups = {}
    for e in basis.entries:
        groups.setdefault(e.type_index, []).append(e)
    spins = type_spins(basis.rank, basis.entries[0].spin if basis.rank == "spin" else None)
    out = {}
    for ti, es in sorted(groups.items()):
        es.sort(key=lambda e: e.source_index)
        N = spins[ti]
        out[ti] = SpinSlepianBasis(spin=N, bandlimit=basis.bandlimit, cap=basis.cap,
                                   entries=tuple(e.slepian for e in es),
                                   shannon=shannon_spin(N, basis.bandlimit, basis.cap))
    return out


def block_checks(N, L, cap):
    """Commutation, eigenvector agreement and per-block trace for spin ``N``."""
    worst_comm, worst_agree, worst_trace = 0.0, 1.0, 0.0
    where = {}
    for j in range(-L, L + 1):
        r = verify_block(build_block(N, j, L, cap))
        if r.commutation_residual >= worst_comm:
            worst_comm, where["comm"] = r.commutation_residual, j
        if r.eigvec_agreement <= worst_agree:
            worst_agree, where["agree"] = r.eigvec_agreement, j
        if r.trace_gap >= worst_trace:
            worst_trace, where["trace"] = r.trace_gap, j
    return [
        Check(f"commutation N={N}", worst_comm < COMMUTATION_TOL,
              f"max residual {worst_comm:.3g} at block j={where['comm']}"),
        Check(f"eigenvector agreement N={N}", worst_agree > 1.0 - EIGVEC_TOL,
              f"min |<v,w>| {worst_agree:.17g} at block j={where['agree']}"),
        Check(f"block trace N={N}", worst_trace < TRACE_TOL,
              f"max |trace K - sum lambda| {worst_trace:.3g} at block j={where['trace']}"),
    ]


def spin_basis_checks(ti, sb, kernel, deep=False):
    """Orthogonality, range and trace checks for the basis of one type index."""
    tag = f"type {ti} (N={sb.spin})"
    lam = sb.eigenvalues
    C = sb.coefficient_matrix()
    gram_err = float(np.max(np.abs(C.T @ C - np.eye(C.shape[1]))))
    kgram_err = float(np.max(np.abs(C.T @ kernel @ C - np.diag(lam))))
    trace_rel = abs(lam.sum() - sb.shannon) / sb.shannon
    checks = [
        Check(f"entry count {tag}", len(sb) == (sb.bandlimit + 1) ** 2 - sb.spin ** 2,
              f"{len(sb)} entries"),
        Check(f"lambda range {tag}", bool(np.all((lam >= 0.0) & (lam <= 1.0))),
              f"min {lam.min():.3g}, max {lam.max():.17g}"),
        Check(f"coefficient orthonormality {tag}", gram_err < GRAM_TOL,
              f"max |C^T C - I| {gram_err:.3g}"),
        Check(f"kernel orthogonality {tag}", kgram_err < KGRAM_TOL,
              f"max |C^T K C - diag(lambda)| {kgram_err:.3g}"),
        Check(f"trace equals Shannon {tag}", trace_rel < TRACE_TOL,
              f"relative gap {trace_rel:.3g}"),
    ]
    if deep:
        g_cap, im_cap = spatial_gram(sb, "cap")
        g_sph, im_sph = spatial_gram(sb, "sphere")
        err_cap = max(float(np.max(np.abs(g_cap - np.diag(lam)))), im_cap)
        err_sph = max(float(np.max(np.abs(g_sph - np.eye(len(sb))))), im_sph)
        checks += [
            Check(f"spatial cap orthogonality {tag}", err_cap < SPATIAL_TOL,
                  f"max error {err_cap:.3g}"),
            Check(f"spatial sphere orthonormality {tag}", err_sph < SPATIAL_TOL,
                  f"max error {err_sph:.3g}"),
        ]
    return checks


def verify_basis(basis, deep=False, blocks=True):
    """
    Run the invariant suite.

    Parameters
    ----------
    basis : RankedSlepianBasis or SpinSlepianBasis
    deep : bool
        Add quadrature-based spatial orthogonality (only for ``L <= 8``).
    blocks : bool
        Re-solve every block and check commutation and eigenvector agreement.

    Returns
    -------
    list of Check
    """
    basis = as_ranked(basis)
    L, cap = basis.bandlimit, basis.cap
    spin = basis.entries[0].spin if basis.rank == "spin" else None
    checks = []

    lam = basis.eigenvalues
    checks.append(Check("lambda descending", bool(np.all(np.diff(lam) <= 0.0)),
                        f"{len(lam)} values"))
    expected = shannon_ranked(basis.rank, L, cap, spin)
    rel = abs(basis.shannon - expected) / expected
    checks.append(Check("Shannon field", rel < 1e-12,
                        f"stored {basis.shannon:.17g}, formula {expected:.17g}"))
    if deep and L > DEEP_MAX_L:
        checks.append(Check("deep suite", True, f"skipped, L={L} exceeds {DEEP_MAX_L}"))
        deep = False

    groups = spin_groups(basis)
    expected_types = set(type_spins(basis.rank, spin))
    checks.append(Check("type indices", set(groups) == expected_types,
                        f"found {sorted(groups)}"))
    kernels = {}
    for ti, sb in groups.items():
        if sb.spin not in kernels:
            kernels[sb.spin] = sb.kernel_matrix()
            if blocks:
                checks.extend(block_checks(sb.spin, L, cap))
        checks.extend(spin_basis_checks(ti, sb, kernels[sb.spin], deep))
    return checks
