import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import kernel_entry_quad
from spinslepian.cap_concentration import (
    BlockProblem,
    ConsistencyError,
    PolarCap,
    assemble_spin_basis,
    build_block,
    commuting_block,
    kernel_block,
    shannon_spin,
    solve_block,
    spatial_gram,
    verify_block,
)

CAP40 = PolarCap.from_degrees(40.0)
# cos(pi - 1e-9) rounds to -1: the whole sphere
SPHERE = PolarCap(math.pi - 1e-9)


def test_polar_cap():
    assert CAP40.b == pytest.approx(math.cos(math.radians(40.0)), abs=1e-15)
    assert CAP40.theta_deg == 40.0
    assert 0 < CAP40.area_fraction < 1
    for bad in (0.0, math.pi, -0.1, 4.0):
        with pytest.raises(ValueError):
            PolarCap(bad)
    assert PolarCap.from_degrees(90.0).beyond_hemisphere
    assert not CAP40.beyond_hemisphere
    assert SPHERE.b == -1.0


def test_kernel_L0():
    for theta in (10.0, 40.0, 60.0, 130.0):
        cap = PolarCap.from_degrees(theta)
        K = kernel_block(0, 0, 0, cap)
        assert K.shape == (1, 1)
        assert K[0, 0] == pytest.approx((1 - cap.b) / 2, abs=1e-16)


@pytest.mark.parametrize("N", [-2, 0, 1])
def test_kernel_whole_sphere_is_identity(N):
    L = 6
    for j in range(-L, L + 1):
        K = kernel_block(N, j, L, SPHERE)
        assert np.max(np.abs(K - np.eye(len(K)))) < 1e-14


@settings(max_examples=25, deadline=None)
@given(N=st.integers(-2, 2), j=st.integers(-6, 6), theta=st.floats(5.0, 170.0),
       dn=st.integers(0, 3), dn2=st.integers(0, 3))
def test_kernel_entries_match_quadrature_oracle(N, j, theta, dn, dn2):
    n0 = max(abs(N), abs(j))
    n, n2 = n0 + dn, n0 + dn2
    L = n0 + 3
    cap = PolarCap.from_degrees(theta)
    K = kernel_block(N, j, L, cap)
    assert K[dn, dn2] == pytest.approx(kernel_entry_quad(N, j, n, n2, cap.b), abs=1e-14)


def test_kernel_precision_paths_agree():
    for N, j in [(0, 0), (2, -3), (-1, 5)]:
        K_ext = kernel_block(N, j, 10, CAP40, "extended")
        K_dbl = kernel_block(N, j, 10, CAP40, "double")
        assert np.max(np.abs(K_ext - K_dbl)) < 1e-13
    with pytest.raises(ValueError):
        kernel_block(0, 0, 3, CAP40, "quad")


def test_kernel_symmetric_and_real():
    K = kernel_block(1, -2, 9, CAP40)
    assert K.dtype == np.float64
    assert np.array_equal(K, K.T)


def test_kernel_invalid_degrees():
    with pytest.raises(ValueError):
        kernel_block(0, 5, 4, CAP40)
    with pytest.raises(ValueError):
        kernel_block(3, 0, 2, CAP40)


@pytest.mark.parametrize("N", [-2, -1, 0, 1, 2])
def test_kernel_trace_sum(N):
    L = 8
    total = sum(np.trace(kernel_block(N, j, L, CAP40)) for j in range(-L, L + 1))
    assert total == pytest.approx(((L + 1) ** 2 - N * N) * (1 - CAP40.b) / 2, rel=1e-12)


def test_commuting_block_examples():
    L = 7
    T = commuting_block(0, 0, L, CAP40)
    assert T.diagonal[0] == 0.0
    assert T.off_diagonal[0] == pytest.approx(-L * (L + 2) / math.sqrt(3), rel=1e-15)
    T = commuting_block(1, 1, 1, CAP40)
    assert len(T) == 1
    assert T.diagonal[0] == pytest.approx(-2 * CAP40.b + 1, rel=1e-15)


def test_commuting_block_off_diagonals_nonzero():
    for N in (-2, 0, 2):
        for j in range(-10, 11):
            if max(abs(N), abs(j)) < 10:
                assert np.all(commuting_block(N, j, 10, CAP40).off_diagonal != 0)


def test_solve_block_one_by_one():
    p = build_block(0, 4, 4, CAP40)
    (entry,) = solve_block(p)
    assert entry.lam == p.kernel[0, 0]
    assert entry.coefficients.tolist() == [1.0]
    report = verify_block(p)
    assert report.eigvec_agreement == 1.0


@pytest.mark.parametrize("N,j", [(0, 0), (1, -3), (-2, 2), (2, 7)])
def test_solve_block_residual_and_sign(N, j):
    p = build_block(N, j, 12, CAP40)
    for e in solve_block(p):
        v = e.coefficients
        assert np.linalg.norm(p.kernel @ v - e.lam * v) < 1e-8
        assert abs(np.dot(v, v) - 1) < 1e-12
        assert v[np.argmax(np.abs(v))] > 0
        assert 0.0 <= e.lam <= 1.0


def test_solve_block_whole_sphere():
    for e in solve_block(build_block(1, 0, 6, SPHERE)):
        assert e.lam == pytest.approx(1.0, abs=1e-13)


def test_solve_block_rejects_inconsistent_kernel():
    good = build_block(0, 0, 3, CAP40)
    bad = BlockProblem(spin=0, order=0, bandlimit=3, cap=CAP40, degrees=good.degrees,
                       kernel=2.0 * np.eye(4), commuting=good.commuting)
    with pytest.raises(ConsistencyError, match=r"N=0, j=0"):
        solve_block(bad)


def test_assemble_counts_and_order():
    b0 = assemble_spin_basis(0, 18, CAP40)
    b2 = assemble_spin_basis(2, 18, CAP40)
    assert len(b0) == 361 and len(b2) == 357
    for b in (b0, b2):
        lam = b.eigenvalues
        assert np.all(np.diff(lam) <= 0)
        assert lam[0] <= 1.0
    keys = [(-e.lam, e.order, e.chi) for e in b0.entries]
    assert keys == sorted(keys)


def test_assemble_deterministic():
    a = assemble_spin_basis(-1, 9, CAP40)
    b = assemble_spin_basis(-1, 9, CAP40)
    assert np.array_equal(a.coefficient_matrix(), b.coefficient_matrix())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_assemble_rejects_small_bandlimit():
    with pytest.raises(ValueError):
        assemble_spin_basis(3, 2, CAP40)


def test_wide_cap_warns(caplog):
    with caplog.at_level(logging.WARNING):
        basis = assemble_spin_basis(0, 3, PolarCap.from_degrees(120.0))
    assert "90 degrees" in caplog.text
    assert sum(basis.eigenvalues) == pytest.approx(basis.shannon, rel=1e-12)


def test_shannon_spin():
    assert shannon_spin(0, 18, CAP40) == pytest.approx(42.229, abs=5e-4)
    assert shannon_spin(0, 18, CAP40) == pytest.approx(361 * (1 - math.cos(math.radians(40))) / 2, rel=1e-15)
    assert shannon_spin(1, 5, PolarCap(1e-9)) == pytest.approx(0.0, abs=1e-15)
    assert shannon_spin(1, 5, SPHERE) == 35.0


@pytest.mark.parametrize("N", [-2, 0, 1])
def test_basis_transform_round_trip(N):
    basis = assemble_spin_basis(N, 10, CAP40)
    C = basis.coefficient_matrix()
    # every harmonic's coefficient vector is recovered from the Slepian coefficients
    E = np.eye(C.shape[0])
    assert np.max(np.abs(C @ (C.T @ E) - E)) < 1e-10


@pytest.mark.parametrize("N", [-2, 0, 2])
def test_weighted_outer_product_reproduces_kernel(N):
    basis = assemble_spin_basis(N, 6, CAP40)
    C = basis.coefficient_matrix()
    K = basis.kernel_matrix()
    assert np.max(np.abs((C * basis.eigenvalues) @ C.T - K)) < 1e-9


@pytest.mark.parametrize("N,L", [(0, 4), (1, 6), (-2, 5)])
def test_spatial_orthogonality(N, L):
    basis = assemble_spin_basis(N, L, CAP40)
    g_cap, im = spatial_gram(basis, "cap")
    assert im < 1e-12
    assert np.max(np.abs(g_cap - np.diag(basis.eigenvalues))) < 1e-7
    g_sph, _ = spatial_gram(basis, "sphere")
    assert np.max(np.abs(g_sph - np.eye(len(basis)))) < 1e-7


@pytest.mark.parametrize("N", [0, 1, -2])
def test_lambda1_monotone_in_cap_size(N):
    lam1 = [assemble_spin_basis(N, 6, PolarCap.from_degrees(th)).eigenvalues[0]
            for th in (10, 20, 30, 45, 60, 90, 120, 150)]
    assert np.all(np.diff(lam1) >= -1e-15)
