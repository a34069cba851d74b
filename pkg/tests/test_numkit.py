from __future__ import annotations

import math

import numpy as np
import pytest

from ashn import numkit as nk
from ashn.config import DEFAULT_TOL
from ashn.errors import DomainError, NumericError, PreconditionError

rng = np.random.default_rng(20240611)


def rand_herm(n, rng=rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def rand_unitary(n, rng=rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / abs(np.diag(r)))


def taylor_expm(h, t, terms=64):
    """Scaled-and-squared Taylor series for exp(-iHt), independent of any eigensolver."""
    a = -1j * t * np.asarray(h)
    s = max(0, int(math.ceil(math.log2(max(np.abs(a).sum(axis=1).max(), 1e-300)))) + 1)
    a = a / 2**s
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


# herm_eig


def test_herm_eig_pauli_z():
    w, v = nk.herm_eig(nk.Z)
    assert np.allclose(w, [-1, 1], atol=1e-15)


def test_herm_eig_xy_block():
    w, _ = nk.herm_eig(0.5 * (nk.XX + nk.YY))
    assert np.allclose(w, [-1, 0, 0, 1], atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 8, 16])
def test_herm_eig_reconstruction_and_oracle(n):
    for _ in range(5):
        h = rand_herm(n)
        w, v = nk.herm_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.abs(v @ np.diag(w) @ v.conj().T - h).max() <= 1e-11
        assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-11
        for k in range(n):
            assert np.linalg.norm(h @ v[:, k] - w[k] * v[:, k]) <= 1e-11
        assert np.abs(w - np.linalg.eigvalsh(h)).max() <= 1e-11


def test_herm_eig_degenerate_and_batched():
    u = rand_unitary(6)
    h = u @ np.diag([1.0, 1.0, 1.0, -2.0, -2.0, 5.0]) @ u.conj().T
    w, v = nk.herm_eig(np.stack([h, rand_herm(6), np.zeros((6, 6))]))
    assert w.shape == (3, 6)
    assert np.abs(w[0] - [-2, -2, 1, 1, 1, 5]).max() <= 1e-12
    assert np.abs(w[2]).max() == 0
    assert np.abs(v[0] @ np.diag(w[0]) @ v[0].conj().T - h).max() <= 1e-11


def test_herm_eig_conjugation_invariance():
    h = rand_herm(5)
    u = rand_unitary(5)
    assert np.abs(nk.herm_eig(h)[0] - nk.herm_eig(u @ h @ u.conj().T)[0]).max() <= 1e-10


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(PreconditionError):
        nk.herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(PreconditionError):
        nk.herm_eig(np.eye(17))


def test_herm_eig_nonconvergence_reported():
    tol = DEFAULT_TOL.replace(jacobi_max_sweeps=1)
    with pytest.raises(NumericError):
        nk.herm_eig(rand_herm(8), tol)


# unitary_eig


def test_unitary_eig_identity():
    w, v = nk.unitary_eig(np.eye(4))
    assert np.abs(w - 1).max() <= 1e-15


def test_unitary_eig_diag_phases():
    w, _ = nk.unitary_eig(np.diag([1j, -1j]))
    assert sorted(np.round(np.angle(w), 14)) == [round(-math.pi / 2, 14), round(math.pi / 2, 14)]


@pytest.mark.parametrize("n", [2, 4, 8])
def test_unitary_eig_matches_herm_eig_oracle(n):
    for _ in range(5):
        h = rand_herm(n)
        t = 0.37
        u = nk.expm_hermitian(h, t)
        w, v = nk.unitary_eig(u)
        assert np.abs(np.abs(w) - 1).max() <= 1e-10
        assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-11
        assert np.abs(u @ v - v * w).max() <= 1e-11
        expect = np.sort(np.mod(-t * nk.herm_eig(h)[0], 2 * math.pi))
        got = np.sort(np.mod(np.angle(w), 2 * math.pi))
        assert np.abs(got - expect).max() <= 1e-10


def test_unitary_eig_degenerate_clusters():
    # conjugated diag with repeated and near-repeated eigenvalues
    u = rand_unitary(8)
    ph = np.array([0.3, 0.3, 0.3, -1.2, -1.2, 2.0, 2.0 + 1e-9, math.pi])
    m = u @ np.diag(np.exp(1j * ph)) @ u.conj().T
    w, v = nk.unitary_eig(m)
    assert np.abs(m @ v - v * w).max() <= 1e-11
    assert np.abs(v.conj().T @ v - np.eye(8)).max() <= 1e-11


def test_unitary_eig_conjugate_pair_cluster():
    # C = (U+U^dag)/2 degenerate but S separates: e^{+ia}, e^{-ia}
    u = rand_unitary(4)
    m = u @ np.diag(np.exp(1j * np.array([0.7, -0.7, 0.7, -0.7]))) @ u.conj().T
    w, v = nk.unitary_eig(m)
    assert np.abs(m @ v - v * w).max() <= 1e-11


def test_unitary_eig_rejects_non_unitary():
    with pytest.raises(PreconditionError):
        nk.unitary_eig(2 * np.eye(2))


# expm_hermitian


def test_expm_zero_time_is_identity():
    assert np.abs(nk.expm_hermitian(rand_herm(4), 0.0) - np.eye(4)).max() <= 1e-14


def test_expm_z_pi():
    assert np.abs(nk.expm_hermitian(nk.Z, math.pi) + np.eye(2)).max() <= 1e-15


@pytest.mark.parametrize("n", [2, 4, 8])
def test_expm_matches_taylor_oracle(n):
    h = rand_herm(n)
    u = nk.expm_hermitian(h, 0.7)
    assert np.abs(u - taylor_expm(h, 0.7)).max() <= 1e-10
    assert nk.is_unitary(u, 1e-11)


def test_expm_inverse_property():
    for _ in range(10):
        h = rand_herm(4)
        t = rng.uniform(-3, 3)
        assert np.abs(nk.expm_hermitian(h, t) @ nk.expm_hermitian(h, -t) - np.eye(4)).max() <= 1e-10


def test_expm_broadcast_times():
    h = rand_herm(4)
    ts = np.array([0.1, 0.5, 2.0])
    us = nk.expm_hermitian(np.broadcast_to(h, (3, 4, 4)), ts)
    for k, t in enumerate(ts):
        assert np.abs(us[k] - taylor_expm(h, t)).max() <= 1e-10


# svd


def test_svd_identity():
    _, s, _ = nk.svd(np.eye(5))
    assert np.abs(s - 1).max() <= 1e-15


def test_svd_diag():
    _, s, _ = nk.svd(np.diag([2j, 0]))
    assert np.abs(s - [2, 0]).max() <= 1e-15


@pytest.mark.parametrize("n", [2, 3, 8, 16])
def test_svd_reconstruction(n):
    for _ in range(3):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u, s, vd = nk.svd(m)
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
        assert np.abs(u @ np.diag(s) @ vd - m).max() <= 1e-10
        assert nk.is_unitary(u, 1e-11) and nk.is_unitary(vd, 1e-11)
        assert np.abs(s - np.linalg.svd(m, compute_uv=False)).max() <= 1e-10


def test_svd_rank_deficient():
    a = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    m = a @ a.conj().T
    u, s, vd = nk.svd(m)
    assert np.abs(s[2:]).max() <= 1e-12
    assert np.abs(u @ np.diag(s) @ vd - m).max() <= 1e-10
    assert nk.is_unitary(u, 1e-11) and nk.is_unitary(vd, 1e-11)


def test_svd_of_unitary_is_flat():
    _, s, _ = nk.svd(rand_unitary(8))
    assert np.abs(s - 1).max() <= 1e-10


# sinc_inv


def test_sinc_inv_anchor_values():
    assert abs(nk.sinc_inv(0.0) - math.pi) <= 1e-12
    assert nk.sinc_inv(1.0) == 0.0
    assert abs(nk.sinc_inv(2 / math.pi) - math.pi / 2) <= 1e-12


def test_sinc_inv_round_trip_and_monotone():
    s = np.linspace(0, 1, 1000)
    w = np.array([nk.sinc_inv(v) for v in s])
    assert np.all(np.diff(w) < 0)
    assert np.abs(nk.sinc(w) - s).max() <= 1e-12
    assert w.min() >= 0 and w.max() <= math.pi


def test_sinc_inv_near_one():
    for eps in [1e-4, 1e-8, 1e-12, 1e-15]:
        w = nk.sinc_inv(1 - eps)
        assert abs(nk.sinc(w) - (1 - eps)) <= 1e-13


def test_sinc_inv_clamp_and_domain():
    assert nk.sinc_inv(1 + 5e-13) == 0.0
    assert abs(nk.sinc_inv(-5e-13) - math.pi) <= 1e-12
    with pytest.raises(DomainError):
        nk.sinc_inv(1.01)
    with pytest.raises(DomainError):
        nk.sinc_inv(-0.1)


# root2d


def test_root2d_linear():
    r = nk.root2d(lambda a, b: (a - 0.3) + 1j * (b - 0.5), ((0, 1), (0, 1)))
    assert abs(r.alpha - 0.3) <= 1e-10 and abs(r.beta - 0.5) <= 1e-10
    assert r.residual <= 1e-10


def test_root2d_golden():
    r = nk.root2d(lambda a, b: (a * a + b - 1) + 1j * (a - b), ((0, 1), (0, 1)))
    phi = (math.sqrt(5) - 1) / 2
    assert abs(r.alpha - phi) <= 1e-9 and abs(r.beta - phi) <= 1e-9


def test_root2d_stays_in_box_and_is_deterministic():
    f = lambda a, b: np.sin(3 * a) * np.cos(2 * b) + 1j * (a + b - 1.2)  # noqa: E731
    r1 = nk.root2d(f, ((0, 1), (0, 2)))
    r2 = nk.root2d(f, ((0, 1), (0, 2)))
    assert r1 == r2
    assert 0 <= r1.alpha <= 1 and 0 <= r1.beta <= 2
    assert abs(f(r1.alpha, r1.beta)) <= 1e-10


def test_root2d_no_root_reports_best():
    with pytest.raises(NumericError, match="residual"):
        nk.root2d(lambda a, b: 1.0 + a * a + 1j * b, ((0, 1), (0, 1)))


# helpers


def test_predicates_and_guards():
    assert nk.is_unitary(nk.X) and not nk.is_unitary(2 * nk.X)
    assert nk.is_hermitian(nk.Y) and not nk.is_hermitian(1j * nk.Y)
    with pytest.raises(PreconditionError):
        nk.as_matrix(np.zeros((2, 3)))
    with pytest.raises(PreconditionError):
        nk.as_matrix(np.full((2, 2), np.nan))
    assert np.array_equal(nk.kron(nk.X, nk.Z), np.kron(nk.X, nk.Z))
    assert nk.block_diag(np.eye(1), 2 * np.eye(2)).shape == (3, 3)


def test_polar_unitary_is_closest():
    u = rand_unitary(4)
    noisy = u + 1e-6 * (rng.normal(size=(4, 4)))
    p = nk.polar_unitary(noisy)
    assert nk.is_unitary(p, 1e-12)
    assert np.abs(p - u).max() <= 1e-5
