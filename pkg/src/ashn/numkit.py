"""Dense complex linear algebra and root finding for small matrices.

Matrices are plain ``numpy`` arrays of shape ``(..., n, n)`` with ``n <= 16``.
The eigensolvers and the SVD are self-contained Jacobi iterations; numpy is
used only for array arithmetic.  Every routine that accepts a stack of
matrices processes the whole stack in one vectorized sweep, which is what
makes the Monte Carlo and round-trip suites cheap.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DomainError, NumericError, PreconditionError

MAX_DIM = 16

# Single-qubit Paulis and the two-qubit strings used throughout.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
XX = np.kron(X, X)
YY = np.kron(Y, Y)
ZZ = np.kron(Z, Z)
XI = np.kron(X, I2)
IX = np.kron(I2, X)
YI = np.kron(Y, I2)
IY = np.kron(I2, Y)
ZI = np.kron(Z, I2)
IZ = np.kron(I2, Z)


class EigResult(NamedTuple):
    """Eigenvalues (last axis) and eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, name: str = "matrix", max_dim: int = MAX_DIM) -> np.ndarray:
    """Validates a (stack of) square matrices and returns it as complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise PreconditionError(f"{name} must be square, got shape {m.shape}")
    n = m.shape[-1]
    if n < 1 or n > max_dim:
        raise PreconditionError(f"{name} dimension {n} outside supported range 1..{max_dim}")
    if not np.all(np.isfinite(m)):
        raise PreconditionError(f"{name} has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_unitary(u, tol: float = 1e-10) -> bool:
    """``max|U^dag U - I| <= tol``."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    return bool(np.abs(dagger(u) @ u - np.eye(n)).max() <= tol)


def is_hermitian(h, tol: float = 1e-10) -> bool:
    """``max|H - H^dag| <= tol``."""
    h = np.asarray(h, dtype=complex)
    return bool(np.abs(h - dagger(h)).max() <= tol)


def kron(*factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def _require_hermitian(h: np.ndarray, tol: Tolerances) -> np.ndarray:
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if np.abs(h - dagger(h)).max(initial=0.0) > tol.hermitian * scale:
        raise PreconditionError("matrix is not Hermitian within tolerance")
    return 0.5 * (h + dagger(h))


def _require_unitary(u: np.ndarray, tol: Tolerances) -> None:
    n = u.shape[-1]
    if np.abs(dagger(u) @ u - np.eye(n)).max(initial=0.0) > tol.unitary:
        raise PreconditionError("matrix is not unitary within tolerance")


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def _rotation(app, aqq, apq, live=True):
    """2x2 unitary ``G`` with ``(G^dag A G)_pq = 0`` for Hermitian ``A``.

    ``G = diag(1, conj(phase)) @ [[c, s], [-s, c]]`` where ``phase`` is the
    phase of ``a_pq``; the real part is the classical Jacobi rotation.
    """
    mag = np.abs(apq)
    active = (mag > 1e-150) & live
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    zeta = (aqq - app) / (2.0 * safe)
    sign = np.where(zeta >= 0.0, 1.0, -1.0)
    t = np.where(active, sign / (np.abs(zeta) + np.hypot(1.0, zeta)), 0.0)
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    ph = np.conj(phase)
    return c + 0j, s + 0j, -s * ph, c * ph


def _jacobi_hermitian(a: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a stack of Hermitian matrices (modified copy)."""
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    if n == 1:
        return a[..., 0, 0].real.copy(), v
    mask = ~np.eye(n, dtype=bool)
    norm = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    thresh = tol.jacobi_offdiag * np.maximum(norm, 1.0)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(tol.jacobi_max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))
        live = off > thresh
        if not np.any(live):
            w = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
            return w, v
        # converged members get exact identity rotations, so each result is
        # independent of the batch it was computed in
        for p, q in pairs:
            g00, g01, g10, g11 = _rotation(a[..., p, p].real, a[..., q, q].real, a[..., p, q], live)
            g00, g01, g10, g11 = (x[..., None] for x in (g00, g01, g10, g11))
            cp = a[..., :, p].copy()
            cq = a[..., :, q]
            a[..., :, p] = cp * g00 + cq * g10
            a[..., :, q] = cp * g01 + cq * g11
            rp = a[..., p, :].copy()
            rq = a[..., q, :]
            a[..., p, :] = np.conj(g00) * rp + np.conj(g10) * rq
            a[..., q, :] = np.conj(g01) * rp + np.conj(g11) * rq
            a[..., p, q] = np.where(live, 0.0, a[..., p, q])
            a[..., q, p] = np.where(live, 0.0, a[..., q, p])
            vp = v[..., :, p].copy()
            vq = v[..., :, q]
            v[..., :, p] = vp * g00 + vq * g10
            v[..., :, q] = vp * g01 + vq * g11
    raise NumericError(f"Jacobi eigensolver did not converge in {tol.jacobi_max_sweeps} sweeps")


def _sort_eig(w: np.ndarray, v: np.ndarray) -> EigResult:
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return EigResult(w, v)


def herm_eig(h, tol: Tolerances = DEFAULT_TOL) -> EigResult:
    """Eigendecomposition of a Hermitian matrix (or stack).

    Args:
        h: Array of shape ``(..., n, n)``, Hermitian to ``tol.hermitian``.
        tol: Tolerance record.

    Returns:
        ``EigResult`` with real eigenvalues sorted ascending along the last
        axis and orthonormal eigenvector columns.

    Raises:
        PreconditionError: input not Hermitian or too large.
        NumericError: the sweep budget was exhausted.
    """
    h = _require_hermitian(as_matrix(h, "H"), tol)
    w, v = _jacobi_hermitian(h.copy(), tol)
    return _sort_eig(w, v)


# ---------------------------------------------------------------------------
# Unitary eigendecomposition via the commuting Hermitian parts

# Directions of the two Hermitian combinations cos(psi) C + sin(psi) S.  Two
# eigenphases phi, phi' collide under direction psi iff phi + phi' = 2 psi, so
# a cluster that survives both directions is a genuine near-degeneracy.
_PSI0 = 0.5535743588970452  # atan of the golden ratio conjugate
_PSI1 = _PSI0 + 0.5 * math.pi


def _clusters(w: np.ndarray, gap: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _split_cluster(u: np.ndarray, w: np.ndarray, tol: Tolerances, level: int) -> np.ndarray:
    """Unitary ``Q`` diagonalizing a small normal ``u`` (restriction to a cluster).

    Level 1 uses the second direction; level 2 aligns the cluster's phase so
    that ``Im(conj(c) u)`` is an injective function of the eigenphase.
    """
    if level == 1:
        m = 0.5 * (np.exp(-1j * _PSI1) * u + np.exp(1j * _PSI1) * dagger(u))
    else:
        centre = np.trace(u)
        if abs(centre) < 1e-3:
            centre = u[0, 0]
        c = centre / abs(centre) if abs(centre) > 0 else 1.0
        x = np.conj(c) * u
        m = (x - dagger(x)) / 2j
    m = 0.5 * (m + dagger(m))
    wm, q = _jacobi_hermitian(m.copy(), tol)
    order = np.argsort(wm, kind="stable")
    wm, q = wm[order], q[:, order]
    if level >= 2:
        return q
    for grp in _clusters(wm, tol.eig_cluster):
        if len(grp) > 1:
            sub = q[:, grp]
            q[:, grp] = sub @ _split_cluster(dagger(sub) @ u @ sub, wm[grp], tol, level + 1)
    return q


def unitary_eig(u, tol: Tolerances = DEFAULT_TOL) -> EigResult:
    """Eigendecomposition of a unitary matrix (or stack).

    The Hermitian parts ``C = (U + U^dag)/2`` and ``S = (U - U^dag)/(2i)``
    commute; a generic combination of them is diagonalized first and
    near-degenerate clusters are refined inside their invariant subspace.

    Args:
        u: Array of shape ``(..., n, n)`` with ``n <= 8``.
        tol: Tolerance record.

    Returns:
        ``EigResult`` whose eigenvalues are unit-modulus complex numbers,
        ordered by the generic combination's Jacobi ordering.
    """
    u = as_matrix(u, "U", max_dim=8)
    _require_unitary(u, tol)
    c = 0.5 * (u + dagger(u))
    s = (u - dagger(u)) / 2j
    m = math.cos(_PSI0) * c + math.sin(_PSI0) * s
    m = 0.5 * (m + dagger(m))
    w, v = _jacobi_hermitian(m.copy(), tol)
    w, v = _sort_eig(w, v)
    batch = w.reshape(-1, w.shape[-1])
    vb = v.reshape(-1, *v.shape[-2:])
    ub = u.reshape(-1, *u.shape[-2:])
    close = np.any(np.diff(batch, axis=-1) <= tol.eig_cluster, axis=-1)
    for i in np.flatnonzero(close):
        for grp in _clusters(batch[i], tol.eig_cluster):
            if len(grp) > 1:
                sub = vb[i][:, grp]
                restricted = dagger(sub) @ ub[i] @ sub
                vb[i][:, grp] = sub @ _split_cluster(restricted, batch[i][grp], tol, 1)
    v = vb.reshape(v.shape)
    lam = np.einsum("...ki,...kl,...li->...i", np.conj(v), u, v)
    lam = lam / np.abs(lam)
    return EigResult(lam, v)


def expm_hermitian(h, t=1.0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(-i H t)`` via the eigendecomposition of ``H``.

    ``t`` broadcasts against the batch shape of ``h``.
    """
    w, v = herm_eig(h, tol)
    t = np.asarray(t, dtype=float)[..., None]
    phases = np.exp(-1j * w * t)
    return (v * phases[..., None, :]) @ dagger(v)


# ---------------------------------------------------------------------------
# One-sided Jacobi SVD


def _complement(a: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the columns of ``a``."""
    n, k = a.shape
    if k == n:
        return np.zeros((n, 0), dtype=complex)
    proj = np.eye(n) - a @ dagger(a)
    w, v = herm_eig(0.5 * (proj + dagger(proj)), tol)
    return v[:, k:]


def svd(m, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``M = U diag(sigma) Vdag``.

    One-sided (Hestenes) Jacobi: columns of ``M`` are rotated pairwise until
    mutually orthogonal; the column norms are the singular values.

    Returns:
        ``(U, sigma, Vdag)`` with ``sigma`` nonnegative and descending.
    """
    a = as_matrix(m, "M").copy()
    if a.ndim != 2:
        raise PreconditionError("svd expects a single matrix")
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    eps = tol.jacobi_offdiag
    for _ in range(tol.jacobi_max_sweeps + 1):
        rotated = False
        for p, q in pairs:
            ap, aq = a[:, p], a[:, q]
            alpha = float(np.vdot(ap, ap).real)
            beta = float(np.vdot(aq, aq).real)
            gamma = np.vdot(ap, aq)
            if abs(gamma) <= eps * math.sqrt(alpha * beta) or abs(gamma) == 0.0:
                continue
            rotated = True
            g00, g01, g10, g11 = _rotation(np.array(alpha), np.array(beta), np.array(gamma))
            cp = ap.copy()
            a[:, p] = cp * g00 + aq * g10
            a[:, q] = cp * g01 + aq * g11
            vp = v[:, p].copy()
            v[:, p] = vp * g00 + v[:, q] * g10
            v[:, q] = vp * g01 + v[:, q] * g11
        if not rotated:
            break
    else:
        raise NumericError(f"one-sided Jacobi SVD did not converge in {tol.jacobi_max_sweeps} sweeps")
    sigma = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma, a, v = sigma[order], a[:, order], v[:, order]
    scale = max(1.0, float(sigma[0])) if n else 1.0
    keep = sigma > 1e-13 * scale
    u = np.zeros((n, n), dtype=complex)
    u[:, keep] = a[:, keep] / sigma[keep]
    r = int(np.count_nonzero(keep))
    if r < n:
        u[:, r:] = _complement(u[:, :r], tol)
        sigma = np.where(keep, sigma, 0.0)
    return u, sigma, dagger(v)


# ---------------------------------------------------------------------------
# Scalar solvers


def sinc(w):
    """``sin(w)/w`` with the removable singularity filled in."""
    return np.sinc(np.asarray(w, dtype=float) / math.pi)


def sinc_inv(s: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Inverse of ``sinc`` restricted to ``[0, pi]``.

    Bisection brackets the root and Newton steps polish it.

    Raises:
        DomainError: ``s`` outside ``[-clamp, 1 + clamp]``.
    """
    s = float(s)
    if not math.isfinite(s) or s < -tol.sinc_clamp or s > 1.0 + tol.sinc_clamp:
        raise DomainError(f"sinc_inv argument {s!r} outside [0, 1]")
    s = min(max(s, 0.0), 1.0)
    if s == 1.0:
        return 0.0
    if s == 0.0:
        return math.pi
    if s > 1.0 - 1e-6:
        # sinc(w) = 1 - w^2/6 + w^4/120 - ...; Newton from the series guess.
        w = math.sqrt(6.0 * (1.0 - s))
    else:
        lo, hi = 0.0, math.pi
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if math.sin(mid) / mid > s:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15:
                break
        w = 0.5 * (lo + hi)
    for _ in range(4):
        if w == 0.0:
            break
        f = math.sin(w) / w - s
        df = (w * math.cos(w) - math.sin(w)) / (w * w)
        if df == 0.0:
            break
        step = f / df
        w_new = min(max(w - step, 0.0), math.pi)
        if w_new == w:
            break
        w = w_new
    return w


Box = tuple[tuple[float, float], tuple[float, float]]


class Root2D(NamedTuple):
    alpha: float
    beta: float
    residual: float


def root2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    box: Box,
    tol: Tolerances = DEFAULT_TOL,
) -> Root2D:
    """Root of a complex function of two real unknowns inside a box.

    ``f`` must accept broadcastable float arrays ``(alpha, beta)`` and return
    complex residuals.  Seeds are the cell centres of a uniform
    ``root_grid x root_grid`` lattice; they are tried in order of increasing
    ``|f|`` (ties by ``(alpha, beta)`` lexicographically) with damped Newton
    iterations using a forward-difference Jacobian.  Iterates are clamped to
    the closed box.  The first seed reaching ``root_residual`` wins.

    Raises:
        NumericError: no seed converged; the message reports the best residual.
    """
    (a_lo, a_hi), (b_lo, b_hi) = box
    if not (a_hi > a_lo and b_hi > b_lo):
        raise DomainError(f"degenerate search box {box!r}")
    k = tol.root_grid
    ga = a_lo + (np.arange(k) + 0.5) * (a_hi - a_lo) / k
    gb = b_lo + (np.arange(k) + 0.5) * (b_hi - b_lo) / k
    aa, bb = np.meshgrid(ga, gb, indexing="ij")
    aa, bb = aa.ravel(), bb.ravel()
    with np.errstate(all="ignore"):
        r0 = np.abs(f(aa, bb))
    r0 = np.where(np.isfinite(r0), r0, np.inf)
    order = np.lexsort((bb, aa, r0))
    h = tol.root_fd_step
    best = (math.inf, float(aa[order[0]]), float(bb[order[0]]))
    da_step = np.array([0.0, h, 0.0])
    db_step = np.array([0.0, 0.0, h])
    for idx in order:
        if not math.isfinite(r0[idx]):
            break
        a, b = float(aa[idx]), float(bb[idx])
        with np.errstate(all="ignore"):
            for _ in range(tol.root_max_iter):
                # FD stencil points stay inside the box.
                sa = -h if a + h > a_hi else h
                sb = -h if b + h > b_hi else h
                vals = f(a + da_step * (sa / h), b + db_step * (sb / h))
                f0 = vals[0]
                r = abs(f0)
                if not math.isfinite(r):
                    break
                if r < best[0]:
                    best = (r, a, b)
                if r <= tol.root_residual:
                    return Root2D(a, b, r)
                ja = (vals[1] - f0) / sa
                jb = (vals[2] - f0) / sb
                det = ja.real * jb.imag - jb.real * ja.imag
                if det == 0.0 or not math.isfinite(det):
                    break
                da = -(jb.imag * f0.real - jb.real * f0.imag) / det
                db = -(-ja.imag * f0.real + ja.real * f0.imag) / det
                lam = 1.0
                moved = False
                for _ in range(30):
                    na = min(max(a + lam * da, a_lo), a_hi)
                    nb = min(max(b + lam * db, b_lo), b_hi)
                    nr = abs(complex(f(np.array([na]), np.array([nb]))[0]))
                    if math.isfinite(nr) and nr < r:
                        a, b, moved = na, nb, True
                        break
                    lam *= 0.5
                if not moved:
                    break
        if best[0] <= tol.root_residual:
            return Root2D(best[1], best[2], best[0])
    raise NumericError(f"root2d found no root; best residual {best[0]:.3e} at alpha={best[1]:.6g}, beta={best[2]:.6g}")


def unit_phase(z: complex) -> complex:
    return z / abs(z)


def block_diag(*blocks: Sequence) -> np.ndarray:
    n = sum(np.shape(b)[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        m = np.shape(b)[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def qr(m) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR (LAPACK through numpy) of a square complex matrix."""
    m = as_matrix(m, "M")
    return np.linalg.qr(m)


def polar_unitary(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Closest unitary to ``m`` in Frobenius norm (``U Vdag`` from the SVD)."""
    u, _, vd = svd(m, tol)
    return u @ vd
