"""Two-qubit gate geometry: Weyl chamber, KAK decomposition and Haar sampling.

Conventions:
    A two-qubit unitary factors as ``U = g (A1 x A2) exp(i eta.Sigma) (B1 x B2)``
    with ``Sigma = (XX, YY, ZZ)`` and ``A_i, B_i`` in SU(2).  The canonical
    chamber is ``W = {pi/4 >= x >= y >= |z|, z >= 0 if x = pi/4}``.

Batched routines take arrays of shape ``(..., 3)`` for points and
``(..., 4, 4)`` for gates.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numkit as nk
from .config import DEFAULT_TOL, Tolerances
from .errors import ExtractionError, PreconditionError

QUARTER = math.pi / 4
HALF = math.pi / 2

# Magic basis: columns (|00>+|11>)/sqrt2, i(|00>-|11>)/sqrt2, i(|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2.
MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / math.sqrt(2)
MAGIC_DAG = MAGIC.conj().T

# Rows: diagonals of XX, YY, ZZ in the magic basis.
SIGNS = np.array([[1, -1, 1, -1], [-1, 1, 1, -1], [1, 1, -1, -1]], dtype=float)

_PAULI = (nk.X, nk.Y, nk.Z)


class WeylPoint(NamedTuple):
    """Interaction coefficients in radians (canonical or raw)."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def is_canonical(self, slack: float = 1e-12) -> bool:
        return is_canonical(self, slack)


def is_canonical(p, slack: float = 1e-12) -> bool:
    x, y, z = (float(v) for v in p)
    if not (QUARTER + slack >= x and x + slack >= y and y + slack >= abs(z)):
        return False
    if abs(x - QUARTER) <= slack and z < -slack:
        return False
    return True


def exp_sigma(eta) -> np.ndarray:
    """``exp(i (x XX + y YY + z ZZ))`` for points of shape ``(..., 3)``."""
    eta = np.asarray(eta, dtype=float)
    diag = np.exp(1j * (eta @ SIGNS))
    return (MAGIC * diag[..., None, :]) @ MAGIC_DAG


# ---------------------------------------------------------------------------
# canonicalization


def canonicalize_array(p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`canonicalize` on an array of shape ``(..., 3)``."""
    snap = tol.snap
    q = np.array(p, dtype=float)
    if q.shape[-1] != 3:
        raise PreconditionError("points must have a trailing axis of length 3")
    q = q - HALF * np.round(q / HALF)
    q = np.where(q <= -QUARTER + snap, q + HALF, q)
    order = np.argsort(-np.abs(q), axis=-1, kind="stable")
    q = np.take_along_axis(q, order, axis=-1)
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    odd = (x < 0) ^ (y < 0)
    x, y = np.abs(x), np.abs(y)
    z = np.where(odd, -z, z)
    top = x >= QUARTER - snap
    x = np.where(top, QUARTER, x)
    z = np.where(top & (z < 0), -z, z)
    y = np.where(x - y <= snap, x, y)
    z = np.where(y - np.abs(z) <= snap, np.copysign(y, z), z)
    z = np.where(np.abs(z) <= snap, 0.0, z)
    y = np.where(y <= snap, 0.0, y)
    x = np.where(x <= snap, 0.0, x)
    return np.stack([x, y, z], axis=-1)


def canonicalize(p, tol: Tolerances = DEFAULT_TOL) -> WeylPoint:
    """Maps any real triple to its representative in the Weyl chamber.

    The result lies in the orbit of ``p`` under permutations, pairwise sign
    flips and ``pi/2`` shifts of single coordinates.  Coordinates within
    ``tol.snap`` of a chamber wall are snapped onto it.
    """
    q = canonicalize_array(np.asarray(p, dtype=float), tol)
    return WeylPoint(float(q[0]), float(q[1]), float(q[2]))


def weyl_distance(p, q) -> float:
    """Max-norm distance between two canonical points in the glued chamber.

    The representatives ``(x, y, z)`` and ``(pi/2 - x, y, -z)`` describe the
    same class, so points on either side of the ``x = pi/4`` face are close
    even when their ``z`` coordinates have opposite signs.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mirror = np.stack([HALF - q[..., 0], q[..., 1], -q[..., 2]], axis=-1)
    return np.minimum(np.abs(p - q).max(axis=-1), np.abs(p - mirror).max(axis=-1))


# ---------------------------------------------------------------------------
# KAK


@dataclass(frozen=True)
class KakFactors:
    """``U = global_phase (a1 x a2) exp(i eta.Sigma) (b1 x b2)``."""

    global_phase: complex
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    eta: WeylPoint

    def reconstruct(self) -> np.ndarray:
        core = exp_sigma(self.eta.as_array())
        return self.global_phase * np.kron(self.a1, self.a2) @ core @ np.kron(self.b1, self.b2)


def _split_local(k: np.ndarray) -> tuple[np.ndarray, np.ndarray, complex]:
    """Factors ``k = c (a x b)`` with ``a, b`` in SU(2) and ``|c| = 1``."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    row = int(np.argmax(np.sum(np.abs(r) ** 2, axis=1)))
    col = int(np.argmax(np.sum(np.abs(r) ** 2, axis=0)))
    a = r[:, col].reshape(2, 2)
    b = r[row, :].reshape(2, 2)
    a = a / np.sqrt(np.linalg.det(a))
    b = b / np.sqrt(np.linalg.det(b))
    c = np.trace(np.kron(a, b).conj().T @ k) / 4
    return a, b, c / abs(c)


class _Frame:
    """Tracks ``g (A1 x A2) exp(i eta.Sigma) (B1 x B2)`` under chamber moves."""

    def __init__(self, g, a1, a2, eta, b1, b2):
        self.g = complex(g)
        self.a = [a1, a2]
        self.b = [b1, b2]
        self.eta = [float(v) for v in eta]

    def shift(self, j: int, m: int) -> None:
        # eta_j -> eta_j - m pi/2, using exp(i pi/2 P) = i P = -i (i s x i s).
        if m == 0:
            return
        s = 1j * _PAULI[j]
        self.eta[j] -= m * HALF
        for _ in range(abs(m)):
            self.b = [s @ self.b[0], s @ self.b[1]]
            self.g *= -1j if m > 0 else 1j

    def flip(self, keep: int) -> None:
        # Conjugation by (s_keep x I) negates the two other coordinates.
        s = 1j * _PAULI[keep]
        for j in range(3):
            if j != keep:
                self.eta[j] = -self.eta[j]
        self.a[0] = self.a[0] @ s
        self.b[0] = s @ self.b[0]
        self.g *= -1

    def swap(self, j: int, k: int) -> None:
        # (W x W) maps P_j <-> P_k for W a quarter turn about the third axis.
        l = 3 - j - k
        w = math.cos(QUARTER) * nk.I2 - 1j * math.sin(QUARTER) * _PAULI[l]
        wd = w.conj().T
        self.eta[j], self.eta[k] = self.eta[k], self.eta[j]
        self.a = [self.a[0] @ wd, self.a[1] @ wd]
        self.b = [w @ self.b[0], w @ self.b[1]]

    def canonicalize(self, snap: float) -> None:
        for j in range(3):
            v = self.eta[j]
            m = int(round(v / HALF))
            if v - m * HALF <= -QUARTER + snap:
                m -= 1
            self.shift(j, m)
        for j, k in ((0, 1), (1, 2), (0, 1)):
            if abs(self.eta[j]) < abs(self.eta[k]):
                self.swap(j, k)
        x, y = self.eta[0], self.eta[1]
        if x < 0 and y < 0:
            self.flip(2)
        elif x < 0:
            self.flip(1)
        elif y < 0:
            self.flip(0)
        if self.eta[0] >= QUARTER - snap and self.eta[2] < 0:
            self.shift(0, 1)
            self.flip(1)


def _to_su4(u: np.ndarray) -> tuple[np.ndarray, complex]:
    det = np.linalg.det(u)
    root = det ** 0.25
    root /= abs(root)
    return u / root, root


def _magic_parts(u: np.ndarray, tol: Tolerances):
    """Real orthogonal ``O1, O2`` and diagonal ``d`` with ``M^dag U M = O1 diag(d) O2``."""
    um = MAGIC_DAG @ u @ MAGIC
    p = um.T @ um
    p = 0.5 * (p + p.T)
    lam, v = nk.unitary_eig(p, tol)
    if np.abs(v.imag).max() > 1e-8:
        raise ExtractionError("magic-basis eigenvectors are not real")
    v = v.real
    if np.linalg.det(v) < 0:
        v[:, 0] = -v[:, 0]
    d = np.sqrt(lam)
    if np.real(np.prod(d)) < 0:
        d[0] = -d[0]
    o1 = um @ v / d
    if np.abs(o1.imag).max() > 1e-7:
        raise ExtractionError("left magic factor is not real")
    return o1.real, d, v.T


def kak(u, tol: Tolerances = DEFAULT_TOL) -> KakFactors:
    """KAK decomposition of a two-qubit unitary with canonical ``eta``.

    Raises:
        PreconditionError: ``u`` is not a 4x4 unitary.
    """
    u = nk.as_matrix(u, "U")
    if u.shape != (4, 4):
        raise PreconditionError("kak expects a single 4x4 matrix")
    nk._require_unitary(u, tol)
    us, root = _to_su4(u)
    o1, d, o2 = _magic_parts(us, tol)
    theta = np.angle(d)
    eta = SIGNS @ theta / 4
    core_phase = np.exp(1j * theta.sum() / 4)
    a1, a2, c1 = _split_local(MAGIC @ o1 @ MAGIC_DAG)
    b1, b2, c2 = _split_local(MAGIC @ o2 @ MAGIC_DAG)
    frame = _Frame(root * core_phase * c1 * c2, a1, a2, eta, b1, b2)
    frame.canonicalize(tol.snap)
    snapped = canonicalize(frame.eta, tol)
    f = KakFactors(frame.g, frame.a[0], frame.a[1], frame.b[0], frame.b[1], snapped)
    # re-estimate the phase against the source to absorb rounding
    k = np.kron(f.a1, f.a2) @ exp_sigma(snapped.as_array()) @ np.kron(f.b1, f.b2)
    g = np.trace(k.conj().T @ u) / 4
    return KakFactors(g / abs(g), f.a1, f.a2, f.b1, f.b2, snapped)


def interaction_coefficients_array(us, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Canonical coordinates of a stack of two-qubit unitaries, shape ``(..., 3)``.

    Only the spectrum of ``(M^dag U M)^T (M^dag U M)`` is needed: its
    eigenvalues are ``exp(2i theta_k)`` and any ordering or sign choice of the
    square roots lands in the same Weyl orbit once ``det`` is fixed to 1.
    """
    us = nk.as_matrix(us, "U")
    if us.shape[-2:] != (4, 4):
        raise PreconditionError("expected 4x4 unitaries")
    nk._require_unitary(us, tol)
    det = np.linalg.det(us)
    root = det ** 0.25
    us = us / (root / np.abs(root))[..., None, None]
    um = MAGIC_DAG @ us @ MAGIC
    p = np.swapaxes(um, -1, -2) @ um
    lam = nk.unitary_eig(p, tol).eigenvalues
    theta = np.angle(lam) / 2
    # the principal roots multiply to +-1; flip one root when the product is -1
    total = theta.sum(axis=-1)
    k = np.round(total / math.pi)
    theta[..., 0] -= k * math.pi
    eta = theta @ SIGNS.T / 4
    return canonicalize_array(eta, tol)


def interaction_coefficients(u, tol: Tolerances = DEFAULT_TOL) -> WeylPoint:
    """Canonical interaction coefficients of a 4x4 unitary."""
    q = interaction_coefficients_array(np.asarray(u)[None], tol)[0]
    return WeylPoint(float(q[0]), float(q[1]), float(q[2]))


# ---------------------------------------------------------------------------
# Cartan double


def cartan_double(u) -> np.ndarray:
    """``U (Y x Y) U^T (Y x Y)``."""
    u = np.asarray(u, dtype=complex)
    return u @ nk.YY @ np.swapaxes(u, -1, -2) @ nk.YY


def coords_from_cartan(gamma, tol: Tolerances = DEFAULT_TOL) -> WeylPoint:
    """Canonical ``eta`` whose ``exp(2i eta.Sigma)`` has the spectrum of ``gamma``.

    ``gamma`` is expected to be the Cartan double of an SU(4) element (any
    other global phase of the source changes the double by more than a sign
    and selects a different class).

    Raises:
        ExtractionError: no chamber point reproduces the spectrum.
    """
    gamma = nk.as_matrix(gamma, "gamma")
    if gamma.shape != (4, 4):
        raise PreconditionError("gamma must be 4x4")
    nk._require_unitary(gamma, tol)
    det = np.linalg.det(gamma)
    mu = nk.unitary_eig(gamma / det ** 0.25, tol).eigenvalues
    arg = np.angle(mu)
    m = int(round(arg.sum() / (2 * math.pi)))
    theta = arg / 2
    theta[: (-m) % 4] += math.pi
    raw = SIGNS @ theta / 4
    model = np.exp(2j * (raw @ SIGNS))
    err = min(np.abs(model[list(perm)] - mu).max() for perm in itertools.permutations(range(4)))
    if err > 1e-8:
        raise ExtractionError(f"spectrum of gamma is not of Cartan-double form (mismatch {err:.2e})")
    return canonicalize(raw, tol)


# ---------------------------------------------------------------------------
# distance and sampling


def dist(u, v) -> float:
    """``1 - |tr(U^dag V)| / d``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise PreconditionError(f"dist expects equal square shapes, got {u.shape} and {v.shape}")
    d = u.shape[0]
    val = 1.0 - abs(np.trace(u.conj().T @ v)) / d
    return float(min(max(val, 0.0), 1.0))


_HAAR_DIMS = (2, 4, 8, 16)


def _ginibre(d: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)


def _haar_from_ginibre(zs: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(zs)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    det = np.linalg.det(q)
    d = q.shape[-1]
    return q / (det ** (1.0 / d))[..., None, None]


def haar_su(d: int, seed: int) -> np.ndarray:
    """Haar-random element of SU(d), deterministic in ``seed``."""
    if d not in _HAAR_DIMS:
        raise PreconditionError(f"haar_su supports d in {_HAAR_DIMS}, got {d}")
    rng = np.random.default_rng(seed)
    return _haar_from_ginibre(_ginibre(d, rng))


def draw_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Per-draw seed sequences; element ``k`` depends only on ``(seed, k)``."""
    return np.random.SeedSequence(seed).spawn(n)


def haar_su_batch(d: int, seed: int, n: int, start: int = 0) -> np.ndarray:
    """Draws ``start .. start+n-1`` of the batch stream rooted at ``seed``.

    Each draw uses its own child seed, so splitting the range across workers
    reproduces the serial result element-wise.
    """
    if d not in _HAAR_DIMS:
        raise PreconditionError(f"haar_su supports d in {_HAAR_DIMS}, got {d}")
    children = draw_seeds(seed, start + n)[start:]
    zs = np.stack([_ginibre(d, np.random.default_rng(c)) for c in children]) if n else np.zeros((0, d, d), complex)
    return _haar_from_ginibre(zs)


def sample_weyl(seed: int, n: int, tol: Tolerances = DEFAULT_TOL, chunk: int = 20000) -> np.ndarray:
    """``n`` canonical points drawn from the Haar push-forward measure.

    Returns an array of shape ``(n, 3)``; row ``k`` is the point of draw ``k``.
    """
    out = np.empty((n, 3))
    for lo in range(0, n, chunk):
        m = min(chunk, n - lo)
        out[lo:lo + m] = interaction_coefficients_array(haar_su_batch(4, seed, m, start=lo), tol)
    return out


def _density_kernel(x, y, z):
    # arguments are doubled: the chamber here is pi/4 >= x, i.e. half the
    # angles of the exp(i/2 c.Sigma) convention the density is usually quoted in
    x, y, z = 2 * x, 2 * y, 2 * z
    return (
        np.sin(x + y) * np.sin(x - y) * np.sin(y + z) * np.sin(y - z) * np.sin(x + z) * np.sin(x - z)
    )


def chamber_quadrature(n: int = 48):
    """Gauss-Legendre nodes and weights over ``W`` (z integrated on [-y, y]).

    Returns:
        ``(points, weights)`` with ``points`` of shape ``(n**3, 3)``.
    """
    t, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (t + 1.0)
    wu = 0.5 * w
    x = QUARTER * u
    wx = QUARTER * wu
    xs, ys, zs, ws = [], [], [], []
    for xi, wxi in zip(x, wx):
        y = xi * u
        wy = xi * wu
        z = (2.0 * u[None, :] - 1.0) * y[:, None]
        wz = 2.0 * y[:, None] * wu[None, :]
        xs.append(np.full(z.size, xi))
        ys.append(np.repeat(y, n))
        zs.append(z.ravel())
        ws.append((wxi * wy[:, None] * wz).ravel())
    pts = np.stack([np.concatenate(xs), np.concatenate(ys), np.concatenate(zs)], axis=-1)
    return pts, np.concatenate(ws)


@functools.lru_cache(maxsize=1)
def weyl_density_norm() -> float:
    """Constant making the density integrate to one over ``W``."""
    pts, w = chamber_quadrature()
    return float(1.0 / np.sum(w * _density_kernel(pts[:, 0], pts[:, 1], pts[:, 2])))


def weyl_density_array(p) -> np.ndarray:
    """Density of the Haar push-forward for an array of canonical points."""
    p = np.asarray(p, dtype=float)
    return weyl_density_norm() * _density_kernel(p[..., 0], p[..., 1], p[..., 2])


def weyl_density(p, slack: float = 1e-9) -> float:
    """Density of the Haar push-forward measure at a canonical point.

    Uses ``c sin(2(x+y)) sin(2(x-y)) sin(2(y+z)) sin(2(y-z)) sin(2(x+z))
    sin(2(x-z))`` with ``c`` fixed numerically so that the integral over
    ``W`` equals one (it comes out as ``384/pi``).

    Raises:
        PreconditionError: the point is not canonical.
    """
    if not is_canonical(p, slack):
        raise PreconditionError(f"weyl_density needs a canonical point, got {tuple(p)!r}")
    return max(float(weyl_density_array(np.asarray(p, dtype=float))), 0.0)
