"""Circuit synthesis from generic two-qubit gates.

Pipeline: cosine-sine decomposition, multiplexed rotations on a Gray-code
ladder, the five-gate multiplexor lemma, the 11-gate three-qubit circuit and
one level of the Shannon recursion for four qubits.

Wire 0 is the most significant qubit everywhere.  A ``PlacedGate`` on
``wires=(a, b)`` applies its 4x4 matrix with ``a`` as the high index bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkit as nk
from .config import DEFAULT_TOL, Tolerances
from .errors import NumericError, PreconditionError
from .weyl import dist

_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass(frozen=True)
class PlacedGate:
    """A two-qubit gate on an ordered wire pair."""

    wires: tuple[int, int]
    matrix: np.ndarray
    diagonal: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise PreconditionError(f"placed gate needs a 4x4 matrix, got {m.shape}")
        a, b = self.wires
        if a == b or a < 0 or b < 0:
            raise PreconditionError(f"bad wire pair {self.wires}")
        if not nk.is_unitary(m, 1e-10):
            raise NumericError("placed gate matrix is not unitary")
        if self.diagonal and np.max(np.abs(m - np.diag(np.diag(m)))) > 1e-10:
            raise NumericError("gate flagged diagonal has off-diagonal weight")
        object.__setattr__(self, "wires", (int(a), int(b)))
        object.__setattr__(self, "matrix", m)

    def is_identity(self, tol: float = 1e-12) -> bool:
        """True if the gate is a global phase times the identity."""
        return dist(self.matrix, np.eye(4)) <= tol

    def shifted(self, offset: int) -> PlacedGate:
        return PlacedGate((self.wires[0] + offset, self.wires[1] + offset), self.matrix, self.diagonal)


@dataclass(frozen=True)
class LocalGate:
    """Single-qubit gate applied after the first ``slot`` placed gates."""

    wire: int
    matrix: np.ndarray
    slot: int


@dataclass(frozen=True)
class SynthCircuit:
    """Ordered two-qubit gate list plus optional single-qubit gates.

    Attributes:
        n: Qubit count.
        gates: Placed gates in time order.
        locals: Interleaved single-qubit gates (empty for every circuit built
            here, since all locals are merged into neighbouring gates).
        dist: Phase-insensitive distance to the synthesis target, if known.
    """

    n: int
    gates: tuple[PlacedGate, ...]
    locals: tuple[LocalGate, ...] = ()
    dist: float | None = None

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if not g.is_identity())

    @property
    def diagonal_count(self) -> int:
        return sum(1 for g in self.gates if g.diagonal and not g.is_identity())

    def shifted(self, offset: int, n: int) -> SynthCircuit:
        return SynthCircuit(
            n,
            tuple(g.shifted(offset) for g in self.gates),
            tuple(LocalGate(l.wire + offset, l.matrix, l.slot) for l in self.locals),
        )


def _concat(n: int, *parts: SynthCircuit) -> SynthCircuit:
    gates: list[PlacedGate] = []
    locs: list[LocalGate] = []
    for p in parts:
        locs.extend(LocalGate(l.wire, l.matrix, l.slot + len(gates)) for l in p.locals)
        gates.extend(p.gates)
    return SynthCircuit(n, tuple(gates), tuple(locs))


def _apply(m: np.ndarray, gate: np.ndarray, wires: Sequence[int], n: int) -> np.ndarray:
    """Left-multiplies ``m`` (2^n x 2^n) by ``gate`` acting on ``wires``."""
    k = len(wires)
    t = m.reshape((2,) * n + (m.shape[1],))
    g = gate.reshape((2,) * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(wires)))
    t = np.moveaxis(t, list(range(k)), list(wires))
    return t.reshape(m.shape)


def realize(c: SynthCircuit) -> np.ndarray:
    """Unitary of the circuit, gates composed in time order."""
    n = c.n
    for g in c.gates:
        if max(g.wires) >= n:
            raise PreconditionError(f"wire pair {g.wires} out of range for n={n}")
    for l in c.locals:
        if not 0 <= l.wire < n:
            raise PreconditionError(f"local wire {l.wire} out of range for n={n}")
    u = np.eye(2**n, dtype=complex)
    locs = sorted(c.locals, key=lambda l: l.slot)
    li = 0
    for i, g in enumerate(c.gates):
        while li < len(locs) and locs[li].slot <= i:
            u = _apply(u, locs[li].matrix, [locs[li].wire], n)
            li += 1
        u = _apply(u, g.matrix, g.wires, n)
    for l in locs[li:]:
        u = _apply(u, l.matrix, [l.wire], n)
    return u


# ---------------------------------------------------------------------------
# Rotations and cosine-sine decomposition


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


_AXES = {"y": ry, "z": rz}


def cs_matrix(angles) -> np.ndarray:
    """Block matrix ``[[C, -S], [S, C]]`` with ``C = diag(cos)``."""
    a = np.asarray(angles, dtype=float)
    c, s = np.diag(np.cos(a)), np.diag(np.sin(a))
    return np.block([[c, -s], [s, c]]).astype(complex)


def _check_unitary(u, name: str, tol: Tolerances) -> np.ndarray:
    u = nk.as_matrix(u, name)
    if not nk.is_unitary(u, tol.unitary):
        raise PreconditionError(f"{name} is not unitary")
    return u


def csd(u, tol: Tolerances = DEFAULT_TOL):
    """Cosine-sine decomposition ``U = (L0 + L1) CS(angles) (R0 + R1)``.

    ``U00 = L0 C R0`` comes from the SVD.  ``U10 R0^dag = L1 S`` has
    orthogonal columns, so a Householder QR of it yields ``L1`` and accurate
    sines even for tiny ``s``.  Rows of ``R1`` come from ``U01`` where the sine
    dominates and from ``U11`` where the cosine does.

    Returns:
        ``(L0, L1, angles, R0, R1)`` with angles in ``[0, pi/2]``.
    """
    u = _check_unitary(u, "U", tol)
    d = u.shape[0]
    if d < 4 or d & (d - 1):
        raise PreconditionError(f"csd expects a 2^n x 2^n unitary with n >= 2, got {d}")
    m = d // 2
    u00, u01, u10, u11 = u[:m, :m], u[:m, m:], u[m:, :m], u[m:, m:]
    l0, c, r0 = nk.svd(u00, tol)
    # ascending cosines: large sines first for the QR step
    order = np.arange(m)[::-1]
    l0, c, r0 = l0[:, order], np.minimum(c[order], 1.0), r0[order, :]
    q, rt = nk.qr(u10 @ nk.dagger(r0))
    diag = np.diag(rt)
    s = np.abs(diag)
    ph = np.where(s > 0, diag / np.where(s > 0, s, 1.0), 1.0)
    l1 = q * ph[None, :]
    angles = np.arctan2(s, c)
    p = -(nk.dagger(l0) @ u01)
    top = nk.dagger(l1) @ u11
    big_s = s >= c
    r1 = np.where(big_s[:, None], p / np.where(big_s, s, 1.0)[:, None], top / np.where(big_s, 1.0, c)[:, None])
    return l0, l1, angles, r0, r1


def csd_reconstruct(l0, l1, angles, r0, r1) -> np.ndarray:
    return nk.block_diag(l0, l1) @ cs_matrix(angles) @ nk.block_diag(r0, r1)


# ---------------------------------------------------------------------------
# Multiplexed rotations


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def demux_rotation(angles, axis: str, target: int = 0, controls: Sequence[int] | None = None, n: int | None = None) -> SynthCircuit:
    """Multiplexed rotation as a ladder of ``2^k`` two-qubit gates.

    Control value ``j`` (controls listed most significant first) selects
    ``R_axis(angles[j])`` on ``target``.  Each gate is a CNOT from the
    control whose Gray-code bit flips, preceded by a target rotation, merged
    into one 4x4 matrix.

    Args:
        angles: ``2^k`` rotation angles.
        axis: ``"y"`` or ``"z"``.
        target: Target wire.
        controls: Control wires; default is every other wire in order.
        n: Total qubit count; default ``k + 1``.
    """
    th = np.asarray(angles, dtype=float).ravel()
    cnt = th.size
    if cnt < 2 or cnt & (cnt - 1):
        raise PreconditionError(f"angle count must be a power of two >= 2, got {cnt}")
    if axis not in _AXES:
        raise PreconditionError(f"axis must be 'y' or 'z', got {axis!r}")
    k = cnt.bit_length() - 1
    if n is None:
        n = k + 1
    if controls is None:
        controls = [w for w in range(n) if w != target]
    controls = list(controls)
    if len(controls) != k or target in controls:
        raise PreconditionError("controls must be k distinct wires other than the target")
    # Walsh-Hadamard transform in Gray-code order
    idx = np.arange(cnt)
    gray = _gray(idx)
    parity = np.array([[bin(int(j) & int(g)).count("1") & 1 for j in idx] for g in gray])
    phi = ((1 - 2 * parity) @ th) / cnt
    rot = _AXES[axis]
    gates = []
    for i in range(cnt):
        bit = (_gray(i) ^ _gray((i + 1) % cnt)).bit_length() - 1
        ctrl = controls[k - 1 - bit]
        mat = _CNOT @ np.kron(nk.I2, rot(phi[i]))
        gates.append(PlacedGate((ctrl, target), mat))
    return SynthCircuit(n, tuple(gates))


def multiplexed_rotation_matrix(angles, axis: str) -> np.ndarray:
    """Direct assembly: target is wire 0, select state on the remaining wires."""
    th = np.asarray(angles, dtype=float).ravel()
    cnt = th.size
    rot = _AXES[axis]
    out = np.zeros((2 * cnt, 2 * cnt), dtype=complex)
    for j, t in enumerate(th):
        r = rot(t)
        for a in range(2):
            for b in range(2):
                out[a * cnt + j, b * cnt + j] = r[a, b]
    return out


# ---------------------------------------------------------------------------
# Multiplexor lemma


def _zz_diag(phi: float) -> np.ndarray:
    """``exp(-i phi/2 Z(x)Z)``."""
    a = np.exp(-0.5j * phi)
    return np.diag([a, np.conj(a), np.conj(a), a])


def _pair_conjugates(lam: np.ndarray) -> tuple[list[int], float, float]:
    """Orders four eigenvalues as ``(e^{-iA}, e^{-iB}, e^{iB}, e^{iA})``.

    Sorted by phase, the extremes pair together and so do the middle two.
    All three matchings are scored so wrap-around at phase pi cannot
    mismatch a pair.
    """
    ang = np.angle(lam)
    o = [int(i) for i in np.argsort(ang, kind="stable")]
    cands = [((o[0], o[3]), (o[1], o[2])), ((o[0], o[1]), (o[2], o[3])), ((o[0], o[2]), (o[1], o[3]))]

    def score(m):
        return max(abs(lam[i] - np.conj(lam[j])) for i, j in m)

    best = min(cands, key=score)
    (i0, i3), (i1, i2) = best
    a, b = -ang[i0], -ang[i1]
    return [i0, i1, i2, i3], float(a), float(b)


@dataclass(frozen=True)
class MultiplexorParts:
    """Pieces of ``U0 + U1 = F (I x Vb) E2 E3 (I x Va)``."""

    va: np.ndarray
    vb: np.ndarray
    phi2: float
    phi3: float
    theta1: float
    psi: float
    trace_imag: float
    pair_error: float

    @property
    def f(self) -> np.ndarray:
        """Diagonal gate on wires (0, 1): ``exp(-i th1/2 ZZ)`` times the block phase."""
        return _zz_diag(self.theta1) @ np.kron(rz(-self.psi / 4), nk.I2)

    @property
    def e2(self) -> np.ndarray:
        return _zz_diag(self.phi2)

    @property
    def e3(self) -> np.ndarray:
        return _zz_diag(self.phi3)


def multiplexor_parts(u0, u1, tol: Tolerances = DEFAULT_TOL) -> MultiplexorParts:
    """Solves the multiplexor lemma for a select qubit with 4x4 blocks."""
    u0 = _check_unitary(u0, "U0", tol)
    u1 = _check_unitary(u1, "U1", tol)
    if u0.shape != (4, 4) or u1.shape != (4, 4):
        raise PreconditionError("multiplexor blocks must be 4x4")
    x = u0 @ nk.dagger(u1)
    psi = float(np.angle(np.linalg.det(x)))
    u0p = np.exp(-1j * psi / 8) * u0
    u1p = np.exp(1j * psi / 8) * u1
    x = u0p @ nk.dagger(u1p)
    dx = np.diag(x)
    a, b = dx[0] + dx[1], dx[2] + dx[3]
    # Im tr(D X D) = sin(t) (Re a - Re b) + cos(t) (Im a + Im b) with D = Rz(-t) x I
    num, den = -(a.imag + b.imag), a.real - b.real
    theta1 = math.atan2(num, den) if abs(num) + abs(den) > 1e-14 else 0.0
    dd = np.kron(rz(-theta1), nk.I2)
    up = dd @ x @ dd
    trace_imag = float(abs(np.trace(up).imag))
    if np.max(np.abs(up - np.diag(np.diag(up)))) <= tol.identity:
        # already diagonal (e.g. U0 = U1): keep the computational basis
        lam, vec = np.diag(up) / np.abs(np.diag(up)), np.eye(4, dtype=complex)
    else:
        lam, vec = nk.unitary_eig(up, tol)
    order, big_a, big_b = _pair_conjugates(lam)
    vb = vec[:, order]
    target = np.array([np.exp(-1j * big_a), np.exp(-1j * big_b), np.exp(1j * big_b), np.exp(1j * big_a)])
    pair_error = float(np.max(np.abs(lam[order] - target)))
    phi2, phi3 = 0.5 * (big_a + big_b), 0.5 * (big_a - big_b)
    e0 = np.kron(rz(phi2), rz(phi3))
    # U0' = (Rz(th1) x I) Vb E0 Va
    va = nk.dagger(e0) @ nk.dagger(vb) @ np.kron(rz(-theta1), nk.I2) @ u0p
    va = nk.polar_unitary(va, tol)
    return MultiplexorParts(va, vb, phi2, phi3, theta1, psi, trace_imag, pair_error)


def _parts_circuit(mp: MultiplexorParts, adjoint: bool = False) -> list[PlacedGate]:
    """Gates realizing the multiplexor (or its adjoint), time order."""
    gates = [
        PlacedGate((1, 2), mp.va),
        PlacedGate((0, 2), mp.e3, True),
        PlacedGate((0, 1), mp.e2, True),
        PlacedGate((1, 2), mp.vb),
        PlacedGate((0, 1), mp.f, True),
    ]
    if adjoint:
        gates = [PlacedGate(g.wires, nk.dagger(g.matrix), g.diagonal) for g in reversed(gates)]
    return gates


def multiplexor3_decompose(u0, u1, tol: Tolerances = DEFAULT_TOL) -> SynthCircuit:
    """Five gates (three diagonal) realizing ``|0><0| x U0 + |1><1| x U1``."""
    mp = multiplexor_parts(u0, u1, tol)
    circ = SynthCircuit(3, tuple(_parts_circuit(mp)))
    d = dist(realize(circ), nk.block_diag(u0, u1))
    return SynthCircuit(3, circ.gates, dist=d)


# ---------------------------------------------------------------------------
# Three and four qubits


def _ry_mux1(a: np.ndarray) -> np.ndarray:
    """``Ry`` on wire 0 selected by wire 1, as a 4x4 on (0, 1)."""
    out = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        r = ry(2 * a[j])
        for p in range(2):
            for q in range(2):
                out[2 * p + j, 2 * q + j] = r[p, q]
    return out


def synth3(u, tol: Tolerances = DEFAULT_TOL) -> SynthCircuit:
    """Three-qubit unitary as 11 generic two-qubit gates.

    After the CSD, the middle ``Ry`` multiplexor becomes
    ``M1 CZ(0,2) M2 CZ(0,2)`` with ``M1, M2`` selected by wire 1.  One CZ is
    folded into the right multiplexor; ``M2`` and ``M1`` merge with the
    adjacent diagonal gates of the two five-gate multiplexor circuits.
    """
    u = _check_unitary(u, "U", tol)
    if u.shape != (8, 8):
        raise PreconditionError(f"synth3 expects 8x8, got {u.shape}")
    l0, l1, th, r0, r1 = csd(u, tol)
    # theta index = 2*q1 + q2
    t = th.reshape(2, 2)
    a1 = 0.5 * (t[:, 0] + t[:, 1])
    a2 = 0.5 * (t[:, 0] - t[:, 1])
    m1, m2 = _ry_mux1(a1), _ry_mux1(a2)
    iz = np.kron(nk.I2, nk.Z)
    right = multiplexor_parts(r0, iz @ r1, tol)
    left = multiplexor_parts(nk.dagger(l0), nk.dagger(l1), tol)
    rg = _parts_circuit(right)
    lg = _parts_circuit(left, adjoint=True)
    g1 = PlacedGate((0, 1), m2 @ rg[-1].matrix)
    g2 = PlacedGate((0, 1), lg[0].matrix @ m1)
    gates = rg[:-1] + [g1, PlacedGate((0, 2), CZ, True), g2] + lg[1:]
    circ = SynthCircuit(3, tuple(gates))
    return SynthCircuit(3, circ.gates, dist=dist(realize(circ), u))


def _demux_blocks(b0: np.ndarray, b1: np.ndarray, tol: Tolerances):
    """``b0 + b1 = (I x V)(D + D^dag)(I x W)``; returns ``V``, Rz angles, ``W``."""
    lam, v = nk.unitary_eig(b0 @ nk.dagger(b1), tol)
    ph = np.angle(lam)
    dd = np.exp(0.5j * ph)
    w = dd[:, None] * (nk.dagger(v) @ b1)
    w = nk.polar_unitary(w, tol)
    return v, -ph, w


def synthn(u, tol: Tolerances = DEFAULT_TOL) -> SynthCircuit:
    """Shannon recursion for 3 or 4 qubits with ``synth3`` as the base case."""
    u = nk.as_matrix(u, "U")
    d = u.shape[0]
    if d == 8:
        return synth3(u, tol)
    if d != 16:
        raise PreconditionError(f"synthn supports n in {{3, 4}}, got dimension {d}")
    u = _check_unitary(u, "U", tol)
    l0, l1, th, r0, r1 = csd(u, tol)
    vl, zl, wl = _demux_blocks(l0, l1, tol)
    vr, zr, wr = _demux_blocks(r0, r1, tol)
    sub = lambda m: synth3(m, tol).shifted(1, 4)  # noqa: E731
    circ = _concat(
        4,
        sub(wr),
        demux_rotation(zr, "z", 0, n=4),
        sub(vr),
        demux_rotation(2 * th, "y", 0, n=4),
        sub(wl),
        demux_rotation(zl, "z", 0, n=4),
        sub(vl),
    )
    return SynthCircuit(4, circ.gates, circ.locals, dist=dist(realize(circ), u))


def count_bound(n: int) -> int:
    """``floor(23/64 4^n - 3/2 2^n)``."""
    return (23 * 4**n - 96 * 2**n) // 64
