"""AshN pulse compiler.

The device Hamiltonian in the rotating frame is

    H = g/2 (XX + YY) + h/2 ZZ + Omega1 (XI + IX) + Omega2 (XI - IX) + delta (ZI + IZ)

and a square pulse of length ``tau`` realizes ``exp(-i H tau)``.  The scheme
math (optimal times, sub-schemes, dispatch) runs in normalized units
``g = 1``, ``h_norm = h/g``; :func:`compile` rescales to physical units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import numkit as nk
from . import weyl
from .config import DEFAULT_TOL, Tolerances
from .errors import DomainError, NumericError, PreconditionError, SectorViolationError
from .weyl import WeylPoint

PI = math.pi


@dataclass(frozen=True)
class Couplings:
    """Transverse coupling ``g > 0`` and ZZ coupling ``|h| <= g`` (same units)."""

    g: float = 1.0
    h: float = 0.0

    def __post_init__(self):
        g, h = float(self.g), float(self.h)
        if not (math.isfinite(g) and g > 0):
            raise DomainError(f"coupling g must be positive, got {self.g!r}")
        if not math.isfinite(h) or abs(h) > g * (1 + 1e-15):
            raise DomainError(f"ZZ coupling must satisfy |h| <= g, got h={self.h!r}, g={self.g!r}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)

    @property
    def h_norm(self) -> float:
        return self.h / self.g


@dataclass(frozen=True)
class PulseParams:
    """Square-pulse control record.

    Attributes:
        tau: Gate time.
        omega1: Symmetric drive amplitude.
        omega2: Antisymmetric drive amplitude.
        delta: Half detuning.
    """

    tau: float
    omega1: float
    omega2: float
    delta: float

    @property
    def a1(self) -> float:
        return -2.0 * (self.omega1 + self.omega2)

    @property
    def a2(self) -> float:
        return -2.0 * (self.omega1 - self.omega2)

    @property
    def two_delta(self) -> float:
        return 2.0 * self.delta

    def scaled(self, g: float) -> "PulseParams":
        """Physical units: times divided by ``g``, amplitudes multiplied."""
        return PulseParams(self.tau / g, self.omega1 * g, self.omega2 * g, self.delta * g)

    def normalized(self, g: float) -> "PulseParams":
        return PulseParams(self.tau * g, self.omega1 / g, self.omega2 / g, self.delta / g)


EMPTY_PULSE = PulseParams(0.0, 0.0, 0.0, 0.0)


def max_cutoff(h_norm: float) -> float:
    """Largest admissible cutoff ``(1 - |h|) pi/2``."""
    return (1.0 - abs(h_norm)) * PI / 2


@dataclass(frozen=True)
class CutoffConfig:
    """Cutoff ``r`` in normalized time units (``1/g``)."""

    r: float = 1.1

    def __post_init__(self):
        r = float(self.r)
        if not math.isfinite(r) or r < 0 or r > PI / 2 + 1e-15:
            raise DomainError(f"cutoff r must lie in [0, pi/2], got {self.r!r}")
        object.__setattr__(self, "r", r)

    def check(self, c: Couplings) -> None:
        """Raises DomainError if ``r`` exceeds ``(1 - |h|/g) pi/2``."""
        if self.r > max_cutoff(c.h_norm) + 1e-12:
            raise DomainError(
                f"cutoff r={self.r} exceeds (1-|h|/g)pi/2={max_cutoff(c.h_norm):.6g} for h/g={c.h_norm}"
            )


class Sector(str, enum.Enum):
    ND = "ND"
    ND_EXT = "ND_EXT"
    EA_PLUS = "EA_PLUS"
    EA_MINUS = "EA_MINUS"
    IDENTITY = "IDENTITY"


# ---------------------------------------------------------------------------
# Hamiltonian and evolution


def _hamiltonian_terms(g, h, omega1, omega2, delta, phi1=0.0, phi2=0.0):
    s, d = omega1 + omega2, omega1 - omega2
    return (
        0.5 * g * (nk.XX + nk.YY)
        + 0.5 * h * nk.ZZ
        + s * (math.cos(phi1) * nk.XI - math.sin(phi1) * nk.YI)
        + d * (math.cos(phi2) * nk.IX - math.sin(phi2) * nk.IY)
        + delta * (nk.ZI + nk.IZ)
    )


def build_hamiltonian(c: Couplings, omega1: float, omega2: float, delta: float, phi1: float = 0.0, phi2: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian with drive phases ``phi1``, ``phi2``.

    Amplitudes are in the same angular-frequency units as ``c.g``.  At zero
    phases the drive term is ``Omega1 (XI + IX) + Omega2 (XI - IX)``; in
    general qubit 1 sees ``(Omega1+Omega2)(cos phi1 X - sin phi1 Y)`` and
    qubit 2 ``(Omega1-Omega2)(cos phi2 X - sin phi2 Y)``.
    """
    return _hamiltonian_terms(c.g, c.h, float(omega1), float(omega2), float(delta), float(phi1), float(phi2))


def evolve(p: PulseParams, c: Couplings, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(-i H tau)`` for a square pulse."""
    h = build_hamiltonian(c, p.omega1, p.omega2, p.delta)
    return nk.expm_hermitian(h, p.tau, tol)


def evolve_many(params: Sequence[PulseParams], c: Couplings, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Stacked :func:`evolve` for a sequence of pulses, shape ``(n, 4, 4)``."""
    if not params:
        return np.zeros((0, 4, 4), dtype=complex)
    o1 = np.array([p.omega1 for p in params])[:, None, None]
    o2 = np.array([p.omega2 for p in params])[:, None, None]
    dl = np.array([p.delta for p in params])[:, None, None]
    tau = np.array([p.tau for p in params])
    hs = (
        0.5 * c.g * (nk.XX + nk.YY)
        + 0.5 * c.h * nk.ZZ
        + (o1 + o2) * nk.XI
        + (o1 - o2) * nk.IX
        + dl * (nk.ZI + nk.IZ)
    )
    return nk.expm_hermitian(hs, tau, tol)


# ---------------------------------------------------------------------------
# times and sectors


class _Times(NamedTuple):
    nd: float
    ea_plus: float
    ea_minus: float

    @property
    def worst(self) -> float:
        return max(self)


def _times(x: float, y: float, z: float, h: float) -> _Times:
    return _Times(2 * x, 2 * (x + y + z) / (2 - h), 2 * (x + y - z) / (2 + h))


def _both_times(p: WeylPoint, h: float) -> tuple[_Times, _Times]:
    x, y, z = p
    return _times(x, y, z, h), _times(PI / 2 - x, y, -z, h)


def optimal_time(p, h_norm: float) -> float:
    """Minimal interaction time (units ``1/g``) for a canonical point.

    ``min(max{2x, 2(x+y+z)/(2-h), 2(x+y-z)/(2+h)},
    max{pi-2x, 2(pi/2-x+y-z)/(2-h), 2(pi/2-x+y+z)/(2+h)})``.
    """
    t1, t2 = _both_times(WeylPoint(*p), float(h_norm))
    return min(t1.worst, t2.worst)


class Plan(NamedTuple):
    """Outcome of the sector dispatch without solving for amplitudes."""

    sector: Sector
    tau: float
    point: WeylPoint  # coordinates handed to the sub-scheme


def _ext_feasible(x, y, z, h):
    """Whether ND-EXT reaches ``(x, y, z)``: its relabeled point lies in ND(h; pi - 2x).

    Always true for ``h = 0``.  For ``h != 0`` the ``min{tau1, tau2} <= r``
    test alone admits a thin band of points near ``r = (1-|h|) pi/2`` that
    ND-EXT cannot reach; those keep the optimal-time branch.
    """
    half = PI / 2 - x
    a, b = (1 - h) * half, (1 + h) * half
    return (y - z <= np.minimum(a, PI - a)) & (y + z <= np.minimum(b, PI - b))


def plan(p, h_norm: float, r: float, tol: Tolerances = DEFAULT_TOL) -> Plan:
    """Sector, normalized gate time and the sub-scheme input for a target."""
    q = weyl.canonicalize(p, tol)
    h = float(h_norm)
    if max(abs(v) for v in q) < tol.identity:
        return Plan(Sector.IDENTITY, 0.0, q)
    t1, t2 = _both_times(q, h)
    if min(t1.worst, t2.worst) <= r and _ext_feasible(q.x, q.y, q.z, h):
        return Plan(Sector.ND_EXT, PI - 2 * q.x, q)
    t = t1
    target = q
    if t2.worst < t1.worst:
        t = t2
        target = WeylPoint(PI / 2 - q.x, q.y, -q.z)
    if t.nd >= max(t.ea_plus, t.ea_minus):
        return Plan(Sector.ND, t.nd, target)
    if t.ea_plus >= t.ea_minus:
        return Plan(Sector.EA_PLUS, t.ea_plus, target)
    return Plan(Sector.EA_MINUS, t.ea_minus, target)


def gate_time(p, h_norm: float, r: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Normalized gate time chosen by :func:`compile` (no amplitude solve)."""
    return plan(p, h_norm, r, tol).tau


def gate_time_array(pts: np.ndarray, h_norm: float, r: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`gate_time` over canonical points of shape ``(n, 3)``."""
    pts = np.asarray(pts, dtype=float)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    h = float(h_norm)
    t1 = np.maximum.reduce([2 * x, 2 * (x + y + z) / (2 - h), 2 * (x + y - z) / (2 + h)])
    xp = PI / 2 - x
    t2 = np.maximum.reduce([2 * xp, 2 * (xp + y - z) / (2 - h), 2 * (xp + y + z) / (2 + h)])
    ext = (np.minimum(t1, t2) <= r) & _ext_feasible(x, y, z, h)
    tau = np.where(ext, PI - 2 * x, np.minimum(t1, t2))
    return np.where(np.abs(pts).max(axis=1) < tol.identity, 0.0, tau)


def sector_classify(p, h_norm: float, tau: float, slack: float = 1e-10) -> dict[str, bool]:
    """Membership of a point in the polygons ND(h; tau), EA+(h; tau), EA-(h; tau).

    In the sign convention of the sub-schemes:

    * ND: ``x = tau/2``, ``y + z in [0, min{(1-h) tau/2, pi - (1-h) tau/2}]``
      and ``y - z in [0, min{(1+h) tau/2, pi - (1+h) tau/2}]``;
    * EA+: ``x + y + z = (2-h) tau/2``, ``x >= y >= |z|``, ``y + z >= (1-h) x``;
    * EA-: ``x + y - z = (2+h) tau/2``, ``x >= y >= |z|``, ``y - z >= (1+h) x``.

    All inequalities carry ``slack``.
    """
    x, y, z = (float(v) for v in p)
    h = float(h_norm)
    s = slack

    def window(v, f):
        return -s <= v <= min(f * tau / 2, PI - f * tau / 2) + s

    nd = abs(x - tau / 2) <= s and window(y + z, 1 - h) and window(y - z, 1 + h)
    ordered = x + s >= y and y + s >= abs(z)
    ea_plus = abs(x + y + z - (2 - h) * tau / 2) <= s and ordered and y + z + s >= (1 - h) * x
    ea_minus = abs(x + y - z - (2 + h) * tau / 2) <= s and ordered and y - z + s >= (1 + h) * x
    return {"ND": nd, "EA_PLUS": ea_plus, "EA_MINUS": ea_minus}


# ---------------------------------------------------------------------------
# sub-schemes (normalized units)


def _amplitude(w: float, tau: float, f: float, tol: Tolerances) -> float:
    r = 2 * w / tau
    val = r * r - f * f
    # rounding noise in sinc_inv at the degenerate value r = f would otherwise
    # surface as a spurious amplitude of order sqrt(eps)
    if abs(val) <= 1e-12 * max(1.0, f * f):
        val = 0.0
    if val < 0:
        raise SectorViolationError(f"ND amplitude radicand {val:.3e} is negative")
    return math.sqrt(val) / 4


def _sinc_arg(num: float, den: float, tol: Tolerances) -> float:
    if den <= 0:
        raise SectorViolationError("non-positive ND denominator")
    s = num / den
    if s > 1 + tol.sinc_clamp or s < -tol.sinc_clamp:
        raise SectorViolationError(f"sinc_inv argument {s:.15g} outside [0, 1]")
    return min(max(s, 0.0), 1.0)


def ashn_nd(p, h_norm: float, tol: Tolerances = DEFAULT_TOL) -> PulseParams:
    """No-detuning scheme with ``tau = 2x``.

    ``r1 = 2 sinc_inv(2 sin(y+z)/((1-h) tau))/tau``,
    ``r2 = 2 sinc_inv(2 sin(y-z)/((1+h) tau))/tau``,
    ``Omega_i = sqrt(r_i^2 - (1 -+ h)^2)/4``.

    Raises:
        SectorViolationError: ``p`` is outside ND(h; 2x).
    """
    x, y, z = (float(v) for v in p)
    h = float(h_norm)
    tau = 2 * x
    if tau <= 0:
        raise SectorViolationError("ND needs x > 0")
    w1 = nk.sinc_inv(_sinc_arg(2 * math.sin(y + z), (1 - h) * tau, tol), tol) if h < 1 else 0.0
    w2 = nk.sinc_inv(_sinc_arg(2 * math.sin(y - z), (1 + h) * tau, tol), tol) if h > -1 else 0.0
    g1 = _amplitude(w1, tau, 1 - h, tol)
    g2 = _amplitude(w2, tau, 1 + h, tol)
    return PulseParams(tau, g1, g2, 0.0)


def ashn_nd_ext(p, h_norm: float, tol: Tolerances = DEFAULT_TOL) -> PulseParams:
    """Extended no-detuning scheme with ``tau = pi - 2x``.

    Equivalent to :func:`ashn_nd` at ``(pi/2 - x, y, -z)``: the roles of
    ``y + z`` and ``y - z`` swap.
    """
    x, y, z = (float(v) for v in p)
    return ashn_nd((PI / 2 - x, y, -z), h_norm, tol)


def ea_residual(tau_p, s, dtype=float):
    """``F(alpha, beta) - S`` for the equal-amplitude eigenvalue trace.

    ``F`` is the trace of the ``h = 0`` evolution over ``tau' = (1+h) tau`` in
    the ``(alpha, beta)`` eigenvalue parameterization.  ``dtype`` selects the
    working precision (``np.longdouble`` for the polish stage).
    """
    one_j = np.array(1j, dtype=np.result_type(dtype, np.complex128) if dtype is float else np.clongdouble)

    def f(a, b):
        a = np.asarray(a, dtype=dtype)
        b = np.asarray(b, dtype=dtype)
        d1 = (2 * a + b) * (1 + a + 2 * b)
        d2 = (1 - a + b) * (1 + a + 2 * b)
        d3 = (1 - a + b) * (2 * a + b)
        t1 = (1 - a) * b * np.exp(one_j * (tau_p * (a + b))) / d1
        t2 = (1 - a) * (1 + a + b) * np.exp(-one_j * (tau_p * (1 + b))) / d2
        t3 = b * (1 + a + b) * np.exp(-one_j * (tau_p * a)) / d3
        return t1 - t2 - t3 - s

    return f


def _ea_target(x, y, z, h, dtype=float):
    one_j = np.array(1j, dtype=np.complex128 if dtype is float else np.clongdouble)
    x, y, z, h = (np.asarray(v, dtype=dtype) for v in (x, y, z, h))
    tau = 2 * (x + y + z) / (2 - h)
    xs, ys, zs = x + h * tau / 2, y + h * tau / 2, z + h * tau / 2
    s = np.exp(one_j * (ys - xs - zs)) - np.exp(one_j * (xs - ys - zs)) - np.exp(one_j * (zs - xs - ys))
    return tau, (1 + h) * tau, s


def _polish_extended(a: float, b: float, x, y, z, h, max_iter: int = 80):
    """Newton refinement of an EA root in extended precision.

    Near the corners of the chamber the trace equation has an almost double
    root: a double-precision residual of 1e-11 fixes ``(alpha, beta)`` only
    to ~1e-6.  Iterating in ``long double`` (where available) pushes the
    residual to ~1e-19 and the root to ~1e-9 or better.
    """
    ld = np.longdouble
    _, tau_p, s = _ea_target(x, y, z, h, ld)
    f = ea_residual(tau_p, s, ld)
    step = ld(1e-7) if np.finfo(ld).eps < 1e-17 else ld(1e-5)
    pa = np.array([0, 1, -1, 0, 0], dtype=ld) * step
    pb = np.array([0, 0, 0, 1, -1], dtype=ld) * step
    ca, cb = ld(a), ld(b)
    vals = f(ca + pa, cb + pb)
    r = abs(vals[0])
    for _ in range(max_iter):
        if r == 0:
            break
        ja = (vals[1] - vals[2]) / (2 * step)
        jb = (vals[3] - vals[4]) / (2 * step)
        f0 = vals[0]
        det = ja.real * jb.imag - jb.real * ja.imag
        if det == 0 or not np.isfinite(det):
            break
        da = -(jb.imag * f0.real - jb.real * f0.imag) / det
        db = -(-ja.imag * f0.real + ja.real * f0.imag) / det
        lam = ld(1)
        improved = False
        for _ in range(20):
            na, nb = ca + lam * da, cb + lam * db
            nvals = f(na + pa, nb + pb)
            nr = abs(nvals[0])
            if np.isfinite(nr) and nr < r:
                ca, cb, vals, r, improved = na, nb, nvals, nr, True
                break
            lam /= 2
        if not improved:
            break
    return ca, cb, r


class EASolution(NamedTuple):
    params: PulseParams
    alpha: float
    beta: float
    residual: float


def ea_plus_solve(p, h_norm: float, tol: Tolerances = DEFAULT_TOL) -> EASolution:
    """Equal-amplitude scheme (drive on one qubit, with detuning), full record.

    The root is searched in ``[0, 1] x [0, 2 pi/min(tau, tau')]``.  For
    ``h < 0`` the root can lie above ``2 pi/tau`` (up to ``2 pi/tau'``), so
    the box is widened accordingly.
    """
    x, y, z = (float(v) for v in p)
    h = float(h_norm)
    tau = 2 * (x + y + z) / (2 - h)
    if tau <= 0:
        raise SectorViolationError("EA+ needs x + y + z > 0")
    if tau > PI + 1e-12:
        raise SectorViolationError(f"EA+ time {tau:.6g} exceeds pi")
    if 1 + h <= 0:
        raise SectorViolationError("EA+ is undefined at h = -1")
    _, tau_p, s = _ea_target(x, y, z, h)
    beta_hi = 2 * PI / min(tau, float(tau_p))
    f = ea_residual(float(tau_p), complex(s))
    root = nk.root2d(f, ((0.0, 1.0), (0.0, beta_hi)), tol)
    a, b, res = _polish_extended(root.alpha, root.beta, x, y, z, h)
    if not res <= root.residual:
        a, b, res = np.longdouble(root.alpha), np.longdouble(root.beta), root.residual
    one = np.longdouble(1)
    gamma = np.sqrt(max((one + a + b) * (one - a) * b, 0)) / 2
    d = np.sqrt(max((a + b) * a * (one + b), 0)) / 2
    params = PulseParams(tau, 0.0, float((1 + np.longdouble(h)) * gamma), float(-(1 + np.longdouble(h)) * d))
    return EASolution(params, float(a), float(b), float(res))


def ashn_ea_plus(p, h_norm: float, tol: Tolerances = DEFAULT_TOL) -> PulseParams:
    """Equal-amplitude scheme with ``tau = 2(x+y+z)/(2-h)``.

    Returns ``Omega1 = 0``, ``Omega2 = (1+h) gamma``, ``delta = -(1+h) d``
    where ``gamma, d`` follow from the root ``(alpha, beta)`` of the trace
    equation.

    Raises:
        NumericError: the root search failed.
    """
    return ea_plus_solve(p, h_norm, tol).params


def ashn_ea_minus(p, h_norm: float, tol: Tolerances = DEFAULT_TOL) -> PulseParams:
    """Mirror of :func:`ashn_ea_plus` through ``(z, h) -> (-z, -h)``."""
    x, y, z = (float(v) for v in p)
    q = ashn_ea_plus((x, y, -z), -float(h_norm), tol)
    return PulseParams(q.tau, q.omega2, 0.0, -q.delta)


_SCHEMES = {
    Sector.ND: ashn_nd,
    Sector.ND_EXT: ashn_nd_ext,
    Sector.EA_PLUS: ashn_ea_plus,
    Sector.EA_MINUS: ashn_ea_minus,
}


def compile(p, c: Couplings, cfg: CutoffConfig | None = None, tol: Tolerances = DEFAULT_TOL) -> tuple[PulseParams, Sector]:
    """Pulse parameters (physical units) realizing the class of ``p``.

    Args:
        p: Any real triple; it is canonicalized first.
        c: Device couplings.
        cfg: Cutoff; defaults to ``min(1.1, (1-|h|/g) pi/2)``.

    Returns:
        ``(params, sector)``.

    Raises:
        DomainError: cutoff out of range or non-finite coordinates.
        SectorViolationError, NumericError: propagated from the sub-schemes.
    """
    vals = [float(v) for v in p]
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise DomainError(f"target must be three finite reals, got {p!r}")
    if cfg is None:
        cfg = default_cutoff(c)
    cfg.check(c)
    h = c.h_norm
    pl = plan(vals, h, cfg.r, tol)
    if pl.sector is Sector.IDENTITY:
        return EMPTY_PULSE, Sector.IDENTITY
    params = _SCHEMES[pl.sector](pl.point, h, tol)
    if abs(params.tau - pl.tau) > 1e-12:
        raise NumericError("sub-scheme time disagrees with dispatch")
    return params.scaled(c.g), pl.sector


def default_cutoff(c: Couplings) -> CutoffConfig:
    return CutoffConfig(min(1.1, max_cutoff(c.h_norm)))


def verify(p, params: PulseParams, c: Couplings, tol: Tolerances = DEFAULT_TOL) -> float:
    """Coordinate error of a pulse against a target (radians, max-norm).

    The distance is taken in the glued chamber (see
    :func:`weyl.weyl_distance`) so that the ``x = pi/4`` face does not
    produce spurious errors.
    """
    target = weyl.canonicalize(p, tol)
    got = weyl.interaction_coefficients(evolve(params, c, tol), tol)
    return float(weyl.weyl_distance(target, got))


def verify_many(points: np.ndarray, params: Sequence[PulseParams], c: Couplings, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`verify`."""
    target = weyl.canonicalize_array(np.asarray(points, dtype=float), tol)
    got = weyl.interaction_coefficients_array(evolve_many(params, c, tol), tol)
    return weyl.weyl_distance(target, got)


def amplitude_max(p: PulseParams) -> float:
    """``max{|Omega1 + Omega2|, |Omega1 - Omega2|, |delta|}``."""
    return max(abs(p.omega1 + p.omega2), abs(p.omega1 - p.omega2), abs(p.delta))


# ---------------------------------------------------------------------------
# average gate time


def avg_gate_time_mc(r: float, n: int, seed: int, h_norm: float = 0.0, tol: Tolerances = DEFAULT_TOL) -> float:
    """Monte Carlo mean of the compiled gate time over the Haar measure."""
    if n < 1:
        raise DomainError("need at least one sample")
    if r < 0 or r > max_cutoff(h_norm) + 1e-12:
        raise DomainError(f"cutoff {r} out of range")
    pts = weyl.sample_weyl(seed, n, tol)
    return float(np.mean(gate_time_array(pts, h_norm, r, tol)))


def avg_gate_time_closed(r: float) -> float:
    """Closed-form average gate time at ``h = 0`` for cutoff ``r``."""
    r = float(r)
    if r < 0 or r > PI / 2 + 1e-15:
        raise DomainError(f"closed form valid for r in [0, pi/2], got {r}")
    pi = PI
    c = math.cos
    s = math.sin
    a = 225 * (-176 * r * r + 96 * pi * r - 105) * c(4 * r)
    b = 50 * (-576 * r * r + 576 * pi * r - 30 * c(6 * r) + 252 * pi * pi + 97)
    m = pi - 2 * r
    d = 60 * (
        480 * m * s(r)
        - 603 * m * s(2 * r)
        - 128 * m * s(3 * r)
        + 30 * (19 * pi - 33 * r) * s(4 * r)
        - 480 * m * s(5 * r)
        + 65 * m * s(6 * r)
    )
    e = -59049 * c(4 * r / 3) + 51708 * c(2 * r) + 9216 * c(3 * r) + 15360 * c(5 * r)
    return (a + b + d + e) / (28800 * pi)


def amplitude_bound(r: float) -> float:
    """``pi/r + 1/2``: amplitude bound at ``h = 0`` (infinite at ``r = 0``)."""
    return math.inf if r == 0 else PI / r + 0.5


def uniform_amplitude_bound(h_norm: float) -> float:
    """``2(1+|h|)/(1-|h|) + 1/2`` at the maximal cutoff."""
    a = abs(h_norm)
    return 2 * (1 + a) / (1 - a) + 0.5


# ---------------------------------------------------------------------------
# special gates


class GateClass(str, enum.Enum):
    CNOT = "CNOT"
    SWAP = "SWAP"
    B = "B"
    ISWAP = "ISWAP"


GATE_POINTS = {
    GateClass.CNOT: WeylPoint(PI / 4, 0.0, 0.0),
    GateClass.SWAP: WeylPoint(PI / 4, PI / 4, PI / 4),
    GateClass.B: WeylPoint(PI / 4, PI / 8, 0.0),
    GateClass.ISWAP: WeylPoint(PI / 4, PI / 4, 0.0),
}

# exp(-i pi/4 XX)
XX_HALF_PI = np.array([[1, 0, 0, -1j], [0, 1, -1j, 0], [0, -1j, 1, 0], [-1j, 0, 0, 1]], dtype=complex) / math.sqrt(2)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
ZZ_SWAP = nk.ZZ @ SWAP


def cnot_closed_form(c: Couplings) -> PulseParams:
    """CNOT-class pulse with ZZ coupling: ``A_{1,2} = -(sqrt(16g^2-(g-h)^2) +- sqrt(16g^2-(g+h)^2))/2``."""
    g, h = c.g, c.h
    u = math.sqrt(16 * g * g - (g - h) ** 2)
    v = math.sqrt(16 * g * g - (g + h) ** 2)
    return PulseParams(PI / (2 * g), u / 4, v / 4, 0.0)


def special_gate(cls, c: Couplings, tol: Tolerances = DEFAULT_TOL) -> tuple[PulseParams, np.ndarray | None]:
    """Pulse for a named gate class and its realized matrix where known.

    The matrix is attached for CNOT (``exp(-i pi/4 XX)``) and SWAP
    (``ZZ SWAP``) at ``h = 0``, where the pulse realizes it exactly up to a
    global phase.

    Raises:
        PreconditionError: unknown class.
    """
    try:
        cls = GateClass(cls)
    except ValueError as exc:
        raise PreconditionError(f"unsupported gate class {cls!r}") from exc
    if cls is GateClass.CNOT:
        params = cnot_closed_form(c)
        return params, (XX_HALF_PI if c.h == 0 else None)
    params, _ = compile(GATE_POINTS[cls], c, CutoffConfig(0.0), tol)
    matrix = ZZ_SWAP if (cls is GateClass.SWAP and c.h == 0) else None
    return params, matrix
