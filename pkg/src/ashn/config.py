"""Tolerance record.

Every numerical threshold used by the package lives in :class:`Tolerances`.
Functions accept an optional ``tol`` argument and fall back to
:data:`DEFAULT_TOL`; nothing reads mutable global state.  The CLI builds its
record from the ``ASHN_TOL`` environment variable, a JSON object whose keys
are field names, e.g. ``ASHN_TOL='{"round_trip": 1e-7}'``.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .errors import PreconditionError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    Attributes:
        hermitian: Max-norm slack for Hermiticity preconditions.
        unitary: Max-norm slack for unitarity preconditions.
        jacobi_offdiag: Relative off-diagonal Frobenius mass at which Jacobi stops.
        jacobi_max_sweeps: Sweep budget for the Jacobi eigensolver and SVD.
        eig_cluster: Eigenvalue gap below which joint diagonalization refines a cluster.
        sinc_clamp: Slack above 1 that ``sinc_inv`` silently clamps.
        root_residual: Residual accepted by ``root2d``.
        root_grid: Seeds per axis for ``root2d``.
        root_fd_step: Forward-difference step for the Newton Jacobian.
        root_max_iter: Newton iterations per seed.
        snap: Distance to a Weyl-chamber wall below which a coordinate is snapped.
        identity: Coordinates below this are treated as the identity class.
        round_trip: Coordinate error accepted by verification commands.
    """

    hermitian: float = 1e-10
    unitary: float = 1e-10
    jacobi_offdiag: float = 1e-14
    jacobi_max_sweeps: int = 60
    eig_cluster: float = 1e-6
    sinc_clamp: float = 1e-12
    root_residual: float = 1e-10
    root_grid: int = 32
    root_fd_step: float = 1e-7
    root_max_iter: int = 100
    snap: float = 1e-12
    identity: float = 1e-12
    round_trip: float = 1e-8

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_json(cls, text: str) -> "Tolerances":
        """Builds a record from a JSON object of overrides."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"tolerance overrides are not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise PreconditionError("tolerance overrides must be a JSON object")
        names = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise PreconditionError(f"unknown tolerance fields: {', '.join(unknown)}")
        base = cls()
        kwargs = {}
        for key, value in data.items():
            kind = type(getattr(base, key))
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise PreconditionError(f"tolerance {key!r} must be numeric")
            kwargs[key] = kind(value)
        return dataclasses.replace(base, **kwargs)

    @classmethod
    def from_env(cls, var: str = "ASHN_TOL") -> "Tolerances":
        text = os.environ.get(var)
        if not text:
            return cls()
        return cls.from_json(text)


DEFAULT_TOL = Tolerances()
