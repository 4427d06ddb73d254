"""Observer kinematics and the momentum-dependent Wigner rotation.

Natural units (hbar = c = 1) throughout.  Three-vectors are plain numpy arrays
of shape ``(3,)``; every function that takes a momentum also accepts a stack
of momenta of shape ``(N, 3)`` and then returns arrays of length ``N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite float array with trailing dimension 3."""
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"{name} must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components: {arr}")
    return arr


def unit(v, name: str = "axis") -> np.ndarray:
    """Normalize a 3-vector; a zero vector is an error."""
    arr = as_vector(v, name)
    norm = np.linalg.norm(arr)
    if norm == 0.0:
        raise ValueError(f"{name} must be nonzero")
    return arr / norm


@dataclass(frozen=True)
class FourVelocity:
    """Observer four-velocity ``(cosh beta, sinh beta * n)``.

    ``direction`` keeps the boost axis so the rest observer (beta = 0) still
    knows which axis it would be boosted along.
    """

    u0: float
    u_spatial: np.ndarray
    direction: np.ndarray
    rapidity: float

    def __post_init__(self):
        if not self.u0 >= 1.0:
            raise ValueError(f"u0 must be >= 1, got {self.u0}")
        norm = self.u0**2 - self.u_spatial @ self.u_spatial
        if abs(norm - 1.0) > 1e-10 * self.u0**2:
            raise ValueError(f"four-velocity is not unit norm: u.u = {norm}")

    @property
    def speed(self) -> float:
        """Observer three-speed ``tanh(beta)``."""
        return math.tanh(self.rapidity)


def four_velocity(beta: float, n) -> FourVelocity:
    """Four-velocity of an observer with rapidity ``beta`` along axis ``n``."""
    beta = float(beta)
    if not math.isfinite(beta):
        raise ValueError(f"rapidity must be finite, got {beta}")
    if beta < 0:
        raise ValueError(f"rapidity must be >= 0, got {beta}")
    axis = unit(n, "boost axis")
    return FourVelocity(math.cosh(beta), math.sinh(beta) * axis, axis, beta)


def lambda_param(u: FourVelocity) -> float:
    """Boost strength ``sqrt((u0 - 1)/(u0 + 1))``, equal to ``tanh(beta/2)``.

    Evaluated as ``|u|/(u0 + 1)`` which is algebraically identical (since
    ``u0**2 - |u|**2 = 1``) and avoids the cancellation in ``u0 - 1``.
    """
    return float(np.linalg.norm(u.u_spatial) / (u.u0 + 1.0))


def _degenerate_threshold(p_norm, n_norm):
    return 1e-12 * np.maximum(p_norm, 1.0) * np.maximum(n_norm, 1.0)


def rotation_axes(p, n) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``p x n / |p x n|`` with a degeneracy mask.

    Degenerate rows (``p`` parallel to ``n`` or zero) get a zero axis.
    """
    p = as_vector(p, "momentum")
    n = as_vector(n, "axis")
    c = np.cross(p, n)
    length = np.linalg.norm(c, axis=-1)
    degenerate = length < _degenerate_threshold(np.linalg.norm(p, axis=-1), np.linalg.norm(n))
    safe = np.where(degenerate, 1.0, length)
    axis = np.where(np.expand_dims(degenerate, -1), 0.0, c / np.expand_dims(safe, -1))
    return axis, degenerate


def rotation_axis(p, n) -> np.ndarray | None:
    """Unit axis ``p x n / |p x n|`` for one momentum, or ``None`` if degenerate."""
    axis, degenerate = rotation_axes(as_vector(p, "momentum").reshape(3), n)
    return None if bool(degenerate) else axis


@dataclass(frozen=True)
class WignerAngle:
    """Sine and cosine of the Wigner angle plus its rotation axis.

    Fields are floats for a single momentum and arrays for a stack.  ``axis``
    rows are zero where ``degenerate`` is set.  ``kind`` distinguishes the
    exact ratios from the small-momentum expansion, whose pair is only
    normalized to third order in ``|p|/m``.
    """

    sin_omega: float | np.ndarray
    cos_omega: float | np.ndarray
    axis: np.ndarray
    degenerate: bool | np.ndarray
    kind: Literal["exact", "expanded"] = "exact"

    def unit_circle_error(self):
        return np.abs(np.square(self.sin_omega) + np.square(self.cos_omega) - 1.0)


def _check_mass(m: float) -> float:
    m = float(m)
    if not (math.isfinite(m) and m > 0):
        raise ValueError(f"mass must be positive and finite, got {m}")
    return m


def _squeeze(value, single: bool):
    return value.item() if single else value


def wigner_angle_exact(p, u: FourVelocity, m: float) -> WignerAngle:
    """Exact Wigner angle for momentum ``p`` seen by observer ``u``.

    With ``N = (1 + u0)(p0 + m) - u.p`` and ``C = |p x u|``::

        sin = 2 N C / (N^2 + C^2),   cos = (N^2 - C^2) / (N^2 + C^2)

    ``N`` is strictly positive because ``u0 >= |u|`` and ``p0 >= |p|``, so
    ``sin >= 0``.
    """
    m = _check_mass(m)
    p = as_vector(p, "momentum")
    single = p.ndim == 1
    p2 = np.atleast_2d(p)
    p0 = np.sqrt(m * m + np.einsum("ij,ij->i", p2, p2))
    big = (1.0 + u.u0) * (p0 + m) - p2 @ u.u_spatial
    small = np.linalg.norm(np.cross(p2, u.u_spatial), axis=-1)
    den = big * big + small * small
    sin_om = 2.0 * big * small / den
    cos_om = (big * big - small * small) / den
    axis, degenerate = rotation_axes(p2, u.direction)
    sin_om = np.where(degenerate, 0.0, sin_om)
    cos_om = np.where(degenerate, 1.0, cos_om)
    if np.any(sin_om < 0):
        raise ArithmeticError("negative sin(Omega) from the exact ratios")
    return WignerAngle(
        _squeeze(sin_om, single),
        _squeeze(cos_om, single),
        axis[0] if single else axis,
        _squeeze(degenerate, single),
        "exact",
    )


def wigner_angle_expanded(p, n, lam: float, m: float) -> WignerAngle:
    """Second-order small-momentum expansion of the Wigner angle.

    ``sin = (lam/m)|p x n|(1 + lam p.n/(2m))`` and
    ``cos = 1 - (lam/m)^2 |p x n|^2 / 2``.
    """
    m = _check_mass(m)
    n = unit(n)
    p = as_vector(p, "momentum")
    single = p.ndim == 1
    p2 = np.atleast_2d(p)
    pn = np.cross(p2, n)
    pn_sq = np.einsum("ij,ij->i", pn, pn)
    sin_om = lam / m * np.sqrt(pn_sq) * (1.0 + lam / (2.0 * m) * (p2 @ n))
    cos_om = 1.0 - lam**2 / (2.0 * m * m) * pn_sq
    axis, degenerate = rotation_axes(p2, n)
    sin_om = np.where(degenerate, 0.0, sin_om)
    cos_om = np.where(degenerate, 1.0, cos_om)
    return WignerAngle(
        _squeeze(sin_om, single),
        _squeeze(cos_om, single),
        axis[0] if single else axis,
        _squeeze(degenerate, single),
        "expanded",
    )
