"""Source world-lines and the geometric factors of the field formulas.

Every quantity here is a fixed-emission-time spatial derivative of the range
r(x, tau) = |x - x0(tau)|, so the closed forms below hold for any trajectory
kind, not just straight lines:

    grad r = u                      (unit vector from source to observer)
    curl of (r-scaled velocity field):   grad r x v = u x v
    grad(div) factor:  grad(v . grad r) = (v - (v.u) u)/r

The second expression is what the leading-order magnetic amplitude needs; the
third drives the electric amplitude.  Both are validated against nested
finite differences of r itself in the test suite (the finite-difference
oracle is authoritative).
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ObserverOnTrajectory

__all__ = [
    "Vec3", "as_vec3", "StraightLine", "OffsetLine", "CustomTrajectory",
    "Trajectory", "Geometry", "AmplitudeGeometry", "position", "velocity",
    "acceleration", "geometry", "amplitude_geometry",
]

Vec3 = np.ndarray

_MIN_RANGE = 1e-12          # l0 units; closer counts as "on the trajectory"
_FD_REL_STEP = 1e-6


def as_vec3(x) -> Vec3:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True)
class StraightLine:
    """x0(tau) = origin + velocity * tau."""

    origin: tuple = (0.0, 0.0, 0.0)
    velocity: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(map(float, self.origin)))
        object.__setattr__(self, "velocity", tuple(map(float, self.velocity)))


@dataclass(frozen=True)
class OffsetLine:
    """x0(tau) = (0, v*tau, H): motion along x2 at lateral offset H."""

    v: float = 0.0
    H: float = 0.0


@dataclass(frozen=True)
class CustomTrajectory:
    """Arbitrary world-line given by callables tau -> 3-vector.

    The callables must be pure and safe to call concurrently.  Missing
    velocity/acceleration callables are replaced by central finite
    differences (one Richardson level) and the resulting geometry is marked
    reduced-precision.  ``slow_scale`` is the dimensionless slowness scale of
    the motion; the bundled world-line is x0(t) = slow_scale * X0(t/slow_scale)
    for some bounded profile X0, which keeps the velocity bounded uniformly.
    """

    position_fn: Callable[[float], Vec3]
    velocity_fn: Optional[Callable[[float], Vec3]] = None
    acceleration_fn: Optional[Callable[[float], Vec3]] = None
    slow_scale: float = 1.0


Trajectory = Union[StraightLine, OffsetLine, CustomTrajectory]


def position(traj: Trajectory, tau: float) -> Vec3:
    if isinstance(traj, OffsetLine):
        return np.array([0.0, traj.v * tau, traj.H])
    if isinstance(traj, StraightLine):
        return np.asarray(traj.origin) + np.asarray(traj.velocity) * tau
    return as_vec3(traj.position_fn(tau))


def _richardson(f: Callable[[float], np.ndarray], tau: float) -> np.ndarray:
    """Central difference with one Richardson extrapolation level."""
    h = _FD_REL_STEP * max(1.0, abs(tau))
    d1 = (f(tau + h) - f(tau - h)) / (2 * h)
    d2 = (f(tau + h / 2) - f(tau - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def velocity(traj: Trajectory, tau: float) -> Vec3:
    if isinstance(traj, OffsetLine):
        return np.array([0.0, traj.v, 0.0])
    if isinstance(traj, StraightLine):
        return np.asarray(traj.velocity, dtype=float)
    if traj.velocity_fn is not None:
        return as_vec3(traj.velocity_fn(tau))
    return _richardson(lambda s: position(traj, s), tau)


def acceleration(traj: Trajectory, tau: float) -> Vec3:
    if isinstance(traj, (OffsetLine, StraightLine)):
        return np.zeros(3)
    if traj.acceleration_fn is not None:
        return as_vec3(traj.acceleration_fn(tau))
    if traj.velocity_fn is not None:
        return _richardson(lambda s: as_vec3(traj.velocity_fn(s)), tau)
    return _richardson(lambda s: velocity(traj, s), tau)


def _is_reduced_precision(traj: Trajectory) -> bool:
    return isinstance(traj, CustomTrajectory) and (
        traj.velocity_fn is None or traj.acceleration_fn is None)


@dataclass(frozen=True)
class Geometry:
    """Range, direction, radial speed projection and its emission-time rate."""

    r: float
    unit_dir: Vec3
    v_rad: float
    dv_rad_dtau: float
    reduced_precision: bool = False


@dataclass(frozen=True)
class AmplitudeGeometry:
    curl_factor: Vec3
    graddiv_factor: Vec3
    reduced_precision: bool = False


def geometry(traj: Trajectory, x, tau: float) -> Geometry:
    """All scalar geometry at observer x and emission time tau.

    dv_rad/dtau uses d(x - x0)/dtau = -v and d r/dtau = -v_rad:

        d/dtau (v . u) = a . u + (v_rad**2 - |v|**2)/r
    """
    x = as_vec3(x)
    d = x - position(traj, tau)
    r = float(np.linalg.norm(d))
    if r < _MIN_RANGE:
        raise ObserverOnTrajectory(f"observer within {_MIN_RANGE} of source")
    u = d / r
    v = velocity(traj, tau)
    v_rad = float(v @ u)
    a = acceleration(traj, tau)
    dv_rad = float(a @ u) + (v_rad * v_rad - float(v @ v)) / r
    return Geometry(r=r, unit_dir=u, v_rad=v_rad, dv_rad_dtau=dv_rad,
                    reduced_precision=_is_reduced_precision(traj))


def amplitude_geometry(traj: Trajectory, x, tau: float) -> AmplitudeGeometry:
    """The two 3-vector amplitude factors at fixed emission time.

    curl_factor  = grad r x v = u x v
    graddiv_factor = grad(v . grad r) = (v - v_rad u)/r

    For motion (0, v*tau, H) these reduce componentwise to
    (-v (x3-H)/r, 0, v x1/r) and
    v (-x1 (x2-v tau)/r**3, (x1**2+(x3-H)**2)/r**3, -(x3-H)(x2-v tau)/r**3);
    the coordinate-free forms above are their simplification and cover every
    trajectory kind, since only fixed-tau spatial derivatives of r enter.
    """
    x = as_vec3(x)
    d = x - position(traj, tau)
    r = float(np.linalg.norm(d))
    if r < _MIN_RANGE:
        raise ObserverOnTrajectory(f"observer within {_MIN_RANGE} of source")
    u = d / r
    v = velocity(traj, tau)
    v_rad = float(v @ u)
    return AmplitudeGeometry(
        curl_factor=np.cross(u, v),
        graddiv_factor=(v - v_rad * u) / r,
        reduced_precision=_is_reduced_precision(traj))
