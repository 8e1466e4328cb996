"""Physical outputs: Doppler shifts, retarded times, leading-order fields,
closed-form special cases and the Cherenkov gate.

The magnetic and electric amplitudes of one stationary point are

    H = i k(w_s) a(tau_s) (u x v) e^{i(S + pi/4 sgn)} / (4 pi r sqrt|det|)
    E = [w_s mu(w_s) v - (v - v_rad u)/r] a(tau_s) e^{i(S + pi/4 sgn)}
        / (4 pi i r sqrt|det|)

with u the unit source-observer direction and v the source velocity (or the
polarization vector for a motionless modulated source).
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from . import dispersion as disp
from . import stationary_phase as sph
from . import trajectory as trj
from .errors import (BelowCutoff, EvanescentRegime,
                     GroupVelocityMatchesSource, LeftPropagatingBand,
                     NoCherenkovRoot, NoConvergence, NoRootInBand,
                     ObserverOnTrajectory, SuperluminalMach,
                     SuperluminalRadialSpeed)

__all__ = [
    "SourceModel", "FieldContribution", "DopplerClass", "moving_source_fields",
    "nondispersive_doppler", "plasma_doppler_closed_form",
    "metamaterial_doppler_1d", "retard_1d", "metamaterial_doppler_2d",
    "PlanarDopplerSolution", "cherenkov_solve", "doppler_classification",
]


def _unit_envelope(t: float) -> float:
    return 1.0


@dataclass(frozen=True)
class SourceModel:
    """Modulated source: carrier omega0, slow real envelope, charge.

    ``polarization`` supplies the current direction when the trajectory
    velocity vanishes (a motionless modulated source); it is ignored for a
    moving source.
    """

    omega0: float
    envelope: Callable[[float], float] = _unit_envelope
    charge: float = 1.0
    polarization: Optional[tuple] = None

    def __post_init__(self):
        if self.omega0 < 0:
            raise ValueError("omega0 must be >= 0")


@dataclass(frozen=True)
class FieldContribution:
    """One stationary point's contribution to the received field."""

    H: np.ndarray
    E: np.ndarray
    phase_value: float
    instantaneous_frequency: float
    retarded_time: float
    doppler_shift: float
    gate: bool
    point: sph.StationaryPoint


class DopplerClass(enum.Enum):
    BLUE_SHIFT = "blue-shift"
    RED_SHIFT = "red-shift"
    NO_SHIFT = "no-shift"


def doppler_classification(k_at_solution: float, v_rad: float) -> DopplerClass:
    """Shift direction from the stationary identity w_s - w0 = k v_rad.

    A negative wavenumber (left-handed band) automatically reverses the
    usual approach/recession rule.
    """
    kv = k_at_solution * v_rad
    if kv > 0:
        return DopplerClass.BLUE_SHIFT
    if kv < 0:
        return DopplerClass.RED_SHIFT
    return DopplerClass.NO_SHIFT


def _amp_factors(u: np.ndarray, r: float, direction: np.ndarray):
    """curl and grad-div amplitude factors for a given current direction."""
    d_rad = float(direction @ u)
    return np.cross(u, direction), (direction - d_rad * u) / r


def _assemble(source: SourceModel, traj, model, x, t,
              sp: sph.StationaryPoint, gate: bool) -> FieldContribution:
    x = trj.as_vec3(x)
    g = trj.geometry(traj, x, sp.tau_s)
    s = disp.sample(model, sp.omega_s)
    k = s.k.real
    s_val = k * g.r - sp.omega_s * (t - sp.tau_s) - source.omega0 * sp.tau_s
    direction = trj.velocity(traj, sp.tau_s)
    if not np.any(direction) and source.polarization is not None:
        direction = trj.as_vec3(source.polarization)
    zero = np.zeros(3, dtype=complex)
    if gate and not sp.degenerate and np.any(direction):
        a = float(source.envelope(sp.tau_s))
        curl, graddiv = _amp_factors(g.unit_dir, g.r, direction)
        scale = a * np.exp(1j * (s_val + 0.25 * math.pi * sp.signature)) \
            / (4.0 * math.pi * g.r * math.sqrt(abs(sp.det)))
        h_vec = 1j * k * curl * scale
        e_vec = (sp.omega_s * s.mu * direction - graddiv) * scale / 1j
    else:
        h_vec, e_vec = zero.copy(), zero.copy()
    return FieldContribution(
        H=h_vec, E=e_vec, phase_value=s_val,
        instantaneous_frequency=sp.omega_s,
        retarded_time=t - sp.tau_s,
        doppler_shift=sp.omega_s - source.omega0,
        gate=gate, point=sp)


def moving_source_fields(source: SourceModel, traj, model, x, t,
                         tol: float = 1e-10, max_iter: int = 60,
                         seed=None, seed_box=None, n_seeds=(8, 8)
                         ) -> list[FieldContribution]:
    """Leading-order contributions at observer (t, x), sorted by emission time.

    No stationary point yields an empty list.  Degenerate (caustic) points
    are kept in the list with zero fields and ``point.degenerate`` set.
    """
    ctx = sph.PhaseContext(t=t, x=tuple(trj.as_vec3(x)), omega0=source.omega0,
                           trajectory=traj, dispersion=model)
    points = []
    if seed_box is not None:
        points = sph.solve_grid(ctx, seed_box[0], seed_box[1],
                                n_omega=n_seeds[0], n_tau=n_seeds[1],
                                tol=tol, max_iter=max_iter)
    else:
        try:
            points = [sph.solve_newton(ctx, seed=seed, tol=tol,
                                       max_iter=max_iter)]
        except (NoConvergence, LeftPropagatingBand, EvanescentRegime,
                ObserverOnTrajectory):
            points = []
    out = [_assemble(source, traj, model, x, t, sp, gate=True)
           for sp in points]
    return sorted(out, key=lambda c: c.point.tau_s)


def nondispersive_doppler(omega0: float, v_rad: float, c: float = 1.0) -> float:
    """w_s = w0 / (1 - v_rad/c) for a frequency-independent light speed."""
    if c <= 0:
        raise ValueError("phase speed must be positive")
    if abs(v_rad) >= c:
        raise SuperluminalRadialSpeed(f"|v_rad|={abs(v_rad):g} >= c={c:g}")
    return omega0 / (1.0 - v_rad / c)


def plasma_doppler_closed_form(omega0: float, omega_p: float, mach: float,
                               approaching: bool = True) -> float:
    """Head-on constant-velocity shift in a cold plasma:

        w_s = (w0 +/- M sqrt(w0**2 - (1 - M**2) wp**2)) / (1 - M**2),

    plus branch for approach, minus for recession.  Requires w0 > wp.
    """
    if not 0.0 <= mach < 1.0:
        raise SuperluminalMach(f"Mach number {mach:g} outside [0, 1)")
    if omega0 <= omega_p:
        raise BelowCutoff(f"omega0={omega0:g} <= omega_p={omega_p:g}")
    disc = omega0 * omega0 - (1.0 - mach * mach) * omega_p * omega_p
    if disc < 0:
        raise BelowCutoff("no real shifted frequency")
    sign = 1.0 if approaching else -1.0
    return (omega0 + sign * mach * math.sqrt(disc)) / (1.0 - mach * mach)


def _band_interval(model, omega0: float, lo_cap=None, hi_cap=None):
    """Contiguous propagating interval containing omega0.

    Coarse grid march from the carrier, then bisection refinement of each
    edge so roots hugging a band edge are not cut off.
    """
    lo_cap = omega0 * 1e-3 if lo_cap is None else lo_cap
    hi_cap = omega0 * 10.0 if hi_cap is None else hi_cap
    step = omega0 * 1e-3
    if not disp.sample(model, omega0).propagating:
        return None

    def refine(good, bad):
        for _ in range(50):
            mid = 0.5 * (good + bad)
            if disp.sample(model, mid).propagating:
                good = mid
            else:
                bad = mid
        return good

    lo = omega0
    while lo - step > lo_cap and disp.sample(model, lo - step).propagating:
        lo -= step
    if lo - step > lo_cap:
        lo = refine(lo, lo - step)
    hi = omega0
    while hi + step < hi_cap and disp.sample(model, hi + step).propagating:
        hi += step
    if hi + step < hi_cap:
        hi = refine(hi, hi + step)
    return lo, hi


def metamaterial_doppler_1d(model, omega0: float, v: float, sign: int = +1,
                            omega_range=None, n_scan: int = 4001
                            ) -> list[float]:
    """Roots of g(w) = w (1 + sign * n(w) v) - w0 on the propagating band.

    Scans the band containing omega0 (or the given range), brackets sign
    changes and polishes each with a safeguarded bisection/Newton hybrid.
    Returns every root found (ascending); callers select among multiple.
    """
    if not -1.0 < v < 1.0:
        raise ValueError("source speed must lie in (-1, 1)")
    if omega_range is None:
        omega_range = _band_interval(model, omega0)
        if omega_range is None:
            raise NoRootInBand(f"omega0={omega0:g} is not propagating")

    def g(w):
        s = disp.sample(model, w)
        if not s.propagating:
            return math.nan
        return w * (1.0 + sign * s.n.real * v) - omega0

    grid = np.linspace(omega_range[0], omega_range[1], n_scan)
    vals = np.array([g(w) for w in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if math.isnan(fa) or math.isnan(fb):
            continue
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(g, a, b, xtol=1e-14, rtol=1e-15)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NoRootInBand(
            f"no Doppler root in [{omega_range[0]:g}, {omega_range[1]:g}]")
    return sorted(roots)


def retard_1d(v: float, v_g: float, x2: float, t: float) -> float:
    """tau = (x2 - v_g t)/(v - v_g): emission time for collinear 1-D motion."""
    denom = v - v_g
    if denom == 0.0:
        raise GroupVelocityMatchesSource("v equals v_g; no finite solution")
    return (x2 - v_g * t) / denom


@dataclass(frozen=True)
class PlanarDopplerSolution:
    """Converged planar stationary point plus the closed-form cross-check.

    ``w2d_relative_error`` measures how well the converged frequency matches
    the algebraic solution w = w0 r / (r - n v (x2 - v tau)) of the Doppler
    equation at the converged tau (matching-sign branch of the printed
    quadratic form).
    """

    omega_s: float
    tau_s: float
    point: sph.StationaryPoint
    w2d_relative_error: float


def metamaterial_doppler_2d(model, omega0: float, v: float, x1: float,
                            x2: float, t: float, tol: float = 1e-10,
                            max_iter: int = 80, seed=None, seed_box=None,
                            n_seeds=(8, 8)) -> PlanarDopplerSolution:
    """Joint (omega, tau) solve for planar geometry (x3 = 0, offset H = 0).

    The primary path is the damped Newton solve of the full stationary
    system; the planar closed form is evaluated afterwards as a consistency
    check and reported in the result.
    """
    traj = trj.OffsetLine(v=v, H=0.0)
    ctx = sph.PhaseContext(t=t, x=(x1, x2, 0.0), omega0=omega0,
                           trajectory=traj, dispersion=model)
    sp = None
    if seed_box is None:
        sp = sph.solve_newton(ctx, seed=seed, tol=tol, max_iter=max_iter)
    else:
        found = sph.solve_grid(ctx, seed_box[0], seed_box[1],
                               n_omega=n_seeds[0], n_tau=n_seeds[1],
                               tol=tol, max_iter=max_iter)
        if not found:
            raise NoConvergence("no stationary point from the seed grid", None)
        # closest in frequency to the carrier
        sp = min(found, key=lambda p: abs(p.omega_s - omega0))
    s = disp.sample(model, sp.omega_s)
    r = math.hypot(x1, x2 - v * sp.tau_s)
    denom = r - s.n.real * v * (x2 - v * sp.tau_s)
    w_closed = omega0 * r / denom if denom != 0 else math.inf
    rel = abs(sp.omega_s - w_closed) / max(abs(sp.omega_s), 1e-300)
    return PlanarDopplerSolution(omega_s=sp.omega_s, tau_s=sp.tau_s,
                                 point=sp, w2d_relative_error=rel)


def _positive_phase_speed_min(model, omega_lo, omega_hi, n=400):
    """Smallest positive phase speed on the scanned propagating grid."""
    best = math.inf
    for w in np.linspace(omega_lo, omega_hi, n):
        if w <= 0:
            continue
        try:
            s = disp.sample(model, w)
        except Exception:
            continue
        if s.propagating and s.v_phase is not None and s.v_phase > 0:
            best = min(best, s.v_phase)
    return best


def cherenkov_solve(model, v_vec, x, t, omega_scan=(1e-3, 10.0)
                    ) -> FieldContribution:
    """Zero-carrier radiating point of a uniformly moving charge.

    The radiating condition is v_rad(x, tau_s) = c(omega_s) > 0 together with
    the retardation equation; causality confines the radiation to the cone

        v t - zeta - |x_perp| sqrt(|beta**2 - 1|) > 0,   beta = v/v_g,

    where zeta is the observer coordinate along the motion and x_perp the
    transverse offset.  In a frequency-independent medium every frequency
    radiates on the same cone: the returned point carries the solved emission
    time, omega_s = 0 as a placeholder, and a degenerate Hessian (the
    stationary point is the tangency of the retardation roots), so the
    leading-order field formula does not apply and the fields are zero.
    """
    v_vec = trj.as_vec3(v_vec)
    x = trj.as_vec3(x)
    speed = float(np.linalg.norm(v_vec))
    if not 0.0 < speed < 1.0:
        raise ValueError("source speed must lie in (0, 1)")
    vhat = v_vec / speed
    zeta = float(x @ vhat)
    x_perp = float(np.linalg.norm(x - zeta * vhat))
    traj = trj.StraightLine(origin=(0.0, 0.0, 0.0), velocity=tuple(v_vec))
    source = SourceModel(omega0=0.0)

    if isinstance(model, disp.NonDispersive):
        s = disp.sample(model, 1.0)
        c = s.v_phase
        if c >= speed:
            raise NoCherenkovRoot(
                f"phase speed {c:g} >= source speed {speed:g}")
        beta = speed / s.v_group
        gate = speed * t - zeta - x_perp * math.sqrt(abs(beta * beta - 1.0)) > 0
        # (ch2'): v_rad(tau) = c has the closed-form bracket below; solve it
        # numerically so the reported angle carries a residual, not a formula.
        tau_closed = (zeta - c * x_perp / math.sqrt(speed * speed - c * c)) / speed

        def ch2(tau):
            return trj.geometry(traj, x, tau).v_rad - c

        lo, hi = tau_closed - 1.0, tau_closed + 1.0
        if ch2(lo) * ch2(hi) < 0:
            tau_s = float(brentq(ch2, lo, hi, xtol=1e-15, rtol=1e-15))
        else:
            tau_s = tau_closed
        g = trj.geometry(traj, x, tau_s)
        res = math.hypot(g.v_rad - c, g.r / s.v_group - (t - tau_s))
        h = np.array([[0.0, 1.0 - g.v_rad / s.v_group],
                      [1.0 - g.v_rad / s.v_group, 0.0]])
        sp = sph.StationaryPoint(
            omega_s=0.0, tau_s=tau_s, hessian=h, det=float(np.linalg.det(h)),
            signature=0, residual_norm=res, iterations=0, converged=True,
            method="closed-form", degenerate=True)
        return _assemble(source, traj, model, x, t, sp, gate=gate)

    # Dispersive medium: refuse when no propagating frequency is slow enough,
    # else solve the joint system with the generic Newton engine.
    cmin = _positive_phase_speed_min(model, *omega_scan)
    if cmin >= speed:
        raise NoCherenkovRoot(
            f"minimum phase speed {cmin:g} >= source speed {speed:g}")
    ctx = sph.PhaseContext(t=t, x=tuple(x), omega0=0.0, trajectory=traj,
                           dispersion=model)
    last_err = None
    for w0 in np.geomspace(max(omega_scan[0], 1e-3), omega_scan[1], 12):
        try:
            sp = sph.solve_newton(ctx, seed=(w0, t - 1.0), tol=1e-11)
        except (NoConvergence, LeftPropagatingBand, EvanescentRegime,
                ObserverOnTrajectory) as err:
            last_err = err
            continue
        if sp.omega_s > 1e-8:
            s = disp.sample(model, sp.omega_s)
            beta = speed / s.v_group
            gate = (speed * t - zeta
                    - x_perp * math.sqrt(abs(beta * beta - 1.0))) > 0
            return _assemble(source, traj, model, x, t, sp, gate=gate)
    raise NoCherenkovRoot(f"no nontrivial-frequency root found ({last_err})")
