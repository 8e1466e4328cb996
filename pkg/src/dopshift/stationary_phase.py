"""Phase evaluation, stationary-point solvers and the saddle contribution.

The phase of the time-frequency field integrals is

    S(t, x, omega, tau) = k(omega) r(x, tau) - omega (t - tau) - omega0 tau,

with r the source-observer range.  Its stationary points in (omega, tau)
couple the retardation equation r/v_g = t - tau with the Doppler equation
omega - omega0 = k(omega) v_rad; the 2x2 Hessian decides the saddle type and
the amplitude normalization of the leading-order contribution.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import dispersion as disp
from . import trajectory as trj
from .errors import (DegeneratePoint, EvanescentRegime, LeftPropagatingBand,
                     NoConvergence, NotAContraction, ObserverOnTrajectory)
from .units import DEFAULT_NORMALIZATION, Normalization

__all__ = [
    "PhaseContext", "StationaryPoint", "phase", "gradient", "hessian",
    "classify", "default_seed", "solve_newton", "solve_fixed_point",
    "solve_grid", "contribution", "saddle_contribution",
]

_ARMIJO = 1e-4
_MAX_HALVINGS = 40
_DEGENERACY_RTOL = 1e-10
_DEDUPE_SEP = 1e-6


@dataclass(frozen=True)
class PhaseContext:
    """Observer, source and medium data defining the phase.

    ``lam`` is the large asymptotic parameter.  ``lam == 1.0`` is the
    fold-the-scale-into-the-phase convention used by the field formulas, so
    only values in (1, 10) trigger the small-parameter warning.
    """

    t: float
    x: tuple
    omega0: float
    trajectory: trj.Trajectory
    dispersion: disp.DispersionModel
    lam: float = 1.0
    normalization: Normalization = DEFAULT_NORMALIZATION

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(map(float, self.x)))
        if self.omega0 < 0:
            raise ValueError("source eigenfrequency must be >= 0")
        if self.lam < 1.0:
            raise ValueError("asymptotic parameter must be >= 1")
        if 1.0 < self.lam < 10.0:
            warnings.warn("asymptotic parameter below 10; leading-order "
                          "accuracy degrades like 1/lam", stacklevel=2)


@dataclass(frozen=True)
class StationaryPoint:
    omega_s: float
    tau_s: float
    hessian: np.ndarray
    det: float
    signature: int
    residual_norm: float
    iterations: int
    converged: bool
    method: str
    degenerate: bool = False


def _eval_pieces(ctx: PhaseContext, omega: float, tau: float):
    s = disp.sample(ctx.dispersion, omega).require_propagating()
    if s.v_group is None:
        raise EvanescentRegime(
            f"group velocity undefined at omega={omega:g} (stationary k')")
    g = trj.geometry(ctx.trajectory, ctx.x, tau)
    return s, g


def phase(ctx: PhaseContext, omega: float, tau: float) -> float:
    """S = k r - omega (t - tau) - omega0 tau (real part of k)."""
    s, g = _eval_pieces(ctx, omega, tau)
    return s.k.real * g.r - omega * (ctx.t - tau) - ctx.omega0 * tau


def gradient(ctx: PhaseContext, omega: float, tau: float) -> Tuple[float, float]:
    """(dS/domega, dS/dtau) from analytic dispersion and geometry."""
    s, g = _eval_pieces(ctx, omega, tau)
    return (g.r / s.v_group - (ctx.t - tau),
            -s.k.real * g.v_rad + (omega - ctx.omega0))


def hessian(ctx: PhaseContext, omega: float, tau: float) -> np.ndarray:
    """[[k'' r, 1 - v_rad/v_g], [1 - v_rad/v_g, -k dv_rad/dtau]]."""
    s, g = _eval_pieces(ctx, omega, tau)
    off = 1.0 - g.v_rad / s.v_group
    return np.array([[s.k_second * g.r, off],
                     [off, -s.k.real * g.dv_rad_dtau]])


def _grad_and_hess(ctx, omega, tau):
    s, g = _eval_pieces(ctx, omega, tau)
    grad = np.array([g.r / s.v_group - (ctx.t - tau),
                     -s.k.real * g.v_rad + (omega - ctx.omega0)])
    off = 1.0 - g.v_rad / s.v_group
    hess = np.array([[s.k_second * g.r, off],
                     [off, -s.k.real * g.dv_rad_dtau]])
    return grad, hess


def classify(h: np.ndarray, degeneracy_rtol: float = _DEGENERACY_RTOL
             ) -> Tuple[float, int]:
    """Determinant and signature of a symmetric 2x2 Hessian.

    Degenerate (caustic) matrices raise; the contribution formula divides by
    sqrt(|det|) and must not be applied there.
    """
    h = np.asarray(h, dtype=float)
    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    eigs = np.linalg.eigvalsh(h)
    scale = float(np.max(np.abs(eigs)))
    if scale == 0.0 or float(np.min(np.abs(eigs))) < degeneracy_rtol * scale:
        raise DegeneratePoint(f"near-singular Hessian, eigenvalues {eigs}")
    signature = int(np.sum(np.sign(eigs)))
    return float(det), signature


def _make_point(ctx, omega, tau, res, iters, method) -> StationaryPoint:
    h = hessian(ctx, omega, tau)
    try:
        det, sig = classify(h)
        degenerate = False
    except DegeneratePoint:
        det = float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])
        sig = 0
        degenerate = True
    return StationaryPoint(omega_s=omega, tau_s=tau, hessian=h, det=det,
                           signature=sig, residual_norm=res, iterations=iters,
                           converged=True, method=method, degenerate=degenerate)


def default_seed(ctx: PhaseContext) -> Tuple[float, float]:
    """Non-dispersive closed-form seed evaluated with the carrier's speeds.

    tau from the retardation equation by bisection on [t - 10 r(t), t] at the
    carrier group velocity, then omega = omega0/(1 - v_rad/c(omega0)).  Falls
    back to (omega0, t - r/v_g) when there is no retarded sign change.
    """
    w0 = ctx.omega0
    s0 = disp.sample(ctx.dispersion, w0).require_propagating()
    vg0, c0 = s0.v_group, s0.v_phase

    def ret(tau):
        g = trj.geometry(ctx.trajectory, ctx.x, tau)
        return g.r / vg0 - (ctx.t - tau)

    r_now = trj.geometry(ctx.trajectory, ctx.x, ctx.t).r
    lo, hi = ctx.t - 10.0 * r_now, ctx.t
    tau_seed = None
    try:
        flo, fhi = ret(lo), ret(hi)
        if flo * fhi < 0:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = ret(mid)
                if fm == 0 or (hi - lo) < 1e-15 * max(1.0, abs(hi)):
                    break
                if flo * fm < 0:
                    hi, fhi = mid, fm
                else:
                    lo, flo = mid, fm
            tau_seed = 0.5 * (lo + hi)
    except ObserverOnTrajectory:
        pass
    if tau_seed is None:
        tau_seed = ctx.t - r_now / vg0
    try:
        v_rad = trj.geometry(ctx.trajectory, ctx.x, tau_seed).v_rad
    except ObserverOnTrajectory:
        v_rad = 0.0
    denom = 1.0 - v_rad / c0
    omega_seed = w0 / denom if abs(denom) > 0.05 else w0
    if omega_seed <= 0:
        omega_seed = w0
    elif not disp.sample(ctx.dispersion, omega_seed).propagating:
        # Project the non-dispersive guess just inside the band edge nearest
        # to the carrier (bisection between the guess and the carrier).
        lo, hi = omega_seed, w0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if disp.sample(ctx.dispersion, mid).propagating:
                hi = mid
            else:
                lo = mid
        omega_seed = hi + 0.05 * (w0 - hi)
    return omega_seed, tau_seed


def solve_newton(ctx: PhaseContext, seed: Optional[Tuple[float, float]] = None,
                 tol: float = 1e-10, max_iter: int = 60) -> StationaryPoint:
    """Damped Newton on the stationary system grad S = 0.

    Backtracking line search on the merit 0.5*|F|^2 (Armijo constant 1e-4,
    step halving, at most 40 halvings).  Trial points outside the propagating
    band are treated as infeasible: the first full-step band exit is projected
    back by halving, a second one aborts.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, tau = default_seed(ctx) if seed is None else (float(seed[0]), float(seed[1]))
    F, _ = _grad_and_hess(ctx, w, tau)
    band_exits = 0
    last = (w, tau, float(np.linalg.norm(F)))
    for it in range(1, max_iter + 1):
        res = float(np.linalg.norm(F))
        last = (w, tau, res)
        if res <= tol:
            return _make_point(ctx, w, tau, res, it - 1, "newton")
        _, J = _grad_and_hess(ctx, w, tau)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise NoConvergence(
                "singular Jacobian (caustic) at the current iterate",
                diagnostics=_failed_point(w, tau, res, it))
        merit = 0.5 * res * res
        alpha = 1.0
        accepted = False
        full_step_left_band = False
        for _ in range(_MAX_HALVINGS + 1):
            wt, tt = w + alpha * step[0], tau + alpha * step[1]
            try:
                Ft, _ = _grad_and_hess(ctx, wt, tt)
            except (EvanescentRegime, ObserverOnTrajectory, ValueError):
                if alpha == 1.0:
                    full_step_left_band = True
                alpha *= 0.5
                continue
            if 0.5 * float(Ft @ Ft) <= merit * (1.0 - 2.0 * _ARMIJO * alpha):
                w, tau, F = wt, tt, Ft
                accepted = True
                break
            alpha *= 0.5
        if full_step_left_band:
            # One exit is projected back by the halving; consecutive exits
            # mean the root is being chased out of the band.
            band_exits += 1
            if band_exits > 1:
                raise LeftPropagatingBand(
                    "consecutive Newton steps exited the propagating band")
        else:
            band_exits = 0
        if not accepted:
            raise NoConvergence(
                f"line search stalled at iteration {it}, residual {res:.3e}",
                diagnostics=_failed_point(w, tau, res, it))
    res = float(np.linalg.norm(F))
    if res <= tol:
        return _make_point(ctx, w, tau, res, max_iter, "newton")
    raise NoConvergence(
        f"no convergence in {max_iter} iterations, residual {res:.3e}",
        diagnostics=_failed_point(w, tau, res, max_iter))


def _failed_point(w, tau, res, iters) -> StationaryPoint:
    return StationaryPoint(omega_s=w, tau_s=tau, hessian=np.full((2, 2), np.nan),
                           det=math.nan, signature=0, residual_norm=res,
                           iterations=iters, converged=False, method="newton")


def _contraction_brackets(ctx, omega_box, tau_box, n=7):
    """Sampled sup of the two successive-approximation bounds.

    First bracket:  |v|/|v_g| + |k''| r
    Second bracket: k |dv_rad/dtau| / max(omega0, 1) + |v|/|v_g|
    """
    b1 = b2 = 0.0
    wref = max(ctx.omega0, 1.0)
    for w in np.linspace(*omega_box, n):
        s = disp.sample(ctx.dispersion, w)
        if not s.propagating:
            continue
        for tau in np.linspace(*tau_box, n):
            try:
                g = trj.geometry(ctx.trajectory, ctx.x, tau)
            except ObserverOnTrajectory:
                continue
            speed = float(np.linalg.norm(trj.velocity(ctx.trajectory, tau)))
            b1 = max(b1, speed / abs(s.v_group) + abs(s.k_second) * g.r)
            b2 = max(b2, abs(s.k.real) * abs(g.dv_rad_dtau) / wref
                     + speed / abs(s.v_group))
    return b1, b2


def solve_fixed_point(ctx: PhaseContext, tol: float = 1e-12,
                      max_iter: int = 400,
                      seed: Optional[Tuple[float, float]] = None
                      ) -> StationaryPoint:
    """Successive approximations on the retardation/Doppler pair.

    tau <- t - r(tau)/v_g(omega), then omega <- omega0 + k(omega) v_rad(tau).
    Refuses when the contraction bounds, sampled over a neighborhood of the
    seed (the region the iteration explores), reach 1.
    """
    w, tau = default_seed(ctx) if seed is None else (float(seed[0]), float(seed[1]))
    try:
        s0 = disp.sample(ctx.dispersion, w).require_propagating()
        g0 = trj.geometry(ctx.trajectory, ctx.x, tau)
        tau1 = ctx.t - g0.r / s0.v_group
        w1 = ctx.omega0 + s0.k.real * trj.geometry(ctx.trajectory, ctx.x,
                                                   tau1).v_rad
    except (EvanescentRegime, ObserverOnTrajectory) as err:
        raise NotAContraction(f"trial update from the seed failed: {err}")
    dw = 1.5 * max(abs(w1 - w), 1e-6 * max(1.0, abs(w)))
    dt = 1.5 * max(abs(tau1 - tau), 1e-6 * max(1.0, abs(tau)))
    omega_box = (max(w - dw, 1e-12), w + dw)
    b1, b2 = _contraction_brackets(ctx, omega_box, (tau - dt, tau + dt))
    if max(b1, b2) >= 1.0:
        raise NotAContraction(
            f"sampled contraction bounds {b1:.3f}, {b2:.3f} reach 1")
    for it in range(1, max_iter + 1):
        s = disp.sample(ctx.dispersion, w).require_propagating()
        g = trj.geometry(ctx.trajectory, ctx.x, tau)
        tau_new = ctx.t - g.r / s.v_group
        g_new = trj.geometry(ctx.trajectory, ctx.x, tau_new)
        w_new = ctx.omega0 + s.k.real * g_new.v_rad
        d_tau, d_w = abs(tau_new - tau), abs(w_new - w)
        w, tau = w_new, tau_new
        if d_tau < tol and d_w < tol:
            F, _ = _grad_and_hess(ctx, w, tau)
            res = float(np.linalg.norm(F))
            return _make_point(ctx, w, tau, res, it, "fixed-point")
    raise NoConvergence(f"fixed point did not settle in {max_iter} iterations",
                        diagnostics=None)


def solve_grid(ctx: PhaseContext, omega_box: Tuple[float, float],
               tau_box: Tuple[float, float], n_omega: int = 8, n_tau: int = 8,
               tol: float = 1e-10, max_iter: int = 60) -> list:
    """Newton from a seed grid; distinct converged points, sorted by tau_s.

    Points closer than 1e-6 (relative, per component) are deduplicated.
    """
    found = []
    for w0 in np.linspace(*omega_box, n_omega):
        for t0 in np.linspace(*tau_box, n_tau):
            try:
                sp = solve_newton(ctx, seed=(w0, t0), tol=tol,
                                  max_iter=max_iter)
            except (NoConvergence, LeftPropagatingBand, EvanescentRegime,
                    ObserverOnTrajectory, DegeneratePoint):
                continue
            is_new = all(
                abs(sp.omega_s - q.omega_s) > _DEDUPE_SEP * max(1.0, abs(q.omega_s))
                or abs(sp.tau_s - q.tau_s) > _DEDUPE_SEP * max(1.0, abs(q.tau_s))
                for q in found)
            if is_new:
                found.append(sp)
    return sorted(found, key=lambda p: p.tau_s)


def saddle_contribution(lam: float, phase_value: float, det: float,
                        signature: int, amplitude: complex) -> complex:
    """Leading-order weight of one non-degenerate stationary point (n = 2):

        (2 pi / lam) exp(i (lam S + pi/4 sgn)) amplitude / sqrt(|det|).

    The prefactor is written as 2 pi / sqrt(lam**2 |det|) so that folding the
    scale into the phase (lam' = 1, S' = lam S, det' = lam**2 det) reproduces
    the unfolded value bit for bit.
    """
    if det == 0.0:
        raise DegeneratePoint("zero Hessian determinant")
    pref = 2.0 * math.pi / math.sqrt(lam * lam * abs(det))
    return pref * np.exp(1j * (lam * phase_value + 0.25 * math.pi * signature)) \
        * amplitude


def contribution(ctx: PhaseContext, sp: StationaryPoint,
                 amplitude: complex) -> complex:
    """Saddle contribution of a converged stationary point of the field phase."""
    if not sp.converged:
        raise NoConvergence("contribution of a non-converged point", sp)
    if sp.degenerate:
        raise DegeneratePoint("contribution at a caustic point")
    s_val = phase(ctx, sp.omega_s, sp.tau_s)
    return saddle_contribution(ctx.lam, s_val, sp.det, sp.signature, amplitude)
