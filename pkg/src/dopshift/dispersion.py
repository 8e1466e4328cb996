"""Frequency-dependent material response.

Three media are supported: a frequency-independent dielectric, a lossless
cold plasma, and a double single-resonance (electric + magnetic) metamaterial
whose refraction index acquires a negative real part between the magnetic
resonance and the frequency where the permeability crosses zero.

The refraction index uses the half-argument branch

    n = sqrt(|eps*mu|) * exp(i*(arg(eps) + arg(mu))/2),

with principal arguments in (-pi, pi].  With small losses this places
Re n < 0 exactly when both Re eps < 0 and Re mu < 0, which is the branch a
left-handed medium requires; it also satisfies n**2 == eps*mu identically.

Group velocity is 1/k'(omega) with k = omega*n/c0 (c0 = 1 internally), from
analytic derivatives of the model permittivity and permeability.  Finite
differences are used only as a cross-check in the test suite: near the
resonance the group velocity is a small difference of large terms and needs
the analytic route.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import DegenerateMedium, EvanescentRegime, ZeroFrequency
from .units import DEFAULT_NORMALIZATION, Normalization

__all__ = [
    "NonDispersive", "ColdPlasma", "LorentzMetamaterial", "DispersionModel",
    "DispersionSample", "branch_sqrt_product", "permittivity", "permeability",
    "refraction_index", "sample", "lorentz_from_thz", "LORENTZ_DEFAULTS_THZ",
]


@dataclass(frozen=True)
class NonDispersive:
    """Constant permittivity and permeability (both strictly positive)."""

    eps: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (self.eps > 0 and self.mu > 0):
            raise ValueError("non-dispersive medium requires eps > 0, mu > 0")


@dataclass(frozen=True)
class ColdPlasma:
    """Lossless unmagnetized plasma: eps = 1 - omega_p**2/omega**2, mu = 1."""

    omega_p: float = 1.0

    def __post_init__(self):
        if self.omega_p < 0:
            raise ValueError("plasma frequency must be non-negative")


@dataclass(frozen=True)
class LorentzMetamaterial:
    """Single-resonance electric and magnetic response.

    All frequencies are normalized angular frequencies.  ``neglect_imaginary``
    makes the solvers use Re n only (the wavenumber and every derived real
    quantity come from the real part); the complex eps, mu, n remain available
    in the sample for inspection.
    """

    omega_pe: float
    omega_te: float
    gamma_e: float
    omega_pm: float
    omega_tm: float
    gamma_m: float
    neglect_imaginary: bool = True

    def __post_init__(self):
        if not (self.omega_te > 0 and self.omega_tm > 0):
            raise ValueError("resonance frequencies must be strictly positive")
        if min(self.omega_pe, self.omega_pm, self.gamma_e, self.gamma_m) < 0:
            raise ValueError("coupling strengths and losses must be >= 0")


DispersionModel = Union[NonDispersive, ColdPlasma, LorentzMetamaterial]

# Metamaterial defaults (THz): coupling strengths, resonances and losses of
# the electric and magnetic oscillators.
LORENTZ_DEFAULTS_THZ = {
    "f_pe": 298.42, "gamma_e": 0.04, "f_te": 409.82,
    "f_pm": 171.09, "gamma_m": 0.04, "f_tm": 397.89,
}


def lorentz_from_thz(f_pe=LORENTZ_DEFAULTS_THZ["f_pe"],
                     gamma_e=LORENTZ_DEFAULTS_THZ["gamma_e"],
                     f_te=LORENTZ_DEFAULTS_THZ["f_te"],
                     f_pm=LORENTZ_DEFAULTS_THZ["f_pm"],
                     gamma_m=LORENTZ_DEFAULTS_THZ["gamma_m"],
                     f_tm=LORENTZ_DEFAULTS_THZ["f_tm"],
                     neglect_imaginary=True,
                     normalization: Normalization = DEFAULT_NORMALIZATION,
                     ) -> LorentzMetamaterial:
    """Build the metamaterial model from oscillator parameters given in THz."""
    w = normalization.omega_from_thz
    return LorentzMetamaterial(
        omega_pe=w(f_pe), omega_te=w(f_te), gamma_e=w(gamma_e),
        omega_pm=w(f_pm), omega_tm=w(f_tm), gamma_m=w(gamma_m),
        neglect_imaginary=neglect_imaginary,
    )


@dataclass(frozen=True)
class DispersionSample:
    """Everything the phase, Hessian and amplitude formulas need at one
    frequency.

    ``v_phase``, ``v_group`` and ``k_second`` are None outside the propagating
    band.  ``k_prime`` is dk/domega (the group slowness).  ``derivatives``
    records how the omega-derivatives were obtained.
    """

    omega: float
    eps: complex
    mu: complex
    n: complex
    k: complex
    v_phase: float | None
    v_group: float | None
    k_prime: float | None
    k_second: float | None
    propagating: bool
    derivatives: str = "analytic"

    def require_propagating(self) -> "DispersionSample":
        if not self.propagating:
            raise EvanescentRegime(
                f"omega={self.omega:g} is outside the propagating band")
        return self


def branch_sqrt_product(eps: complex, mu: complex) -> complex:
    """sqrt(eps*mu) on the half-argument branch, args taken in (-pi, pi]."""
    if eps == 0 or mu == 0:
        raise DegenerateMedium("eps or mu is exactly zero")
    mag = math.sqrt(abs(eps) * abs(mu))
    half = 0.5 * (cmath.phase(complex(eps)) + cmath.phase(complex(mu)))
    return mag * cmath.exp(1j * half)


def permittivity(model: DispersionModel, omega: float) -> complex:
    """Relative permittivity eps(omega)."""
    _check_finite(omega)
    if isinstance(model, NonDispersive):
        return complex(model.eps)
    if isinstance(model, ColdPlasma):
        if omega == 0:
            raise ZeroFrequency("plasma permittivity diverges at omega = 0")
        return complex(1.0 - (model.omega_p / omega) ** 2)
    d = model.omega_te ** 2 - omega ** 2 - 1j * omega * model.gamma_e
    return 1.0 + model.omega_pe ** 2 / d


def permeability(model: DispersionModel, omega: float) -> complex:
    """Relative permeability mu(omega)."""
    _check_finite(omega)
    if isinstance(model, NonDispersive):
        return complex(model.mu)
    if isinstance(model, ColdPlasma):
        return complex(1.0)
    d = model.omega_tm ** 2 - omega ** 2 - 1j * omega * model.gamma_m
    return 1.0 + model.omega_pm ** 2 / d


def refraction_index(model: DispersionModel, omega: float) -> complex:
    """n(omega) on the left-handed-compatible branch."""
    return branch_sqrt_product(permittivity(model, omega),
                               permeability(model, omega))


def _check_finite(omega: float):
    if not math.isfinite(omega):
        raise ValueError("frequency must be finite")


def _lorentz_chain(model: LorentzMetamaterial, w: float):
    """eps, mu, n and their first two omega-derivatives (all complex)."""
    de = model.omega_te ** 2 - w * w - 1j * w * model.gamma_e
    dm = model.omega_tm ** 2 - w * w - 1j * w * model.gamma_m
    pe2, pm2 = model.omega_pe ** 2, model.omega_pm ** 2
    eps = 1.0 + pe2 / de
    mu = 1.0 + pm2 / dm
    ge = 2.0 * w + 1j * model.gamma_e   # -d(de)/dw
    gm = 2.0 * w + 1j * model.gamma_m
    deps = pe2 * ge / de ** 2
    dmu = pm2 * gm / dm ** 2
    d2eps = pe2 * (2.0 / de ** 2 + 2.0 * ge ** 2 / de ** 3)
    d2mu = pm2 * (2.0 / dm ** 2 + 2.0 * gm ** 2 / dm ** 3)
    n = branch_sqrt_product(eps, mu)
    p1 = deps * mu + eps * dmu                       # (eps*mu)'
    p2 = d2eps * mu + 2.0 * deps * dmu + eps * d2mu  # (eps*mu)''
    dn = p1 / (2.0 * n)
    d2n = (p2 - 2.0 * dn * dn) / (2.0 * n)
    return eps, mu, n, dn, d2n


def sample(model: DispersionModel, omega: float) -> DispersionSample:
    """Evaluate the full material response at one frequency.

    Pure function: identical inputs give bit-identical outputs.
    """
    _check_finite(omega)

    if isinstance(model, NonDispersive):
        n = math.sqrt(model.eps * model.mu)
        k = omega * n
        return DispersionSample(
            omega=omega, eps=complex(model.eps), mu=complex(model.mu),
            n=complex(n), k=complex(k), v_phase=1.0 / n, v_group=1.0 / n,
            k_prime=n, k_second=0.0, propagating=True)

    if isinstance(model, ColdPlasma):
        eps = permittivity(model, omega)
        wp = model.omega_p
        k2 = omega * omega - wp * wp
        if k2 > 0:
            aw = abs(omega)
            k = math.copysign(math.sqrt(k2), omega)
            n = k / omega
            vp = aw / math.sqrt(k2)
            vg = math.sqrt(k2) / aw
            kpp = -wp * wp / k2 ** 1.5
            return DispersionSample(
                omega=omega, eps=eps, mu=1.0 + 0.0j, n=complex(n),
                k=complex(k), v_phase=vp, v_group=vg, k_prime=1.0 / vg,
                k_second=kpp, propagating=True)
        # Evanescent: limiting-absorption rule gives a purely imaginary k.
        k = 1j * math.sqrt(-k2)
        n = k / omega if omega != 0 else complex(0.0)
        return DispersionSample(
            omega=omega, eps=eps, mu=1.0 + 0.0j, n=n, k=k,
            v_phase=None, v_group=None, k_prime=None, k_second=None,
            propagating=False)

    eps, mu, n, dn, d2n = _lorentz_chain(model, omega)
    # Wave-dominated when the real part of n beats the imaginary part.
    propagating = n.real ** 2 > n.imag ** 2
    if model.neglect_imaginary:
        k = complex(omega * n.real)
        kp = n.real + omega * dn.real
        kpp = 2.0 * dn.real + omega * d2n.real
    else:
        k = omega * n
        kp = (n + omega * dn).real
        kpp = (2.0 * dn + omega * d2n).real
    if propagating and n.real != 0 and kp != 0:
        vp = 1.0 / n.real
        vg = 1.0 / kp
        return DispersionSample(
            omega=omega, eps=eps, mu=mu, n=n, k=k, v_phase=vp, v_group=vg,
            k_prime=kp, k_second=kpp, propagating=True)
    # Wave-like but with stationary k' (infinite group speed) keeps its
    # propagating flag; the velocities are simply unavailable.
    return DispersionSample(
        omega=omega, eps=eps, mu=mu, n=n, k=k, v_phase=None, v_group=None,
        k_prime=None, k_second=None, propagating=bool(propagating))
