"""Scenario files: a flat, sectioned key-value format (INI grammar).

One scenario per file.  All frequencies at this boundary are ordinary
frequencies in THz; positions are in length-scale units and times in
length-scale/c units.  Example::

    [medium]
    kind = lorentz            ; lorentz | plasma | nondispersive
    ; lorentz keys (THz), defaulting to the bundled metamaterial set:
    ; f_pe_thz, gamma_e_thz, f_te_thz, f_pm_thz, gamma_m_thz, f_tm_thz
    ; plasma keys:        f_p_thz
    ; nondispersive keys: eps, mu
    neglect_imaginary = true

    [source]
    f0_thz = 420
    v = 0.5                   ; units of c, motion along x2 at offset H
    h = 0

    [observer]
    x1 = 0.01
    x2 = 1.595
    x3 = 0
    t = 2

    [solve]
    method = newton           ; newton | fixed-point | closed-form
    tol = 1e-10
    max_iter = 80

    [output]
    format = csv              ; csv | json
    path = -                  ; '-' means stdout

Command-line flags override individual keys.
"""

import configparser
import io
from dataclasses import dataclass, field

from . import dispersion as disp
from .errors import ScenarioError
from .units import DEFAULT_NORMALIZATION

_METHODS = ("newton", "fixed-point", "closed-form")
_FORMATS = ("csv", "json")


@dataclass
class Scenario:
    medium_kind: str = "lorentz"
    medium_params: dict = field(default_factory=dict)
    neglect_imaginary: bool = True
    f0_thz: float = 420.0
    v: float = 0.5
    h: float = 0.0
    x1: float = 0.01
    x2: float = 1.595
    x3: float = 0.0
    t: float = 2.0
    method: str = "newton"
    tol: float = 1e-10
    max_iter: int = 80
    out_format: str = "csv"
    out_path: str = "-"

    def validate(self) -> "Scenario":
        if self.medium_kind not in ("lorentz", "plasma", "nondispersive"):
            raise ScenarioError(f"unknown medium kind {self.medium_kind!r}")
        if self.method not in _METHODS:
            raise ScenarioError(f"unknown method {self.method!r}")
        if self.out_format not in _FORMATS:
            raise ScenarioError(f"unknown output format {self.out_format!r}")
        if not -1.0 < self.v < 1.0:
            raise ScenarioError("source speed must lie in (-1, 1)")
        if self.f0_thz < 0:
            raise ScenarioError("f0_thz must be >= 0")
        if self.tol <= 0 or self.max_iter < 1:
            raise ScenarioError("tol must be > 0 and max_iter >= 1")
        return self

    def medium(self) -> disp.DispersionModel:
        p = self.medium_params
        if self.medium_kind == "nondispersive":
            return disp.NonDispersive(eps=float(p.get("eps", 1.0)),
                                      mu=float(p.get("mu", 1.0)))
        if self.medium_kind == "plasma":
            f_p = float(p.get("f_p_thz", 500.0))
            return disp.ColdPlasma(
                omega_p=DEFAULT_NORMALIZATION.omega_from_thz(f_p))
        kw = {}
        for src, dst in (("f_pe_thz", "f_pe"), ("gamma_e_thz", "gamma_e"),
                         ("f_te_thz", "f_te"), ("f_pm_thz", "f_pm"),
                         ("gamma_m_thz", "gamma_m"), ("f_tm_thz", "f_tm")):
            if src in p:
                kw[dst] = float(p[src])
        return disp.lorentz_from_thz(neglect_imaginary=self.neglect_imaginary,
                                     **kw)


def _get(cp, section, key, cast, default):
    if cp.has_option(section, key):
        raw = cp.get(section, key)
        try:
            if cast is bool:
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return cast(raw)
        except ValueError as err:
            raise ScenarioError(f"[{section}] {key} = {raw!r}: {err}")
    return default


def load_scenario(path_or_text: str, from_text: bool = False) -> Scenario:
    """Parse a scenario file (or literal text when ``from_text``)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        if from_text:
            cp.read_file(io.StringIO(path_or_text))
        else:
            with open(path_or_text) as fh:
                cp.read_file(fh)
    except OSError as err:
        raise ScenarioError(f"cannot read scenario: {err}")
    except configparser.Error as err:
        raise ScenarioError(f"bad scenario syntax: {err}")

    sc = Scenario()
    sc.medium_kind = _get(cp, "medium", "kind", str, sc.medium_kind).strip()
    sc.neglect_imaginary = _get(cp, "medium", "neglect_imaginary", bool,
                                sc.neglect_imaginary)
    if cp.has_section("medium"):
        sc.medium_params = {k: v for k, v in cp.items("medium")
                            if k not in ("kind", "neglect_imaginary")}
    sc.f0_thz = _get(cp, "source", "f0_thz", float, sc.f0_thz)
    sc.v = _get(cp, "source", "v", float, sc.v)
    sc.h = _get(cp, "source", "h", float, sc.h)
    sc.x1 = _get(cp, "observer", "x1", float, sc.x1)
    sc.x2 = _get(cp, "observer", "x2", float, sc.x2)
    sc.x3 = _get(cp, "observer", "x3", float, sc.x3)
    sc.t = _get(cp, "observer", "t", float, sc.t)
    sc.method = _get(cp, "solve", "method", str, sc.method).strip()
    sc.tol = _get(cp, "solve", "tol", float, sc.tol)
    sc.max_iter = _get(cp, "solve", "max_iter", int, sc.max_iter)
    sc.out_format = _get(cp, "output", "format", str, sc.out_format).strip()
    sc.out_path = _get(cp, "output", "path", str, sc.out_path).strip()
    return sc.validate()
