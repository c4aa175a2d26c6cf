"""Dispersion curves of the linearised road-strip system in the (beta, alpha) plane.

Exponential ansatz e^{alpha (x + c t)} (1, profile(y)) solves the linearised
problem when (beta, alpha) lies on both a road curve and a field curve.
Two profile families exist: trigonometric (gamma sin(beta y)) and hyperbolic
(gamma sinh(beta y)).  Road curves are the roots of
    -D alpha^2 + c alpha + chi/(4D) = 0,
field curves the roots of the second-order relation in alpha for the field.

All "minus" branches are evaluated in the cancellation-free form
(c - sqrt(c^2 + q)) = -q / (c + sqrt(c^2 + q)).
Vectorised helpers return NaN outside their analytic domain; the public
``alpha_road`` / ``alpha_field`` raise :class:`DomainError` instead.
Complex beta is accepted everywhere and bypasses the real-domain guards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .model import Params, Reaction, c_kpp

ROAD_FAMILIES = ("trig", "hyperbolic", "road-limit-D0", "road-limit-Dinf", "rescaled-road")
FIELD_FAMILIES = ("trig", "hyperbolic", "degenerate-line", "rescaled-field-minus", "rescaled-field-plus")
FAMILIES = tuple(dict.fromkeys(ROAD_FAMILIES + FIELD_FAMILIES))
BRANCHES = ("plus", "minus")

# stop short of the pole of chi at beta_bar
POLE_GUARD = 1e-9


class DomainError(ValueError):
    """Curve evaluated outside its analytic domain."""


@dataclass(frozen=True)
class CurveQuery:
    family: str
    branch: str
    c: float
    beta: complex | float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.branch not in BRANCHES:
            raise ValueError(f"unknown branch {self.branch!r}")


@dataclass(frozen=True)
class AlphaInterval:
    lo: float
    hi: float
    empty: bool = False

    @classmethod
    def none(cls) -> "AlphaInterval":
        return cls(math.nan, math.nan, True)

    def __contains__(self, a: float) -> bool:
        return not self.empty and self.lo <= a <= self.hi


# ---------------------------------------------------------------- transverse roots

def _q(p: Params, beta):
    """d beta cos(beta L) + nu sin(beta L); positive on (0, beta_bar)."""
    return p.d * beta * np.cos(beta * p.L) + p.nu * np.sin(beta * p.L)


def beta_bar(p: Params) -> float:
    """First positive root of d beta cos(beta L) + nu sin(beta L) = 0, in (pi/2L, pi/L)."""
    a, b = math.pi / (2 * p.L), math.pi / p.L
    return optimize.brentq(lambda b_: _q(p, b_), a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def beta_tilde(p: Params, c: float) -> float:
    """Unique beta in (pi/2L, beta_bar) with c^2 = -chi(beta).

    Solved as c^2 q(beta) + 4 mu d D beta cos(beta L) = 0, which has no pole.
    """
    if not c > 0:
        raise ValueError("beta_tilde needs c > 0")
    a, b = math.pi / (2 * p.L), beta_bar(p)
    g = lambda x: c * c * _q(p, x) + 4 * p.mu * p.d * p.D * x * math.cos(x * p.L)
    return optimize.brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def beta_hat(c: float, r: Reaction, d: float) -> float:
    """Left end of the trig field-curve domain: c^2 = eta(beta), or 0 when c >= c_KPP."""
    ck = c_kpp(r, d)
    if c >= ck:
        return 0.0
    return math.sqrt(ck * ck - c * c) / (2 * d)


def radius(c: float, r: Reaction, d: float) -> float:
    """Radius of the hyperbolic field circle, sqrt(c^2 - c_KPP^2)/(2d)."""
    ck = c_kpp(r, d)
    if c < ck:
        raise DomainError("hyperbolic field curve needs c >= c_KPP")
    return math.sqrt(c * c - ck * ck) / (2 * d)


# ---------------------------------------------------------------- chi functions

def chi_unit(p: Params, beta):
    """chi(beta)/D = 4 mu d beta cos(beta L) / q(beta); value 4 mu d/(d + nu L) at 0."""
    beta = np.asarray(beta)
    zero = beta == 0
    b = np.where(zero, 1.0, beta)
    val = 4 * p.mu * p.d * b * np.cos(b * p.L) / _q(p, b)
    return np.where(zero, 4 * p.mu * p.d / (p.d + p.nu * p.L), val)[()]


def chi(p: Params, beta):
    """chi(beta) for 0 <= beta < beta_bar (even in beta)."""
    if np.isrealobj(beta) and np.any(np.abs(beta) >= beta_bar(p)):
        raise DomainError("chi is defined for |beta| < beta_bar")
    return p.D * chi_unit(p, beta)


def chi_tilde_unit(p: Params, beta):
    """chi_tilde(beta)/D = 4 mu d beta / (d beta + nu tanh(beta L)); positive."""
    beta = np.asarray(beta)
    zero = beta == 0
    b = np.where(zero, 1.0, beta)
    val = 4 * p.mu * p.d * b / (p.d * b + p.nu * np.tanh(b * p.L))
    return np.where(zero, 4 * p.mu * p.d / (p.d + p.nu * p.L), val)[()]


def chi_tilde(p: Params, beta):
    return p.D * chi_tilde_unit(p, beta)


def eta(beta, r: Reaction, d: float):
    """c_KPP^2 - 4 d^2 beta^2."""
    return 4 * d * r.fprime0 - 4 * d * d * np.asarray(beta) ** 2


def _sqrt(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return np.sqrt(x)
    return np.sqrt(np.where(x < 0, np.nan, x))


# ---------------------------------------------------------------- vectorised branches
# Road quadratic -D a^2 + c a + D q_unit/4 = 0, q_unit = chi/D, has roots
# (c +- sqrt(c^2 + D q_unit))/(2D).

def _road_pair(c, q_unit, D, sign):
    S = _sqrt(c * c + D * q_unit)
    if sign > 0:
        return (c + S) / (2 * D)
    return -q_unit / (2 * (c + S))


def _field_pair(c, disc, e, d, sign, scale):
    # roots of -d a^2 + c a = e/(4d): (c +- sqrt(disc))/(2d), disc = c^2 - e
    if not np.iscomplexobj(disc):
        # rounding-level negatives at the domain edge count as a double root
        disc = np.where((disc < 0) & (disc > -1e-13 * scale), 0.0, disc)
    S = _sqrt(disc)
    if sign > 0:
        return (c + S) / (2 * d)
    return e / (2 * d * (c + S))


def _field_disc(c, r: Reaction, d, beta, s):
    """c^2 - c_KPP^2 + s 4 d^2 beta^2, with the first difference formed without cancellation."""
    ck = c_kpp(r, d)
    b2 = 4 * d * d * np.asarray(beta) ** 2
    return (c - ck) * (c + ck) + s * b2, c * c + ck * ck + np.abs(b2)


def road_trig(p: Params, c, beta, sign):
    return _road_pair(c, chi_unit(p, beta), p.D, sign)


def road_hyp(p: Params, c, beta, sign):
    return _road_pair(c, chi_tilde_unit(p, beta), p.D, sign)


def road_halfplane(p: Params, c, beta, sign):
    """Road curve of the half-plane problem: chi replaced by 4 mu D d beta / (d beta + nu)."""
    beta = np.asarray(beta)
    q_unit = 4 * p.mu * p.d * beta / (p.d * beta + p.nu)
    return _road_pair(c, q_unit, p.D, sign)


def road_d0(p: Params, c, beta):
    """D -> 0 limit of the lower road branch: -mu d beta cos(beta L) / (c q(beta))."""
    return -chi_unit(p, beta) / (4 * c)


def field_trig(r: Reaction, d, c, beta, sign):
    disc, scale = _field_disc(c, r, d, beta, 1)
    return _field_pair(c, disc, eta(beta, r, d), d, sign, scale)


def field_hyp(r: Reaction, d, c, beta, sign):
    # circle: -d a^2 - d beta^2 + c a = f'(0)
    e = 4 * d * r.fprime0 + 4 * d * d * np.asarray(beta) ** 2
    disc, scale = _field_disc(c, r, d, beta, -1)
    return _field_pair(c, disc, e, d, sign, scale)


def field_line(r: Reaction, d, beta, sign):
    """Trig field branches at c = c_KPP: the lines +-beta + c_KPP/(2d)."""
    return sign * np.asarray(beta) + c_kpp(r, d) / (2 * d)


def field_rescaled(r: Reaction, d, chat, beta, sign):
    """D -> infinity limit of the lower field branches, scaled by sqrt(D):
    (f'(0) - d beta^2)/chat for trig (sign -1), (f'(0) + d beta^2)/chat for hyperbolic (+1)."""
    return (r.fprime0 + sign * d * np.asarray(beta) ** 2) / chat


# ---------------------------------------------------------------- public queries

def _sgn(branch):
    return 1 if branch == "plus" else -1


def _real_close(x, tol=1e-12):
    return abs(x) <= tol


def alpha_road(q: CurveQuery, p: Params) -> complex | float:
    """alpha on a road curve; raises DomainError outside the analytic domain."""
    fam, s, c, beta = q.family, _sgn(q.branch), q.c, q.beta
    cplx = isinstance(beta, complex) or np.iscomplexobj(beta)
    if fam not in ROAD_FAMILIES:
        raise DomainError(f"{fam!r} is not a road family")
    if not cplx:
        beta = float(beta)
        if beta < 0 or c <= 0:
            raise DomainError("road curves need beta >= 0 and c > 0")
    if fam in ("trig", "rescaled-road"):
        pp = p if fam == "trig" else p.replace(D=1.0)
        if not cplx:
            bt = beta_tilde(pp, c)
            if beta > bt * (1 + 1e-12):
                raise DomainError(f"beta={beta} beyond beta_tilde(c)={bt}")
            disc = c * c + pp.D * chi_unit(pp, beta)
            if disc < 0:  # rounding at beta_tilde
                return c / (2 * pp.D)
        return _scalar(road_trig(pp, c, beta, s))
    if fam == "hyperbolic":
        return _scalar(road_hyp(p, c, beta, s))
    if fam == "road-limit-D0":
        if s > 0:
            raise DomainError("the upper road branch diverges as D -> 0")
        if not cplx and not (math.pi / (2 * p.L) * (1 - 1e-12) <= beta < beta_bar(p)):
            raise DomainError("road-limit-D0 is defined for pi/2L <= beta < beta_bar")
        return _scalar(road_d0(p, c, beta))
    # road-limit-Dinf
    return _scalar(road_halfplane(p, c, beta, s))


def alpha_field(q: CurveQuery, p: Params, r: Reaction) -> complex | float:
    """alpha on a field curve; raises DomainError outside the analytic domain."""
    fam, s, c, beta = q.family, _sgn(q.branch), q.c, q.beta
    cplx = isinstance(beta, complex) or np.iscomplexobj(beta)
    d = p.d
    if fam not in FIELD_FAMILIES:
        raise DomainError(f"{fam!r} is not a field family")
    if not cplx:
        beta = float(beta)
        if beta < 0 or c <= 0:
            raise DomainError("field curves need beta >= 0 and c > 0")
    if fam == "trig":
        if not cplx:
            bh = beta_hat(c, r, d)
            if beta < bh * (1 - 1e-12):
                raise DomainError(f"beta={beta} below beta_hat(c)={bh}")
            if c * c - eta(beta, r, d) < 0:
                return c / (2 * d)
        return _scalar(field_trig(r, d, c, beta, s))
    if fam == "hyperbolic":
        if not cplx:
            rad = radius(c, r, d)
            if beta > rad * (1 + 1e-12) + 1e-300:
                raise DomainError(f"beta={beta} outside the circle of radius {rad}")
            if c * c - c_kpp(r, d) ** 2 - 4 * d * d * beta * beta < 0:
                return c / (2 * d)
        return _scalar(field_hyp(r, d, c, beta, s))
    if fam == "degenerate-line":
        return _scalar(field_line(r, d, beta, s))
    sign = -1 if fam == "rescaled-field-minus" else 1
    return _scalar(field_rescaled(r, d, c, beta, sign))


def _scalar(x):
    x = np.asarray(x)[()]
    if np.iscomplexobj(x):
        return complex(x)
    return float(x)


# ---------------------------------------------------------------- regions

def region_interval(side: str, family: str, c: float, beta: float, p: Params, r: Reaction) -> AlphaInterval:
    """Vertical section at ``beta`` of the road or field region of the first quadrant."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if side == "road" and family == "trig":
        if beta > beta_tilde(p, c):
            return AlphaInterval.none()
        lo = max(float(road_trig(p, c, beta, -1)), 0.0)
        hi = float(road_trig(p, c, beta, 1))
        if math.isnan(hi):
            hi = lo = c / (2 * p.D)
        return AlphaInterval(lo, hi)
    if side == "road" and family == "hyperbolic":
        # lower branch is negative, so the axis bounds the region
        return AlphaInterval(0.0, float(road_hyp(p, c, beta, 1)))
    if side == "field" and family == "trig":
        if beta < beta_hat(c, r, p.d):
            return AlphaInterval.none()
        lo = max(float(field_trig(r, p.d, c, beta, -1)), 0.0)
        hi = float(field_trig(r, p.d, c, beta, 1))
        if math.isnan(hi):
            hi = lo = c / (2 * p.d)
        return AlphaInterval(lo, hi)
    if side == "field" and family == "hyperbolic":
        if c < c_kpp(r, p.d) or beta > radius(c, r, p.d):
            return AlphaInterval.none()
        lo, hi = float(field_hyp(r, p.d, c, beta, -1)), float(field_hyp(r, p.d, c, beta, 1))
        if math.isnan(hi):
            hi = lo = c / (2 * p.d)
        return AlphaInterval(lo, hi)
    raise ValueError(f"no region for side={side!r}, family={family!r}")


# ---------------------------------------------------------------- explicit speeds

def c_int(p: Params, r: Reaction) -> float:
    """Speed at which all four curves first meet at beta = 0 (requires D > d)."""
    D, d, mu, nu, L = p.D, p.d, p.mu, p.nu, p.L
    if D <= d:
        raise DomainError("c_int is defined for D > d")
    ck2 = c_kpp(r, d) ** 2
    w = d + nu * L
    num = (w * D * ck2 + 4 * mu * d**3) ** 2
    den = 4 * d * (D - d) * w * (w * ck2 + 4 * mu * d * d)
    return math.sqrt(num / den)


def c_int_limit(p: Params, r: Reaction) -> float:
    """L -> infinity limit of c_int: D c_KPP / (2 sqrt(d (D - d)))."""
    if p.D <= p.d:
        raise DomainError("needs D > d")
    return p.D * c_kpp(r, p.d) / (2 * math.sqrt(p.d * (p.D - p.d)))


def d_tilde(p: Params, r: Reaction) -> float:
    """Road diffusivity at which alpha_D^+(c_KPP, 0) meets the field line at c_KPP/(2d)."""
    d = p.d
    return 2 * d + 4 * p.mu * d**3 / ((d + p.nu * p.L) * c_kpp(r, d) ** 2)


def curvature_gap_at_zero(p: Params, r: Reaction, c: float) -> float:
    """Second beta-derivative at beta = 0 of alpha~_D^+ - alpha~_d^-, by Richardson-extrapolated
    central differences (both curves are even in beta)."""
    if c <= c_kpp(r, p.d):
        raise DomainError("curvature_gap_at_zero needs c > c_KPP")
    h = 1e-4 * max(1.0, math.pi / (2 * p.L))

    def gap(b):
        return road_hyp(p, c, b, 1) - field_hyp(r, p.d, c, b, -1)

    def d2(step):
        return float((gap(step) - 2 * gap(0.0) + gap(-step)) / step**2)

    return (4 * d2(h / 2) - d2(h)) / 3
