"""Spreading speed as the first-contact speed of road and field regions.

For a speed c the road curves bound a region R(c) and the field curves a
region F(c) of the (beta, alpha) quarter plane; both grow with c.  The
spreading speed is the infimum of the c for which R(c) and F(c) share an
interior point, for either the trigonometric or the hyperbolic family.

Everything here reduces to one primitive: the largest vertical overlap
``min(hi_R, hi_F) - max(lo_R, lo_F)`` over beta, positive iff the regions
intersect.  It is increasing in c, so bisection on its sign is sound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import dispersion as dsp
from .model import NumericalError, Params, Reaction, c_kpp, persistence_margin, require_persistence

N_GRID = 512
N_REFINE = 3
N_BISECT = 60


@dataclass
class Overlap:
    gap: float
    beta: float | None = None
    alpha: float | None = None
    family: str | None = None

    @property
    def hit(self) -> bool:
        return self.gap > 0


@dataclass
class SpeedResult:
    c_star: float
    beta_star: float
    alpha_star: float
    family: str
    regime: str
    bracket_width: float
    c_int: float | None = None

    def as_dict(self) -> dict:
        return {
            "c_star": self.c_star,
            "beta_star": self.beta_star,
            "alpha_star": self.alpha_star,
            "family": self.family,
            "regime": self.regime,
            "bracket_width": self.bracket_width,
        }


@dataclass
class ComplexRoot:
    c: float
    beta_re: float
    beta_im: float
    alpha_re: float
    alpha_im: float
    residual: float
    iterations: int = 0

    @property
    def beta(self) -> complex:
        return complex(self.beta_re, self.beta_im)

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)


# ------------------------------------------------------------------ maximiser

def _local_maxima(vals, keep):
    v = np.where(np.isnan(vals), -np.inf, vals)
    inner = np.nonzero((v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    idx = np.concatenate([[0, len(v) - 1], inner])
    idx = idx[np.isfinite(v[idx])]
    return idx[np.argsort(-v[idx])][:keep], v


def maximize_on(fun, lo: float, hi: float, n: int = N_GRID, rounds: int = N_REFINE, keep: int = 3):
    """Global max of a vectorised ``fun`` on [lo, hi]: grid scan, ``rounds`` zoomed
    re-scans around the best ``keep`` local maxima, then a bounded Brent polish.

    NaN values count as -inf.  Returns (value, argmax); (-inf, None) if nothing is finite.
    """
    if hi < lo:
        return -math.inf, None
    if hi == lo:
        v = float(np.asarray(fun(np.array([lo])))[0])
        return (v, lo) if np.isfinite(v) else (-math.inf, None)
    grid = np.linspace(lo, hi, n)
    best, arg = -math.inf, None
    idx, v = _local_maxima(np.asarray(fun(grid), dtype=float), keep)
    for i in idx:
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
        x, fx = grid[i], v[i]
        for _ in range(rounds):
            g = np.linspace(a, b, 65)
            gv = np.asarray(fun(g), dtype=float)
            gv = np.where(np.isnan(gv), -np.inf, gv)
            j = int(np.argmax(gv))
            if gv[j] > fx:
                x, fx = g[j], gv[j]
            a, b = g[max(j - 1, 0)], g[min(j + 1, 64)]
        if b > a:
            res = optimize.minimize_scalar(
                lambda t: -_finite(fun(np.array([t]))[0]), bounds=(a, b), method="bounded",
                options={"xatol": 1e-15 * max(1.0, abs(x))},
            )
            if -res.fun > fx:
                x, fx = float(res.x), -float(res.fun)
        if fx > best:
            best, arg = fx, float(x)
    return best, arg


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else -1e300


def _sqrt0(x):
    """sqrt that treats tiny negative rounding as 0 and marks larger negatives NaN."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.where(x < 0, np.where(x > -1e-12, 0.0, np.nan), x))


# ------------------------------------------------------------------ region bounds

def _road_trig_bounds(p: Params, c, beta):
    q = dsp.chi_unit(p, beta)
    S = _sqrt0(c * c + p.D * q)
    hi = (c + S) / (2 * p.D)
    lo = np.maximum(-q / (2 * (c + S)), 0.0)
    return lo, hi


def _road_hyp_bounds(p: Params, c, beta):
    q = dsp.chi_tilde_unit(p, beta)
    return np.zeros_like(np.asarray(beta, dtype=float)), (c + np.sqrt(c * c + p.D * q)) / (2 * p.D)


def _field_trig_bounds(p: Params, r: Reaction, c, beta):
    lo = dsp.field_trig(r, p.d, c, beta, -1)
    return np.maximum(lo, 0.0), dsp.field_trig(r, p.d, c, beta, 1)


def _field_hyp_bounds(p: Params, r: Reaction, c, beta):
    return dsp.field_hyp(r, p.d, c, beta, -1), dsp.field_hyp(r, p.d, c, beta, 1)


def _overlap_fun(road, fld):
    def gap(beta):
        lo_r, hi_r = road(beta)
        lo_f, hi_f = fld(beta)
        return np.minimum(hi_r, hi_f) - np.maximum(lo_r, lo_f)

    return gap


def _mid_alpha(road, fld, beta):
    lo_r, hi_r = road(np.array([beta]))
    lo_f, hi_f = fld(np.array([beta]))
    return float(0.5 * (max(lo_r[0], lo_f[0]) + min(hi_r[0], hi_f[0])))


def _max_overlap(road, fld, lo, hi, family) -> Overlap:
    gap, beta = maximize_on(_overlap_fun(road, fld), lo, hi)
    if beta is None:
        return Overlap(-math.inf)
    return Overlap(gap, beta, _mid_alpha(road, fld, beta), family)


def trig_overlap(p: Params, r: Reaction, c: float) -> Overlap:
    """Largest overlap of the trig road and field regions at speed c."""
    bt = dsp.beta_tilde(p, c)
    bh = dsp.beta_hat(c, r, p.d)
    if bh > bt:
        # disjoint beta-domains; the signed distance keeps the gap continuous in c
        return Overlap(bt - bh, None, None, "trig")
    return _max_overlap(
        lambda b: _road_trig_bounds(p, c, b), lambda b: _field_trig_bounds(p, r, c, b), bh, bt, "trig"
    )


def hyp_overlap(p: Params, r: Reaction, c: float) -> Overlap:
    """Largest overlap of the hyperbolic road region and the field half-disk (c > c_KPP)."""
    ck = c_kpp(r, p.d)
    if c <= ck:
        return Overlap(-math.inf, None, None, "hyperbolic")
    rad = dsp.radius(c, r, p.d)
    return _max_overlap(
        lambda b: _road_hyp_bounds(p, c, b), lambda b: _field_hyp_bounds(p, r, c, b), 0.0, rad, "hyperbolic"
    )


def best_overlap(p: Params, r: Reaction, c: float) -> Overlap:
    t = trig_overlap(p, r, c)
    h = hyp_overlap(p, r, c)
    return t if t.gap >= h.gap else h


def regions_intersect(p: Params, r: Reaction, c: float) -> tuple[bool, float | None]:
    """Whether road and field regions share an interior point at speed c, with a witness beta."""
    if not c > 0:
        raise ValueError("c must be positive")
    ov = best_overlap(p, r, c)
    return (True, ov.beta) if ov.hit else (False, None)


# ------------------------------------------------------------------ bisection driver

def _first_contact(pred, c_lo: float, c_start: float, steps: int = N_BISECT):
    """Bisection for the threshold of a predicate that is False below and True above.

    ``pred`` returns an Overlap.  c_hi is doubled from c_start until pred holds.
    Returns (c_lo, c_hi, overlap at c_hi).
    """
    c_hi = c_start
    ov_hi = pred(c_hi)
    k = 0
    while not ov_hi.hit:
        c_lo, c_hi = c_hi, 2 * c_hi
        ov_hi = pred(c_hi)
        k += 1
        if k > 200:
            raise NumericalError("no intersecting speed found while doubling")
    if pred(c_lo).hit:
        raise NumericalError(f"lower speed bracket {c_lo} already intersects")
    for _ in range(steps):
        if c_hi - c_lo <= 4 * np.finfo(float).eps * c_hi:
            break
        m = 0.5 * (c_lo + c_hi)
        ov = pred(m)
        if ov.hit:
            c_hi, ov_hi = m, ov
        else:
            c_lo = m
    return c_lo, c_hi, ov_hi


def compute_c_star(p: Params, r: Reaction, label: bool = True) -> SpeedResult:
    """Spreading speed c* as the first speed at which road and field regions overlap.

    Both curve families are always examined and the smaller contact speed wins.
    """
    require_persistence(p, r)
    ck = c_kpp(r, p.d)
    c_lo, c_hi, ov = _first_contact(lambda c: best_overlap(p, r, c), 1e-6, ck)
    c_star = 0.5 * (c_lo + c_hi)
    cint = dsp.c_int(p, r) if p.D > p.d else None
    family = ov.family
    beta_star, alpha_star = ov.beta, ov.alpha
    if cint is not None and abs(c_star - cint) <= 1e-7 * cint:
        family = "degenerate"
        beta_star = 0.0
        alpha_star = float(dsp.road_trig(p, c_star, 0.0, 1))
    res = SpeedResult(c_star, beta_star, alpha_star, family, regime="", bracket_width=c_hi - c_lo, c_int=cint)
    _polish_tangency(p, r, res)
    if label:
        res.regime = classify_regime(p, r, res.family, res.beta_star)
    return res


def implicit_curves(p: Params, r: Reaction, family: str, c: float, beta: float, alpha: float):
    """Road and field curves as zero sets F(beta, alpha) = 0, with their gradients.

    F_road = -D a^2 + c a + q(beta)/4 and F_field = d a^2 - c a + e(beta)/(4d),
    q the road exchange term per unit D and e = eta (trig) or c_KPP^2 + 4 d^2 beta^2.
    Returns (F_road, grad_road, F_field, grad_field).
    """
    q, dq = _chi_and_slope(p, complex(beta), family)
    q, dq = q.real, dq.real
    s = 1 if family == "trig" else -1
    e = c_kpp(r, p.d) ** 2 - s * 4 * p.d**2 * beta * beta
    Fr = -p.D * alpha * alpha + c * alpha + q / 4
    Ff = p.d * alpha * alpha - c * alpha + e / (4 * p.d)
    gr = (dq / 4, c - 2 * p.D * alpha)
    gf = (-s * 2 * p.d * beta, 2 * p.d * alpha - c)
    return Fr, gr, Ff, gf


def tangency_defect(p: Params, r: Reaction, family: str, c: float, beta: float, alpha: float):
    """(F_road, F_field, sin of the angle between the curve normals); all vanish at a tangency."""
    Fr, gr, Ff, gf = implicit_curves(p, r, family, c, beta, alpha)
    nr, nf = math.hypot(*gr), math.hypot(*gf)
    return Fr, Ff, (gr[0] * gf[1] - gr[1] * gf[0]) / (nr * nf)


def _polish_tangency(p: Params, r: Reaction, res: SpeedResult) -> None:
    """Sharpen the overlap witness (accurate to ~sqrt(eps) in beta) to the point where the
    road curve has a normal parallel to the field curve's.  That 2x2 system is regular even
    at vertical tangents, so no branch has to be chosen.  Kept only if the field curve
    also passes through the polished point."""
    if res.family not in ("trig", "hyperbolic") or not res.beta_star or res.beta_star <= 0:
        return
    fam, c = res.family, res.c_star

    def sys_(z):
        Fr, _, cross = tangency_defect(p, r, fam, c, z[0], z[1])
        return [Fr / (c * c), cross]

    # hybr often stops with "no progress" once already at rounding level, so judge the defects
    sol = optimize.root(sys_, [res.beta_star, res.alpha_star], method="hybr", options={"xtol": 1e-15})
    b, a = map(float, sol.x)
    if not (math.isfinite(b) and math.isfinite(a)):
        return
    Fr, Ff, cross = tangency_defect(p, r, fam, c, b, a)
    scale = c * c
    if abs(b - res.beta_star) < 1e-4 * res.beta_star and abs(Ff) < 1e-9 * scale and abs(cross) < 1e-9:
        res.beta_star, res.alpha_star = b, a


def classify_regime(p: Params, r: Reaction, family: str, beta_star: float) -> str:
    """Diagnostic label naming the contact configuration; never used in computations."""
    if math.isclose(p.D, p.d, rel_tol=1e-12):
        return "Fig4A: D=d"
    if p.D < p.d:
        return "Fig4B: D<d"
    dk = compute_d_kpp(p, r)
    if p.D < dk * (1 - 1e-9):
        return "Fig4D: d<D<D_KPP"
    if family == "degenerate":
        return "Fig5C: c_Int"
    if p.D <= dk * (1 + 1e-9):
        return "Fig4C: D=D_KPP"
    return "Fig5A: trig tangency" if family == "trig" else "Fig5B: hyperbolic tangency"


def first_contact_at_zero(p: Params, r: Reaction) -> float:
    """Bisection for the speed where alpha_D^+(c, 0) = alpha_d^-(c, 0), i.e. the c_Int contact."""
    if p.D <= p.d:
        raise dsp.DomainError("contact at beta = 0 needs D > d")
    ck = c_kpp(r, p.d)

    def pred(c):
        lo_f, _ = _field_trig_bounds(p, r, c, np.array([0.0]))
        _, hi_r = _road_trig_bounds(p, c, np.array([0.0]))
        return Overlap(float(hi_r[0] - lo_f[0]), 0.0)

    c_lo, c_hi, _ = _first_contact(pred, ck, ck)
    return 0.5 * (c_lo + c_hi)


# ------------------------------------------------------------------ D_KPP

def compute_d_kpp(p: Params, r: Reaction) -> float:
    """Road diffusivity at which, for c = c_KPP, the upper road curve touches the field line.

    Bisection on D of the trig-overlap predicate at c = c_KPP, which holds for D < D_KPP.
    """
    ck = c_kpp(r, p.d)
    pred = lambda D: trig_overlap(p.replace(D=D), r, ck).hit
    lo = 2 * p.d
    if not pred(lo):
        raise NumericalError("trig regions should intersect at D = 2d, c = c_KPP")
    hi = 2 * lo
    while pred(hi):
        lo, hi = hi, 2 * hi
    for _ in range(N_BISECT):
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
        m = 0.5 * (lo + hi)
        if pred(m):
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


# ------------------------------------------------------------------ limits

def compute_ell0(p: Params, r: Reaction) -> float:
    """Small-road-diffusion limit of c*: first contact of alpha_d^+ with the D -> 0 road curve."""
    require_persistence(p, r)
    bb = dsp.beta_bar(p) * (1 - dsp.POLE_GUARD)

    def pred(c):
        bh = dsp.beta_hat(c, r, p.d)
        if bh >= bb:
            return Overlap(bb - bh)

        def road(b):
            lo = np.maximum(dsp.road_d0(p, c, b), 0.0)
            return lo, np.full_like(lo, np.inf)

        return _max_overlap(road, lambda b: _field_trig_bounds(p, r, c, b), bh, bb, "road-limit-D0")

    c_lo, c_hi, _ = _first_contact(pred, 1e-6, c_kpp(r, p.d))
    return 0.5 * (c_lo + c_hi)


def _rescaled_trig_overlap(p: Params, r: Reaction, chat: float) -> Overlap:
    p1 = p.replace(D=1.0)
    bt = dsp.beta_tilde(p1, chat)

    def fld(b):
        lo = np.maximum(dsp.field_rescaled(r, p.d, chat, b, -1), 0.0)
        return lo, np.full_like(lo, np.inf)

    return _max_overlap(lambda b: _road_trig_bounds(p1, chat, b), fld, 0.0, bt, "trig")


def _rescaled_hyp_overlap(p: Params, r: Reaction, chat: float) -> Overlap:
    p1 = p.replace(D=1.0)
    top = 0.5 * (chat + math.sqrt(chat * chat + 4 * p.mu))
    # beyond this beta the field parabola is above the road curve's asymptote
    bmax = math.sqrt(max(chat * top - r.fprime0, 0.0) / p.d)

    def fld(b):
        lo = dsp.field_rescaled(r, p.d, chat, b, 1)
        return lo, np.full_like(lo, np.inf)

    return _max_overlap(lambda b: _road_hyp_bounds(p1, chat, b), fld, 0.0, bmax, "hyperbolic")


def compute_ell_infinity(p: Params, r: Reaction) -> float:
    """Large-road-diffusion limit of c*/sqrt(D): smallest rescaled speed at which either
    rescaled subsystem has a contact."""
    require_persistence(p, r)

    def pred(chat):
        a = _rescaled_trig_overlap(p, r, chat)
        b = _rescaled_hyp_overlap(p, r, chat)
        return a if a.gap >= b.gap else b

    c_lo, c_hi, _ = _first_contact(pred, 1e-6, 1.0)
    return 0.5 * (c_lo + c_hi)


def ell_infinity_upper_bound(p: Params, r: Reaction) -> float:
    """Upper bound on the squared large-D limit: (d+nu L) f'^2 / ((d+nu L) f' + mu d)."""
    w = p.d + p.nu * p.L
    a = r.fprime0
    return w * a * a / (w * a + p.mu * p.d)


def ell_infinity_hyp_lower_bound(p: Params, r: Reaction) -> float:
    """Lower bound on the squared limit when the hyperbolic subsystem governs."""
    a = r.fprime0
    return min(a * a / (a + p.mu), 2 * a)


def compute_c_star_halfplane(p: Params, r: Reaction) -> float:
    """Spreading speed of the road / half-plane problem (L ignored)."""
    ck = c_kpp(r, p.d)
    if p.D <= 2 * p.d:
        return ck

    def pred(c):
        if c <= ck:
            return Overlap(-math.inf)
        rad = dsp.radius(c, r, p.d)

        def road(b):
            hi = np.asarray(dsp.road_halfplane(p, c, b, 1), dtype=float)
            return np.zeros_like(hi), hi

        return _max_overlap(road, lambda b: _field_hyp_bounds(p, r, c, b), 0.0, rad, "hyperbolic")

    c_lo, c_hi, _ = _first_contact(pred, ck, ck * (1 + 1e-12))
    return 0.5 * (c_lo + c_hi)


def c_kpp_dr(p: Params, r: Reaction) -> float | None:
    """KPP speed of the strip without road (Dirichlet bottom, Robin top), or None if
    that problem has no positive steady state."""
    bb = dsp.beta_bar(p)
    if r.fprime0 / p.d <= bb * bb:
        return None
    return 2 * math.sqrt(p.d * (r.fprime0 - p.d * bb * bb))


# ------------------------------------------------------------------ complex roots

def _chi_and_slope(p: Params, beta, family):
    L, d, nu, mu = p.L, p.d, p.nu, p.mu
    if family == "trig":
        cs, sn = cmath.cos(beta * L), cmath.sin(beta * L)
        N = beta * cs
        Q = d * beta * cs + nu * sn
        dN = cs - beta * L * sn
        dQ = d * cs - d * beta * L * sn + nu * L * cs
    else:
        th = cmath.tanh(beta * L)
        N = beta
        Q = d * beta + nu * th
        dN = 1.0
        dQ = d + nu * L * (1 - th * th)
    q = 4 * mu * d * N / Q
    dq = 4 * mu * d * (dN * Q - N * dQ) / (Q * Q)
    return q, dq


def _road_branch(p, c, beta, family, sign):
    q, dq = _chi_and_slope(p, beta, family)
    S = cmath.sqrt(c * c + p.D * q)
    val = (c + S) / (2 * p.D) if sign > 0 else -q / (2 * (c + S))
    return val, sign * dq / (4 * S)


def _field_branch(p, r, c, beta, family, sign):
    ck2 = c_kpp(r, p.d) ** 2
    s2 = 1 if family == "trig" else -1
    T = cmath.sqrt(c * c - ck2 + s2 * 4 * p.d**2 * beta * beta)
    e = ck2 - s2 * 4 * p.d**2 * beta * beta
    val = (c + T) / (2 * p.d) if sign > 0 else e / (2 * p.d * (c + T))
    return val, sign * s2 * 2 * p.d * beta / T


@dataclass
class Tangency:
    """Which branches touch at the first contact."""

    c_star: float
    beta_star: float
    alpha_star: float
    family: str
    road_sign: int
    field_sign: int


def tangency_branches(p: Params, r: Reaction, res: SpeedResult) -> Tangency:
    if res.family not in ("trig", "hyperbolic") or res.beta_star <= 0:
        raise NumericalError("complex-root continuation needs a tangency at positive beta")
    rs = 1 if res.alpha_star > res.c_star / (2 * p.D) else -1
    fs = 1 if res.alpha_star > res.c_star / (2 * p.d) else -1
    return Tangency(res.c_star, res.beta_star, res.alpha_star, res.family, rs, fs)


def contact_function(p: Params, r: Reaction, tan: Tangency, c: float, beta: complex):
    """g(c, beta) = field branch - road branch at the tangent pair, with d g / d beta."""
    fv, fd = _field_branch(p, r, c, beta, tan.family, tan.field_sign)
    rv, rd = _road_branch(p, c, beta, tan.family, tan.road_sign)
    return fv - rv, fd - rd, rv


def find_complex_root(p: Params, r: Reaction, c: float, res: SpeedResult | None = None,
                      beta0: complex | None = None, maxiter: int = 200, tol: float = 1e-13) -> ComplexRoot:
    """Complex root in beta of the contact function for c slightly below c*.

    Damped Newton from beta* + 0.01 i beta*, principal square roots throughout.
    """
    if res is None:
        res = compute_c_star(p, r, label=False)
    tan = tangency_branches(p, r, res)
    b = beta0 if beta0 is not None else complex(tan.beta_star, 0.01 * tan.beta_star)
    g, dg, _ = contact_function(p, r, tan, c, b)
    for it in range(1, maxiter + 1):
        if abs(g) < tol:
            break
        step = g / dg
        lam = 1.0
        for _ in range(40):
            bn = b - lam * step
            gn, dgn, _ = contact_function(p, r, tan, c, bn)
            if abs(gn) < abs(g) or lam < 1e-8:
                break
            lam *= 0.5
        b, g, dg = bn, gn, dgn
    else:
        raise NumericalError(f"complex Newton did not converge in {maxiter} iterations (|g|={abs(g):.3g})")
    if b.imag < 0:
        b = b.conjugate()
    g, _, alpha = contact_function(p, r, tan, c, b)
    if abs(g) >= 1e-10:
        raise NumericalError(f"complex root residual {abs(g):.3g} too large")
    return ComplexRoot(c, b.real, b.imag, alpha.real, alpha.imag, abs(g), it)


# ------------------------------------------------------------------ subsolution

class DegenerateError(ValueError):
    pass


@dataclass
class Subsolution:
    """Real part of the complex exponential solution, truncated at zero."""

    gamma1: float
    gamma2: float
    theta1: float
    theta2: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def U(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(np.exp(self.alpha1 * x) * np.cos(self.alpha2 * x), 0.0)

    def V(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        a2x = self.alpha2 * x
        val = np.exp(self.alpha1 * x) * (
            np.sin(self.beta1 * y) * np.cosh(self.beta2 * y) * (self.gamma1 * np.cos(a2x) - self.gamma2 * np.sin(a2x))
            - np.cos(self.beta1 * y) * np.sinh(self.beta2 * y) * (self.gamma1 * np.sin(a2x) + self.gamma2 * np.cos(a2x))
        )
        return np.maximum(val, 0.0)

    def positive_component(self) -> tuple[float, float]:
        """x-interval of the component of {U > 0} containing 0; bounded when alpha2 != 0."""
        if self.alpha2 == 0:
            return -math.inf, math.inf
        h = math.pi / (2 * abs(self.alpha2))
        return -h, h


def subsolution_coefficients(p: Params, root: ComplexRoot) -> Subsolution:
    b1, b2, L, d, nu = root.beta_re, root.beta_im, p.L, p.d, p.nu
    ch, sh = math.cosh(b2 * L), math.sinh(b2 * L)
    cs, sn = math.cos(b1 * L), math.sin(b1 * L)
    th1 = (d * b1 * cs + nu * sn) * ch + d * b2 * sn * sh
    th2 = (d * b1 * sn - nu * cs) * sh - d * b2 * cs * ch
    n2 = th1 * th1 + th2 * th2
    if n2 == 0:
        raise DegenerateError("theta1^2 + theta2^2 vanishes")
    return Subsolution(p.mu * th1 / n2, p.mu * th2 / n2, th1, th2, root.alpha_re, root.alpha_im, b1, b2)
