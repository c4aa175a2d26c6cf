"""x-independent steady states: time map, its roots and profile reconstruction.

A positive steady state V of -d V'' = f(V), V(0)=0, V'(L)=0 is determined by
its top value rho = V(L); the strip width it needs is the time map M(rho).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .model import NumericalError, Params, Reaction, persistence_margin

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class MismatchError(ValueError):
    """Raised when rho does not satisfy M(rho) = L."""


@dataclass
class SteadyProfile:
    rho: float
    y: np.ndarray
    V: np.ndarray
    residual: float

    def road_value(self, p: Params) -> float:
        """Road density of the steady state, nu/mu * V(L)."""
        return p.nu / p.mu * self.rho


def _check_rho(rho):
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")


def _mean_f(r: Reaction, rho: float, s):
    """Average of f over [rho (1 - s^2), rho], by Gauss-Legendre.

    Equals rho * int_xi^1 (f(rho eta)/(rho eta)) eta d eta / (1 - xi) with
    xi = 1 - s^2, but without the cancellation of a difference of integrals.
    """
    s = np.asarray(s, dtype=float)
    pts = rho - (rho * s * s)[..., None] * (1.0 - _GL_X)
    return np.sum(r.f(pts) * _GL_W, axis=-1)


def _time_map_integrand(s, rho, r, d):
    A = _mean_f(r, rho, s)
    if np.any(A <= 0):
        raise NumericalError("inner integral of the time map is nonpositive; f is not of KPP type here")
    return np.sqrt(2.0 * d * rho / A)


def time_map(rho: float, r: Reaction, d: float, rtol: float = 1e-9) -> float:
    """Width M(rho) needed for a steady profile to climb from 0 to its maximum rho.

    With xi = 1 - s^2 the 1/sqrt endpoint singularity at xi = 1 disappears and
    the integrand becomes sqrt(2 d rho / A(s)), A the mean of f on [rho xi, rho].
    Raises NumericalError if the quadrature error estimate exceeds ``rtol``.
    """
    _check_rho(rho)
    # peak width at s = 0 scales like sqrt(f(rho)/rho); tell quad where it is
    w = math.sqrt(max(float(r.f(np.float64(rho))) / rho, 1e-300))
    pts = [p for p in (w, 10 * w) if p < 1.0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            lambda s: float(_time_map_integrand(s, rho, r, d)),
            0.0, 1.0, points=pts or None, epsabs=0.0, epsrel=1e-12, limit=400,
        )
    if err > rtol * abs(val):
        raise NumericalError(f"time map quadrature did not converge at rho={rho}: err={err}")
    return val


def _graded_nodes():
    # panels geometric toward s = 0, where the integrand peaks as rho -> 1
    edges = np.concatenate([[0.0], np.geomspace(1e-7, 1.0, 43)])
    x, w = np.polynomial.legendre.leggauss(16)
    a, b = edges[:-1, None], edges[1:, None]
    return (a + 0.5 * (b - a) * (x + 1.0)).ravel(), (0.5 * (b - a) * w).ravel()


_SCAN_S, _SCAN_W = _graded_nodes()


def time_map_batch(rhos, r: Reaction, d: float) -> np.ndarray:
    """Vectorised M(rho) on a fixed graded composite rule; used for root scans."""
    rhos = np.asarray(rhos, dtype=float)
    out = np.empty_like(rhos)
    for k in range(0, len(rhos), 64):
        rb = rhos[k:k + 64, None, None]
        pts = rb - rb * (_SCAN_S * _SCAN_S)[None, :, None] * (1.0 - _GL_X)
        A = np.sum(r.f(pts) * _GL_W, axis=-1)
        out[k:k + 64] = np.sqrt(2.0 * d * rb[:, :, 0] / A) @ _SCAN_W
    return out


def _remark33_h_sub(rho, xi):
    """2 * numerator / denominator^(3/2) of the closed-form derivative integrand after
    dividing out the common (1 - xi) factors, i.e. h(rho, xi) * dxi/ds for xi = 1 - s^2."""
    S2 = 1 + xi
    S3 = S2 + xi**2
    S4 = S3 + xi**3
    S5 = S4 + xi**4
    num = 216 * rho**2 * S5 - 270 * rho * S4 + 80 * S3
    den = -72 * rho**3 * S5 + 135 * rho**2 * S4 - 80 * rho * S3 + 30 * S2
    return 2.0 * num / den**1.5


def time_map_derivative(rho: float, r: Reaction, d: float, h: float | None = None) -> float:
    """dM/drho. Closed form for the remark33 quartic, central differences otherwise."""
    if r.name == "remark33":
        if not (0.0 <= rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
        val, _ = integrate.quad(
            lambda s: _remark33_h_sub(rho, 1.0 - s * s), 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200
        )
        return math.sqrt(15.0 * d / 2.0) * val
    _check_rho(rho)
    if h is None:
        h = 1e-4 * min(rho, 1.0 - rho)
    return (time_map(rho + h, r, d) - time_map(rho - h, r, d)) / (2.0 * h)


def rho_grid(n: int = 2048) -> np.ndarray:
    """Scan grid on (0, 1): uniform up to 0.9, then geometric down to 1 - 1e-10."""
    n_lin = n // 2
    lin = np.linspace(0.0, 0.9, n_lin + 1)[1:]
    gaps = np.geomspace(0.1, 1e-10, n - n_lin + 1)[1:]
    return np.concatenate([lin, 1.0 - gaps])


def solve_steady_states(p: Params, r: Reaction, n_grid: int = 2048) -> list[float]:
    """All rho in (0,1) with M(rho) = L found by a sign-change scan plus bisection.

    No completeness claim is made for non-monotone f beyond the scan resolution.
    """
    if persistence_margin(p, r) <= 0 and r.kpp_monotone:
        return []
    grid = rho_grid(n_grid)
    vals = time_map_batch(grid, r, p.d) - p.L
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        a, b = grid[i], grid[i + 1]
        fun = lambda x: time_map(x, r, p.d, rtol=1e-6) - p.L
        # the scan values come from a cheaper rule; re-check the bracket with the adaptive one
        fa, fb = fun(a), fun(b)
        if fa == 0 or fb == 0:
            roots.append(a if fa == 0 else b)
        elif (fa > 0) != (fb > 0):
            roots.append(optimize.brentq(fun, a, b, xtol=1e-15, rtol=8.9e-16))
    if not roots and persistence_margin(p, r) > 0 and vals[-1] < 0:
        raise NumericalError(f"steady state for L={p.L} lies within 1e-10 of 1; not resolvable in double precision")
    return roots


def reconstruct_profile(rho: float, p: Params, r: Reaction, n: int = 2000, tol: float = 1e-6) -> SteadyProfile:
    """Steady profile V on a uniform grid of [0, L] with V(L) = rho.

    Integrates the first integral d V'^2/2 = int_V^rho f in the variable
    s = sqrt(1 - V/rho), where it reads ds/dy = -sqrt(A(s) / (2 d rho)) and is
    Lipschitz up to the top of the profile; classical RK4 with n steps.
    """
    _check_rho(rho)
    M = time_map(rho, r, p.d)
    if abs(M - p.L) > tol:
        raise MismatchError(f"M(rho) = {M:.12g} differs from L = {p.L:.12g}")
    y = np.linspace(0.0, p.L, n + 1)
    h = y[1] - y[0]
    c = 1.0 / (2.0 * p.d * rho)

    def rhs(s):
        return -math.sqrt(max(float(_mean_f(r, rho, s)), 0.0) * c)

    s = np.empty(n + 1)
    s[0] = 1.0
    for i in range(n):
        si = s[i]
        k1 = rhs(si)
        k2 = rhs(si + 0.5 * h * k1)
        k3 = rhs(si + 0.5 * h * k2)
        k4 = rhs(si + h * k3)
        s[i + 1] = si + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    V = rho * (1.0 - s * s)
    return SteadyProfile(rho=rho, y=y, V=V, residual=bvp_residual(V, h, p.d, r))


def bvp_residual(V: np.ndarray, h: float, d: float, r: Reaction) -> float:
    """max |d V'' + f(V)| over nodes where a five-point fourth-order stencil fits."""
    if len(V) < 5:
        return math.inf
    d2 = (-V[4:] + 16 * V[3:-1] - 30 * V[2:-2] + 16 * V[1:-3] - V[:-4]) / (12 * h * h)
    return float(np.max(np.abs(d * d2 + r.f(V[2:-2]))))


def solve_robin_steady(p: Params, r: Reaction, n: int = 401, tol: float = 1e-9) -> SteadyProfile | None:
    """Positive steady state of the strip without road: V(0)=0, d V'(L) = -nu V(L).

    Exists iff f'(0)/d > beta_bar^2; returns None otherwise.  Solved with a
    collocation BVP solver started from the linear eigenfunction sin(beta_bar y).
    """
    from .dispersion import beta_bar

    bb = beta_bar(p)
    if r.fprime0 / p.d <= bb * bb:
        return None
    y = np.linspace(0.0, p.L, n)
    guess = np.vstack([0.5 * np.sin(bb * y), 0.5 * bb * np.cos(bb * y)])
    sol = integrate.solve_bvp(
        lambda t, z: np.vstack([z[1], -r.f(z[0]) / p.d]),
        lambda za, zb: np.array([za[0], p.d * zb[1] + p.nu * zb[0]]),
        y, guess, tol=tol, max_nodes=100000,
    )
    if not sol.success or np.max(sol.y[0]) <= 1e-8:
        raise NumericalError(f"Robin steady state solve failed: {sol.message}")
    V = sol.sol(y)[0]
    return SteadyProfile(rho=float(V[-1]), y=y, V=V, residual=bvp_residual(V, y[1] - y[0], p.d, r))
