"""Explicit finite-difference integration of the road-strip system and front tracking.

Grid: x in [-X, X] with nx nodes (Neumann walls), y in [0, L] with ny + 1
nodes; row 0 is the Dirichlet bottom, row ny the road-adjacent edge.  The
exchange condition d v_y = mu u - nu v at y = L enters through a ghost row.
The no-road variant replaces it by the Robin condition d v_y = -nu v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .model import InvalidParameterError, NumericalError, Params, Reaction, RegimeError, persistence_margin
from .steady import reconstruct_profile, solve_robin_steady, solve_steady_states

CFL_SAFETY = 0.4


class InstabilityError(NumericalError):
    """NaN or negative values beyond round-off appeared during stepping."""


class DomainTooSmallError(NumericalError):
    """The tracked front came within the guard distance of the x-walls."""


# ------------------------------------------------------------------ initial data

@dataclass(frozen=True)
class InitialDatum:
    """Compactly supported initial data (u0(x), v0(x, y)).

    ``box``: amplitude on |x| <= halfwidth for u, amplitude * y/L for v, with a
    linear ramp over one grid cell at the edge.
    ``persistence_bump``: amplitude * cos(omega x) (1, mu sin(beta y)/q(beta))
    on |x| < pi/(2 omega), a strict subsolution of the linearised problem.
    """

    kind: str
    amplitude: float
    halfwidth: float
    beta: float = 0.0
    omega: float = 0.0
    gamma: float = 0.0

    def sample(self, x, y, L):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "box":
            dx = x[1] - x[0] if len(x) > 1 else 1.0
            w = np.clip((self.halfwidth + dx - np.abs(x)) / dx, 0.0, 1.0)
            u0 = self.amplitude * w
            v0 = self.amplitude * w[:, None] * (y / L)[None, :]
        else:
            cx = np.where(np.abs(x) < self.halfwidth, np.cos(self.omega * x), 0.0)
            u0 = self.amplitude * cx
            v0 = self.amplitude * self.gamma * cx[:, None] * np.sin(self.beta * y)[None, :]
        return u0, v0


def make_initial_datum(kind: str, p: Params, r: Reaction, amplitude: float = 0.5,
                       support_halfwidth: float | None = None) -> InitialDatum:
    if not amplitude > 0:
        raise InvalidParameterError("amplitude must be positive")
    if kind == "box":
        return InitialDatum("box", amplitude, 2.0 if support_halfwidth is None else support_halfwidth)
    if kind != "persistence_bump":
        raise InvalidParameterError(f"unknown datum kind {kind!r}")
    if persistence_margin(p, r) <= 0:
        raise RegimeError("extinction regime: persistence_bump needs f'(0)/d > (pi/2L)^2")
    from .dispersion import beta_bar

    lo = math.pi / (2 * p.L)
    beta = lo + 0.5 * (min(beta_bar(p), math.sqrt(r.fprime0 / p.d)) - lo)
    q = p.d * beta * math.cos(beta * p.L) + p.nu * math.sin(beta * p.L)
    delta = 0.5 * (r.fprime0 - p.d * beta * beta)
    # half the road bound keeps the road inequality strict too
    m = min((r.fprime0 - delta) / p.d - beta * beta, -0.5 * p.mu * p.d * beta * math.cos(beta * p.L) / (p.D * q))
    omega = math.sqrt(m)
    h = math.pi / (2 * omega)
    if support_halfwidth is not None:
        if support_halfwidth < h:
            raise InvalidParameterError(f"persistence_bump needs support_halfwidth >= {h:.6g}")
        h = support_halfwidth
        omega = math.pi / (2 * h)
    return InitialDatum("persistence_bump", amplitude, h, beta, omega, p.mu / q)


# ------------------------------------------------------------------ config / state

@dataclass
class SimConfig:
    p: Params
    r: Reaction
    x_halfwidth: float
    nx: int
    ny: int
    dt: float
    T: float
    datum: InitialDatum
    front_level: float = 0.5
    record_dt: float = 0.5
    c_guess: float | None = None
    road: bool = True

    def __post_init__(self):
        if self.nx < 3 or self.ny < 2:
            raise InvalidParameterError("need nx >= 3 and ny >= 2")
        if not (0 < self.front_level < 1):
            raise InvalidParameterError("front_level must lie in (0, 1)")
        if not (self.T > 0 and self.dt > 0 and self.x_halfwidth > 0):
            raise InvalidParameterError("T, dt and x_halfwidth must be positive")
        lim = cfl_limit(self.p, self.dx, self.dy)
        if self.dt > lim * (1 + 1e-12):
            raise InvalidParameterError(f"dt = {self.dt:.6g} exceeds the stability limit {lim:.6g}")
        if self.c_guess is not None:
            need = self.c_guess * self.T + 10 * diffusion_length(self.p, self.r)
            if self.x_halfwidth < need:
                raise DomainTooSmallError(f"x_halfwidth {self.x_halfwidth:.6g} < c_guess*T + 10 lengths = {need:.6g}")

    @property
    def dx(self) -> float:
        return 2 * self.x_halfwidth / (self.nx - 1)

    @property
    def dy(self) -> float:
        return self.p.L / self.ny

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.x_halfwidth, self.x_halfwidth, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.p.L, self.ny + 1)

    @classmethod
    def auto(cls, p: Params, r: Reaction, T: float, c_guess: float, dx: float, ny: int, datum=None, **kw):
        """Domain sized to c_guess*T + 10 diffusion lengths (plus margin), dt at the stability limit."""
        half = c_guess * T + 10 * diffusion_length(p, r) + 5.0
        nx = int(math.ceil(2 * half / dx)) + 1
        dy = p.L / ny
        dx_ = 2 * half / (nx - 1)
        dt = cfl_limit(p, dx_, dy)
        n = int(math.ceil(T / dt))
        datum = datum or make_initial_datum("box", p, r)
        return cls(p, r, half, nx, ny, T / n, T, datum, c_guess=c_guess, **kw)


def cfl_limit(p: Params, dx: float, dy: float) -> float:
    return CFL_SAFETY * min(dx * dx, dy * dy) / (2 * max(p.D, p.d) * 2)


def diffusion_length(p: Params, r: Reaction) -> float:
    return math.sqrt(max(p.D, p.d) / r.fprime0)


@dataclass
class SimState:
    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass
class SimResult:
    front_trace: np.ndarray  # columns t, x_right, x_left, sup_v
    fitted_speed: float
    outcome: str
    mass_history: np.ndarray
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    level: float
    min_value: float
    center_error: float | None = None
    # The outcome label compares a finite window with the steady state; it
    # stands in for locally uniform convergence, it does not prove it.
    note: str = "finite-window surrogate"


# ------------------------------------------------------------------ kernels

@numba.njit(cache=True)
def _poly(c, s):
    acc = 0.0
    for k in range(len(c) - 1, -1, -1):
        acc = acc * s + c[k]
    return acc


@numba.njit(cache=True)
def _advance(u, v, un, vn, nsteps, dt, dx, dy, D, d, mu, nu, coeffs, road):
    """nsteps explicit Euler steps; result lands in (u, v).  Returns the minimum
    value seen, or NaN if a non-finite value appeared."""
    nx, ny1 = v.shape
    top = ny1 - 1
    ix2 = 1.0 / (dx * dx)
    iy2 = 1.0 / (dy * dy)
    g = 2.0 * dy / d
    vmin = 0.0
    for s in range(nsteps):
        if s % 2 == 0:
            us, vs, ud, vd = u, v, un, vn
        else:
            us, vs, ud, vd = un, vn, u, v
        for i in range(nx):
            im = i - 1 if i > 0 else 1
            ip = i + 1 if i < nx - 1 else nx - 2
            vd[i, 0] = 0.0
            for j in range(1, ny1):
                vc = vs[i, j]
                vxx = (vs[im, j] - 2.0 * vc + vs[ip, j]) * ix2
                if j < top:
                    up = vs[i, j + 1]
                elif road:
                    up = vs[i, j - 1] + g * (mu * us[i] - nu * vc)
                else:
                    up = vs[i, j - 1] - g * nu * vc
                vyy = (vs[i, j - 1] - 2.0 * vc + up) * iy2
                w = vc + dt * (d * (vxx + vyy) + _poly(coeffs, vc))
                vd[i, j] = w
                if w < vmin:
                    vmin = w
                elif not (w < 1e300):
                    return np.nan
            if road:
                uc = us[i]
                w = uc + dt * (D * (us[im] - 2.0 * uc + us[ip]) * ix2 + nu * vs[i, top] - mu * uc)
                ud[i] = w
                if w < vmin:
                    vmin = w
                elif not (w < 1e300):
                    return np.nan
        if not (vmin >= -1e-12):
            break
    if nsteps % 2 == 1:
        u[:] = un
        v[:] = vn
    return vmin


def _coeffs(r: Reaction) -> np.ndarray | None:
    return None if r.poly is None else np.asarray(r.poly, dtype=float)


def _advance_numpy(u, v, nsteps, cfg: SimConfig):
    p, dt, dx, dy = cfg.p, cfg.dt, cfg.dx, cfg.dy
    vmin = 0.0
    for _ in range(nsteps):
        vp = np.pad(v, ((1, 1), (0, 0)), mode="reflect")
        top = v[:, -1]
        if cfg.road:
            ghost = v[:, -2] + 2 * dy / p.d * (p.mu * u - p.nu * top)
        else:
            ghost = v[:, -2] - 2 * dy / p.d * p.nu * top
        vy = np.concatenate([v, ghost[:, None]], axis=1)
        lap = (vp[:-2] - 2 * v + vp[2:]) / dx**2
        lap[:, 1:] += (vy[:, :-2] - 2 * v[:, 1:] + vy[:, 2:]) / dy**2
        vn = v + dt * (p.d * lap + cfg.r.f(v))
        vn[:, 0] = 0.0
        if cfg.road:
            up = np.pad(u, 1, mode="reflect")
            u = u + dt * (p.D * (up[:-2] - 2 * u + up[2:]) / dx**2 + p.nu * top - p.mu * u)
        v = vn
        m = min(float(np.min(v)), float(np.min(u)) if cfg.road else 0.0)
        if not (m >= -1e-12):
            return u, v, m
        vmin = min(vmin, m)
    return u, v, vmin


def _advance_any(u, v, nsteps, cfg: SimConfig):
    c = _coeffs(cfg.r)
    if c is None:
        return _advance_numpy(u, v, nsteps, cfg)
    un, vn = np.empty_like(u), np.empty_like(v)
    m = _advance(u, v, un, vn, nsteps, cfg.dt, cfg.dx, cfg.dy, cfg.p.D, cfg.p.d, cfg.p.mu, cfg.p.nu, c, cfg.road)
    return u, v, m


def initial_state(cfg: SimConfig) -> SimState:
    u0, v0 = cfg.datum.sample(cfg.x, cfg.y, cfg.p.L)
    v0 = np.ascontiguousarray(v0, dtype=float)
    v0[:, 0] = 0.0
    u0 = np.ascontiguousarray(u0, dtype=float)
    if not cfg.road:
        u0 = np.zeros_like(u0)
    return SimState(0.0, u0, v0)


def step(state: SimState, cfg: SimConfig) -> SimState:
    """One explicit Euler step; the input state is left untouched."""
    u, v = state.u.copy(), state.v.copy()
    u, v, m = _advance_any(u, v, 1, cfg)
    _check(m)
    return SimState(state.t + cfg.dt, u, v)


def _check(m):
    if not (m >= -1e-12):
        raise InstabilityError(f"scheme produced {m!r}; check dt against the stability limit")


# ------------------------------------------------------------------ front tracking

def front_positions(x: np.ndarray, trace: np.ndarray, level: float) -> tuple[float, float]:
    """Outermost crossings of ``level`` by the road-edge trace, linearly interpolated."""
    idx = np.nonzero(trace >= level)[0]
    if len(idx) == 0:
        return math.nan, math.nan
    i, k = idx[-1], idx[0]
    if i < len(x) - 1:
        xr = x[i] + (trace[i] - level) / (trace[i] - trace[i + 1]) * (x[i + 1] - x[i])
    else:
        xr = x[i]
    if k > 0:
        xl = x[k] - (trace[k] - level) / (trace[k] - trace[k - 1]) * (x[k] - x[k - 1])
    else:
        xl = x[k]
    return float(xr), float(xl)


def fit_speed(trace: np.ndarray, T: float) -> float:
    """Least-squares slope of x_right over t in [T/2, T]."""
    t, xr = trace[:, 0], trace[:, 1]
    sel = (t >= 0.5 * T - 1e-12) & np.isfinite(xr)
    if sel.sum() < 2:
        return math.nan
    return float(np.polyfit(t[sel], xr[sel], 1)[0])


def _reference(cfg: SimConfig):
    """Steady profile the run should converge to, or None."""
    if cfg.road:
        roots = solve_steady_states(cfg.p, cfg.r)
        if not roots:
            return None
        return reconstruct_profile(max(roots), cfg.p, cfg.r, n=cfg.ny * 8)
    return solve_robin_steady(cfg.p, cfg.r)


def _simulate(cfg: SimConfig) -> SimResult:
    st = initial_state(cfg)
    u, v = st.u, st.v
    x, y = cfg.x, cfg.y
    ref = _reference(cfg)
    sup0 = float(np.max(v))
    level = cfg.front_level * (ref.rho if ref is not None else sup0)
    guard = 10 * diffusion_length(cfg.p, cfg.r)
    n_total = int(round(cfg.T / cfg.dt))
    per = max(1, int(round(cfg.record_dt / cfg.dt)))
    rows, sups = [], []
    vmin = 0.0

    def record(t):
        xr, xl = front_positions(x, v[:, -1], level)
        s = float(np.max(v))
        rows.append((t, xr, xl, s))
        sups.append(s)
        if np.isfinite(xr) and (xr > x[-1] - guard or xl < x[0] + guard):
            raise DomainTooSmallError(f"front at x={xr:.4g} reached the wall guard at t={t:.4g}")

    record(0.0)
    done = 0
    while done < n_total:
        k = min(per, n_total - done)
        u, v, m = _advance_any(u, v, k, cfg)
        _check(m)
        vmin = min(vmin, m)
        done += k
        record(done * cfg.dt)
    trace = np.array(rows)

    center_err = None
    if float(np.max(v)) < 1e-4 * sup0:
        outcome = "extinction"
    elif ref is not None:
        i0 = int(np.argmin(np.abs(x)))
        Vy = np.interp(y, ref.y, ref.V)
        err_v = float(np.max(np.abs(v[i0] - Vy))) / float(np.max(ref.V))
        err_u = abs(u[i0] - cfg.p.nu / cfg.p.mu * ref.rho) / (cfg.p.nu / cfg.p.mu * ref.rho) if cfg.road else 0.0
        center_err = max(err_v, err_u)
        outcome = "persistence" if center_err <= 0.02 else "undecided"
    else:
        outcome = "undecided"
    return SimResult(trace, fit_speed(trace, cfg.T), outcome, np.array(sups), u, v, x, y, level, vmin, center_err)


def run(cfg: SimConfig) -> SimResult:
    """Integrate the road-strip system to T and track the front on the road edge."""
    if not cfg.road:
        raise InvalidParameterError("config has road=False; use run_no_road")
    return _simulate(cfg)


def run_no_road(cfg: SimConfig) -> SimResult:
    """Same scheme on the strip alone, with the Robin condition d v_y = -nu v at y = L."""
    from dataclasses import replace

    return _simulate(replace(cfg, road=False))
