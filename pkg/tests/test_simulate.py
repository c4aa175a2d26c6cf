import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roadkpp import simulate as sim
from roadkpp import speed as spd
from roadkpp.model import LOGISTIC, REMARK33, InvalidParameterError, Params, RegimeError
from roadkpp.steady import reconstruct_profile, solve_steady_states

R = LOGISTIC
BASE = Params(1.0, 1.0, 1.0, 1.0, 2.0)


def small_cfg(p=BASE, r=R, nx=41, ny=8, T=1.0, half=8.0, datum=None, **kw):
    dx = 2 * half / (nx - 1)
    dt = 0.9 * sim.cfl_limit(p, dx, p.L / ny)
    n = int(math.ceil(T / dt))
    datum = datum or sim.make_initial_datum("box", p, r)
    return sim.SimConfig(p, r, half, nx, ny, T / n, T, datum, **kw)


def advance(cfg, u, v, n):
    u, v = u.copy(), v.copy()
    u, v, m = sim._advance_any(u, v, n, cfg)
    sim._check(m)
    return u, v


def test_zero_state_is_fixed():
    cfg = small_cfg()
    u = np.zeros(cfg.nx)
    v = np.zeros((cfg.nx, cfg.ny + 1))
    u, v = advance(cfg, u, v, 50)
    assert np.all(u == 0) and np.all(v == 0)


def test_x_independent_data_stay_x_independent():
    # box wider than the domain gives data constant in x; Neumann walls keep it so
    cfg = small_cfg(datum=sim.make_initial_datum("box", BASE, R, support_halfwidth=100.0))
    st0 = sim.initial_state(cfg)
    u, v = advance(cfg, st0.u, st0.v, 200)
    assert np.ptp(u) < 1e-13
    assert np.max(np.ptp(v, axis=0)) < 1e-13


def test_steady_state_is_nearly_stationary():
    p = BASE
    rho = max(solve_steady_states(p, R))
    ny = 16
    prof = reconstruct_profile(rho, p, R, n=ny * 8)
    cfg = small_cfg(p, ny=ny, nx=11)
    Vy = np.interp(cfg.y, prof.y, prof.V)
    u = np.full(cfg.nx, p.nu / p.mu * rho)
    v = np.tile(Vy, (cfg.nx, 1))
    n = int(round(2.0 / cfg.dt))
    u2, v2 = advance(cfg, u, v, n)
    # drift only from O(dy^2) truncation
    assert np.max(np.abs(v2 - v)) < 5e-3
    assert np.max(np.abs(u2 - u)) < 5e-3


def test_step_leaves_input_untouched():
    cfg = small_cfg()
    s0 = sim.initial_state(cfg)
    u0, v0 = s0.u.copy(), s0.v.copy()
    s1 = sim.step(s0, cfg)
    assert np.array_equal(s0.u, u0) and np.array_equal(s0.v, v0)
    assert s1.t == pytest.approx(cfg.dt)
    assert not np.array_equal(s1.v, v0)


def test_numba_and_numpy_kernels_agree():
    cfg = small_cfg()
    slow = replace(cfg, r=replace(R, poly=None))
    s0 = sim.initial_state(cfg)
    a = advance(cfg, s0.u, s0.v, 37)
    b = advance(slow, s0.u, s0.v, 37)
    assert np.allclose(a[0], b[0], atol=1e-13) and np.allclose(a[1], b[1], atol=1e-13)
    noroad = replace(cfg, road=False)
    a = advance(noroad, np.zeros_like(s0.u), s0.v, 37)
    b = advance(replace(noroad, r=replace(R, poly=None)), np.zeros_like(s0.u), s0.v, 37)
    assert np.allclose(a[1], b[1], atol=1e-13)


params = st.builds(
    Params,
    D=st.floats(0.1, 10.0), d=st.floats(0.2, 3.0), mu=st.floats(0.1, 5.0),
    nu=st.floats(0.1, 5.0), L=st.floats(0.5, 5.0),
)


@settings(max_examples=25)
@given(params, st.floats(0.05, 1.5), st.sampled_from([LOGISTIC, REMARK33]))
def test_positivity_and_bounds(p, amp, r):
    cfg = small_cfg(p, r, datum=sim.make_initial_datum("box", p, r, amplitude=amp), T=0.5)
    s0 = sim.initial_state(cfg)
    u, v = advance(cfg, s0.u, s0.v, int(round(cfg.T / cfg.dt)))
    assert np.min(v) >= -1e-12 and np.min(u) >= -1e-12
    # sup of v stays below max(1, initial sup) and u below the matching road level
    top = max(1.0, amp)
    assert np.max(v) <= top + 1e-9
    assert np.max(u) <= max(amp, p.nu / p.mu * top) + 1e-9


@settings(max_examples=20)
@given(params, st.floats(0.05, 0.5), st.floats(1.0, 2.0))
def test_comparison_of_ordered_data(p, amp, factor):
    lo = small_cfg(p, datum=sim.make_initial_datum("box", p, R, amplitude=amp, support_halfwidth=1.0), T=0.5)
    hi = replace(lo, datum=sim.make_initial_datum("box", p, R, amplitude=min(amp * factor, 1.0),
                                                  support_halfwidth=2.0))
    a, b = sim.initial_state(lo), sim.initial_state(hi)
    assert np.all(a.v <= b.v) and np.all(a.u <= b.u)
    n = int(round(lo.T / lo.dt))
    ua, va = advance(lo, a.u, a.v, n)
    ub, vb = advance(hi, b.u, b.v, n)
    assert np.all(va <= vb + 1e-13) and np.all(ua <= ub + 1e-13)


def test_mirror_symmetry_in_x():
    cfg = small_cfg(T=3.0)
    s0 = sim.initial_state(cfg)
    u, v = advance(cfg, s0.u, s0.v, int(round(cfg.T / cfg.dt)))
    assert np.allclose(u, u[::-1], atol=1e-14)
    assert np.allclose(v, v[::-1], atol=1e-14)


def test_stability_limit_enforced():
    cfg = small_cfg()
    with pytest.raises(InvalidParameterError):
        replace(cfg, dt=2 * sim.cfl_limit(cfg.p, cfg.dx, cfg.dy))


def test_domain_size_check():
    with pytest.raises(sim.DomainTooSmallError):
        small_cfg(c_guess=2.0, T=10.0, half=8.0)


def test_wall_guard_raises():
    cfg = small_cfg(T=40.0, nx=41, half=12.0, p=BASE.replace(D=4.0), record_dt=1.0)
    with pytest.raises(sim.DomainTooSmallError):
        sim.run(cfg)


def test_bad_datum_and_config():
    with pytest.raises(InvalidParameterError):
        sim.make_initial_datum("gauss", BASE, R)
    with pytest.raises(InvalidParameterError):
        sim.make_initial_datum("box", BASE, R, amplitude=0.0)
    with pytest.raises(InvalidParameterError):
        small_cfg(front_level=1.5)
    with pytest.raises(RegimeError, match="extinction regime"):
        sim.make_initial_datum("persistence_bump", BASE.replace(L=1.0), R)
    with pytest.raises(InvalidParameterError):
        sim.run(small_cfg(road=False))


@pytest.mark.parametrize("L", [2.0, 4.0, 10.0])
def test_persistence_bump_is_linear_subsolution(L):
    # check -d v_xx - d v_yy - f'(0) v < 0 and the road inequality pointwise
    p = BASE.replace(L=L)
    dat = sim.make_initial_datum("persistence_bump", p, R)
    b, w, g = dat.beta, dat.omega, dat.gamma
    assert math.pi / (2 * L) < b < math.sqrt(R.fprime0 / p.d)
    assert dat.halfwidth == pytest.approx(math.pi / (2 * w))
    # field: (d w^2 + d b^2 - f'(0)) < 0
    assert p.d * (w * w + b * b) - R.fprime0 < 0
    # road: D w^2 + mu - nu g sin(bL) < 0
    assert p.D * w * w + p.mu - p.nu * g * math.sin(b * L) < 0
    # exchange at y = L: d g b cos(bL) = mu - nu g sin(bL)
    assert p.d * g * b * math.cos(b * L) == pytest.approx(p.mu - p.nu * g * math.sin(b * L), abs=1e-12)
    x = np.linspace(-2 * dat.halfwidth, 2 * dat.halfwidth, 101)
    u0, v0 = dat.sample(x, np.linspace(0, L, 9), L)
    assert np.all(u0 >= 0) and np.all(v0 >= -1e-15)
    assert np.all(u0[np.abs(x) >= dat.halfwidth] == 0)


def test_persistence_bump_support_override():
    dat = sim.make_initial_datum("persistence_bump", BASE, R)
    wider = sim.make_initial_datum("persistence_bump", BASE, R, support_halfwidth=2 * dat.halfwidth)
    assert wider.omega == pytest.approx(dat.omega / 2)
    with pytest.raises(InvalidParameterError):
        sim.make_initial_datum("persistence_bump", BASE, R, support_halfwidth=dat.halfwidth / 2)


def test_front_positions_interpolate():
    x = np.linspace(-5, 5, 11)
    tr = np.maximum(0.0, 1.0 - np.abs(x) / 3.0)
    xr, xl = sim.front_positions(x, tr, 0.5)
    assert xr == pytest.approx(1.5) and xl == pytest.approx(-1.5)
    assert all(math.isnan(z) for z in sim.front_positions(x, tr, 2.0))


def test_fit_speed_exact_on_linear_trace():
    t = np.linspace(0, 10, 21)
    tr = np.column_stack([t, 0.7 * t + 3.0, -0.7 * t, np.ones_like(t)])
    assert sim.fit_speed(tr, 10.0) == pytest.approx(0.7, rel=1e-12)


def test_extinction_below_threshold():
    p = BASE.replace(L=1.4)
    cfg = sim.SimConfig.auto(p, R, T=100.0, c_guess=0.5, dx=0.5, ny=7)
    res = sim.run(cfg)
    assert res.outcome == "extinction"
    assert res.mass_history[-1] < 1e-4 * res.mass_history[0]


def test_short_run_persists_and_spreads():
    cfg = sim.SimConfig.auto(BASE, R, T=60.0, c_guess=1.0, dx=0.25, ny=8)
    res = sim.run(cfg)
    assert res.min_value >= -1e-12
    assert res.outcome == "persistence"
    assert 0.5 < res.fitted_speed < spd.compute_c_star(BASE, R, label=False).c_star
    tr = res.front_trace
    ok = np.isfinite(tr[:, 1])
    assert np.all(np.diff(tr[ok, 1]) >= -1e-9)
    # front symmetric about x = 0
    assert np.allclose(tr[ok, 1], -tr[ok, 2], atol=1e-9)


@pytest.mark.slow
def test_grid_convergence_of_front_speed():
    speeds = []
    for dx, ny in ((0.2, 10), (0.1, 20), (0.05, 40)):
        cfg = sim.SimConfig.auto(BASE, R, T=30.0, c_guess=1.0, dx=dx, ny=ny)
        speeds.append(sim.run(cfg).fitted_speed)
    d1, d2 = abs(speeds[0] - speeds[1]), abs(speeds[1] - speeds[2])
    assert d2 < d1
    assert d2 < 0.01 * speeds[2]
