import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from reference_values import M_HALF, RHO_STAR_L2
from roadkpp.model import LOGISTIC, REMARK33, NumericalError, Params
from roadkpp.steady import (
    MismatchError, bvp_residual, reconstruct_profile, rho_grid, solve_robin_steady, solve_steady_states,
    time_map, time_map_batch, time_map_derivative,
)


def test_time_map_small_rho_limit():
    # linear regime: sqrt(d/f'(0)) pi/2, error O(rho)
    m1, m2 = time_map(1e-6, LOGISTIC, 1.0), time_map(2e-6, LOGISTIC, 1.0)
    assert abs((2 * m1 - m2) - math.pi / 2) < 1e-4
    assert time_map(1e-6, LOGISTIC, 4.0) == pytest.approx(2 * m1, rel=1e-12)


def test_time_map_reference_value():
    assert time_map(0.5, LOGISTIC, 1.0) == pytest.approx(M_HALF, rel=1e-10)
    assert time_map(0.5, LOGISTIC, 1.0) > math.pi / 2


def test_time_map_blows_up():
    m5, m9, m999 = (time_map(r, LOGISTIC, 1.0) for r in (0.5, 0.9, 0.999))
    assert m999 > m9 > m5 and m999 > 5


def test_time_map_domain():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            time_map(bad, LOGISTIC, 1.0)


def test_time_map_against_direct_double_integral():
    # original form, inner integral by quad, outer by quad with algebraic weight
    rho, d = 0.3, 1.0
    f = REMARK33.f

    def inner(xi):
        return integrate.quad(lambda e: f(rho * e) / (rho * e) * e, xi, 1, epsabs=0, epsrel=1e-13)[0]

    def g(xi):
        if xi > 1 - 1e-9:  # inner ~ (1 - xi) f(rho)/rho near the endpoint
            return math.sqrt(rho / (2 / d * f(rho)))
        return math.sqrt((1 - xi) / (2 / d * inner(xi)))

    val = integrate.quad(g, 0, 1, weight="alg", wvar=(0, -0.5), epsrel=1e-11)[0]
    assert time_map(rho, REMARK33, d) == pytest.approx(val, rel=1e-8)


def test_batch_matches_adaptive():
    rhos = np.array([0.01, 0.2, 0.5, 0.8, 0.99, 1 - 1e-6])
    ref = [time_map(r, LOGISTIC, 1.0) for r in rhos]
    assert np.allclose(time_map_batch(rhos, LOGISTIC, 1.0), ref, rtol=1e-9)


def test_monotone_time_map_for_logistic():
    vals = time_map_batch(rho_grid(512), LOGISTIC, 1.0)
    assert np.all(np.diff(vals) > 0)


def test_remark33_derivative_signs():
    assert time_map_derivative(1e-9, REMARK33, 1.0) > 0
    assert time_map_derivative(0.0, REMARK33, 1.0) == pytest.approx(8 / 3, rel=1e-9)
    assert time_map_derivative(0.5, REMARK33, 1.0) < 0
    assert time_map_derivative(0.5, LOGISTIC, 1.0) > 0


@given(st.floats(0.05, 0.9))
def test_closed_form_derivative_matches_differences(rho):
    h = 1e-4 * min(rho, 1 - rho)
    fd = (time_map(rho + h, REMARK33, 1.0) - time_map(rho - h, REMARK33, 1.0)) / (2 * h)
    assert time_map_derivative(rho, REMARK33, 1.0) == pytest.approx(fd, rel=1e-5)


def test_logistic_unique_root():
    roots = solve_steady_states(Params(1, 1, 1, 1, 2), LOGISTIC)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(RHO_STAR_L2, abs=1e-10)
    assert time_map(roots[0], LOGISTIC, 1.0) == pytest.approx(2.0, abs=1e-8)


def test_no_root_in_extinction_regime():
    assert solve_steady_states(Params(1, 1, 1, 1, 1.4), LOGISTIC) == []


def test_remark33_three_roots():
    # L between the local max (~2.315 at rho ~0.385) and local min (~2.151 at rho ~0.719) of M
    roots = solve_steady_states(Params(1, 1, 1, 1, 2.2), REMARK33)
    assert len(roots) >= 3
    for r in roots:
        assert time_map(r, REMARK33, 1.0) == pytest.approx(2.2, abs=1e-8)


def test_steady_root_too_close_to_one():
    with pytest.raises(NumericalError):
        solve_steady_states(Params(1, 1, 1, 1, 60.0), LOGISTIC)


@given(st.floats(1.7, 8.0))
def test_single_root_whenever_persistent(L):
    assert len(solve_steady_states(Params(1, 1, 1, 1, L), LOGISTIC)) == 1


def test_profile_invariants():
    p = Params(1, 1, 1, 1, 2)
    prof = reconstruct_profile(RHO_STAR_L2, p, LOGISTIC)
    assert prof.residual < 1e-6
    assert prof.V[0] == 0 and prof.V[-1] == pytest.approx(RHO_STAR_L2, abs=1e-12)
    assert np.all(np.diff(prof.V) > 0)
    assert np.all((prof.V[1:] > 0) & (prof.V[1:] < 1))
    h = prof.y[1] - prof.y[0]
    assert abs(prof.V[-1] - prof.V[-2]) / h < 2e-3
    assert prof.road_value(p) == pytest.approx(RHO_STAR_L2)


def test_profile_against_collocation_oracle():
    p = Params(1, 1, 1, 1, 2)
    prof = reconstruct_profile(RHO_STAR_L2, p, LOGISTIC)
    y = np.linspace(0, 2, 81)
    sol = integrate.solve_bvp(lambda t, z: np.vstack([z[1], -z[0] * (1 - z[0])]),
                              lambda a, b: np.array([a[0], b[1]]), y,
                              np.vstack([0.45 * np.sin(np.pi * y / 4), 0.45 * np.pi / 4 * np.cos(np.pi * y / 4)]),
                              tol=1e-10)
    assert sol.success
    assert np.max(np.abs(sol.sol(prof.y)[0] - prof.V)) < 1e-7


def test_profile_grid_convergence():
    p = Params(1, 1, 1, 1, 2)
    a = reconstruct_profile(RHO_STAR_L2, p, LOGISTIC, n=50)
    b = reconstruct_profile(RHO_STAR_L2, p, LOGISTIC, n=100)
    c = reconstruct_profile(RHO_STAR_L2, p, LOGISTIC, n=200)
    e1 = np.max(np.abs(a.V - c.V[::4]))
    e2 = np.max(np.abs(b.V - c.V[::2]))
    assert e2 < e1 / 8  # fourth order: ratio ~ 16


def test_small_rho_profile_vanishes():
    L = time_map(1e-4, LOGISTIC, 1.0)
    prof = reconstruct_profile(1e-4, Params(1, 1, 1, 1, L), LOGISTIC)
    assert np.max(prof.V) <= 1e-4 + 1e-15


def test_profile_mismatch():
    with pytest.raises(MismatchError):
        reconstruct_profile(0.3, Params(1, 1, 1, 1, 2), LOGISTIC)


def test_bvp_residual_detects_wrong_profile():
    y = np.linspace(0, 2, 201)
    assert bvp_residual(0.4 * np.sin(y), y[1] - y[0], 1.0, LOGISTIC) > 1e-2


def test_robin_steady_state():
    s = solve_robin_steady(Params(1, 1, 1, 1, 4), LOGISTIC)
    assert s.residual < 1e-6
    h = s.y[1] - s.y[0]
    slope = (3 * s.V[-1] - 4 * s.V[-2] + s.V[-3]) / (2 * h)
    assert slope == pytest.approx(-s.V[-1], abs=1e-4)
    assert solve_robin_steady(Params(1, 1, 1, 1, 2), LOGISTIC) is None
