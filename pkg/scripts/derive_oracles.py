"""Independent high-precision reference values for the test suite.

Nothing here imports roadkpp.  Every value comes from mpmath with 30 digits,
solving the tangency conditions directly as 2x2 systems (value and slope
match) rather than by region overlap.  Run to regenerate the frozen numbers
in tests/reference_values.py.
"""

import mpmath as mp

mp.mp.dps = 30
d = mu = nu = mp.mpf(1)
fp0 = mp.mpf(1)
ck = 2 * mp.sqrt(d * fp0)


def qf(b, L):
    return d * b * mp.cos(b * L) + nu * mp.sin(b * L)


def beta_bar(L):
    return mp.findroot(lambda b: qf(b, L), (mp.pi / (2 * L) + mp.mpf("1e-6"), mp.pi / L - mp.mpf("1e-6")), solver="bisect")


def chi(b, D, L):
    return 4 * mu * d * D * b * mp.cos(b * L) / qf(b, L)


def time_map_logistic(rho):
    inner = lambda xi: (1 - xi**2) / 2 - rho * (1 - xi**3) / 3
    return mp.quad(lambda xi: 1 / mp.sqrt(2 / d * inner(xi)), [0, 1])


def tangent(F, x0):
    """Solve F(c, beta) = 0 and dF/dbeta = 0 from the start (c, beta)."""
    G = lambda c, b: [F(c, b), mp.diff(lambda t: F(c, t), b)]
    return mp.findroot(G, x0)


def main():
    out = {}
    out["beta_bar_L2"] = beta_bar(2)
    out["beta_bar_L4"] = beta_bar(4)
    out["M_half"] = time_map_logistic(mp.mpf("0.5"))
    out["rho_star_L2"] = mp.findroot(lambda r: time_map_logistic(r) - 2, mp.mpf("0.45"))

    # D = d: vertical common tangent, -chi(beta) = eta(beta) = c^2
    L = 2
    eta = lambda b: ck**2 - 4 * d**2 * b**2
    b = mp.findroot(lambda b: -chi(b, 1, L) - eta(b), mp.mpf("0.88"))
    out["c_star_D1_L2"] = mp.sqrt(eta(b))
    out["beta_star_D1_L2"] = b

    # D = 0.5: lower road branch tangent to upper field branch
    D = mp.mpf("0.5")
    road_m = lambda c, b: (c - mp.sqrt(c**2 + chi(b, D, L))) / (2 * D)
    fld_p = lambda c, b: (c + mp.sqrt(c**2 - eta(b))) / (2 * d)
    c, b = tangent(lambda c, b: fld_p(c, b) - road_m(c, b), (mp.mpf("0.847"), mp.mpf("0.91")))
    out["c_star_D05_L2"], out["beta_star_D05_L2"] = c, b

    # D = 8: upper road branch tangent to lower field branch
    D = mp.mpf(8)
    road_p = lambda c, b: (c + mp.sqrt(c**2 + chi(b, D, L))) / (2 * D)
    fld_m = lambda c, b: (c - mp.sqrt(c**2 - eta(b))) / (2 * d)
    c, b = tangent(lambda c, b: fld_m(c, b) - road_p(c, b), (mp.mpf("1.86"), mp.mpf("0.80")))
    out["c_star_D8_L2"], out["beta_star_D8_L2"] = c, b

    # D_KPP at L=2: alpha_D^+(c_KPP, beta) tangent to the line 1 - beta
    F = lambda D, b: (ck + mp.sqrt(ck**2 + chi(b, D, L))) / (2 * D) - (ck / (2 * d) - b)
    Dk, b = tangent(F, (mp.mpf("9.4"), mp.mpf("0.80")))
    out["D_kpp_L2"] = Dk

    # small-D limit: alpha_d^+ tangent to -chi_unit/(4c)
    a0 = lambda c, b: -chi(b, 1, L) / (4 * c)
    c, b = tangent(lambda c, b: fld_p(c, b) - a0(c, b), (mp.mpf("0.766"), mp.mpf("0.94")))
    out["ell0_L2"] = c

    # large-D limit, trig subsystem at D=1: road plus branch tangent to (f'(0) - d beta^2)/chat
    rp1 = lambda c, b: (c + mp.sqrt(c**2 + chi(b, 1, L))) / 2
    c, b = tangent(lambda c, b: rp1(c, b) - (fp0 - d * b**2) / c, (mp.mpf("0.619"), mp.mpf("0.79")))
    out["ell_inf_trig_L2"], out["ell_inf_trig_beta"] = c, b
    # with L = 2 nu/mu the contact sits at beta = pi/(2L), so ell_inf^2 = f'(0) - d (pi/2L)^2
    out["ell_inf_closed_L2"] = mp.sqrt(fp0 - d * (mp.pi / (2 * L)) ** 2)

    # c_Int at D=8, L=2 from its closed form
    w = d + nu * L
    out["c_int_D8_L2"] = mp.sqrt((w * 8 * ck**2 + 4 * mu * d**3) ** 2 / (4 * d * 7 * w * (w * ck**2 + 4 * mu * d**2)))

    # half-plane speed at D=8: road curve 4 mu d beta/(d beta + nu) tangent to lower circle branch
    hp = lambda c, b: (c + mp.sqrt(c**2 + 4 * mu * d * D * b / (d * b + nu))) / (2 * D)
    circ = lambda c, b: (c - mp.sqrt(c**2 - ck**2 - 4 * d**2 * b**2)) / (2 * d)
    c, b = tangent(lambda c, b: circ(c, b) - hp(c, b), (mp.mpf("2.92"), mp.mpf("0.19")))
    out["c_halfplane_D8"] = c

    for k, v in out.items():
        print(f"{k.upper()} = {mp.nstr(v, 17)}")


if __name__ == "__main__":
    main()
