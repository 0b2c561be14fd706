import math
import warnings

import numpy as np
import pytest

from ncgas.errors import DomainError, RegimeWarning
from ncgas.thermo2d import (Region, boundary_curves, classify_region, critical_density,
                            curve_c1, curve_c2, curve_c3, curve_c4, incompressible_scaling,
                            near_critical_SP, observables, potentials_near_critical,
                            potentials_regions_II_III, solve_potentials, t0_angular_momentum,
                            t0_density, t0_entropy_per_M, t0_pressure_per_M2, thermo_limit_state)

PI2 = math.pi ** 2


# --- phase diagram -----------------------------------------------------------------

def test_curves_meet_at_quarter():
    curves = boundary_curves(0.25)
    for value in (curves.C1, curves.C2, curves.C3):
        assert value == pytest.approx(-1 / 6, abs=1e-15)
    zero = boundary_curves(0.0)
    assert zero.C1 == zero.C3 == zero.C4 == 0.0


def test_curve_values_at_one_tenth():
    curves = boundary_curves(0.1)
    assert curves.C1 == pytest.approx(8 * 0.1 ** 1.5 / 3 - 0.2)
    assert curves.C1 == pytest.approx(-0.11568, abs=1e-5)
    assert curves.C3 == pytest.approx(0.08 - 16 * 0.1 ** 1.5 / 3, rel=1e-14)
    assert curves.C4 == pytest.approx(0.08 + 16 * 0.1 ** 1.5 / 3, rel=1e-14)
    assert math.isnan(curves.C2)
    assert math.isnan(boundary_curves(0.3).C1) and math.isnan(boundary_curves(0.3).C3)


def test_classification_examples():
    assert classify_region(0.1, 0.0) is Region.I
    assert classify_region(0.3, -0.2) is Region.FORBIDDEN
    assert classify_region(0.1, 1.2) is Region.II
    assert classify_region(0.1, -0.1) is Region.III
    assert classify_region(0.1, curve_c3(0.1)) is Region.I
    assert classify_region(0.1, curve_c4(0.1)) is Region.I
    assert classify_region(0.1, curve_c1(0.1)) is Region.III
    assert classify_region(0.1, curve_c1(0.1) - 1e-9) is Region.FORBIDDEN


def test_critical_density():
    cd = critical_density(0.0)
    assert cd.nu_c == pytest.approx((3 + 2 * math.sqrt(3)) / 12, abs=1e-15)
    assert cd.nu_c == pytest.approx(0.538675, abs=1e-6)
    assert cd.nu_0 == pytest.approx(-0.038675, abs=1e-6)
    assert critical_density(-1 / 6).nu_c == pytest.approx(0.25)
    assert critical_density(-1 / 6).nu_0 == pytest.approx(0.25)
    rng = np.random.default_rng(19)
    for ell in rng.uniform(-1 / 6, 5, 12):
        cd = critical_density(ell)
        assert curve_c2(cd.nu_c) == pytest.approx(ell, abs=1e-12)
        assert cd.nu_c + cd.nu_0 == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        critical_density(-0.2)


# --- inversion ---------------------------------------------------------------------

def test_region_three_example():
    c, w = solve_potentials(0.1, -0.11)
    assert c == pytest.approx(-0.983, abs=1e-3)
    assert w == pytest.approx(-4.937, abs=1e-3)
    assert (c, w) == pytest.approx(potentials_regions_II_III(0.1, -0.11, -1), rel=1e-10)


@pytest.mark.parametrize("nu", [0.01, 0.05, 0.12, 0.2, 0.249])
def test_chemical_potential_vanishes_on_c3(nu):
    c, _ = solve_potentials(nu, curve_c3(nu))
    assert abs(c) < 1e-10
    c_closed, _ = potentials_regions_II_III(nu, curve_c3(nu), -1)
    assert abs(c_closed) < 1e-10


@pytest.mark.parametrize("nu", [0.01, 0.1, 0.3, 0.8, 2.0])
def test_chemical_potential_vanishes_on_c4(nu):
    c, _ = solve_potentials(nu, curve_c4(nu))
    assert abs(c) < 1e-10
    c_closed, _ = potentials_regions_II_III(nu, curve_c4(nu), +1)
    assert abs(c_closed) < 1e-10


def _random_state(rng, region):
    while True:
        nu = rng.uniform(0.005, 1.5)
        ell = rng.uniform(-0.2, 3.0)
        if classify_region(nu, ell) is region:
            return nu, ell


@pytest.mark.parametrize("region", [Region.I, Region.II, Region.III])
def test_round_trip_through_zero_temperature_forms(region):
    rng = np.random.default_rng({"I": 1, "II": 2, "III": 3}[region.value])
    for _ in range(60):
        nu, ell = _random_state(rng, region)
        c, w = solve_potentials(nu, ell)
        assert t0_density(c, w) == pytest.approx(nu, rel=1e-10)
        assert t0_angular_momentum(c, w) == pytest.approx(ell, rel=1e-9, abs=1e-12)
        if region is Region.I:
            assert c >= 0
        else:
            assert c < 0 and (w > 0) == (region is Region.II)


def test_round_trip_through_finite_temperature_observables():
    rng = np.random.default_rng(23)
    M, b = 50, 1e8
    for region in (Region.I, Region.II, Region.III):
        for _ in range(5):
            nu, ell = _random_state(rng, region)
            c, w = solve_potentials(nu, ell)
            obs = observables(M, b / M, c * M, w)
            assert obs.nu == pytest.approx(nu, rel=1e-6)
            assert obs.ell == pytest.approx(ell, rel=1e-6, abs=1e-9)


def test_forbidden_inputs_name_the_curve():
    with pytest.raises(DomainError, match=r"C2.*0\.538675"):
        solve_potentials(0.6, 0.0)
    with pytest.raises(DomainError, match="C1"):
        solve_potentials(0.1, -0.2)


def test_potentials_diverge_at_critical_density():
    nu_c = critical_density(0.0).nu_c
    previous = None
    for gap in (1e-2, 1e-4, 1e-6, 1e-8):
        c, w = solve_potentials(nu_c - gap, 0.0)
        if previous:
            assert c > previous[0] and w < previous[1]
        previous = (c, w)
    assert previous[0] > 1e3 and previous[1] < -1e3


def test_near_critical_potentials_are_leading_order():
    # the closed form near nu_c agrees with the numerical solve better and better
    nu_c = critical_density(0.3).nu_c
    errors = []
    for gap in (1e-2, 1e-4, 1e-6):
        c, w = solve_potentials(nu_c - gap, 0.3)
        c13, w13 = potentials_near_critical(nu_c - gap, 0.3)
        errors.append(abs(w13 - w) / abs(w))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-2


# --- observables -------------------------------------------------------------------

def test_commutative_limit_observables():
    M, beta, c = 200, 100.0, 0.7
    obs = observables(M, beta, c * M, 0.0)
    q_direct = M * M * (M * beta * c * c / 2 + PI2 / (6 * M * beta))
    assert obs.q == pytest.approx(q_direct, rel=1e-14)
    assert obs.nu == pytest.approx(c / 2, rel=1e-12)
    assert obs.S_over_k == pytest.approx(M * PI2 / (3 * beta), rel=1e-10)
    assert t0_entropy_per_M(c, 0.0, beta) == pytest.approx(PI2 / (3 * beta), rel=1e-14)


def test_empty_system():
    obs = observables(30, 5.0, -1e4, 0.0)
    assert obs.q == obs.N == obs.S_over_k == obs.P_tilde == 0.0


def test_exact_path_tracks_closed_form():
    M, b = 40, 8000.0
    c, w = solve_potentials(0.2, 0.0)
    exact = observables(M, b / M, c * M, w, "exact")
    closed = observables(M, b / M, c * M, w, "sommerfeld")
    assert abs(exact.N - closed.N) / closed.N < 0.03
    assert exact.path == "exact" and closed.path == "sommerfeld"


def test_quadrature_path_tracks_closed_form():
    M, b = 10, 2000.0
    c, w = 0.9, -0.4
    quad_obs = observables(M, b / M, c * M, w, "quadrature")
    closed = observables(M, b / M, c * M, w, "sommerfeld")
    assert quad_obs.N == pytest.approx(closed.N, rel=2e-3)
    assert quad_obs.L_over_hbar == pytest.approx(closed.L_over_hbar, rel=2e-3)
    assert quad_obs.S_over_k == pytest.approx(closed.S_over_k, rel=2e-2)


def test_kink_is_flagged():
    obs = observables(20, 50.0, 0.0, -0.5)
    assert "kink" in obs.flags


def test_observables_reject_divergent_rotation():
    with pytest.raises(DomainError):
        observables(20, 50.0, 1.0, 1.0)


def test_nonnegative_observables():
    rng = np.random.default_rng(29)
    for _ in range(50):
        M = int(rng.integers(5, 300))
        beta = rng.uniform(60, 500) / M * 10
        w = rng.uniform(-3, 0.9)
        c = rng.uniform(-1, 5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            obs = observables(M, beta, c * M, w)
        assert obs.q >= 0 and obs.N >= 0 and obs.S_over_k >= 0


def test_entropy_cusp_at_c4_crossing():
    ell, beta = 1.2, 100.0
    # C4(nu) = 1.2 solved by bisection on the monotone curve
    lo, hi = 0.01, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if curve_c4(mid) < ell else (lo, mid)
    nu_star = 0.5 * (lo + hi)

    def S(nu):
        return t0_entropy_per_M(*solve_potentials(nu, ell), beta)

    h = 1e-5
    left = (S(nu_star) - S(nu_star - h)) / h
    right = (S(nu_star + h) - S(nu_star)) / h
    assert abs(S(nu_star + 1e-9) - S(nu_star - 1e-9)) < 1e-7
    assert abs(left - right) > 0.1 * max(abs(left), abs(right))


def test_pressure_increases_with_density():
    nu_c = critical_density(0.0).nu_c
    nus = np.linspace(0.01, nu_c - 1e-6, 200)
    pressures = [t0_pressure_per_M2(*solve_potentials(nu, 0.0)) for nu in nus]
    assert np.all(np.diff(pressures) > 0)


# --- incompressible point ----------------------------------------------------------

def test_near_critical_prefactor_and_product():
    cd = critical_density(0.0)
    assert math.sqrt((cd.nu_c - cd.nu_0) / (1 + 4 * cd.nu_c)) == pytest.approx(0.42779, abs=1e-5)
    products = []
    for nu in np.linspace(cd.nu_c - 0.01, cd.nu_c - 1e-9, 25):
        S, P = near_critical_SP(nu, 0.0, 100.0)
        products.append(S * P)
    assert np.ptp(products) <= 1e-12 * abs(products[0])
    with pytest.raises(DomainError):
        near_critical_SP(cd.nu_c, 0.0, 100.0)
    with pytest.warns(RegimeWarning):
        near_critical_SP(0.3, 0.0, 100.0)


def test_full_solver_entropy_exponent():
    nu_c = critical_density(0.0).nu_c
    gaps = np.logspace(-4, -2, 15)
    S = [t0_entropy_per_M(*solve_potentials(nu_c - g, 0.0), 100.0) for g in gaps]
    slope = np.polyfit(np.log(gaps), np.log(S), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.01)


def test_full_solver_pressure_exponent_closer_in():
    # the pressure carries a sizeable regular part, so its leading exponent only
    # emerges closer to nu_c than the entropy's
    nu_c = critical_density(0.0).nu_c
    gaps = np.logspace(-7, -5, 15)
    P = [t0_pressure_per_M2(*solve_potentials(nu_c - g, 0.0)) for g in gaps]
    slope = np.polyfit(np.log(gaps), np.log(P), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.01)


def test_limit_state_bundle():
    state = thermo_limit_state(0.2, 0.0, 100.0)
    assert state.region is Region.I
    assert state.S_over_Mk == pytest.approx(t0_entropy_per_M(state.mu_over_M, state.omega_t, 100.0))


def test_incompressible_scaling():
    beta = 100.0
    assert incompressible_scaling(10 ** 6, 0, beta).S_over_k == 0.0
    a = incompressible_scaling(10 ** 6, 1, beta)
    b = incompressible_scaling(10 ** 8, 1, beta)
    assert b.S_over_k / a.S_over_k == pytest.approx(math.sqrt(b.M_c / a.M_c), rel=1e-2)
    assert b.M_c / a.M_c == pytest.approx(10.0)
    s1, s4, s9 = (incompressible_scaling(10 ** 6, d, beta).S_over_k for d in (1, 4, 9))
    assert s4 / s1 == pytest.approx(2.0, rel=2e-2)
    assert s9 / s1 == pytest.approx(3.0, rel=2e-2)
    assert a.S_over_k == pytest.approx(a.S_asymptotic, rel=1e-2)
    with pytest.raises(DomainError):
        incompressible_scaling(10 ** 4, 20, beta)
