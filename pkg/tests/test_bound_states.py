import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from vpcs.bound_states import (
    BoundStateError,
    CoverageError,
    coincident_angular_factor,
    delta_approx_shift,
    dirac_energy,
    dirac_point,
    level_shift,
    mixed_multiplet_sum_closed,
    multiplet_sum_closed,
    multiplet_sum_explicit,
    nr_hydrogenic,
    radial_solve,
    reduced_mass,
    sigma_dot,
    solid_angle_closed,
    solid_angle_integral,
    spin_angle,
    vector_term_projection,
)
from vpcs.constants import ALPHA, ELECTRON_MASS_EV, MUON_MASS
from vpcs.nuclear import NuclearModel
from vpcs.tables import PotentialTable, log_grid
from vpcs.uehling import uehling_point_fast, uehling_table

# -(4 alpha^5 / 15 pi) m_e in micro-eV, alpha = 1/137.035999
H1S_DELTA_UEV = -0.897564188


def _quad_norm(state):
    return quad(state.radial_density, 0, np.inf, limit=400, epsabs=0, epsrel=1e-13)[0]


# --- nonrelativistic ------------------------------------------------------------------


@pytest.mark.parametrize("n,l", [(1, 0), (2, 0), (2, 1), (3, 2), (5, 1)])
def test_nr_normalization(n, l):
    s = nr_hydrogenic(n, l, 0.2)
    assert _quad_norm(s) == pytest.approx(1.0, abs=1e-10)
    assert s.energy == pytest.approx(-(0.2**2) / (2 * n * n), rel=1e-15)


def test_nr_moments():
    s = nr_hydrogenic(1, 0, 0.1, 3.0)
    assert s.expectation(lambda r: 1 / r) == pytest.approx(0.1 * 3.0, rel=1e-10)
    assert s.mean_radius() == pytest.approx(1.5 / (0.1 * 3.0), rel=1e-10)
    p = nr_hydrogenic(2, 1, 0.1)
    assert p.radial_density(0.0) == 0.0 and p.origin_density == 0.0


def test_nr_origin_density():
    mr = reduced_mass(MUON_MASS)
    s = nr_hydrogenic(2, 0, ALPHA, MUON_MASS, True)
    assert mr == pytest.approx(185.84, rel=1e-4)
    assert s.origin_density == pytest.approx((ALPHA * mr) ** 3 / (8 * math.pi), rel=1e-14)
    # R_20(0)^2 / 4 pi from the explicit radial function
    r = 1e-9 * s.scale
    assert s.radial_density(r) / r**2 / (4 * math.pi) == pytest.approx(s.origin_density, rel=1e-7)


def test_nr_errors():
    for args in [(1, 1, 0.1), (0, 0, 0.1), (2, -1, 0.1), (1, 0, 0.0), (1, 0, 1.2)]:
        with pytest.raises(BoundStateError):
            nr_hydrogenic(*args)


def test_state_json():
    s = nr_hydrogenic(2, 0, ALPHA, MUON_MASS, True)
    d = json.loads(s.to_json())
    assert d["species"] == "muon" and d["state"] == "2s"
    assert d["origin_density"] == pytest.approx(s.origin_density)
    assert d["mean_radius"] == pytest.approx(6 * s.scale, rel=1e-9)
    d = dirac_point(2, 1, 0.1).to_dict()
    assert d["state"] == "2p1/2" and d["kappa"] == 1 and d["relativistic"]


# --- Dirac point Coulomb ------------------------------------------------------------------


@pytest.mark.parametrize("n,kappa,za", [(1, -1, 0.3), (2, -1, 0.6), (2, 1, 0.3), (2, -2, 0.9), (3, 2, 0.01)])
def test_dirac_normalization(n, kappa, za):
    s = dirac_point(n, kappa, za)
    assert _quad_norm(s) == pytest.approx(1.0, abs=1e-10)


def test_dirac_ground_state_energy():
    for za in (0.01, 0.5, 0.99):
        assert dirac_point(1, -1, za).energy == pytest.approx(math.sqrt(1 - za * za), rel=1e-15)


def test_dirac_nonrelativistic_limit():
    za = 0.01
    for n, kappa in [(1, -1), (2, -1), (2, 1), (3, -3)]:
        s = dirac_point(n, kappa, za, 2.0)
        assert s.binding_energy == pytest.approx(-(za**2) * 2.0 / (2 * n * n), abs=za**4 * 2.0)


@pytest.mark.parametrize("n,kappa", [(1, -1), (2, 1), (3, -2)])
def test_dirac_radial_equations(n, kappa):
    za, m = 0.4, 1.0
    s = dirac_point(n, kappa, za, m)
    E = s.energy
    r = np.array([0.3, 2.0, 7.0])
    h = 1e-5
    G, F = s.radial_functions(r)
    Gp = (s.radial_functions(r + h)[0] - s.radial_functions(r - h)[0]) / (2 * h)
    Fp = (s.radial_functions(r + h)[1] - s.radial_functions(r - h)[1]) / (2 * h)
    V = -za / r
    np.testing.assert_allclose(Gp, -kappa * G / r + (E - V + m) * F, atol=1e-8)
    np.testing.assert_allclose(Fp, kappa * F / r - (E - V - m) * G, atol=1e-8)


def test_dirac_errors():
    with pytest.raises(BoundStateError):
        dirac_point(1, 1, 0.1)
    with pytest.raises(BoundStateError):
        dirac_point(2, 0, 0.1)
    with pytest.raises(BoundStateError):
        dirac_point(1, -2, 0.1)
    with pytest.raises(BoundStateError):
        dirac_point(1, -1, 1.0)


# --- shooting solver --------------------------------------------------------------------------


@pytest.mark.parametrize("Z,n,kappa", [(1, 1, -1), (1, 2, 1), (82, 2, -2)])
def test_radial_solve_point(Z, n, kappa):
    s = radial_solve(NuclearModel.point(Z), n, kappa)
    assert s.energy == pytest.approx(dirac_energy(n, kappa, Z * ALPHA), rel=1e-9)
    assert s.norm() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("za", [0.01, 0.1, 0.6])
def test_radial_solve_sphere_normalized(za):
    model = NuclearModel.uniform_sphere(0.02 / za, za / ALPHA)
    s = radial_solve(model, 1, -1)
    assert s.norm() == pytest.approx(1.0, abs=1e-10)
    assert s.energy > dirac_energy(1, -1, za)


def test_radial_solve_sphere_limit():
    Z = 0.6 / ALPHA
    E_pt = dirac_energy(1, -1, 0.6)
    shifts = [radial_solve(NuclearModel.uniform_sphere(R, Z), 1, -1).energy - E_pt for R in (0.02, 0.005)]
    assert 0 < shifts[1] < shifts[0]
    # 1s finite-size shift scales as R^(2 gamma)
    gamma = math.sqrt(1 - 0.36)
    assert shifts[0] / shifts[1] == pytest.approx(4 ** (2 * gamma), rel=0.05)


def test_radial_solve_matches_analytic_density():
    s = radial_solve(NuclearModel.point(40), 1, -1)
    a = dirac_point(1, -1, 40 * ALPHA)
    r = np.geomspace(1e-3, 2.0, 9) * a.scale
    np.testing.assert_allclose(s.radial_density(r), a.radial_density(r), rtol=1e-7)


# --- level shifts ------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def muonic():
    s2 = nr_hydrogenic(2, 0, ALPHA, MUON_MASS, True)
    p2 = nr_hydrogenic(2, 1, ALPHA, MUON_MASS, True)
    tab = uehling_table(NuclearModel.point(), log_grid(1e-4 * s2.scale, 50 * s2.scale, 600))
    return s2, p2, tab


def test_muonic_lamb_uehling(muonic):
    s2, p2, tab = muonic
    split = (level_shift(p2, tab) - level_shift(s2, tab)) * ELECTRON_MASS_EV * 1e3
    # independent route: direct quadrature of the vectorized kernel
    oracle = (p2.expectation(uehling_point_fast) - s2.expectation(uehling_point_fast)) * ELECTRON_MASS_EV * 1e3
    assert split == pytest.approx(oracle, rel=1e-7)
    assert split == pytest.approx(205.0, rel=0.01)


def test_level_shift_grid_refinement(muonic):
    s2, _, tab = muonic
    coarse = uehling_table(NuclearModel.point(), log_grid(1e-4 * s2.scale, 50 * s2.scale, 400))
    assert level_shift(s2, coarse) == pytest.approx(level_shift(s2, tab), rel=1e-9)


def test_level_shift_linear(muonic):
    s2, _, tab = muonic
    assert level_shift(s2, tab.scaled(-2.5)) == pytest.approx(-2.5 * level_shift(s2, tab), rel=1e-13)
    assert level_shift(s2, tab + tab) == pytest.approx(2 * level_shift(s2, tab), rel=1e-12)


def test_level_shift_zero_table():
    s = nr_hydrogenic(1, 0, 0.1)
    r = log_grid(1e-3, 500, 50)
    assert level_shift(s, PotentialTable(r, np.zeros_like(r))) == 0.0


def test_level_shift_coverage():
    s = nr_hydrogenic(1, 0, 0.1)
    r = log_grid(1e-3, 20.0, 50)
    with pytest.raises(CoverageError):
        level_shift(s, PotentialTable(r, -1.0 / r))


def test_hydrogen_1s_uehling():
    s = nr_hydrogenic(1, 0, ALPHA)
    tab = uehling_table(NuclearModel.point(), log_grid(1e-4 * s.scale, 50 * s.scale, 600))
    shift = level_shift(s, tab) * ELECTRON_MASS_EV * 1e6
    assert delta_approx_shift(s) * ELECTRON_MASS_EV * 1e6 == pytest.approx(H1S_DELTA_UEV, rel=1e-8)
    assert shift == pytest.approx(H1S_DELTA_UEV, rel=0.02)
    assert shift < 0


def test_delta_approx():
    s = nr_hydrogenic(1, 0, ALPHA)
    assert delta_approx_shift(s, 1.0, 3.0) == pytest.approx(delta_approx_shift(s) / 9.0, rel=1e-15)
    assert delta_approx_shift(s, -2.0, 1.0) == pytest.approx(-2 * delta_approx_shift(s), rel=1e-15)
    assert delta_approx_shift(nr_hydrogenic(2, 1, ALPHA)) == 0.0
    assert delta_approx_shift(dirac_point(2, 1, ALPHA)) == 0.0


def test_heavy_loop_limit():
    # loop Compton wavelength far below the Bohr radius: the delta estimate holds
    s = nr_hydrogenic(1, 0, ALPHA)
    for M in (1.0, 10.0):
        exact = s.expectation(lambda r: uehling_point_fast(r, M))
        assert exact == pytest.approx(delta_approx_shift(s, 1.0, M), rel=0.02 / M)


def test_2p_shift_small():
    s1, p2 = nr_hydrogenic(1, 0, ALPHA), nr_hydrogenic(2, 1, ALPHA)
    v1 = s1.expectation(uehling_point_fast)
    v2 = p2.expectation(uehling_point_fast)
    assert v2 < 0 and abs(v2) < abs(v1) / 100


def test_relativistic_level_shift_close_to_nr():
    za = 0.05
    rel = dirac_point(1, -1, za, MUON_MASS)
    nr = nr_hydrogenic(1, 0, za, MUON_MASS)
    a, b = rel.expectation(uehling_point_fast), nr.expectation(uehling_point_fast)
    assert a == pytest.approx(b, rel=0.02) and abs(a) > abs(b)


# --- spin-angular sums and the vector term ---------------------------------------------------------


def _unit(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


@pytest.mark.parametrize("kappa", [-1, 1, -2, 2, -3, 3])
def test_sigma_r_flips_kappa(kappa):
    th, ph = 0.9, -2.2
    for mu in np.arange(-(abs(kappa) - 0.5), abs(kappa)):
        lhs = sigma_dot(_unit(th, ph)) @ spin_angle(kappa, mu, th, ph)
        np.testing.assert_allclose(lhs, -spin_angle(-kappa, mu, th, ph), atol=1e-15)


@pytest.mark.parametrize("kappa", [-1, 1, -2, 2, 3])
def test_multiplet_sums_closed_forms(kappa):
    x1, x2 = _unit(0.7, 1.1), _unit(2.1, -0.4)
    np.testing.assert_allclose(multiplet_sum_explicit(kappa, x2, x1), multiplet_sum_closed(kappa, x1, x2), atol=1e-15)
    np.testing.assert_allclose(
        multiplet_sum_explicit(kappa, x1, x2, -kappa), mixed_multiplet_sum_closed(kappa, x1, x2), atol=1e-15
    )


@pytest.mark.parametrize("kappa", [-1, 1, -2, 2, -3])
def test_coincident_angular_factor(kappa):
    assert coincident_angular_factor(kappa, 1) == kappa
    assert coincident_angular_factor(kappa, -1) == -kappa


@pytest.mark.parametrize("n,kappa", [(1, -1), (2, 1), (3, -3)])
def test_vector_term_vanishes(n, kappa):
    s = dirac_point(n, kappa, 0.3)
    chk = vector_term_projection(s)
    assert chk.radii.size == 20
    assert chk.max_residual <= 1e-12
    # the cancellation is between the two conjugate terms, not a zero trace
    x = _unit(0.4, 0.2)
    t = np.trace(sigma_dot(x) @ multiplet_sum_explicit(-kappa, x, x, kappa))
    assert abs(t.real) > 0.01 and abs(t.imag) < 1e-15


def test_vector_term_nonrelativistic():
    chk = vector_term_projection(nr_hydrogenic(2, 1, 0.1))
    assert chk.explicit == 0.0 and chk.closed == 0.0


@pytest.mark.parametrize("ratio", [0.5, 2.0])
def test_solid_angle_identity(ratio):
    x1 = np.array([0.3, -0.5, 0.8])
    r2 = ratio * np.linalg.norm(x1)
    np.testing.assert_allclose(solid_angle_integral(x1, r2), solid_angle_closed(x1, r2), atol=1e-8)
