import math

import numpy as np
import pytest

from vpcs.constants import ALPHA
from vpcs.nuclear import NuclearModel
from vpcs.pauli_villars import make_pv_set, single_mass
from vpcs.quadrature import t_kernel_batch
from vpcs.uehling import (
    angular_kernel,
    coulomb_smear_identity,
    decompose_vp21,
    large_u_falloff_check,
    log_sum_antiderivative,
    log_sum_integrand,
    log_sum_orders,
    log_sum_quadrature,
    log_sum_term,
    potential_difference_kernel_identity,
    prefactor_ratio_prediction,
    regulated_exponential,
    renormalization_log,
    uehling_finite,
    uehling_log_slope,
    uehling_point,
    uehling_point_fast,
    uehling_table,
    uehling_u_form,
    vp21_decomposed_point,
    vp21_potential_finite_mass,
)

# mpmath, 30 digits: -(1/3)(C1 ln 100 + C2 ln 400) with C1 = -399/300, C2 = 99/300
LOG_SUM_REF = 1.38256434893950915460686990307
K1 = 0.071865446259945560187505658256
PREF = ALPHA**2 / (3 * math.pi)


@pytest.fixture(scope="module")
def pv():
    return make_pv_set(1, 10, 20)


def test_log_sum_closed_form(pv):
    assert renormalization_log(pv) == pytest.approx(LOG_SUM_REF, rel=1e-15)


def test_log_sum_quadrature(pv):
    assert log_sum_quadrature(pv).value == pytest.approx(LOG_SUM_REF, rel=1e-10)


@pytest.mark.parametrize("masses", [(1, 2, 3), (1, 100, 200), (0.5, 1e3, 1e6)])
def test_log_sum_quadrature_other_sets(masses):
    p = make_pv_set(*masses)
    assert log_sum_quadrature(p).value == pytest.approx(renormalization_log(p), rel=1e-9)


def test_log_sum_scale_shift(pv):
    lam = 7.3
    scaled = make_pv_set(lam, 10 * lam, 20 * lam)
    assert renormalization_log(scaled) == pytest.approx(renormalization_log(pv), rel=1e-13)


def test_log_sum_integrand_stable_tail(pv):
    u = np.array([30.0, 100.0, 1e3, 1e5])
    direct = sum(C * log_sum_term(u, m) for C, m in pv.terms())
    stable = log_sum_integrand(u, pv)
    np.testing.assert_allclose(stable[:2], direct[:2], rtol=1e-7)
    # sum C m^4 / u^5 scaling at large u
    ratio = stable[2] / stable[3]
    assert ratio == pytest.approx(1e10, rel=1e-3)


def test_antiderivative(pv):
    for u in [0.5, 3.0, 40.0]:
        h = 1e-5
        d = (log_sum_antiderivative(u + h, 2.0) - log_sum_antiderivative(u - h, 2.0)) / (2 * h)
        assert d == pytest.approx(float(log_sum_term(u, 2.0)), rel=1e-7)


def test_order_of_operations(pv):
    right, wrong = log_sum_orders(pv)
    assert right == pytest.approx(LOG_SUM_REF, rel=1e-6)
    assert abs(wrong) < 1e-12
    assert abs(right - wrong) > 1.0


def test_uehling_point_value():
    assert uehling_point(1.0) == pytest.approx(-PREF * K1, rel=1e-13)
    assert uehling_point(2.0, Z=3) == pytest.approx(3 * uehling_point(2.0), rel=1e-14)


def test_uehling_domain():
    with pytest.raises(ValueError):
        uehling_point(0.0)
    with pytest.raises(ValueError):
        uehling_u_form(-1.0)


def test_dual_forms_on_grid():
    r = np.geomspace(1e-3, 20, 50)
    np.testing.assert_allclose(uehling_u_form(r), uehling_point(r), rtol=1e-10)


@pytest.mark.parametrize("r,tol", [(1.0, 1e-10), (0.01, 1e-9), (10.0, 1e-8)])
def test_dual_forms_spot(r, tol):
    assert uehling_u_form(r) == pytest.approx(uehling_point(r), rel=tol)


def test_fast_kernel_matches():
    r = np.geomspace(1e-4, 50, 40)
    np.testing.assert_allclose(uehling_point_fast(r), uehling_point(r), rtol=1e-12)


def test_sign_and_monotone():
    r = np.geomspace(1e-3, 30, 80)
    v = uehling_point_fast(r)
    assert np.all(v < 0)
    assert np.all(np.diff(v) > 0)


def test_small_r_log_slope():
    assert uehling_log_slope() == pytest.approx(2 * PREF, rel=0.01)


def test_large_r_vanishes():
    assert abs(uehling_point(100.0)) < 1e-80


def test_angular_kernel_brute_force():
    from scipy.integrate import quad

    for x, rp, c in [(1.0, 0.4, 1.0), (0.2, 0.9, 3.0), (0.5, 0.5 + 1e-3, 0.7)]:
        f = lambda mu: 2 * math.pi * math.exp(-2 * c * math.sqrt(x * x + rp * rp - 2 * x * rp * mu)) / math.sqrt(
            x * x + rp * rp - 2 * x * rp * mu
        )
        brute = quad(f, -1, 1, points=[1 - 1e-4, 1 - 1e-6], limit=400, epsabs=0, epsrel=1e-12)[0]
        assert angular_kernel(x, rp, c) == pytest.approx(brute, rel=1e-9)


def _brute_finite(model, x, n=200):
    # 2D Gauss-Legendre in (r', v) with mu = 1 - 2 v^2 to soften the D -> 0 corner
    g, w = np.polynomial.legendre.leggauss(n)
    v, wv = 0.5 * (g + 1), 0.5 * w
    mu, wmu = 1 - 2 * v**2, 4 * v * wv
    hi = model.extent()
    edges = sorted({0.0, hi, *[b for b in model.breakpoints() if b < hi], *([x] if x < hi else [])})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rp, wr = 0.5 * (b - a) * g + 0.5 * (a + b), 0.5 * (b - a) * w
        R, M = np.meshgrid(rp, mu, indexing="ij")
        D = np.sqrt(np.maximum(x * x + R * R - 2 * x * R * M, 1e-300))
        K = t_kernel_batch(D.ravel()).reshape(D.shape)
        total += np.einsum("i,j,ij->", wr, wmu, 2 * np.pi * R**2 * model.density(R) * K / D)
    return -PREF * model.Z * total


@pytest.mark.parametrize(
    "model,x",
    [
        (NuclearModel.uniform_sphere(0.1), 1.0),
        (NuclearModel.uniform_sphere(0.1), 0.05),
        (NuclearModel.gaussian(0.5, Z=2), 0.3),
        (NuclearModel.fermi2(0.3, 0.05), 0.2),
    ],
    ids=["uniform-out", "uniform-in", "gaussian", "fermi"],
)
def test_finite_matches_brute_force(model, x):
    assert uehling_finite(model, x) == pytest.approx(_brute_finite(model, x), rel=1e-7)


def test_finite_at_origin():
    m = NuclearModel.uniform_sphere(0.05)
    v0 = uehling_finite(m, 0.0)
    assert math.isfinite(v0) and v0 < 0
    assert uehling_finite(m, 1e-9) == pytest.approx(v0, rel=1e-6)


@pytest.mark.parametrize("R", [0.01, 0.001])
def test_finite_point_limit(R):
    m = NuclearModel.uniform_sphere(R)
    assert uehling_finite(m, 10 * R) == pytest.approx(uehling_point(10 * R), rel=1e-3)


def test_finite_point_model_delegates():
    assert uehling_finite(NuclearModel.point(Z=2), 0.7) == pytest.approx(uehling_point(0.7, Z=2), rel=1e-14)


def test_finite_monotone():
    m = NuclearModel.gaussian(0.3)
    r = np.linspace(0.0, 3.0, 25)
    v = uehling_finite(m, r)
    assert np.all(v < 0) and np.all(np.diff(v) > 0)


def test_induced_charge_vanishes():
    # Gauss: int_a^b r^2 lap V dr = b^2 V'(b) - a^2 V'(a), and the flux through a
    # large sphere is negligible because the induced charge integrates to zero
    m = NuclearModel.gaussian(0.5)
    V = lambda r: uehling_finite(m, r)

    def flux(r):
        h = 1e-3 * r
        return r * r * (V(r + h) - V(r - h)) / (2 * h)

    def lap(r):
        h = 1e-2 * r
        g = lambda s: s * V(s)
        return (-g(r + 2 * h) + 16 * g(r + h) - 30 * g(r) + 16 * g(r - h) - g(r - 2 * h)) / (12 * h * h) / r

    g, w = np.polynomial.legendre.leggauss(16)
    total = 0.0
    for a, b in [(0.5, 1.5), (1.5, 4.0)]:
        x = 0.5 * (b - a) * g + 0.5 * (a + b)
        total += 0.5 * (b - a) * sum(wi * xi * xi * lap(xi) for xi, wi in zip(x, w))
    assert total == pytest.approx(flux(4.0) - flux(0.5), rel=1e-5)
    assert abs(flux(8.0)) < 1e-6 * abs(flux(0.5))


def test_vp21_point_matches_decomposition(pv):
    for r in [0.5, 1.0, 2.0]:
        assert vp21_potential_finite_mass(NuclearModel.point(), r, pv) == pytest.approx(
            vp21_decomposed_point(r, pv), rel=1e-8
        )


def test_vp21_reference_point(pv):
    S = pv.log_sum()
    expect = -PREF * S + sum(C * uehling_point(1.0, m) for C, m in pv.terms())
    assert vp21_potential_finite_mass(NuclearModel.point(), 1.0, pv) == pytest.approx(expect, rel=1e-8)


def test_vp21_zero_charge(pv):
    assert vp21_potential_finite_mass(NuclearModel.point(Z=0), 1.0, pv) == 0.0


def test_vp21_rejects_unregulated():
    from vpcs.pauli_villars import RegularizationError

    with pytest.raises(RegularizationError):
        vp21_potential_finite_mass(NuclearModel.point(), 1.0, single_mass())


def test_vp21_finite_nucleus_decomposition(pv):
    m = NuclearModel.uniform_sphere(0.2)
    radii = np.array([0.1, 0.5, 2.0])
    dec = decompose_vp21(m, radii, pv)
    direct = vp21_potential_finite_mass(m, radii, pv)
    np.testing.assert_allclose(dec.full_potential().values, direct, rtol=1e-9)
    assert dec.renorm_log_coefficient == pytest.approx(LOG_SUM_REF, rel=1e-14)


def test_vp21_heavy_mass_limit():
    # log-subtracted finite-mass potential approaches the Uehling potential
    r = 0.05
    devs = []
    for M in [10.0, 30.0]:
        p = make_pv_set(1, M, 2 * M)
        sub = vp21_decomposed_point(r, p) + PREF * p.log_sum() / r
        devs.append(abs(sub - uehling_point(r)))
    assert devs[1] < devs[0]


@pytest.mark.parametrize(
    "model,x,c",
    [
        (NuclearModel.point(), 1.0, 1.0),
        (NuclearModel.point(Z=2), 0.3, 5.0),
        (NuclearModel.uniform_sphere(0.5), 1.0, 1.0),
        (NuclearModel.uniform_sphere(0.5), 0.2, 2.0),
        (NuclearModel.gaussian(0.5), 0.3, 2.0),
        (NuclearModel.fermi2(0.3, 0.05), 0.2, 1.0),
    ],
)
def test_potential_difference_identity(model, x, c):
    lhs, rhs = potential_difference_kernel_identity(model, x, c)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_potential_difference_identity_uniform_2R():
    R = 0.3
    lhs, rhs = potential_difference_kernel_identity(NuclearModel.uniform_sphere(R), 2 * R, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_potential_difference_large_c():
    x = 0.5
    small = [potential_difference_kernel_identity(NuclearModel.point(), x, c)[1] for c in (20.0, 40.0)]
    assert small[1] / small[0] == pytest.approx(0.25 * math.exp(-40 * x), rel=1e-12)


def test_smear_identity_reference():
    lhs, rhs = coulomb_smear_identity(1.0, 0.0, 1.0)
    assert rhs == pytest.approx(2.71642432200215696, rel=1e-15)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_smear_identity_vectors_and_limits():
    lhs, rhs = coulomb_smear_identity([0, 0, 1.0], [0.3, 0.4, 1.0], 3.0)
    assert lhs == pytest.approx(rhs, rel=1e-8)
    lhs, rhs = coulomb_smear_identity(40.0, 0.0, 1.0)
    assert rhs == pytest.approx(math.pi / 40.0, rel=1e-15)
    assert lhs == pytest.approx(rhs, rel=1e-8)
    lhs, rhs = coulomb_smear_identity(1e-6, 0.0, 1.0)
    assert rhs == pytest.approx(2 * math.pi, rel=1e-5)
    with pytest.raises(ValueError):
        coulomb_smear_identity(1.0, 1.0, 1.0)


def test_regulated_exponential_matches_direct(pv):
    D = np.array([1e-3, 0.01, 0.05])
    u = 30.0
    c = np.sqrt(pv.masses**2 + u * u)
    direct = (pv.coefficients[None, :] * np.exp(-2 * c[None, :] * D[:, None])).sum(axis=1)
    np.testing.assert_allclose(regulated_exponential(D, u, pv), direct, rtol=1e-8)


def test_large_u_falloff(pv):
    fc = large_u_falloff_check(NuclearModel.gaussian(1.0), 0.5, pv)
    assert fc.exponent_density == pytest.approx(-5, abs=0.2)
    assert fc.exponent_potential == pytest.approx(-5, abs=0.2)
    assert fc.density_term[-1] / fc.predicted_density[-1] == pytest.approx(1, rel=1e-3)
    assert fc.potential_term[-1] / fc.predicted_potential[-1] == pytest.approx(1, rel=1e-3)
    assert fc.prefactor_ratio == pytest.approx(prefactor_ratio_prediction(1.0), rel=1e-3)


def test_unregulated_falloff(pv):
    fc = large_u_falloff_check(NuclearModel.gaussian(1.0), 0.5, pv, regulated=False)
    assert fc.exponent_density == pytest.approx(-1, abs=0.05)


def test_falloff_rejects_point(pv):
    with pytest.raises(ValueError):
        large_u_falloff_check(NuclearModel.point(), 0.5, pv)


def test_uehling_table_threads():
    r = np.geomspace(0.01, 5, 12)
    a = uehling_table(NuclearModel.gaussian(0.2), r, threads=1)
    b = uehling_table(NuclearModel.gaussian(0.2), r, threads=4)
    np.testing.assert_array_equal(a.values, b.values)
    assert np.all(a.values < 0)
