"""One-potential vacuum polarization in coordinate space.

With c_i = sqrt(m_i^2 + u^2) and the log-sum integrand

    f_i(u) = u^2 / c_i^3 - u^4 / (3 c_i^5),

the potential of a charge distribution rho at finite auxiliary masses is

    V(x) = (Z alpha^2 / pi) int_0^inf du int d^3r rho(r)
           sum_i C_i f_i(u) (1 - exp(-2 c_i d)) / d,      d = |x - r|.

The "1" part gives (alpha S / (3 pi)) V_nuc(x) with S = sum_i C_i ln m_i^2
and is removed by charge renormalization; the exponential part of each
mass is a Uehling potential with loop mass m_i.  The substitution
u = m sqrt(t^2 - 1) maps f du to (1/3) sqrt(t^2-1)(2/t^2 + 1/t^4) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import binom

from .constants import ALPHA
from .nuclear import NuclearModel
from .pauli_villars import PauliVillarsSet
from .quadrature import (
    QuadratureResult,
    integrate,
    integrate_semi_infinite,
    integrate_t_kernel,
    t_kernel_batch,
)
from .tables import PotentialTable

# --- charge renormalization log ---------------------------------------------------

# phi(w) = (2 + 3w)(1 + w)^(-5/2) = 3 s f(u) with w = m^2/u^2; the sum rules
# remove its constant and linear Taylor terms from the regulated sum.
_B = np.array([binom(-2.5, k) for k in range(40)])
_R_COEFFS = np.array([2.0 * _B[k] + 3.0 * _B[k - 1] for k in range(2, 40)])
_SERIES_W = 0.1


def _phi_remainder(w):
    """phi(w) - 2 + 2w for 0 <= w <= 0.1, by its Taylor series."""
    out = np.zeros_like(w)
    for a in _R_COEFFS[::-1]:
        out = out * w + a
    return out * w * w


def log_sum_term(u, mass):
    """f(u) for a single mass."""
    u = np.asarray(u, dtype=float)
    c2 = mass * mass + u * u
    c = np.sqrt(c2)
    return u * u / (c2 * c) - u**4 / (3.0 * c2 * c2 * c)


def log_sum_integrand(u, pv: PauliVillarsSet):
    """sum_i C_i f_i(u), accurate at large u where the terms cancel to O(u^-5)."""
    u = np.asarray(u, dtype=float)
    s = np.abs(u).reshape(-1)
    C, mu = pv.coefficients[:, None], (pv.masses**2)[:, None]
    direct = (C * log_sum_term(s[None, :], np.sqrt(mu))).sum(axis=0)
    far = s * s * _SERIES_W >= mu.max()
    out = direct
    if np.any(far):
        sf = s[far]
        w = mu / sf[None, :] ** 2
        out = direct.copy()
        out[far] = (C * _phi_remainder(w)).sum(axis=0) / (3.0 * sf)
    out = out.reshape(u.shape)
    return out if out.ndim else float(out)


def renormalization_log(pv: PauliVillarsSet) -> float:
    """-(1/3) sum_i C_i ln m_i^2, the u-integral of the log-sum integrand."""
    return -pv.log_sum() / 3.0


def log_sum_quadrature(pv: PauliVillarsSet, rel_tol: float = 1e-12) -> QuadratureResult:
    pv.require_regulated()
    bps = tuple(float(m) for m in pv.masses[:-1])
    return integrate_semi_infinite(lambda u: log_sum_integrand(u, pv), float(pv.m2), rel_tol, breakpoints=bps)


def log_sum_antiderivative(u, mass):
    """F with F' = f and F(0) = 0: (2/3)(asinh(u/m) - u/c) + u^3/(9 c^3)."""
    c = math.sqrt(mass * mass + u * u)
    return (2.0 / 3.0) * (math.asinh(u / mass) - u / c) + u**3 / (9.0 * c**3)


def log_sum_orders(pv: PauliVillarsSet, cutoff: float = 1e8) -> tuple[float, float]:
    """The log-sum integral up to ``cutoff`` in both orders of operation.

    Right order: sum over i first, then integrate in u.  Wrong order: each
    term is integrated alone after rescaling u -> m_i u with a common cutoff,
    which makes every term identical so the weighted sum vanishes.
    """
    right = sum(C * log_sum_antiderivative(cutoff, m) for C, m in pv.terms())
    rescaled_term = integrate(lambda v: log_sum_term(v, 1.0), 0.0, cutoff, 1e-12, breakpoints=(1.0, 100.0)).value
    wrong = sum(C * rescaled_term for C in pv.coefficients)
    return float(right), float(wrong)


# --- point-nucleus Uehling potential -------------------------------------------------


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    return r


def uehling_point(r, m_loop: float = 1.0, Z: float = 1.0, rel_tol: float = 1e-12):
    """t-form Uehling potential of a point charge,
    -(Z alpha^2 / 3 pi) K(m r) / r."""
    r = _check_r(r)
    pref = -Z * ALPHA**2 / (3.0 * math.pi)
    flat = r.reshape(-1)
    k = np.array([integrate_t_kernel(x, m_loop, "combined", rel_tol).value for x in flat])
    out = (pref * k / flat).reshape(r.shape)
    return out if out.ndim else float(out)


def uehling_point_fast(r, m_loop: float = 1.0, Z: float = 1.0):
    """Same as :func:`uehling_point` using the vectorized trapezoidal kernel."""
    r = _check_r(r)
    return -Z * ALPHA**2 / (3.0 * math.pi) * t_kernel_batch(m_loop * r) / r


def uehling_u_form(r, m_loop: float = 1.0, Z: float = 1.0, rel_tol: float = 1e-12):
    """u-form Uehling potential, -(Z alpha^2 / pi) int du f(u) exp(-2 c r) / r."""
    r = _check_r(r)
    pref = -Z * ALPHA**2 / math.pi
    out = np.array([_u_form_scalar(x, m_loop, rel_tol) for x in r.reshape(-1)])
    out = (pref * out).reshape(r.shape)
    return out if out.ndim else float(out)


def _u_form_scalar(r, m, rel_tol):
    # exp(-2 c r) = exp(-2 m r) exp(-2 r u^2 / (c + m))
    def f(u):
        c = np.sqrt(m * m + u * u)
        return log_sum_term(u, m) * np.exp(-2.0 * r * u * u / (c + m))

    scale = max(0.5 / r, math.sqrt(m / (2.0 * r)))
    bps = (m,) if m < scale else ()
    res = integrate_semi_infinite(f, scale, rel_tol, breakpoints=bps)
    return res.value * math.exp(-2.0 * m * r) / r


def uehling_log_slope(r_small: float = 1e-6, m_loop: float = 1.0, Z: float = 1.0) -> float:
    """d(r V_U)/d ln r at small r; tends to 2 Z alpha^2 / (3 pi)."""
    r1, r2 = r_small, r_small * math.e
    return (r2 * uehling_point(r2, m_loop, Z) - r1 * uehling_point(r1, m_loop, Z)) / (math.log(r2) - math.log(r1))


# --- finite nuclei -----------------------------------------------------------------


def _outer_points(model: NuclearModel, x: float):
    hi = model.extent()
    pts = [b for b in model.breakpoints() if b < hi]
    if 0 < x < hi:
        pts.append(x)
    return hi, tuple(sorted(set(pts)))


def uehling_finite(model: NuclearModel, r, m_loop: float = 1.0, rel_tol: float = 1e-11):
    """Uehling potential of an extended charge distribution.

    With the solid-angle integral of exp(-2cD)/D done in closed form,

        V(x) = -(Z alpha^2 / (3 m x)) int dr' r' rho(r') [L(m|x-r'|) - L(m(x+r'))],

    where L(p) = int_1^inf dt sqrt(t^2-1)(2/t^3 + 1/t^5) exp(-2 p t).
    At x = 0 the limit -(4 Z alpha^2 / 3) int dr' r' rho K(m r') is used.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    if model.is_point:
        return uehling_point(r, m_loop, model.Z)
    out = np.array([_finite_scalar(model, x, m_loop, rel_tol) for x in r.reshape(-1)]).reshape(r.shape)
    return out if out.ndim else float(out)


def _L(p):
    return t_kernel_batch(p, (3, 5), (2.0, 1.0))


def _finite_scalar(model, x, m, rel_tol):
    za2 = model.Z * ALPHA**2
    if model.Z == 0:
        return 0.0
    hi, pts = _outer_points(model, x)
    if x <= 1e-4 * model.extent():
        def f0(rp):
            return rp * model.density(rp) * t_kernel_batch(m * rp)

        val = integrate(f0, 0.0, hi, rel_tol, breakpoints=pts).value
        return -4.0 * za2 / 3.0 * val

    def f(rp):
        rp = np.asarray(rp, dtype=float)
        return rp * model.density(rp) * (_L(m * np.abs(x - rp)) - _L(m * (x + rp)))

    val = integrate(f, 0.0, hi, rel_tol, breakpoints=pts).value
    return -za2 / (3.0 * m * x) * val


def coulomb_convolution(model: NuclearModel, r):
    """int d^3r' rho(r') / |x - r'| = -V_nuc(x) / (Z alpha)."""
    if model.Z == 0:
        return NuclearModel(model.kind, 1.0, model.radius, model.diffuseness).potential(r) / -ALPHA
    return np.asarray(model.potential(r)) / -(model.Z * ALPHA)


def vp21_potential_finite_mass(model: NuclearModel, r, pv: PauliVillarsSet, rel_tol: float = 1e-12):
    """Finite-auxiliary-mass one-potential vacuum polarization potential.

    For the point nucleus the u-integral of the regulated integrand is
    evaluated directly; extended nuclei use the radial reduction of each
    mass term.
    """
    pv.require_regulated()
    r = _check_r(r)
    if model.Z == 0:
        return np.zeros_like(r) if r.ndim else 0.0
    za2 = model.Z * ALPHA**2
    flat = r.reshape(-1)
    if model.is_point:
        out = np.array([_vp21_point_scalar(x, pv, rel_tol) for x in flat]) * za2 / math.pi / flat
    else:
        log_part = log_sum_quadrature(pv).value * za2 / math.pi * coulomb_convolution(model, flat)
        ue = sum(C * uehling_finite(model, flat, m) for C, m in pv.terms())
        out = log_part + ue
    out = out.reshape(r.shape)
    return out if out.ndim else float(out)


def _vp21_point_scalar(x, pv, rel_tol):
    C, m = pv.coefficients[:, None], pv.masses[:, None]

    def f(u):
        u = np.asarray(u, dtype=float)
        c = np.sqrt(m * m + u[None, :] ** 2)
        return log_sum_integrand(u, pv) - (C * log_sum_term(u[None, :], m) * np.exp(-2.0 * c * x)).sum(axis=0)

    bps = tuple(float(v) for v in pv.masses[:-1]) + (0.5 / x,)
    return integrate_semi_infinite(f, float(pv.m2), rel_tol, breakpoints=bps).value


def vp21_decomposed_point(r, pv: PauliVillarsSet, Z: float = 1.0):
    """-(Z alpha^2 / 3 pi) [S + sum_i C_i K(m_i r)] / r, evaluated term by term in the t-form."""
    r = _check_r(r)
    S = pv.log_sum()
    ue = sum(C * uehling_point(r, m, Z) for C, m in pv.terms())
    return -Z * ALPHA**2 / (3.0 * math.pi) * S / r + ue


@dataclass(frozen=True)
class VpDecomposition:
    """Finite-mass potential split into its charge-renormalization part and the rest.

    The full potential is

        (Z alpha^2 / pi) renorm_log_coefficient * int d^3r rho / |x - r| + uehling_part,

    where ``uehling_part`` sums the Uehling potentials of all three masses
    with their coefficients.
    """

    renorm_log_coefficient: float
    uehling_part: PotentialTable
    coulomb_term: PotentialTable

    def full_potential(self) -> PotentialTable:
        return self.coulomb_term + self.uehling_part


def decompose_vp21(model: NuclearModel, radii, pv: PauliVillarsSet) -> VpDecomposition:
    pv.require_regulated()
    radii = _check_r(radii)
    coeff = renormalization_log(pv)
    za2 = model.Z * ALPHA**2
    coul = za2 / math.pi * coeff * coulomb_convolution(model, radii)
    ue = sum(C * uehling_finite(model, radii, m) for C, m in pv.terms())
    meta = {"model": model.to_dict(), "pv": pv.to_dict()}
    return VpDecomposition(coeff, PotentialTable(radii, ue, metadata=meta), PotentialTable(radii, coul, metadata=meta))


def uehling_table(model: NuclearModel, radii, m_loop: float = 1.0, threads: int = 1) -> PotentialTable:
    from .tables import tabulate

    radii = _check_r(radii)
    if model.is_point:
        fn = lambda x: float(uehling_point(x, m_loop, model.Z))
    else:
        fn = lambda x: float(uehling_finite(model, x, m_loop))
    return tabulate(fn, radii, threads, model=model.to_dict(), m_loop=m_loop)


# --- identities --------------------------------------------------------------------


def potential_difference_kernel_identity(model: NuclearModel, x: float, c: float, rel_tol: float = 1e-11):
    """Both sides of

        int d^3w [V(w) - V(x)] exp(-2c|x-w|)/|x-w| = (pi Z alpha / c^2) int d^3r rho exp(-2c|x-r|)/|x-r|.

    The left side averages V over spheres of radius D about x using the
    potential moment W(s) = int_0^s t V(t) dt.
    """
    if not (x > 0 and c > 0):
        raise ValueError("x and c must be positive")
    za = model.Z * ALPHA

    if model.is_point:
        rhs = math.pi * za / c**2 * math.exp(-2.0 * c * x) / x
    else:
        hi, pts = _outer_points(model, x)

        def rhs_integrand(rp):
            rp = np.asarray(rp, dtype=float)
            return rp * model.density(rp) * (np.exp(-2.0 * c * np.abs(x - rp)) - np.exp(-2.0 * c * (x + rp)))

        val = integrate(rhs_integrand, 0.0, hi, rel_tol, breakpoints=pts).value
        rhs = math.pi**2 * za / (c**3 * x) * val

    def shell_average(D):
        if model.is_point:
            return -za / np.maximum(D, x)
        return (model.potential_moment(x + D) - model.potential_moment(np.abs(x - D))) / (2.0 * x * D)

    def lhs_integrand(D):
        D = np.asarray(D, dtype=float)
        return 4.0 * np.pi * D * np.exp(-2.0 * c * D) * (shell_average(D) - model.potential(x))

    bps = [x]
    if not model.is_point:
        bps += [abs(x - b) for b in model.breakpoints()] + [x + b for b in model.breakpoints()]
    bps = tuple(sorted(b for b in set(bps) if b > 0))
    # the integrand vanishes identically on part of the range, so an
    # absolute floor tied to the size of the result is needed
    lhs = integrate(
        lhs_integrand, 0.0, math.inf, rel_tol, abs_tol=1e-3 * rel_tol * abs(rhs), breakpoints=bps, tail_scale=1.0 / c
    ).value
    return float(lhs), float(rhs)


def angular_kernel(x: float, rp: float, c: float) -> float:
    """int dOmega' exp(-2cD)/D with D = |x - r'| for |x| = x, |r'| = rp."""
    return math.pi / (c * x * rp) * (math.exp(-2.0 * c * abs(x - rp)) - math.exp(-2.0 * c * (x + rp)))


def coulomb_smear_identity(x1, r_src, c: float, rel_tol: float = 1e-12):
    """Both sides of

        int d^3x2 exp(-2c|x2-r|) / (|x2-x1| |x2-r|) = pi (1 - exp(-2 c d)) / (c^2 d),   d = |x1 - r|.

    Points may be given as 3-vectors or as coordinates on a common axis.
    The left side is reduced to a radial integral about r using the shell
    average of 1/|x2 - x1|.
    """
    d = float(np.linalg.norm(np.atleast_1d(np.asarray(x1, dtype=float)) - np.atleast_1d(np.asarray(r_src, dtype=float))))
    if not c > 0:
        raise ValueError("c must be positive")
    if d == 0:
        raise ValueError("the identity needs distinct points x1 and r")

    def f(rho):
        rho = np.asarray(rho, dtype=float)
        return 4.0 * np.pi * rho * np.exp(-2.0 * c * rho) / np.maximum(rho, d)

    lhs = integrate(f, 0.0, math.inf, rel_tol, breakpoints=(d,), tail_scale=0.5 / c).value
    rhs = -math.pi * math.expm1(-2.0 * c * d) / (c * c * d)
    return float(lhs), float(rhs)


# --- large-u falloff near coincident points ------------------------------------------


def _phi2(y):
    """(exp(-y) - 1 + y) / y^2."""
    y = np.asarray(y, dtype=float)
    small = y < 0.1
    ys = np.where(small, y, 0.0)
    series = np.zeros_like(y)
    term = np.full_like(y, 0.5)
    for k in range(2, 20):
        series = series + term
        term = term * (-ys) / (k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (np.expm1(-y) + y) / (y * y)
    return np.where(small, series, direct)


def regulated_exponential(D, u, pv: PauliVillarsSet):
    """sum_i C_i exp(-2 c_i D) with the O(1) and O(m^2) parts removed exactly."""
    D = np.asarray(D, dtype=float)[..., None]
    s = float(abs(u))
    mu = pv.masses**2
    c = np.sqrt(mu + s * s)
    y = 2.0 * D * mu / (c + s)
    rem = y * y * _phi2(y) + mu * mu * D / (s * (c + s) ** 2)
    return np.exp(-2.0 * s * D[..., 0]) * (pv.coefficients * rem).sum(axis=-1)


@dataclass(frozen=True)
class FalloffCheck:
    u: np.ndarray
    density_term: np.ndarray
    potential_term: np.ndarray
    exponent_density: float
    exponent_potential: float
    predicted_density: np.ndarray
    predicted_potential: np.ndarray

    @property
    def prefactor_ratio(self):
        """potential_term / density_term at the largest u."""
        return float(self.potential_term[-1] / self.density_term[-1])


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _shell_potential_excess(model, x, D):
    """<V>(D) - V(x) = 4 pi Z alpha int_0^D <rho>(l) l (1 - l/D) dl."""
    D = np.asarray(D, dtype=float)
    tau = 0.5 * (_GL_X + 1.0)
    wt = 0.5 * _GL_W
    ell = D[..., None] * tau
    avg = model.sphere_average_density(x, ell.reshape(-1)).reshape(ell.shape)
    return 4.0 * np.pi * model.Z * ALPHA * D**2 * (avg * tau * (1.0 - tau) * wt).sum(axis=-1)


def large_u_falloff_check(
    model: NuclearModel,
    x: float,
    pv: PauliVillarsSet,
    u_range: tuple[float, float] | None = None,
    points: int = 8,
    regulated: bool = True,
) -> FalloffCheck:
    """Evaluate the two coincident-point integrands of the subtracted trace.

    density_term(u)   = sum_i C_i int d^3w rho(w) exp(-2 c_i D) / D^2,
    potential_term(u) = sum_i C_i u^2 int d^3w [V(w) - V(x)] exp(-2 c_i D) / D^2,

    with D = |x - w|, and fit their power-law exponents in u.  Regulated,
    both fall as sum C_i m_i^4 / u^5.  With ``regulated=False`` only the
    loop mass is kept and the density term falls as 1/u.
    """
    if model.is_point:
        raise ValueError("the falloff check needs a smooth charge distribution")
    lo, hi = u_range or (10.0 * pv.m2, 100.0 * pv.m2)
    us = np.geomspace(lo, hi, points)

    def kernel(D, u):
        if regulated:
            return regulated_exponential(D, u, pv)
        return np.exp(-2.0 * math.sqrt(pv.m0**2 + u * u) * D)

    dens, pot = [], []
    for u in us:
        scale = 0.5 / u
        f1 = lambda D: 4.0 * np.pi * model.sphere_average_density(x, D) * kernel(D, u)
        f2 = lambda D: 4.0 * np.pi * u * u * _shell_potential_excess(model, x, D) * kernel(D, u)
        dens.append(integrate_semi_infinite(f1, scale, 1e-10).value)
        pot.append(integrate_semi_infinite(f2, scale, 1e-10).value)
    dens, pot = np.array(dens), np.array(pot)
    m4 = float((pv.coefficients * pv.masses**4).sum()) if regulated else float("nan")
    rho = model.density(x)
    fit = lambda v: float(np.polyfit(np.log(us), np.log(np.abs(v)), 1)[0])
    return FalloffCheck(
        us,
        dens,
        pot,
        fit(dens),
        fit(pot),
        0.75 * math.pi * rho * m4 / us**5,
        1.25 * math.pi**2 * model.Z * ALPHA * rho * m4 / us**5,
    )


def prefactor_ratio_prediction(Z: float) -> float:
    """(5 pi^2 Z alpha / 4) / (3 pi / 4) = 5 pi Z alpha / 3."""
    return 5.0 * math.pi * Z * ALPHA / 3.0
