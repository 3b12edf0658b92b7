"""Hydrogenic bound states and vacuum-polarization level shifts.

Radial functions are stored as G = r f1 and F = r f2 for the Dirac spinor

    phi = ( f1(r) chi_kappa^mu ,  i f2(r) chi_{-kappa}^mu ),

normalized so that int_0^inf (G^2 + F^2) dr = 1; ``radial_density`` is
G^2 + F^2.  Nonrelativistic states use G = r R_nl and F = 0.  The Dirac
radial equations in this convention are

    G' = -kappa G / r + (E - V + m) F,
    F' =  kappa F / r - (E - V - m) G.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import eval_genlaguerre, eval_legendre, gammaln, hyp1f1, sph_harm_y

from .constants import ALPHA, MUON_MASS, PROTON_MASS
from .nuclear import NuclearModel
from .quadrature import gauss_legendre_panels, integrate
from .tables import PotentialTable

COVERAGE_TOL = 1e-8


class BoundStateError(ValueError):
    """Invalid quantum numbers or coupling."""


class SolverError(ArithmeticError):
    """The radial shooting did not find the requested level."""


class CoverageError(ValueError):
    """A potential table does not cover the support of a state."""


def species_for_mass(lepton_mass: float) -> str:
    if lepton_mass == 1.0:
        return "electron"
    if math.isclose(lepton_mass, MUON_MASS, rel_tol=1e-9):
        return "muon"
    return "custom"


def reduced_mass(lepton_mass: float, nuclear_mass: float = PROTON_MASS) -> float:
    return lepton_mass * nuclear_mass / (lepton_mass + nuclear_mass)


def orbital_l(kappa: int) -> int:
    return kappa if kappa > 0 else -kappa - 1


def _spectroscopic(n, l, kappa):
    letters = "spdfghik"
    name = f"{n}{letters[l] if l < len(letters) else f'[l={l}]'}"
    if kappa is not None:
        name += f"{2 * abs(kappa) - 1}/2"
    return name


@dataclass(frozen=True)
class BoundState:
    """A normalized bound state.

    ``energy`` is the total energy including the rest mass for relativistic
    states and the binding energy for nonrelativistic ones;
    ``binding_energy`` is the common quantity.  ``origin_density`` is
    |phi(0)|^2 (the nonrelativistic value for Dirac s states with a point
    nucleus, whose density diverges weakly at the origin).
    """

    species: str
    lepton_mass: float
    reduced_mass_flag: bool
    n: int
    l: int
    kappa: int | None
    Zalpha: float
    energy: float
    origin_density: float
    scale: float
    radial_functions: Callable = field(repr=False, compare=False)

    @property
    def relativistic(self) -> bool:
        return self.kappa is not None

    @property
    def binding_energy(self) -> float:
        return self.energy - self.lepton_mass if self.relativistic else self.energy

    @property
    def label(self) -> str:
        return _spectroscopic(self.n, self.l, self.kappa)

    def radial_density(self, r):
        G, F = self.radial_functions(np.asarray(r, dtype=float))
        return G * G + F * F

    def breakpoints(self):
        return [self.scale * f for f in (0.25, 1.0, 4.0, 16.0) if self.scale * f > 0] + [self.scale * self.n * 10.0]

    def expectation(self, fn, rel_tol: float = 1e-11) -> float:
        """int_0^inf radial_density(r) fn(r) dr."""
        g = lambda r: self.radial_density(r) * fn(r)
        pts = self.breakpoints()
        return integrate(g, 0.0, math.inf, rel_tol, breakpoints=pts, tail_scale=2.0 * self.scale * self.n).value

    def norm(self) -> float:
        return self.expectation(lambda r: 1.0)

    def mean_radius(self) -> float:
        return self.expectation(lambda r: r)

    def to_dict(self) -> dict:
        return {
            "species": self.species,
            "state": self.label,
            "n": self.n,
            "l": self.l,
            "kappa": self.kappa,
            "relativistic": self.relativistic,
            "lepton_mass": self.lepton_mass,
            "reduced_mass": self.reduced_mass_flag,
            "Zalpha": self.Zalpha,
            "energy": self.energy,
            "binding_energy": self.binding_energy,
            "mean_radius": self.mean_radius(),
            "origin_density": self.origin_density,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _check_coupling(Zalpha):
    if not 0.0 < Zalpha < 1.0:
        raise BoundStateError(f"Z alpha must lie in (0, 1), got {Zalpha}")


# --- nonrelativistic -----------------------------------------------------------------


def nr_hydrogenic(
    n: int,
    l: int,
    Zalpha: float,
    lepton_mass: float = 1.0,
    reduced_mass_flag: bool = False,
    nuclear_mass: float = PROTON_MASS,
) -> BoundState:
    """Schroedinger-Coulomb state R_nl, with the reduced mass if flagged."""
    if not (isinstance(n, (int, np.integer)) and n >= 1 and 0 <= l < n):
        raise BoundStateError(f"need 0 <= l < n, got n={n}, l={l}")
    _check_coupling(Zalpha)
    mr = reduced_mass(lepton_mass, nuclear_mass) if reduced_mass_flag else lepton_mass
    a = 1.0 / (Zalpha * mr)
    lognorm = 0.5 * (3 * math.log(2.0 / (n * a)) + gammaln(n - l) - math.log(2.0 * n) - gammaln(n + l + 1))
    norm = math.exp(lognorm)

    def radial(r):
        rho = 2.0 * r / (n * a)
        R = norm * np.exp(-rho / 2) * rho**l * eval_genlaguerre(n - l - 1, 2 * l + 1, rho)
        return r * R, np.zeros_like(r)

    origin = (Zalpha * mr) ** 3 / (math.pi * n**3) if l == 0 else 0.0
    return BoundState(
        species_for_mass(lepton_mass),
        lepton_mass,
        reduced_mass_flag,
        n,
        l,
        None,
        Zalpha,
        -(Zalpha**2) * mr / (2.0 * n * n),
        origin,
        a,
        radial,
    )


# --- Dirac, point Coulomb ---------------------------------------------------------------


def _check_dirac(n, kappa, Zalpha):
    if not (isinstance(n, (int, np.integer)) and isinstance(kappa, (int, np.integer))):
        raise BoundStateError("n and kappa must be integers")
    if kappa == 0 or n < 1 or abs(kappa) > n or (abs(kappa) == n and kappa > 0):
        raise BoundStateError(f"invalid Dirac quantum numbers n={n}, kappa={kappa}")
    if Zalpha >= abs(kappa):
        raise BoundStateError(f"Z alpha = {Zalpha} >= |kappa| gives a complex exponent gamma")
    _check_coupling(Zalpha)


def dirac_energy(n: int, kappa: int, Zalpha: float, lepton_mass: float = 1.0) -> float:
    _check_dirac(n, kappa, Zalpha)
    gamma = math.sqrt(kappa * kappa - Zalpha * Zalpha)
    nr = n - abs(kappa)
    return lepton_mass / math.sqrt(1.0 + (Zalpha / (nr + gamma)) ** 2)


def dirac_point(n: int, kappa: int, Zalpha: float, lepton_mass: float = 1.0) -> BoundState:
    """Analytic point-Coulomb Dirac state in terms of confluent hypergeometric functions."""
    _check_dirac(n, kappa, Zalpha)
    m = lepton_mass
    gamma = math.sqrt(kappa * kappa - Zalpha * Zalpha)
    nr = n - abs(kappa)
    N = math.sqrt(nr * nr + 2 * nr * gamma + kappa * kappa)
    E = m * (nr + gamma) / N
    lam = m * Zalpha / N
    cp, cm = math.sqrt(m + E), math.sqrt(m - E)

    def raw(rho):
        a = (N - kappa) * hyp1f1(-nr, 2 * gamma + 1, rho)
        b = nr * hyp1f1(1 - nr, 2 * gamma + 1, rho) if nr > 0 else 0.0
        pre = rho**gamma * np.exp(-rho / 2)
        return cp * pre * (a - b), -cm * pre * (a + b)

    def dens(rho):
        G, F = raw(rho)
        return G * G + F * F

    # int (G^2 + F^2) dr = (1/2 lambda) int d rho
    total = integrate(dens, 0.0, math.inf, 1e-13, breakpoints=[1.0, 2.0 * n], tail_scale=2.0 * n).value
    scale = 1.0 / math.sqrt(total / (2.0 * lam))

    def radial(r):
        G, F = raw(2.0 * lam * np.asarray(r, dtype=float))
        return scale * G, scale * F

    origin = (Zalpha * m) ** 3 / (math.pi * n**3) if kappa == -1 else 0.0
    return BoundState(
        species_for_mass(m), m, False, n, orbital_l(kappa), kappa, Zalpha, E, origin, 1.0 / (Zalpha * m), radial
    )


# --- numerical radial solver -------------------------------------------------------------


@dataclass
class _Shooter:
    V: Callable
    kappa: int
    m: float
    r0: float
    r_match: float
    r_inf: float
    point: bool
    Zalpha: float
    rtol: float = 1e-12

    def rhs(self, t, y, E):
        r = math.exp(t)
        v = float(self.V(r))
        G, F = y
        k = self.kappa
        return [-k * G + r * (E - v + self.m) * F, k * F - r * (E - v - self.m) * G]

    def start_out(self, E):
        k = self.kappa
        if self.point:
            gamma = math.sqrt(k * k - self.Zalpha**2)
            return [1.0, (gamma + k) / self.Zalpha]
        r = self.r0
        v0 = float(self.V(r))
        if k < 0:
            return [1.0, -(E - v0 - self.m) * r / (2 * abs(k) + 1)]
        return [(E - v0 + self.m) * r / (2 * k + 1), 1.0]

    def start_in(self, E):
        return [1.0, -math.sqrt((self.m - E) / (self.m + E))]

    def solve(self, E, dense=False):
        kw = dict(method="DOP853", rtol=self.rtol, atol=1e-300, args=(E,), dense_output=dense)
        out = solve_ivp(self.rhs, (math.log(self.r0), math.log(self.r_match)), self.start_out(E), **kw)
        inn = solve_ivp(self.rhs, (math.log(self.r_inf), math.log(self.r_match)), self.start_in(E), **kw)
        if not (out.success and inn.success):
            raise SolverError(f"radial integration failed at E={E}: {out.message}; {inn.message}")
        return out, inn

    def mismatch(self, E):
        out, inn = self.solve(E)
        go, fo = out.y[:, -1]
        gi, fi = inn.y[:, -1]
        return (go * fi - fo * gi) / (math.hypot(go, fo) * math.hypot(gi, fi))


def radial_solve(
    model: NuclearModel,
    n: int,
    kappa: int,
    lepton_mass: float = 1.0,
    rel_tol: float = 1e-10,
) -> BoundState:
    """Shooting solution of the radial Dirac equations in the potential of ``model``.

    Outward and inward solutions are integrated in ln r and matched near the
    outer lobe; the energy is the root of their normalized Wronskian,
    bracketed between neighbouring point-Coulomb levels of the same kappa
    (an extended charge only weakens the potential, so levels move up).
    """
    Zalpha = model.Z * ALPHA
    _check_dirac(n, kappa, Zalpha)
    m = lepton_mass
    E_pt = dirac_energy(n, kappa, Zalpha, m)
    N = math.sqrt(max((n - abs(kappa)) ** 2 + 2 * (n - abs(kappa)) * math.sqrt(kappa**2 - Zalpha**2) + kappa**2, 1.0))
    lam = m * Zalpha / N
    a = 1.0 / (Zalpha * m)
    r0 = 1e-7 * a if model.is_point else 1e-4 * min(model.radius, a)
    r_inf = (40.0 + 4.0 * n) / lam
    sh = _Shooter(model.potential, kappa, m, r0, n / lam, r_inf, model.is_point, Zalpha)

    up = dirac_energy(n + 1, kappa, Zalpha, m)
    lo = E_pt - 1e-3 * (up - E_pt)
    hi = E_pt + 0.5 * (up - E_pt)
    f_lo, f_hi = sh.mismatch(lo), sh.mismatch(hi)
    if f_lo * f_hi > 0:
        grid = np.linspace(lo, hi, 41)
        vals = [sh.mismatch(e) for e in grid]
        change = [i for i in range(40) if vals[i] * vals[i + 1] <= 0]
        if not change:
            raise SolverError(
                f"no {_spectroscopic(n, orbital_l(kappa), kappa)} level in [{lo!r}, {hi!r}]; "
                f"mismatch ranges over [{min(vals):.3e}, {max(vals):.3e}]"
            )
        lo, hi = grid[change[0]], grid[change[0] + 1]
    E = brentq(sh.mismatch, lo, hi, xtol=1e-15 * m, rtol=4 * np.finfo(float).eps, maxiter=200)

    out, inn = sh.solve(E, dense=True)
    go, fo = out.y[:, -1]
    gi, fi = inn.y[:, -1]
    ratio = (go * gi + fo * fi) / (gi * gi + fi * fi)
    t0, tm, ti = math.log(r0), math.log(sh.r_match), math.log(r_inf)
    y0 = out.y[:, 0]
    yi = inn.y[:, 0] * ratio
    if model.is_point:
        p_small = (math.sqrt(kappa * kappa - Zalpha**2),) * 2
    else:
        p_small = (abs(kappa), abs(kappa) + 1) if kappa < 0 else (kappa + 1, kappa)

    def raw(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        t = np.log(np.where(r > 0, r, r0))
        G = np.empty_like(r)
        F = np.empty_like(r)
        below, mid, far = t < t0, (t >= t0) & (t <= tm), t > ti
        outer = (t > tm) & ~far
        if mid.any():
            G[mid], F[mid] = out.sol(t[mid])
        if outer.any():
            G[outer], F[outer] = ratio * inn.sol(t[outer])
        if below.any():
            x = r[below] / r0
            G[below] = y0[0] * x ** p_small[0]
            F[below] = y0[1] * x ** p_small[1]
        if far.any():
            decay = np.exp(-lam * (r[far] - r_inf))
            G[far], F[far] = yi[0] * decay, yi[1] * decay
        return G, F

    pts = sorted({r0, sh.r_match, *[p for p in model.breakpoints() if p > r0], a, 4 * a})
    dens = lambda r: sum(c * c for c in raw(r))
    total = integrate(dens, 0.0, math.inf, 1e-13, breakpoints=pts, tail_scale=r_inf).value
    s = 1.0 / math.sqrt(total)

    def radial(r):
        r = np.asarray(r, dtype=float)
        G, F = raw(r)
        G, F = s * G, s * F
        return (G, F) if r.ndim else (float(G[0]), float(F[0]))

    origin = (Zalpha * m) ** 3 / (math.pi * n**3) if kappa == -1 else 0.0
    return BoundState(species_for_mass(m), m, False, n, orbital_l(kappa), kappa, Zalpha, E, origin, a, radial)


# --- expectation values --------------------------------------------------------------------


def level_shift(state: BoundState, potential, rel_tol: float = 1e-11) -> float:
    """First-order shift int_0^inf radial_density(r) V(r) dr.

    For a :class:`PotentialTable` the covered range is integrated with
    Gauss-Legendre panels between the knots, outside it the table's own
    extrapolation (power law below, exponential above) is used.  The density
    mass outside the table must stay below ``COVERAGE_TOL``.
    """
    if not isinstance(potential, PotentialTable):
        return state.expectation(potential, rel_tol)
    lo, hi = potential.r_min, potential.r_max
    outside = integrate(state.radial_density, 0.0, lo, 1e-8).value
    outside += integrate(state.radial_density, hi, math.inf, 1e-8, tail_scale=state.scale).value
    if outside > COVERAGE_TOL:
        raise CoverageError(
            f"density mass {outside:.3e} outside the table range [{lo:.3e}, {hi:.3e}] exceeds {COVERAGE_TOL:g}"
        )
    def g(r):
        dens = state.radial_density(r)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(dens == 0.0, 0.0, dens * potential(r))

    inside = gauss_legendre_panels(g, potential.radii, order=8)
    below = integrate(g, 0.0, lo, rel_tol).value
    above = integrate(g, hi, math.inf, rel_tol, tail_scale=state.scale).value
    return inside + below + above


def delta_approx_shift(state: BoundState, C: float = 1.0, mass: float = 1.0) -> float:
    """Heavy-loop estimate -(4 Z alpha^2 / 15) |phi(0)|^2 C / m^2."""
    return -4.0 * ALPHA * state.Zalpha / 15.0 * state.origin_density * C / (mass * mass)


# --- spin-angular functions ------------------------------------------------------------------


def _Y(l, m, theta, phi):
    if abs(m) > l:
        return np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    return sph_harm_y(l, m, theta, phi)


def spin_angle(kappa: int, mu: float, theta, phi) -> np.ndarray:
    """chi_kappa^mu as a (2, ...) array, Condon-Shortley phases.

    With this construction sigma.x chi_kappa = -chi_{-kappa}.
    """
    l = orbital_l(kappa)
    if abs(mu) > abs(kappa) - 0.5:
        raise BoundStateError(f"|mu| must not exceed j for kappa={kappa}")
    d = 2 * l + 1
    if kappa < 0:
        up, dn = math.sqrt((l + mu + 0.5) / d), math.sqrt((l - mu + 0.5) / d)
    else:
        up, dn = -math.sqrt((l - mu + 0.5) / d), math.sqrt((l + mu + 0.5) / d)
    mlo = int(round(mu - 0.5))
    return np.array([up * _Y(l, mlo, theta, phi), dn * _Y(l, mlo + 1, theta, phi)])


def _mu_values(kappa):
    j = abs(kappa) - 0.5
    return np.arange(-j, j + 1.0)


_SIGMA = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def sigma_dot(v) -> np.ndarray:
    return np.einsum("i,ijk->jk", np.asarray(v, dtype=float), _SIGMA)


def _legendre_derivative(l, x):
    c = np.zeros(l + 1)
    c[l] = 1.0
    return np.polynomial.legendre.legval(x, np.polynomial.legendre.legder(c))


def _kappa_pm(kappa):
    return int(abs(kappa + 0.5) - 0.5), int(abs(kappa - 0.5) - 0.5)


def multiplet_sum_closed(kappa: int, x1, x2) -> np.ndarray:
    """sum_mu chi_kappa(x2) chi_kappa(x1)^dagger from Legendre functions."""
    x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
    xi = float(x1 @ x2)
    kp, _ = _kappa_pm(kappa)
    cross = sigma_dot(np.cross(x2, x1))
    return abs(kappa) / (4 * math.pi) * (eval_legendre(kp, xi) * np.eye(2) + 1j / kappa * cross * _legendre_derivative(kp, xi))


def mixed_multiplet_sum_closed(kappa: int, x1, x2) -> np.ndarray:
    """sum_mu chi_kappa(x1) chi_{-kappa}(x2)^dagger from Legendre functions."""
    x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
    xi = float(x1 @ x2)
    kp, km = _kappa_pm(kappa)
    return (
        math.copysign(1.0, kappa)
        / (4 * math.pi)
        * (sigma_dot(x2) * _legendre_derivative(km, xi) - sigma_dot(x1) * _legendre_derivative(kp, xi))
    )


def _angles(v):
    v = np.asarray(v, float)
    return math.acos(max(-1.0, min(1.0, v[2] / np.linalg.norm(v)))), math.atan2(v[1], v[0])


def multiplet_sum_explicit(kappa: int, x1, x2, kappa2: int | None = None) -> np.ndarray:
    """sum_mu chi_kappa(x1) chi_kappa2(x2)^dagger from spherical harmonics."""
    kappa2 = kappa if kappa2 is None else kappa2
    a1, a2 = _angles(x1), _angles(x2)
    return sum(np.outer(spin_angle(kappa, mu, *a1), spin_angle(kappa2, mu, *a2).conj()) for mu in _mu_values(kappa))


@dataclass(frozen=True)
class VectorTermCheck:
    """Multiplet-summed phi^dagger alpha.x phi over sample points.

    ``explicit`` is the largest magnitude from spherical-harmonic spinors and
    ``closed`` from the Legendre multiplet sums, both divided by the largest
    multiplet-summed density at the same points.
    """

    explicit: float
    closed: float
    radii: np.ndarray

    @property
    def max_residual(self) -> float:
        return max(self.explicit, self.closed)


def _vector_term_matrix(G, F, r, M):
    # phi^dag alpha.x phi summed over mu for phi = (G/r chi_k, i F/r chi_-k),
    # with M = sum_mu sigma.x chi_-k chi_k^dag at the same point
    t = np.trace(M)
    return (G * F / (r * r)) * (1j * t - 1j * t.conj())


def vector_term_projection(state: BoundState, radii=None, directions: int = 5, seed: int = 7) -> VectorTermCheck:
    """Check that phi^dagger (alpha . x) phi vanishes after the mu sum.

    Returns the residuals relative to the summed density; a nonrelativistic
    state (F = 0) gives exactly zero.
    """
    if radii is None:
        radii = np.geomspace(0.05, 8.0, 20) * state.scale * state.n
    radii = np.asarray(radii, dtype=float)
    if not state.relativistic:
        return VectorTermCheck(0.0, 0.0, radii)
    kappa = state.kappa
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(directions, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    G, F = state.radial_functions(radii)
    worst_e = worst_c = 0.0
    dens_max = 0.0
    for x in dirs:
        sx = sigma_dot(x)
        same = multiplet_sum_explicit(kappa, x, x)
        cross_e = multiplet_sum_explicit(-kappa, x, x, kappa)  # chi_-k chi_k^dag
        cross_c = mixed_multiplet_sum_closed(kappa, x, x).conj().T
        rho_ang = np.trace(same).real
        for Gi, Fi, ri in zip(G, F, radii):
            dens_max = max(dens_max, (Gi * Gi + Fi * Fi) / (ri * ri) * rho_ang)
            worst_e = max(worst_e, abs(_vector_term_matrix(Gi, Fi, ri, sx @ cross_e)))
            worst_c = max(worst_c, abs(_vector_term_matrix(Gi, Fi, ri, sx @ cross_c)))
    return VectorTermCheck(worst_e / dens_max, worst_c / dens_max, radii)


def coincident_angular_factor(kappa: int, sign: int = 1) -> float:
    """[x2 P'_{k_s}(xi) - x1 P'_{k_-s}(xi)] at x1 = x2, along x2: +-kappa."""
    kp, km = _kappa_pm(kappa)
    a, b = (kp, km) if sign > 0 else (km, kp)
    return float(_legendre_derivative(a, 1.0) - _legendre_derivative(b, 1.0))


# --- solid-angle identity -------------------------------------------------------------------------


def solid_angle_integral(x1, r2: float, order: int = 96) -> np.ndarray:
    """int dOmega_2 x2_hat / |x2 - x1| by Gauss-Legendre in cos(theta) times
    the trapezoidal rule in phi."""
    x1 = np.asarray(x1, dtype=float)
    c, wc = np.polynomial.legendre.leggauss(order)
    nphi = 2 * order
    ph = 2 * math.pi * np.arange(nphi) / nphi
    s = np.sqrt(1 - c * c)
    xh = np.stack([s[:, None] * np.cos(ph), s[:, None] * np.sin(ph), np.broadcast_to(c[:, None], (order, nphi))])
    d = np.linalg.norm(r2 * xh - x1[:, None, None], axis=0)
    w = wc[:, None] * (2 * math.pi / nphi)
    return np.array([(w * xh[i] / d).sum() for i in range(3)])


def solid_angle_closed(x1, r2: float) -> np.ndarray:
    """(4 pi / 3) x1_hat r_<, / r_>^2."""
    x1 = np.asarray(x1, dtype=float)
    r1 = float(np.linalg.norm(x1))
    small, big = min(r1, r2), max(r1, r2)
    return 4 * math.pi / 3 * (x1 / r1) * small / (big * big)


__all__ = [
    "BoundState",
    "BoundStateError",
    "CoverageError",
    "SolverError",
    "VectorTermCheck",
    "coincident_angular_factor",
    "delta_approx_shift",
    "dirac_energy",
    "dirac_point",
    "level_shift",
    "mixed_multiplet_sum_closed",
    "multiplet_sum_closed",
    "multiplet_sum_explicit",
    "nr_hydrogenic",
    "radial_solve",
    "reduced_mass",
    "sigma_dot",
    "solid_angle_closed",
    "solid_angle_integral",
    "spin_angle",
    "vector_term_projection",
]
