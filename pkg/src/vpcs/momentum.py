"""Momentum-space evaluation of the one-potential vacuum polarization
for a point nucleus.

The regulated loop integral is reduced with a Feynman parameter y; the
substitution y(1 - y) = 1/(4 t^2) links it to the t-representation used in
coordinate space.  Here the potential and the induced density are evaluated
in the y variable itself, which gives an evaluation path independent of the
t-kernel quadrature in :mod:`vpcs.uehling`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .constants import ALPHA
from .pauli_villars import PauliVillarsSet, make_pv_set
from .quadrature import exponential_t_integral, integrate, integrate_semi_infinite
from .uehling import log_sum_orders, log_sum_quadrature

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


# --- Feynman parameter integrals ------------------------------------------------------


def feynman_y_integral(r2: float, k2: float, mass: float, method: str = "direct", rel_tol: float = 1e-13) -> float:
    """int_0^1 dy y(1-y) / [r^2 + k^2 y(1-y) + m^2]^2.

    ``direct`` integrates over y (as twice the half interval, the integrand
    being symmetric about y = 1/2); ``t`` uses the integrated-by-parts
    t-representation

        1/(6 (r^2+m^2)^2) - int_1^inf dt sqrt(t^2-1)/12 (2/t^4 + 1/t^6) k^2 / (r^2 + k^2/(4t^2) + m^2)^3.
    """
    if r2 < 0 or k2 < 0:
        raise ValueError("r2 and k2 must be non-negative")
    if not mass > 0:
        raise ValueError("mass must be positive")
    a = r2 + mass * mass
    if method == "direct":
        f = lambda y: 2.0 * y * (1.0 - y) / (a + k2 * y * (1.0 - y)) ** 2
        return integrate(f, 0.0, 0.5, rel_tol).value
    if method == "t":
        if k2 == 0:
            return 1.0 / (6.0 * a * a)
        g = lambda t: np.sqrt(t * t - 1.0) / 12.0 * (2.0 / t**4 + 1.0 / t**6) * k2 / (a + k2 / (4.0 * t * t)) ** 3
        return 1.0 / (6.0 * a * a) - integrate(g, 1.0, math.inf, rel_tol, tail_scale=1.0).value
    raise ValueError(f"unknown method {method!r}")


def _t_side(k2: float, pv: PauliVillarsSet, rel_tol: float) -> float:
    """(1/3) int_1^inf dt sqrt(t^2-1)(2 + 1/t^2) sum_i C_i m_i^2 / (k^2 + 4 t^2 m_i^2)."""
    if k2 == 0:
        return 0.0
    C, mu = pv.coefficients[:, None], (pv.masses**2)[:, None]

    def f(t):
        t = np.asarray(t, dtype=float)
        # sum C m^2/(k^2 + a) = -(k^2/4t^2) sum C/(k^2 + a) with a = 4t^2 m^2, by
        # sum C = 0; for k^2 > a the second sum rule also removes the 1/k^4 term
        a = 4.0 * t * t * mu
        inv = (C / (k2 + a)).sum(axis=0)
        far = (k2 > a.max(axis=0)).reshape(inv.shape)
        if np.any(far):
            inv = np.where(far, (C * a * a / (k2 * k2 * (k2 + a))).sum(axis=0), inv)
        s = -(k2 / (4.0 * t * t)) * inv
        return np.sqrt(t * t - 1.0) * (2.0 + 1.0 / (t * t)) * s

    # the i-th term turns over near t = k / (2 m_i)
    knees = sorted({2.0, *(math.sqrt(k2) / (2.0 * m) for m in pv.masses)})
    scale = max(knees)
    return integrate(f, 1.0, math.inf, rel_tol, breakpoints=knees, tail_scale=scale).value / 3.0


def _regulated_inverse_square(s, A, C):
    """sum_i C_i / (s + A_i)^2, switching to the form with the O(1/s^2) and
    O(1/s^3) terms cancelled by the sum rules when s exceeds every A_i."""
    direct = (C / (s + A) ** 2).sum(axis=0)
    far = (s > A.max(axis=0)).reshape(direct.shape)
    if np.any(far):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            stable = (C * A * A * (3.0 * s + 2.0 * A) / (s**3 * (s + A) ** 2)).sum(axis=0)
        direct = np.where(far, stable, direct)
    return direct


def _direct_ry(k2: float, pv: PauliVillarsSet, rel_tol: float) -> float:
    """int_0^inf dr r^3 sum_i C_i int_0^1 dy y(1-y)/[r^2 + k^2 y(1-y) + m_i^2]^2
    by nested adaptive quadrature in y (outer) and s = r^2 (inner)."""
    C = pv.coefficients[:, None]
    mu = pv.masses**2

    def inner(y):
        q = y * (1.0 - y)
        A = (k2 * q + mu)[:, None]

        def f(s):
            s = np.asarray(s, dtype=float)
            return 0.5 * s * _regulated_inverse_square(s[None, :], A, C)

        bps = tuple(float(a) for a in A[:, 0])
        return 2.0 * q * integrate(f, 0.0, math.inf, rel_tol, breakpoints=bps, tail_scale=float(A.max())).value

    # the y-dependence turns over where k^2 y ~ m_i^2
    knees = tuple(float(m) / k2 for m in mu if 0 < m / k2 < 0.5) if k2 > 0 else ()
    outer = lambda ys: np.array([inner(y) for y in np.atleast_1d(ys)])
    return integrate(outer, 0.0, 0.5, 1e-10, breakpoints=knees).value


def regulated_ry_integral(k2: float, pv: PauliVillarsSet, method: str = "closed", rel_tol: float = 1e-12) -> float:
    """The regulated (r, y) integral of the gauge-invariant term.

    ``closed``: -(1/12) sum C ln m^2 + (1/3) int dt sqrt(t^2-1)(2+1/t^2) sum C m^2/(k^2 + 4t^2 m^2).
    ``direct``: nested quadrature of the regulated integrand.
    """
    pv.require_regulated()
    if k2 < 0:
        raise ValueError("k2 must be non-negative")
    if method == "closed":
        return -pv.log_sum() / 12.0 + _t_side(k2, pv, rel_tol)
    if method == "direct":
        return _direct_ry(k2, pv, rel_tol)
    raise ValueError(f"unknown method {method!r}")


def log_coefficient(k2: float, pv: PauliVillarsSet) -> float:
    """Direct (r, y) integral minus its k-dependent t-part; independent of k^2
    and equal to -(1/12) sum C ln m^2."""
    return regulated_ry_integral(k2, pv, "direct") - _t_side(k2, pv, 1e-12)


# --- the non-gauge-invariant total-derivative term ----------------------------------


def sumid_sides(R2, masses) -> tuple[Fraction, Fraction]:
    """Both sides of

        sum_i C_i/(R^2 + m_i^2) = (C_0 m_1^2 m_2^2 + C_1 m_0^2 m_2^2 + C_2 m_0^2 m_1^2) / prod_i (R^2 + m_i^2)

    in exact rational arithmetic."""
    R2 = Fraction(R2)
    mu = [Fraction(m) ** 2 for m in masses]
    C = _exact_coefficients(mu)
    lhs = sum(c / (R2 + u) for c, u in zip(C, mu))
    num = C[0] * mu[1] * mu[2] + C[1] * mu[0] * mu[2] + C[2] * mu[0] * mu[1]
    rhs = num / ((R2 + mu[0]) * (R2 + mu[1]) * (R2 + mu[2]))
    return lhs, rhs


def _exact_coefficients(mu):
    d = mu[2] - mu[1]
    return [Fraction(1), (mu[0] - mu[2]) / d, (mu[1] - mu[0]) / d]


def sumid_numerator_coefficients(masses) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of R^4, R^2 and R^0 in sum_i C_i prod_{j != i}(R^2 + m_j^2)."""
    mu = [Fraction(m) ** 2 for m in masses]
    C = _exact_coefficients(mu)
    r4 = sum(C)
    r2 = sum(C[i] * sum(mu[j] for j in range(3) if j != i) for i in range(3))
    r0 = C[0] * mu[1] * mu[2] + C[1] * mu[0] * mu[2] + C[2] * mu[0] * mu[1]
    return r4, r2, r0


def random_sumid_trials(count: int = 100, seed: int = 12345) -> int:
    """Number of random rational mass triples (out of ``count``) for which the
    identity holds exactly."""
    rng = random.Random(seed)
    ok = 0
    for _ in range(count):
        m = sorted({Fraction(rng.randint(1, 400), rng.randint(1, 20)) for _ in range(3)})
        while len(m) < 3:
            m = sorted(set(m) | {m[-1] + 1})
        R2 = Fraction(rng.randint(0, 500), rng.randint(1, 50))
        lhs, rhs = sumid_sides(R2, m)
        ok += lhs == rhs
    return ok


@dataclass(frozen=True)
class GaugeTermCheck:
    """Residual of int_0^inf dr d/dr [r^4 int dy sum_i C_i / (r^2 + k^2 y(1-y) + m_i^2)].

    ``residual`` is the quadrature of the derivative, ``scale`` the integral
    of its absolute value, and ``boundary`` the bracket at a large radius.
    ``single_auxiliary_boundary`` records the non-vanishing limit that a
    single auxiliary mass (C_1 = -1) gives for the same bracket.
    """

    residual: float
    scale: float
    boundary: float
    single_auxiliary_boundary: float
    sumid_exact: bool

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.scale if self.scale else abs(self.residual)


def _gauge_bracket_parts(s, A, C):
    """sum C/(s+A) and sum C/(s+A)^2 with large-s cancellations removed."""
    first = (C / (s + A)).sum(axis=0)
    second = _regulated_inverse_square(s, A, C)
    far = (s > A.max(axis=0)).reshape(first.shape)
    if np.any(far):
        with np.errstate(divide="ignore", invalid="ignore"):
            stable = (C * A * A / (s * s * (s + A))).sum(axis=0)
        first = np.where(far, stable, first)
    return first, second


def gauge_term_vanishing(k2: float, pv: PauliVillarsSet, r_large: float = 1e6) -> GaugeTermCheck:
    pv.require_regulated()
    C = pv.coefficients[:, None]
    mu = pv.masses**2
    ys = 0.25 * (_GL_X + 1.0)
    wy = 0.25 * _GL_W
    residual = scale = boundary = 0.0
    for y, w in zip(ys, wy):
        A = (k2 * y * (1.0 - y) + mu)[:, None]

        def deriv(r):
            r = np.asarray(r, dtype=float)
            s = (r * r)[None, :]
            g1, g2 = _gauge_bracket_parts(s, A, C)
            return 4.0 * r**3 * g1 - 2.0 * r**5 * g2

        bps = tuple(float(math.sqrt(a)) for a in A[:, 0])
        tail = math.sqrt(float(A.max()))
        residual += 2.0 * w * integrate(deriv, 0.0, math.inf, 1e-12, breakpoints=bps, tail_scale=tail,
                                        abs_tol=1e-14 * float(np.abs(C[:, 0] * A[:, 0]).sum())).value
        pos = integrate(lambda r: np.maximum(deriv(r), 0.0), 0.0, math.inf, 1e-6, breakpoints=bps, tail_scale=tail).value
        neg = integrate(lambda r: np.maximum(-deriv(r), 0.0), 0.0, math.inf, 1e-6, breakpoints=bps, tail_scale=tail).value
        scale += 2.0 * w * (pos + neg)
        g1, _ = _gauge_bracket_parts(np.array([[r_large**2]]), A, C)
        boundary += 2.0 * w * r_large**4 * float(g1[0])
    # with one auxiliary mass, r^4 (1/(s+A_0) - 1/(s+A_1)) -> A_1 - A_0 = m_1^2 - m_0^2
    single = pv.m1**2 - pv.m0**2
    lhs, rhs = sumid_sides(1, [Fraction(m).limit_denominator(10**12) for m in pv.masses])
    return GaugeTermCheck(float(residual), float(scale), float(boundary), float(single), lhs == rhs)


# --- induced density and potential ----------------------------------------------------


def y_kernel(p: float, extra_power: int = 0, rel_tol: float = 1e-13) -> float:
    """int_1^inf dt sqrt(t^2-1)(2/t^2 + 1/t^4) t^extra exp(-2 p t) rewritten in y.

    With q = y(1-y) and t = 1/(2 sqrt q),

        int_0^(1/2) dy (1-2y)^2 (1 + 2q) / q * (4q)^(-extra/2) exp(-p / sqrt q).

    The factor exp(-2p) is split off analytically for large p.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if p > 400.0:
        # exp(-2p) underflows the result in double precision
        return 0.0

    def f(y):
        y = np.asarray(y, dtype=float)
        q = y * (1.0 - y)
        sq = np.sqrt(q)
        # p/sqrt(q) - 2p = p (1-2y)^2 / (sqrt q (1 + 2 sqrt q))
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            expo = p * (1.0 - 2.0 * y) ** 2 / (sq * (1.0 + 2.0 * sq))
            # the 1/q powers are folded into the exponent so that tiny q gives 0, not inf * 0
            log_pref = -np.log(q) - 0.5 * extra_power * np.log(4.0 * q)
            val = (1.0 - 2.0 * y) ** 2 * (1.0 + 2.0 * q) * np.exp(log_pref - expo)
        return np.where(q > 0, val, 0.0)

    pts = {0.5 - min(0.25, 3.0 / math.sqrt(p))}
    y = min(p * p, 0.25)
    while y < 0.25:
        pts.add(y)
        y *= 10.0
    pts = tuple(sorted(b for b in pts if 0 < b < 0.5))
    res = integrate(f, 0.0, 0.5, rel_tol, breakpoints=pts)
    return res.value * math.exp(-2.0 * p)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    return r


def ms_potential(r, pv: PauliVillarsSet | None = None, renormalized: bool = True, Z: float = 1.0, m_loop: float = 1.0):
    """Momentum-space one-potential vacuum polarization potential of a point charge.

    The renormalized potential drops the charge-renormalization log and the
    auxiliary-mass terms; otherwise

        V = -(Z alpha^2 / 3 pi) [S / r + sum_i C_i K(m_i r) / r].
    """
    r = _check_r(r)
    flat = r.reshape(-1)
    pref = -Z * ALPHA**2 / (3.0 * math.pi)
    if renormalized:
        out = np.array([y_kernel(m_loop * x) for x in flat]) * pref / flat
    else:
        if pv is None:
            raise ValueError("the unrenormalized potential needs a Pauli-Villars set")
        pv.require_regulated()
        k = sum(C * np.array([y_kernel(m * x) for x in flat]) for C, m in pv.terms())
        out = pref * (pv.log_sum() + k) / flat
    out = out.reshape(r.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TraceDensity:
    """Equal-coordinate trace for a point nucleus: delta_coefficient * delta(x) + smooth(x).

    The double integral over t and x of the smooth term is not absolutely
    convergent, so its total charge depends on the order.  In momentum space
    (t first at fixed k, then k -> 0) it vanishes and the whole log sits in
    the delta term.  Integrating the pointwise function smooth(x) over space
    instead gives the full (Z alpha / 3 pi) sum C ln m^2; that ordering
    corresponds to the coordinate-space bookkeeping, which has no delta term.
    """

    delta_coefficient: float
    smooth: Callable[[float], float]
    pv: PauliVillarsSet
    Z: float = 1.0

    def integrated_smooth_momentum(self, k2: float = 1e-10) -> float:
        """Charge of the smooth term as the k -> 0 value of its transform,
        -(4 Z alpha / pi) (1/3) int dt sqrt(t^2-1)(2 + 1/t^2) sum C m^2/(k^2 + 4t^2 m^2)."""
        return -4.0 * self.Z * ALPHA / math.pi * _t_side(k2, self.pv, 1e-12)

    def integrated_smooth_position(self) -> float:
        """4 pi int_0^inf r^2 smooth(r) dr by quadrature in r."""
        f = lambda r: 4.0 * np.pi * r * r * np.array([self.smooth(x) for x in np.atleast_1d(r)])
        lo = 1e-8 / self.pv.m2
        bps = tuple(sorted({0.1 / self.pv.m2, 1.0 / self.pv.m2, 0.1 / self.pv.m0, 1.0 / self.pv.m0}))
        return integrate(f, lo, 400.0 / self.pv.m0, 1e-11, breakpoints=bps, abs_tol=1e-15).value

    def total_charge(self) -> float:
        """Delta plus smooth in the momentum-space bookkeeping."""
        return self.delta_coefficient + self.integrated_smooth_momentum()


def ms_trace_density(x2: float, pv: PauliVillarsSet, Z: float = 1.0) -> float:
    """Smooth part, -(Z alpha / 3 pi^2) int dt sqrt(t^2-1)(2 + 1/t^2) sum_i C_i m_i^2 exp(-2 t m_i x) / x."""
    if not x2 > 0:
        raise ValueError("the delta term at x = 0 is symbolic; x2 must be positive")
    pv.require_regulated()
    s = sum(C * m * m * y_kernel(m * x2, 2) for C, m in pv.terms())
    return -Z * ALPHA / (3.0 * math.pi**2) * s / x2


def trace_density(pv: PauliVillarsSet, Z: float = 1.0) -> TraceDensity:
    pv.require_regulated()
    return TraceDensity(Z * ALPHA / (3.0 * math.pi) * pv.log_sum(), lambda x: ms_trace_density(x, pv, Z), pv, Z)


def coordinate_trace_density(x2: float, pv: PauliVillarsSet, Z: float = 1.0) -> float:
    """Point-charge trace from coordinate space,
    (Z alpha / pi^2) int du sum_i C_i (-u^2/c_i + u^4/(3 c_i^3)) exp(-2 c_i x) / x,
    with each mass integrated on its own (separately finite for x > 0)."""
    if not x2 > 0:
        raise ValueError("x2 must be positive")
    total = 0.0
    for C, m in pv.terms():
        def f(u):
            u = np.asarray(u, dtype=float)
            c = np.sqrt(m * m + u * u)
            # exp(-2 c x) = exp(-2 m x) exp(-2 x u^2 / (c + m))
            return (-u * u / c + u**4 / (3.0 * c**3)) * np.exp(-2.0 * x2 * u * u / (c + m))

        scale = max(0.5 / x2, math.sqrt(m / (2.0 * x2)))
        total += C * integrate_semi_infinite(f, scale, 1e-13, breakpoints=(m,) if m < scale else ()).value * math.exp(
            -2.0 * m * x2
        )
    return Z * ALPHA / math.pi**2 * total / x2


@dataclass(frozen=True)
class LogCoefficientRoutes:
    """Integrated trace by the momentum-space and coordinate-space bookkeeping.

    ``smooth_position`` is the spatial integral of the smooth function alone;
    it carries the whole log in position space, as the coordinate route does.
    """

    momentum_delta: float
    momentum_smooth: float
    coordinate: float
    smooth_position: float | None = None

    @property
    def momentum(self) -> float:
        return self.momentum_delta + self.momentum_smooth

    @property
    def discrepancy(self) -> float:
        return abs(self.momentum - self.coordinate)


def log_coefficient_routes(pv: PauliVillarsSet, Z: float = 1.0, with_position: bool = False) -> LogCoefficientRoutes:
    """In momentum space the whole log sits in the delta term and the smooth
    part integrates to zero; in coordinate space it comes from the u-integral
    of the regulated sum."""
    td = trace_density(pv, Z)
    coord = -Z * ALPHA / math.pi * log_sum_quadrature(pv).value
    pos = td.integrated_smooth_position() if with_position else None
    return LogCoefficientRoutes(td.delta_coefficient, td.integrated_smooth_momentum(), coord, pos)


# --- the order-of-operations pitfall ----------------------------------------------------


@dataclass(frozen=True)
class PitfallRecord:
    right: float
    wrong: float

    @property
    def difference(self) -> float:
        return abs(self.right - self.wrong)


def variable_change_pitfall(pv: PauliVillarsSet | None = None, Zalpha: float = 1.0) -> PitfallRecord:
    """Integrated trace (Z alpha / pi) int du sum_i C_i (-u^2/c_i^3 + u^4/(3c_i^5)).

    Summing before integrating gives (Z alpha / 3 pi) sum C ln m^2.  Rescaling
    u -> m_i u in each term first makes the terms mass-independent and the
    weighted sum vanishes.
    """
    pv = pv or make_pv_set(1.0, 10.0, 20.0)
    right = -Zalpha / math.pi * log_sum_quadrature(pv).value
    _, wrong = log_sum_orders(pv)
    return PitfallRecord(float(right), float(-Zalpha / math.pi * wrong))


def exact_t_weight_integral(p: float, extra_power: int = 0) -> float:
    """The same kernel as :func:`y_kernel` through the t-variable rule, for tests."""
    return exponential_t_integral(p, lambda t: (2.0 / t**2 + 1.0 / t**4) * t**extra_power).value


__all__ = [
    "GaugeTermCheck",
    "LogCoefficientRoutes",
    "PitfallRecord",
    "TraceDensity",
    "coordinate_trace_density",
    "exact_t_weight_integral",
    "feynman_y_integral",
    "gauge_term_vanishing",
    "log_coefficient",
    "log_coefficient_routes",
    "ms_potential",
    "ms_trace_density",
    "random_sumid_trials",
    "regulated_ry_integral",
    "sumid_numerator_coefficients",
    "sumid_sides",
    "trace_density",
    "variable_change_pitfall",
    "y_kernel",
]
