"""Pauli-Villars mass sets and the vanishing checks of the free-field traces.

A set holds the loop mass m0 (coefficient 1) and two auxiliary masses with
coefficients C1, C2 chosen so that

    1 + C1 + C2 = 0,        m0^2 + C1 m1^2 + C2 m2^2 = 0.

All traces are stored as real numbers after the rotation z = i u of the
energy contour; with h_i(u) = u c_i and c_i = sqrt(m_i^2 + u^2) the
equal-coordinate free trace is (1/pi) sum_i C_i h_i(u).  Regulated sums of
the h_i and their derivatives cancel strongly at large |u|, so each is
evaluated in an algebraically rearranged form in which the cancelling
leading terms have been removed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureResult, integrate_semi_infinite

SUM_RULE_TOL = 1e-14
DEGENERACY_TOL = 1e-12


class RegularizationError(ValueError):
    """The mass set does not satisfy the Pauli-Villars sum rules."""


@dataclass(frozen=True)
class PauliVillarsSet:
    m0: float
    m1: float
    m2: float
    C1: float
    C2: float

    @property
    def masses(self):
        return np.array([self.m0, self.m1, self.m2])

    @property
    def coefficients(self):
        return np.array([1.0, self.C1, self.C2])

    def terms(self):
        """(C_i, m_i) pairs including the loop mass."""
        return list(zip(self.coefficients, self.masses))

    def sum_rule_residuals(self):
        """Relative residuals of the two sum rules.

        Each residual is scaled by the sum of the magnitudes of its terms,
        which is the size of the rounding error floating point can promise.
        """
        C, m2 = self.coefficients, self.masses**2
        r0 = abs(C.sum()) / np.abs(C).sum()
        r2 = abs((C * m2).sum()) / np.abs(C * m2).sum()
        return float(r0), float(r2)

    def is_regulated(self, tol=SUM_RULE_TOL):
        return max(self.sum_rule_residuals()) <= tol

    def require_regulated(self, tol=SUM_RULE_TOL):
        r0, r2 = self.sum_rule_residuals()
        if max(r0, r2) > tol:
            raise RegularizationError(
                f"mass set violates the Pauli-Villars sum rules (residuals {r0:.3g}, {r2:.3g}); "
                "unregulated traces diverge at large u"
            )

    def log_sum(self):
        """S = sum_i C_i ln m_i^2."""
        return float((self.coefficients * np.log(self.masses**2)).sum())

    def inverse_mass_sum(self, power=2):
        """sum over the auxiliary masses of C_i / m_i^power (loop mass excluded)."""
        return self.C1 / self.m1**power + self.C2 / self.m2**power

    def to_dict(self):
        return {"m0": self.m0, "m1": self.m1, "m2": self.m2, "C1": self.C1, "C2": self.C2}


def make_pv_set(m0: float, m1: float, m2: float) -> PauliVillarsSet:
    """Build the regulated set, solving the sum rules for C1 and C2."""
    for name, m in (("m0", m0), ("m1", m1), ("m2", m2)):
        if not (m > 0 and math.isfinite(m)):
            raise ValueError(f"{name} must be a positive finite mass, got {m!r}")
    if not m0 < m1:
        raise ValueError(f"auxiliary mass m1={m1} must exceed the loop mass m0={m0}")
    # factored differences keep near-degenerate sets accurate
    d21 = (m2 - m1) * (m2 + m1)
    if abs(d21) < DEGENERACY_TOL * m2 * m2:
        raise ValueError(f"degenerate auxiliary masses m1={m1}, m2={m2}")
    if not m1 < m2:
        raise ValueError(f"auxiliary masses must satisfy m1 < m2, got {m1}, {m2}")
    C1 = (m0 - m2) * (m0 + m2) / d21
    C2 = (m1 - m0) * (m1 + m0) / d21
    return PauliVillarsSet(m0, m1, m2, C1, C2)


def single_mass(m0: float = 1.0) -> PauliVillarsSet:
    """The unregulated loop alone; the vanishing checks reject it."""
    return PauliVillarsSet(m0, m0, m0, 0.0, 0.0)


def with_c2_sign_flipped(pv: PauliVillarsSet) -> PauliVillarsSet:
    """Fault injection used to show that the checks can fail."""
    return PauliVillarsSet(pv.m0, pv.m1, pv.m2, pv.C1, -pv.C2)


# --- free traces ----------------------------------------------------------------


def free_trace(dx: float, u, mass: float = 1.0):
    """Magnitude of the zero-potential trace, u exp(-c dx) / (pi dx)."""
    if not dx > 0:
        raise ValueError("dx must be positive")
    u = np.asarray(u, dtype=float)
    c = np.sqrt(mass * mass + u * u)
    out = u * np.exp(-c * dx) / (np.pi * dx)
    return out if out.ndim else float(out)


def _split(u):
    u = np.asarray(u, dtype=float)
    return u, np.abs(u), np.sign(u)


def regulated_c_sum(u, pv: PauliVillarsSet):
    """sum_i C_i c_i(u).

    For |u| >= m0 this is evaluated as -sum_i C_i m_i^4 / (2|u| (c_i+|u|)^2),
    which follows from both sum rules and carries no cancellation.
    """
    u, s, _ = _split(u)
    C, mu = pv.coefficients[:, None], (pv.masses**2)[:, None]
    flat = s.reshape(1, -1)
    c = np.sqrt(mu + flat**2)
    direct = (C * c).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = -(C * mu**2 / (c + flat) ** 2).sum(axis=0) / (2.0 * flat)
    out = np.where(flat[0] >= pv.m0, stable, direct).reshape(s.shape)
    return out if out.ndim else float(out)


def regulated_equal_coordinate_trace(u, pv: PauliVillarsSet):
    """(u/pi) sum_i C_i c_i: odd in u, decaying as sum C_i m_i^4 / (8 pi u^2)."""
    u = np.asarray(u, dtype=float)
    out = u * regulated_c_sum(u, pv) / np.pi
    return out if out.ndim else float(out)


def regulated_h1(u, pv: PauliVillarsSet):
    """sum_i C_i h_i'(u) = sum_i C_i m_i^4 / (c_i (c_i + |u|)^2); even in u."""
    u, s, _ = _split(u)
    C, mu = pv.coefficients[:, None], (pv.masses**2)[:, None]
    flat = s.reshape(1, -1)
    c = np.sqrt(mu + flat**2)
    out = (C * mu**2 / (c * (c + flat) ** 2)).sum(axis=0).reshape(s.shape)
    return out if out.ndim else float(out)


def regulated_h2(u, pv: PauliVillarsSet):
    """sum_i C_i h_i''(u); odd in u.

    h'' = sgn(u) [2 + N/c^3] with N = -m^4 (3u^2 + 4m^2) / (|u|(2u^2 + 3m^2) + 2c^3),
    and the constant 2 drops out of the regulated sum.
    """
    u, s, sg = _split(u)
    C, mu = pv.coefficients[:, None], (pv.masses**2)[:, None]
    flat = s.reshape(1, -1)
    c = np.sqrt(mu + flat**2)
    N = -(mu**2) * (3.0 * flat**2 + 4.0 * mu) / (flat * (2.0 * flat**2 + 3.0 * mu) + 2.0 * c**3)
    out = sg * (C * N / c**3).sum(axis=0).reshape(s.shape)
    return out if out.ndim else float(out)


def h3(u, mass: float):
    """Third derivative of u sqrt(m^2 + u^2): 3 m^4 / c^5."""
    u = np.asarray(u, dtype=float)
    return 3.0 * mass**4 / (mass * mass + u * u) ** 2.5


def regulated_h3(u, pv: PauliVillarsSet):
    u = np.asarray(u, dtype=float)
    return sum(C * h3(u, m) for C, m in pv.terms())


# --- vanishing checks ------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricIntegral:
    """Integral over the real u axis assembled from its two half lines."""

    positive: QuadratureResult
    negative: QuadratureResult

    @property
    def total(self):
        return self.positive.value + self.negative.value

    @property
    def abs_error_estimate(self):
        return self.positive.abs_error_estimate + self.negative.abs_error_estimate


def symmetric_integral(f, scale: float, rel_tol: float = 1e-12, abs_tol: float = 0.0) -> SymmetricIntegral:
    """int_{-inf}^{inf} f(u) du as int_0^inf f(u) du + int_0^inf f(-v) dv."""
    pos = integrate_semi_infinite(f, scale, rel_tol, abs_tol=abs_tol)
    neg = integrate_semi_infinite(lambda v: f(-np.asarray(v)), scale, rel_tol, abs_tol=abs_tol)
    return SymmetricIntegral(pos, neg)


def _scale(pv):
    return float(pv.masses.max())


def zero_potential_integral(pv: PauliVillarsSet) -> SymmetricIntegral:
    pv.require_regulated()
    return symmetric_integral(lambda u: regulated_equal_coordinate_trace(u, pv), _scale(pv))


def zero_potential_half_line_exact(pv: PauliVillarsSet) -> float:
    """int_0^inf (u/pi) sum C_i c_i du = -sum C_i m_i^3 / (3 pi)."""
    return float(-(pv.coefficients * pv.masses**3).sum() / (3.0 * np.pi))


def zero_potential_vanishing(pv: PauliVillarsSet) -> float:
    """|int du of the regulated equal-coordinate trace| over the whole u axis."""
    return abs(zero_potential_integral(pv).total)


def counter_term_integral(pv: PauliVillarsSet) -> QuadratureResult:
    """int_0^inf sum C_i h_i'(u) du, a total derivative that vanishes when regulated."""
    pv.require_regulated()
    return integrate_semi_infinite(lambda u: regulated_h1(u, pv), _scale(pv), 1e-12)


def counter_term_vanishing(pv: PauliVillarsSet) -> float:
    return abs(counter_term_integral(pv).value)


def two_potential_integral(pv: PauliVillarsSet) -> SymmetricIntegral:
    pv.require_regulated()
    scale = _scale(pv)
    # the integrand is of size sum |C_i| m_i near the origin
    atol = 1e-13 * float(np.abs(pv.coefficients * pv.masses).sum())
    return symmetric_integral(lambda u: regulated_h2(u, pv), scale, abs_tol=atol)


def two_potential_half_line_exact(pv: PauliVillarsSet) -> float:
    """int_0^inf sum C_i h_i'' du = [sum C_i h_i']_0^inf = -sum C_i m_i."""
    return float(-(pv.coefficients * pv.masses).sum())


def two_potential_vanishing(pv: PauliVillarsSet) -> float:
    """|int du sum C_i d^2/du^2 [u c_i]| over the whole u axis."""
    return abs(two_potential_integral(pv).total)


def two_potential_boundary(U: float, pv: PauliVillarsSet) -> float:
    """Boundary value sum C_i h_i'(U); tends to sum C_i m_i^4 / (4 U^3)."""
    return float(regulated_h1(U, pv))


@dataclass(frozen=True)
class LightByLight:
    regulated: float
    per_mass: float
    per_mass_boundary: float


def three_potential_lightbylight(pv: PauliVillarsSet, mass: float | None = None) -> LightByLight:
    """Integrals over u of (1/pi) d^3/du^3 [u c].

    A single mass gives [h'']_{-inf}^{inf} / pi = 4/pi, a spurious finite
    term; the regulated sum multiplies this by sum C_i = 0.
    """
    pv.require_regulated()
    m = pv.m0 if mass is None else mass
    single = symmetric_integral(lambda u: h3(u, m) / np.pi, m, 1e-13)
    regulated = symmetric_integral(lambda u: regulated_h3(u, pv) / np.pi, _scale(pv), 1e-13, abs_tol=1e-14)
    big = 1e8 * m
    boundary = (_h2_single(big, m) - _h2_single(-big, m)) / np.pi
    return LightByLight(regulated.total, single.total, float(boundary))


def _h2_single(u, m):
    c = math.sqrt(m * m + u * u)
    return u * (2.0 * u * u + 3.0 * m * m) / c**3


def lightbylight_boundary_limit(mass: float = 1.0, sign: int = 1) -> float:
    """lim_{u -> sign*inf} (1/pi) d^2/du^2 [u sqrt(m^2+u^2)] = 2 sign / pi."""
    return 2.0 * sign / math.pi


def trace_falloff_exponent(pv: PauliVillarsSet, u_lo: float, u_hi: float, points: int = 12) -> float:
    """Least-squares log-log slope of |regulated trace| on [u_lo, u_hi]."""
    u = np.geomspace(u_lo, u_hi, points)
    v = np.abs(regulated_equal_coordinate_trace(u, pv))
    return float(np.polyfit(np.log(u), np.log(v), 1)[0])


__all__ = [
    "PauliVillarsSet",
    "RegularizationError",
    "make_pv_set",
    "single_mass",
    "with_c2_sign_flipped",
    "free_trace",
    "regulated_c_sum",
    "regulated_equal_coordinate_trace",
    "regulated_h1",
    "regulated_h2",
    "regulated_h3",
    "h3",
    "zero_potential_vanishing",
    "zero_potential_integral",
    "zero_potential_half_line_exact",
    "counter_term_integral",
    "counter_term_vanishing",
    "two_potential_vanishing",
    "two_potential_integral",
    "two_potential_half_line_exact",
    "two_potential_boundary",
    "three_potential_lightbylight",
    "LightByLight",
    "trace_falloff_exponent",
]
