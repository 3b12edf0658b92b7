"""Spherically symmetric nuclear charge distributions.

Densities are normalized to unit total charge, lengths are in natural units
(electron reduced Compton wavelengths).  The electrostatic potential of a
model with charge number Z is

    V(r) = -(Z alpha / r) Q(r) - Z alpha int_r^inf 4 pi s rho(s) ds,

with Q(r) the enclosed fraction of the charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erf

from .constants import ALPHA, fm_to_natural
from .quadrature import CumulativePanels, integrate

KINDS = ("point", "uniform_sphere", "gaussian", "fermi2")


class UnsupportedOperation(ValueError):
    """Raised when a pointwise density is requested for the point nucleus."""


@dataclass(frozen=True)
class NuclearModel:
    """Charge distribution of a nucleus.

    ``radius`` means R for ``uniform_sphere``, the rms radius for
    ``gaussian`` and the half-density radius c for ``fermi2``; ``diffuseness``
    is the Fermi parameter a.  Both are in natural units.
    """

    kind: str = "point"
    Z: float = 1.0
    radius: float = 0.0
    diffuseness: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown nuclear model {self.kind!r}; expected one of {KINDS}")
        if self.Z < 0:
            raise ValueError("Z must be non-negative")
        if self.kind != "point" and not self.radius > 0:
            raise ValueError(f"{self.kind} model needs a positive radius")
        if self.kind == "fermi2" and not self.diffuseness > 0:
            raise ValueError("fermi2 model needs a positive diffuseness")

    # constructors -----------------------------------------------------------

    @classmethod
    def point(cls, Z=1.0):
        return cls("point", Z)

    @classmethod
    def uniform_sphere(cls, R, Z=1.0):
        return cls("uniform_sphere", Z, R)

    @classmethod
    def gaussian(cls, r_rms, Z=1.0):
        return cls("gaussian", Z, r_rms)

    @classmethod
    def fermi2(cls, c, a, Z=1.0):
        return cls("fermi2", Z, c, a)

    @classmethod
    def from_fm(cls, kind, Z, radius_fm=0.0, diffuseness_fm=0.0):
        return cls(kind, Z, fm_to_natural(radius_fm), fm_to_natural(diffuseness_fm))

    # geometry ----------------------------------------------------------------

    @property
    def is_point(self):
        return self.kind == "point"

    @property
    def sigma(self):
        """Gaussian width parameter, r_rms / sqrt(3)."""
        return self.radius / math.sqrt(3.0)

    def extent(self):
        """Radius beyond which the density is below ~1e-30 of its central value."""
        if self.kind == "point":
            return 0.0
        if self.kind == "uniform_sphere":
            return self.radius
        if self.kind == "gaussian":
            return 12.0 * self.sigma
        return self.radius + 70.0 * self.diffuseness

    def breakpoints(self):
        """Radii where the density is non-smooth or changes scale quickly."""
        if self.kind in ("uniform_sphere", "fermi2"):
            return (self.radius,)
        if self.kind == "gaussian":
            return (self.sigma, 4.0 * self.sigma)
        return ()

    @cached_property
    def _fermi_norm(self):
        c, a = self.radius, self.diffuseness
        shape = lambda r: 4.0 * np.pi * r**2 * _fermi_shape(r, c, a)
        total = integrate(shape, 0.0, math.inf, 1e-13, breakpoints=(c,), tail_scale=a).value
        return 1.0 / total

    # density and potential ----------------------------------------------------

    def density(self, r):
        """rho(r), normalized so that int d^3r rho = 1."""
        if self.kind == "point":
            raise UnsupportedOperation("the point nucleus is a delta distribution and cannot be sampled")
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("r must be non-negative")
        if self.kind == "uniform_sphere":
            R = self.radius
            out = np.where(r <= R, 3.0 / (4.0 * np.pi * R**3), 0.0)
        elif self.kind == "gaussian":
            s2 = self.sigma**2
            out = (2.0 * np.pi * s2) ** -1.5 * np.exp(-0.5 * r**2 / s2)
        else:
            out = self._fermi_norm * _fermi_shape(r, self.radius, self.diffuseness)
        return out if out.ndim else float(out)

    def enclosed_charge(self, r):
        """Fraction of the charge inside radius r."""
        r = np.asarray(r, dtype=float)
        if self.kind == "point":
            out = np.ones_like(r)
        elif self.kind == "uniform_sphere":
            out = np.minimum(r / self.radius, 1.0) ** 3
        elif self.kind == "gaussian":
            z = r / (math.sqrt(2.0) * self.sigma)
            out = erf(z) - 2.0 / math.sqrt(math.pi) * z * np.exp(-z * z)
        else:
            out = self._fermi_enclosed(r)
        return out if out.ndim else float(out)

    @cached_property
    def _fermi_panels(self):
        """Edges spanning [0, extent] at a quarter of the diffuseness, or finer."""
        c, a = self.radius, self.diffuseness
        width = min(0.25 * a, 0.125 * c)
        n = int(math.ceil(self.extent() / width))
        edges = np.linspace(0.0, self.extent(), n + 1)
        return (
            CumulativePanels(lambda s: 4.0 * np.pi * s**2 * self.density(s), edges),
            CumulativePanels(lambda s: 4.0 * np.pi * s * self.density(s), edges),
            CumulativePanels(lambda s: s * self.density(s), edges),
        )

    @cached_property
    def _fermi_potential_panels(self):
        return CumulativePanels(lambda t: t * self.potential(t), self._fermi_panels[0].edges)

    def _fermi_enclosed(self, r):
        q = self._fermi_panels[0]
        return np.where(r >= self.extent(), 1.0, q(r) / q.total)

    def _fermi_outer(self, r):
        """int_r^inf 4 pi s rho(s) ds."""
        o = self._fermi_panels[1]
        return np.where(r >= self.extent(), 0.0, o.total - o(r))

    def potential(self, r):
        """Electrostatic potential energy of a unit negative charge, V(r) < 0."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("r must be non-negative")
        za = self.Z * ALPHA
        if self.kind == "point":
            if np.any(r == 0):
                raise ZeroDivisionError("point-nucleus potential is singular at r = 0")
            out = -za / r
        elif self.kind == "uniform_sphere":
            R = self.radius
            with np.errstate(divide="ignore"):
                out = np.where(r <= R, -za / (2 * R) * (3.0 - (r / R) ** 2), -za / np.where(r > 0, r, 1.0))
        elif self.kind == "gaussian":
            k = 1.0 / (math.sqrt(2.0) * self.sigma)
            rr = np.where(r > 0, r, 1.0)
            out = np.where(r > 0, -za * erf(k * r) / rr, -za * 2.0 * k / math.sqrt(math.pi))
        else:
            out = self._fermi_potential(r)
        return out if out.ndim else float(out)

    def _fermi_potential(self, r):
        za = self.Z * ALPHA
        far = r >= self.extent()
        rr = np.where(r > 0, r, 1.0)
        inner = np.where(r > 0, self._fermi_enclosed(r) / rr, 0.0)
        return np.where(far, -za / rr, -za * (inner + self._fermi_outer(r)))

    def electric_field(self, r):
        """dV/dr = Z alpha Q(r) / r^2."""
        r = np.asarray(r, dtype=float)
        return self.Z * ALPHA * self.enclosed_charge(r) / r**2

    def density_moment(self, s):
        """int_0^s t rho(t) dt."""
        s = np.asarray(s, dtype=float)
        if self.kind == "point":
            raise UnsupportedOperation("density moments of the point nucleus are not defined")
        if self.kind == "uniform_sphere":
            out = 1.5 / (4.0 * np.pi * self.radius**3) * np.minimum(s, self.radius) ** 2
        elif self.kind == "gaussian":
            out = self.sigma**2 * (self.density(0.0) - np.asarray(self.density(s)))
        else:
            m = self._fermi_panels[2]
            out = np.asarray(m(s)) / self._fermi_panels[0].total
        return out if out.ndim else float(out)

    def potential_moment(self, s):
        """int_0^s t V(t) dt."""
        s = np.asarray(s, dtype=float)
        za = self.Z * ALPHA
        if self.kind == "point":
            out = -za * s
        elif self.kind == "uniform_sphere":
            R = self.radius
            inside = -za / (2.0 * R) * (1.5 * s**2 - s**4 / (4.0 * R**2))
            out = np.where(s <= R, inside, -0.625 * za * R - za * (s - R))
        elif self.kind == "gaussian":
            k = 1.0 / (math.sqrt(2.0) * self.sigma)
            out = -za * (s * erf(k * s) + np.expm1(-((k * s) ** 2)) / (k * math.sqrt(math.pi)))
        else:
            w = self._fermi_potential_panels
            out = np.where(s <= self.extent(), w(s), w.total - za * (s - self.extent()))
        return out if out.ndim else float(out)

    def sphere_average_density(self, x, D):
        """Average of rho over the sphere of radius D centred at distance x from the origin."""
        x = float(x)
        D = np.asarray(D, dtype=float)
        if x == 0:
            return self.density(D)
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (self.density_moment(x + D) - self.density_moment(np.abs(x - D))) / (2.0 * x * D)
        return np.where(D > 0, avg, self.density(x))

    def rms_radius(self):
        if self.kind == "point":
            return 0.0
        if self.kind == "uniform_sphere":
            return math.sqrt(0.6) * self.radius
        if self.kind == "gaussian":
            return self.radius
        f = lambda s: 4.0 * np.pi * s**4 * self.density(s)
        return math.sqrt(
            integrate(f, 0.0, math.inf, 1e-12, breakpoints=(self.radius,), tail_scale=self.diffuseness).value
        )

    def normalization(self, rel_tol=1e-12):
        """Numerical int d^3r rho, which should be 1."""
        if self.kind == "point":
            return 1.0
        f = lambda s: 4.0 * np.pi * s**2 * self.density(s)
        hi = self.extent()
        bps = tuple(b for b in self.breakpoints() if b < hi)
        return integrate(f, 0.0, hi, rel_tol, breakpoints=bps).value

    def with_Z(self, Z):
        return NuclearModel(self.kind, Z, self.radius, self.diffuseness)

    def to_dict(self):
        d = {"kind": self.kind, "Z": self.Z}
        if self.kind != "point":
            d["radius"] = self.radius
        if self.kind == "fermi2":
            d["diffuseness"] = self.diffuseness
        return d


def _fermi_shape(r, c, a):
    # 1/(1+exp(x)) written to avoid overflow for large x
    x = (np.asarray(r, dtype=float) - c) / a
    e = np.exp(-np.abs(x))
    return np.where(x > 0, e / (1.0 + e), 1.0 / (1.0 + e))
