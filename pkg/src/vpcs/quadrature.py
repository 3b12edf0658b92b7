"""Double-exponential quadrature.

Finite intervals use the tanh-sinh rule with adaptive bisection, semi-infinite
tails use the exp-sinh rule.  Integrands are called with numpy arrays of nodes;
scalar-only callables are detected and evaluated point by point.

The t-kernel integrals

    K(p) = int_1^inf dt sqrt(t^2 - 1) w(t) exp(-2 p t)

are evaluated after the substitution t = cosh(theta), which removes the
square-root branch point at t = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_REL_TOL = 1e-10
MAX_EVALUATIONS = 1_000_000

_EPS = np.finfo(float).eps
_HALF_PI = 0.5 * math.pi
_H0 = 0.5
_MIN_LEVEL = 3
_MAX_LEVEL = 8
_MAX_DEPTH = 30
# tanh-sinh abscissae reach ~1e-300 of the half width at |t| = 6
_TS_TMAX = 6.0
# exp-sinh: lower end approaches the origin double-exponentially, upper end
# stops at scale * 1e30
_ES_TMIN = -6.0
_ES_TMAX = 4.48


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value

    def __add__(self, other):
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
        )


class QuadratureError(ArithmeticError):
    """Integration failed; ``best`` holds the best estimate when one exists."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConvergenceError(QuadratureError):
    """The rule did not converge (divergent integrand or exhausted budget)."""


def _evaluate(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float)
    except (TypeError, ValueError):
        y = np.array([float(f(xi)) for xi in x])
    if np.isnan(y).any():
        bad = x[np.isnan(y)][0]
        raise QuadratureError(f"integrand returned NaN at x={bad!r}")
    if np.isinf(y).any():
        bad = x[np.isinf(y)][0]
        raise ConvergenceError(f"integrand is infinite at x={bad!r}")
    return y


def _ts_nodes(t, a, b):
    half = 0.5 * (b - a)
    s = _HALF_PI * np.sinh(np.abs(t))
    e = np.exp(-2.0 * s)
    d = 2.0 * half * e / (1.0 + e)
    x = np.where(t < 0, a + d, b - d)
    w = half * _HALF_PI * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
    ok = (x > a) & (x < b) & (w > 0)
    return x[ok], w[ok], t[ok]


def _es_nodes(t, a, scale):
    g = np.exp(_HALF_PI * np.sinh(t))
    x = a + scale * g
    w = scale * _HALF_PI * np.cosh(t) * g
    ok = (x > a) & np.isfinite(x) & (w > 0)
    return x[ok], w[ok], t[ok]


def _level_grid(level, tmin, tmax):
    h = _H0 / 2**level
    if level == 0:
        k = np.arange(math.ceil(tmin / h), math.floor(tmax / h) + 1)
    else:
        k = np.arange(math.ceil((tmin / h - 1) / 2), math.floor((tmax / h - 1) / 2) + 1)
        k = 2 * k + 1
        k = k[(k * h >= tmin) & (k * h <= tmax)]
    return h, k * h


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self, n):
        self.used += n
        if self.used > self.limit:
            raise ConvergenceError(f"evaluation budget of {self.limit} points exhausted")


def _de_rule(f, nodes, tmin, tmax, rel_tol, abs_tol, budget, offset_ratio=0.0):
    """Run level refinement for one DE mapping.

    ``offset_ratio`` is |position| / width of the panel: abscissae are only
    representable to an ulp of their position, which limits the attainable
    relative accuracy on narrow panels far from the origin.
    Returns (value, error, converged).
    """
    total = 0.0
    l1 = 0.0
    edge = {}
    previous = None
    value = 0.0
    error = math.inf
    for level in range(_MAX_LEVEL + 1):
        h, t = _level_grid(level, tmin, tmax)
        x, w, t = nodes(t)
        budget.spend(x.size)
        y = _evaluate(f, x) * w
        total += y.sum()
        l1 += np.abs(y).sum()
        if t.size:
            lo, hi = np.argmin(t), np.argmax(t)
            for key, idx in (("lo", lo), ("hi", hi)):
                if key not in edge or (t[idx] < edge[key][0] if key == "lo" else t[idx] > edge[key][0]):
                    edge[key] = (t[idx], abs(y[idx]))
        value = h * total
        if previous is not None:
            tail = h * max([v[1] for v in edge.values()] or [0.0])
            roundoff = 64.0 * _EPS * h * l1 * (1.0 + offset_ratio)
            diff = abs(value - previous)
            error = diff + tail + roundoff
            tol = max(abs_tol, rel_tol * abs(value))
            floor = max(tol, roundoff)
            if level >= _MIN_LEVEL and (error <= tol or (diff <= roundoff and tail <= floor)):
                return value, error, True
        previous = value
    return value, error, False


def _finite(f, a, b, rel_tol, abs_tol, budget, depth=0):
    value, error, ok = _de_rule(
        f, lambda t: _ts_nodes(t, a, b), -_TS_TMAX, _TS_TMAX, rel_tol, abs_tol, budget,
        max(abs(a), abs(b)) / (b - a),
    )
    if ok:
        return value, error
    if depth >= _MAX_DEPTH:
        raise ConvergenceError(
            f"no convergence on [{a}, {b}] after {depth} bisections (error {error:.3g})",
            best=QuadratureResult(value, error, budget.used),
        )
    mid = 0.5 * (a + b)
    if not a < mid < b:
        raise ConvergenceError(
            f"panel [{a}, {b}] cannot be bisected further (error {error:.3g})",
            best=QuadratureResult(value, error, budget.used),
        )
    # children inherit an absolute target from this panel's estimate, so tiny
    # sub-panels are not held to a relative tolerance of their own size
    child_tol = 0.5 * max(abs_tol, rel_tol * abs(value))
    try:
        v1, e1 = _finite(f, a, mid, rel_tol, child_tol, budget, depth + 1)
        v2, e2 = _finite(f, mid, b, rel_tol, child_tol, budget, depth + 1)
    except ConvergenceError as exc:
        if exc.best is None:
            exc.best = QuadratureResult(value, error, budget.used)
        raise
    return v1 + v2, e1 + e2


def _tail(f, a, scale, rel_tol, abs_tol, budget):
    value, error, ok = _de_rule(
        f, lambda t: _es_nodes(t, a, scale), _ES_TMIN, _ES_TMAX, rel_tol, abs_tol, budget,
        abs(a) / scale,
    )
    if not ok:
        raise ConvergenceError(
            f"no convergence on [{a}, inf) (error {error:.3g}); integrand may decay too slowly",
            best=QuadratureResult(value, error, budget.used),
        )
    return value, error


def integrate(
    f: Callable,
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    abs_tol: float = 0.0,
    breakpoints: Sequence[float] = (),
    tail_scale: float | None = None,
    max_evaluations: int = MAX_EVALUATIONS,
) -> QuadratureResult:
    """Integrate ``f`` over [a, b]; ``b`` may be ``inf``."""
    if not a < b:
        raise ValueError(f"integration limits must satisfy a < b, got [{a}, {b}]")
    if not math.isfinite(a):
        raise ValueError("lower limit must be finite")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    budget = _Budget(max_evaluations)
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    if math.isinf(b):
        upper = inner[-1] if inner else a + (tail_scale or 1.0)
        edges = [a] + [p for p in inner if p < upper] + [upper]
    else:
        edges = [a] + inner + [b]
    npanel = len(edges) - 1 + math.isinf(b)
    share = abs_tol / npanel
    value = error = 0.0
    try:
        # later panels are held to the running total, so a small tail is not
        # asked for full relative accuracy of its own
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = _finite(f, lo, hi, rel_tol, max(share, rel_tol * abs(value) / npanel), budget)
            value += v
            error += e
        if math.isinf(b):
            scale = tail_scale or max(edges[-1] - a, 1.0)
            v, e = _tail(f, edges[-1], scale, rel_tol, max(share, rel_tol * abs(value) / npanel), budget)
            value += v
            error += e
    except ConvergenceError as exc:
        if exc.best is not None:
            exc.best = QuadratureResult(value + exc.best.value, error + exc.best.abs_error_estimate, budget.used)
        raise
    return QuadratureResult(float(value), float(error), budget.used)


def integrate_semi_infinite(
    f: Callable,
    decay_scale: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    abs_tol: float = 0.0,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` over (0, inf).

    The range is split at ``decay_scale`` into a finite tanh-sinh panel and an
    exp-sinh tail scaled by ``decay_scale``.
    """
    if not decay_scale > 0:
        raise ValueError("decay_scale must be positive")
    pts = [p for p in breakpoints if 0 < p < decay_scale] + [decay_scale]
    return integrate(f, 0.0, math.inf, rel_tol, abs_tol=abs_tol, breakpoints=pts, tail_scale=decay_scale)


def integrate_radial(f: Callable, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL, **kw) -> QuadratureResult:
    """Integrate ``f`` over the finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_radial needs finite limits")
    if a >= b:
        raise ValueError(f"empty or reversed interval [{a}, {b}]")
    return integrate(f, a, b, rel_tol, **kw)


def gauss_legendre_panels(f: Callable, edges, order: int = 8) -> float:
    """Composite Gauss-Legendre rule on consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    xg, wg = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    x = (lo + hi) * 0.5 + half * xg
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return float((half * wg * y).sum())


class CumulativePanels:
    """F(x) = int_{edges[0]}^x f for any x in the covered range.

    Panel sums are accumulated once; a query adds a Gauss-Legendre rule on
    the partial panel [edge_k, x].  Meant for smooth integrands whose
    panels are narrower than their analyticity strip.
    """

    def __init__(self, f: Callable, edges, order: int = 20):
        self.f = f
        self.edges = np.asarray(edges, dtype=float)
        if self.edges.ndim != 1 or self.edges.size < 2 or np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        self._xg, self._wg = np.polynomial.legendre.leggauss(order)
        lo, hi = self.edges[:-1], self.edges[1:]
        sums = self._partial(lo, hi)
        self.cumulative = np.concatenate(([0.0], np.cumsum(sums)))

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])

    def _partial(self, lo, hi):
        half = 0.5 * (hi - lo)
        x = (0.5 * (hi + lo))[:, None] + half[:, None] * self._xg
        y = np.asarray(self.f(x.ravel()), dtype=float).reshape(x.shape)
        return half * (y @ self._wg)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.clip(x.ravel(), self.edges[0], self.edges[-1])
        k = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, self.edges.size - 2)
        lo = self.edges[k]
        out = self.cumulative[k] + self._partial(lo, flat)
        out = out.reshape(x.shape)
        return out if out.ndim else float(out)


# --- t-kernel ---------------------------------------------------------------

WEIGHTS = {
    "u2_form": lambda t: 2.0 / t**2,
    "u4_form": lambda t: 1.0 / t**4,
    "combined": lambda t: 2.0 / t**2 + 1.0 / t**4,
}
# weights whose t-integrand decays only as 1/t at p = 0
_DIVERGENT_AT_ZERO = {"u2_form", "combined"}


def exponential_t_integral(
    p: float,
    weight: Callable,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    scaled: bool = False,
    abs_tol: float = 0.0,
) -> QuadratureResult:
    """int_1^inf dt sqrt(t^2-1) weight(t) exp(-2 p t), via t = cosh(theta).

    With ``scaled`` the factor exp(-2p) is removed from the result, which keeps
    the value representable for large ``p``.
    """
    if p < 0:
        raise ValueError("p must be non-negative")

    def integrand(theta):
        sh = np.sinh(theta)
        ch = np.cosh(theta)
        # cosh - 1 = 2 sinh^2(theta/2) avoids cancellation near theta = 0
        return sh * sh * weight(ch) * np.exp(-4.0 * p * np.sinh(0.5 * theta) ** 2)

    if p == 0:
        # only weights falling at least as t^-4 are admitted here; the
        # integrand then decays like exp(-2 theta)
        res = integrate(integrand, 0.0, 40.0, rel_tol, abs_tol=abs_tol, breakpoints=(1.0, 5.0, 20.0))
    else:
        # beyond theta_max the exponent is below -800
        theta_d = math.acosh(1.0 + 15.0 / p)
        theta_max = math.acosh(1.0 + 400.0 / p)
        pts = [pt for pt in (1.0, theta_d) if pt < theta_max]
        res = integrate(integrand, 0.0, theta_max, rel_tol, abs_tol=abs_tol, breakpoints=pts)
    if scaled or p == 0:
        return res
    factor = math.exp(-2.0 * p)
    return QuadratureResult(res.value * factor, res.abs_error_estimate * factor, res.evaluations)


def integrate_t_kernel(x: float, mass: float, weight: str = "combined", rel_tol: float = DEFAULT_REL_TOL) -> QuadratureResult:
    """The Uehling kernel K(mass*x) = int_1^inf dt sqrt(t^2-1) w(t) exp(-2 t mass x).

    ``weight`` is ``"u2_form"`` (2/t^2), ``"u4_form"`` (1/t^4) or ``"combined"``.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    if mass <= 0:
        raise ValueError("mass must be positive")
    if weight not in WEIGHTS:
        raise ValueError(f"unknown weight {weight!r}")
    p = mass * x
    if p == 0 and weight in _DIVERGENT_AT_ZERO:
        raise ValueError(f"weight {weight!r} is not integrable at x = 0")
    return exponential_t_integral(p, WEIGHTS[weight], rel_tol)


def t_kernel_batch(p, powers=(2, 4), coefficients=(2.0, 1.0), nodes: int = 640) -> np.ndarray:
    """Vectorized int_1^inf dt sqrt(t^2-1) sum_k a_k t^(-n_k) exp(-2 p t).

    After t = cosh(theta) the integrand is an even analytic function of
    theta, so the trapezoidal rule on the whole line converges
    geometrically.  The step follows the truncation point
    acosh(1 + 400/p), which shrinks with the width of the exponential
    factor.  At p = 0 all powers must exceed 2.
    """
    p = np.asarray(p, dtype=float)
    flat = p.reshape(-1)
    if np.any(flat < 0):
        raise ValueError("p must be non-negative")
    if np.any(flat == 0) and min(powers) <= 2:
        raise ValueError("kernel with a t^-2 weight diverges at p = 0")
    with np.errstate(divide="ignore"):
        theta_max = np.where(flat > 0, np.arccosh(1.0 + 400.0 / np.where(flat > 0, flat, 1.0)), 40.0)
    theta_max = np.minimum(theta_max, 40.0)
    h = theta_max / nodes
    k = np.arange(nodes + 1)
    theta = h[:, None] * k[None, :]
    sh = np.sinh(theta)
    ch = np.cosh(theta)
    w = sum(a * ch ** (-float(n)) for a, n in zip(coefficients, powers))
    y = sh * sh * w * np.exp(-2.0 * flat[:, None] * ch)
    y[:, 0] *= 0.5
    y[:, -1] *= 0.5
    return (h * y.sum(axis=1)).reshape(p.shape)
