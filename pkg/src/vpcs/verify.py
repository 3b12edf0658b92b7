"""Identity checks behind the ``verify`` command.

Every check reports a residual and the tolerance it was held to, so a
report says how well an identity holds and not only whether it did.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .momentum import gauge_term_vanishing, log_coefficient_routes, random_sumid_trials, sumid_sides, variable_change_pitfall
from .pauli_villars import (
    PauliVillarsSet,
    RegularizationError,
    counter_term_vanishing,
    make_pv_set,
    three_potential_lightbylight,
    two_potential_vanishing,
    with_c2_sign_flipped,
    zero_potential_vanishing,
)
from .uehling import coulomb_smear_identity, log_sum_quadrature, renormalization_log, uehling_point, uehling_u_form

DEFAULT_PV = (1.0, 100.0, 200.0)
FAULTS = ("c2-sign",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        text = f"{flag} {self.name} residual={self.residual:.3e} tol={self.tolerance:.1e}"
        return text + (f" ({self.detail})" if self.detail else "")


@dataclass
class VerificationReport:
    pv: dict
    fault: str | None
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "pv": self.pv,
            "fault": self.fault,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _check(name, residual, tol, detail=""):
    residual = float(residual)
    return CheckResult(name, bool(math.isfinite(residual) and residual <= tol), residual, tol, detail)


def _guarded(name, tol, fn, pv):
    # identities that only hold for a regulated set report the sum-rule
    # residual instead of crashing when the set is broken
    try:
        return fn()
    except RegularizationError as exc:
        return CheckResult(name, False, max(pv.sum_rule_residuals()), tol, str(exc).split(";")[0])


def _sum_rules(pv):
    r0, r2 = pv.sum_rule_residuals()
    return [_check("sum_rule_C", r0, 1e-14), _check("sum_rule_Cm2", r2, 1e-14)]


def _zero_potential(pv):
    tol = 1e-12
    name = "zero_potential_odd_in_u"
    return _guarded(name, tol, lambda: _check(name, zero_potential_vanishing(pv) / pv.m2**2, tol), pv)


def _counter_term(pv):
    scale = float(np.abs(pv.coefficients * pv.masses).sum())
    tol = 1e-12
    return _guarded("counter_term", tol, lambda: _check("counter_term", counter_term_vanishing(pv) / scale, tol), pv)


def _two_potential(pv):
    tol = 1e-10
    return _guarded("two_potential", tol, lambda: _check("two_potential", two_potential_vanishing(pv), tol), pv)


def _light_by_light(pv):
    tol = 1e-10

    def run():
        res = three_potential_lightbylight(pv)
        detail = f"single mass gives {res.per_mass:.12f} (4/pi = {4 / math.pi:.12f})"
        ok_single = abs(res.per_mass - 4 / math.pi) <= 1e-10
        chk = _check("light_by_light_regulated", abs(res.regulated), tol, detail)
        return CheckResult(chk.name, chk.passed and ok_single, chk.residual, tol, detail)

    return _guarded("light_by_light_regulated", tol, run, pv)


def _log_sum(pv):
    tol = 1e-8

    def run():
        q = log_sum_quadrature(pv).value
        exact = renormalization_log(pv)
        return _check("log_sum_identity", abs(q - exact) / abs(exact), tol, f"quadrature {q:.12g} vs {exact:.12g}")

    return _guarded("log_sum_identity", tol, run, pv)


def _smearing():
    lhs, rhs = coulomb_smear_identity(1.0, 0.0, 1.0)
    return _check("smearing_identity", abs(lhs - rhs) / abs(rhs), 1e-8, f"rhs {rhs:.9f}")


def _dual_form(pv):
    r = np.geomspace(1e-3, 20.0, 6)
    worst = max(abs(uehling_u_form(x, pv.m0) / uehling_point(x, pv.m0) - 1) for x in r)
    return _check("uehling_dual_form", worst, 1e-10)


def _appendix_c(pv):
    tol = 1e-10
    lhs, rhs = sumid_sides(1, [pv.m0, pv.m1, pv.m2])
    trials = random_sumid_trials(100)
    exact = _check("sumid_exact", 0.0 if lhs == rhs and trials == 100 else 1.0, 0.0, f"{trials}/100 random triples")

    def run():
        chk = gauge_term_vanishing(1.0, pv)
        return _check("gauge_term_vanishing", chk.relative_residual, tol)

    return [exact, _guarded("gauge_term_vanishing", tol, run, pv)]


def _pitfall(pv):
    tol = 1e-9

    def run():
        rec = variable_change_pitfall(pv, 1.0)
        expect = pv.log_sum() / (3 * math.pi)
        res = abs(rec.right - expect) / abs(expect)
        # the wrong order must vanish and so differ from the right one by the whole value
        ok = abs(rec.wrong) < 1e-12 and rec.difference > 0.5 * abs(expect)
        chk = _check("pitfall_order", res, tol, f"right {rec.right:.9f}, wrong {rec.wrong:.3e}")
        return CheckResult(chk.name, chk.passed and ok, chk.residual, tol, chk.detail)

    return _guarded("pitfall_order", tol, run, pv)


def _ms_routes(pv):
    tol = 1e-10

    def run():
        routes = log_coefficient_routes(pv)
        return _check("log_coefficient_routes", routes.discrepancy / abs(routes.coordinate), tol)

    return _guarded("log_coefficient_routes", tol, run, pv)


def run_verification(masses=None, fault: str | None = None) -> VerificationReport:
    """Run every identity for the mass set ``masses`` (default (1, 100, 200)).

    ``fault="c2-sign"`` flips the sign of C2 before checking, to show that
    the suite detects a broken regularization.
    """
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; expected one of {FAULTS}")
    pv: PauliVillarsSet = make_pv_set(*(masses or DEFAULT_PV))
    if fault == "c2-sign":
        pv = with_c2_sign_flipped(pv)
    report = VerificationReport(pv.to_dict(), fault)
    report.checks += _sum_rules(pv)
    report.checks += [_zero_potential(pv), _counter_term(pv), _two_potential(pv), _light_by_light(pv)]
    report.checks += [_log_sum(pv), _smearing(), _dual_form(pv)]
    report.checks += _appendix_c(pv)
    report.checks += [_pitfall(pv), _ms_routes(pv)]
    return report


__all__ = ["CheckResult", "DEFAULT_PV", "FAULTS", "VerificationReport", "run_verification"]
