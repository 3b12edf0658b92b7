"""Command-line interface.

    vpcs uehling     tabulate the Uehling potential of a nuclear model
    vpcs shift       Uehling level shifts of hydrogenic states
    vpcs verify      run the regularization identities
    vpcs pv-sweep    convergence of the finite-mass potential with the auxiliary masses
    vpcs compare-ms  momentum-space route against the coordinate-space one

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 numerical failure.  Failures print a single line
``vpcs-error code=<n> kind=<kind> message=<text>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bound_states import BoundStateError, CoverageError, SolverError, dirac_point, level_shift, nr_hydrogenic, radial_solve
from .config import ConfigError, RunConfig, load_config, parse_floats, parse_state, thread_count
from .constants import ALPHA, fm_to_natural, format_energy
from .momentum import log_coefficient_routes, ms_potential
from .nuclear import NuclearModel, UnsupportedOperation
from .pauli_villars import RegularizationError, make_pv_set
from .quadrature import QuadratureError
from .tables import PotentialTable, log_grid
from .uehling import uehling_point, uehling_point_fast, uehling_table
from .verify import DEFAULT_PV, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_POINTS = 600
COMPARE_GRID = (1e-3, 20.0, 50)


class CommandError(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code = code
        self.kind = kind


# --- helpers -------------------------------------------------------------------------


def nuclear_model(cfg: RunConfig) -> NuclearModel:
    return NuclearModel.from_fm(cfg.model, cfg.Z, cfg.R, cfg.fermi_a)


def bohr_radius(cfg: RunConfig) -> float:
    """Lepton Bohr radius in natural units (Z = 1 is used for Z = 0)."""
    from .bound_states import reduced_mass

    m = reduced_mass(cfg.lepton_mass) if cfg.use_reduced_mass else cfg.lepton_mass
    return 1.0 / (max(cfg.Z, 1.0) * ALPHA * m)


def radial_grid(cfg: RunConfig, default=None) -> np.ndarray:
    if cfg.grid is None:
        if default is not None:
            return log_grid(*default)
        a = bohr_radius(cfg)
        return log_grid(1e-4 * a, 50.0 * a, DEFAULT_POINTS)
    lo, hi, n = cfg.grid
    if cfg.grid_units == "fm":
        lo, hi = fm_to_natural(lo), fm_to_natural(hi)
    elif cfg.grid_units == "bohr":
        a = bohr_radius(cfg)
        lo, hi = lo * a, hi * a
    return log_grid(lo, hi, int(n))


def energy_record(value: float) -> dict:
    shown, unit = format_energy(value)
    return {"natural": value, "value": shown, "unit": unit}


def make_state(cfg: RunConfig, model: NuclearModel, n: int, q: int):
    za = cfg.Z * ALPHA
    if not cfg.relativistic:
        return nr_hydrogenic(n, q, za, cfg.lepton_mass, cfg.use_reduced_mass)
    if model.is_point:
        return dirac_point(n, q, za, cfg.lepton_mass)
    return radial_solve(model, n, q, cfg.lepton_mass)


def potential_table(cfg: RunConfig, model: NuclearModel, radii, threads: int) -> PotentialTable:
    """Uehling table, or with --pv the regulated sum over auxiliary loops
    sum_i C_i V_U(m_i) (the finite-mass potential with its log removed)."""
    if model.Z == 0:
        return PotentialTable(radii, np.zeros_like(radii), metadata={"model": model.to_dict(), "m_loop": 1.0})
    if cfg.pv is None:
        return uehling_table(model, radii, 1.0, threads)
    pv = make_pv_set(*cfg.pv)
    parts = [uehling_table(model, radii, m, threads).scaled(C) for C, m in pv.terms()]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    total.metadata = {"model": model.to_dict(), "pv": pv.to_dict()}
    return total


def emit(text: str, cfg: RunConfig):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        with open(cfg.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CommandError(EXIT_CONFIG, "config", f"cannot write {cfg.out}: {exc.strerror}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- commands ----------------------------------------------------------------------------


def cmd_uehling(cfg: RunConfig, threads: int = 1) -> int:
    model = nuclear_model(cfg)
    table = potential_table(cfg, model, radial_grid(cfg), threads)
    # no negative zeros in the output
    table = PotentialTable(table.radii, table.values + 0.0, table.interpolation, table.metadata)
    table.metadata["lepton"] = cfg.lepton
    emit(table.to_csv() if cfg.format == "csv" else table.to_json(), cfg)
    return EXIT_OK


def shift_report(cfg: RunConfig, threads: int = 1) -> dict:
    model = nuclear_model(cfg)
    states = [make_state(cfg, model, n, q) for n, q in cfg.states]
    radii = radial_grid(cfg)
    table = potential_table(cfg, model, radii, threads)
    rows = []
    shifts = []
    for st in states:
        dv = level_shift(st, table, cfg.tolerances["shift_rel_tol"])
        shifts.append(dv)
        summary = st.to_dict()
        summary["energy"] = energy_record(st.energy)
        summary["binding_energy"] = energy_record(st.binding_energy)
        summary["uehling_shift"] = energy_record(dv)
        rows.append(summary)
    diffs = []
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            diffs.append({"label": f"{states[j].label}-{states[i].label}", **energy_record(shifts[j] - shifts[i])})
    return {
        "model": model.to_dict(),
        "lepton": cfg.lepton,
        "reduced_mass": cfg.use_reduced_mass if not cfg.relativistic else False,
        "pv": cfg.pv,
        "grid": {"r_min": float(radii[0]), "r_max": float(radii[-1]), "points": int(radii.size)},
        "states": rows,
        "differences": diffs,
    }


def cmd_shift(cfg: RunConfig, threads: int = 1) -> int:
    emit(dumps(shift_report(cfg, threads)), cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, threads: int = 1) -> int:
    masses = cfg.pv if cfg.pv is not None else DEFAULT_PV
    report = run_verification(masses, cfg.inject_fault)
    if cfg.format == "json":
        emit(report.to_json(), cfg)
    else:
        status = "PASS" if report.passed else "FAIL"
        emit("\n".join(report.lines() + [f"{status} overall ({len(report.failures)} failures)"]) + "\n", cfg)
    return EXIT_OK if report.passed else EXIT_VERIFY


def sweep_deviation(state, M: float, ratio: float, Z: float = 1.0, rel_tol: float = 1e-11) -> float:
    """|<sum_{i>0} C_i V_U(m_i)>| for the set (1, M, ratio M): the level-shift
    difference between the log-subtracted finite-mass potential and the
    renormalized Uehling potential."""
    pv = make_pv_set(1.0, M, ratio * M)
    aux = list(pv.terms())[1:]
    total = sum(C * state.expectation(lambda r, m=m: uehling_point_fast(r, m, Z), rel_tol) for C, m in aux)
    return abs(total)


def sweep_report(cfg: RunConfig) -> dict:
    model = NuclearModel.point(cfg.Z)
    n, q = cfg.states[0]
    state = make_state(cfg, model, n, q)
    rows = []
    for M in cfg.sweep:
        dev = sweep_deviation(state, M, cfg.sweep_ratio, cfg.Z)
        pv = make_pv_set(1.0, M, cfg.sweep_ratio * M)
        # pointwise deviation at r = 1; exponentially small in M, kept for reference
        point = sum(C * float(uehling_point(1.0, m, cfg.Z)) for C, m in list(pv.terms())[1:])
        rows.append({"m_aux": M, "deviation": dev, "pointwise_r1": point})
    x = np.log([r["m_aux"] for r in rows])
    y = np.log([r["deviation"] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    return {"state": state.label, "sweep_ratio": cfg.sweep_ratio, "rows": rows, "slope": slope}


def cmd_pv_sweep(cfg: RunConfig, threads: int = 1) -> int:
    rep = sweep_report(cfg)
    if cfg.format == "json":
        emit(dumps(rep), cfg)
    else:
        lines = ["m_aux,deviation"] + [f"{r['m_aux']:.16e},{r['deviation']:.16e}" for r in rep["rows"]]
        emit("\n".join(lines) + "\n", cfg)
        print(f"slope={rep['slope']:.6f}", file=sys.stderr)
    return EXIT_OK


def compare_report(cfg: RunConfig) -> dict:
    if cfg.model != "point":
        raise CommandError(EXIT_CONFIG, "config", f"compare-ms supports only the point model, got {cfg.model}")
    Z = cfg.Z if cfg.Z > 0 else 1.0
    r = radial_grid(cfg, COMPARE_GRID)
    ms = ms_potential(r, Z=Z)
    ref = uehling_point(r, Z=Z)
    disc = float(np.max(np.abs(ms - ref) / np.abs(ref)))
    pv = make_pv_set(*(cfg.pv if cfg.pv is not None else DEFAULT_PV))
    routes = log_coefficient_routes(pv, Z)
    return {
        "grid": {"r_min": float(r[0]), "r_max": float(r[-1]), "points": int(r.size)},
        "max_relative_discrepancy": disc,
        "pv": pv.to_dict(),
        "log_coefficient": {
            "momentum_delta": routes.momentum_delta,
            "momentum_smooth": routes.momentum_smooth,
            "momentum_total": routes.momentum,
            "coordinate": routes.coordinate,
            "relative_difference": routes.discrepancy / abs(routes.coordinate),
        },
    }


def cmd_compare_ms(cfg: RunConfig, threads: int = 1) -> int:
    emit(dumps(compare_report(cfg)), cfg)
    return EXIT_OK


COMMANDS = {
    "uehling": cmd_uehling,
    "shift": cmd_shift,
    "verify": cmd_verify,
    "pv-sweep": cmd_pv_sweep,
    "compare-ms": cmd_compare_ms,
}


# --- argument parsing ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CommandError(EXIT_CONFIG, "config", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vpcs", description="Uehling vacuum polarization in coordinate space.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration; flags override it")
    p.add_argument("--model", help="point, uniform_sphere, gaussian or fermi2")
    p.add_argument("--R", type=float, help="nuclear radius in fm (rms radius for gaussian, c for fermi2)")
    p.add_argument("--fermi-a", dest="fermi_a", type=float, help="Fermi diffuseness in fm")
    p.add_argument("--Z", type=float, help="nuclear charge")
    p.add_argument("--lepton", help="electron or muon")
    p.add_argument("--state", action="append", help="n,l (or n,kappa with --relativistic); repeatable")
    p.add_argument("--relativistic", action="store_true", default=None, help="use Dirac states")
    p.add_argument("--reduced-mass", dest="reduced_mass", choices=["yes", "no"], help="override the reduced-mass default")
    p.add_argument("--pv", help="auxiliary masses m1,m2 in loop-mass units")
    p.add_argument("--sweep", help="auxiliary mass scales M for pv-sweep, e.g. 10,30,100")
    p.add_argument("--sweep-ratio", dest="sweep_ratio", type=float, help="m2/m1 in pv-sweep (default 2)")
    p.add_argument("--grid", help="rmin,rmax,N")
    p.add_argument("--grid-units", dest="grid_units", help="natural (default), fm or bohr")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--inject-fault", dest="inject_fault", help="test mode for verify: c2-sign")
    return p


def config_from_args(args) -> RunConfig:
    over = {
        "command": args.command,
        "model": args.model,
        "R": args.R,
        "fermi_a": args.fermi_a,
        "Z": args.Z,
        "lepton": args.lepton,
        "relativistic": args.relativistic,
        "sweep_ratio": args.sweep_ratio,
        "grid_units": args.grid_units,
        "format": args.format,
        "out": args.out,
        "inject_fault": args.inject_fault,
    }
    if args.state:
        over["states"] = [list(parse_state(s)) for s in args.state]
    if args.reduced_mass is not None:
        over["reduced_mass"] = args.reduced_mass == "yes"
    if args.pv is not None:
        over["pv"] = parse_floats(args.pv, "--pv", (2, 3))
    if args.sweep is not None:
        over["sweep"] = parse_floats(args.sweep, "--sweep")
    if args.grid is not None:
        g = parse_floats(args.grid, "--grid", 3)
        if g[2] != int(g[2]):
            raise ConfigError("--grid N must be an integer")
        over["grid"] = [g[0], g[1], int(g[2])]
    return load_config(args.config, **over)


def _fail(code, kind, message) -> int:
    text = " ".join(str(message).split())
    print(f"vpcs-error code={code} kind={kind} message={text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        threads = thread_count()
        return COMMANDS[cfg.command](cfg, threads)
    except CommandError as exc:
        return _fail(exc.code, exc.kind, exc)
    except (ConfigError, BoundStateError, UnsupportedOperation, RegularizationError) as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except (QuadratureError, SolverError, CoverageError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, "numerical", exc)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, "config", exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
