"""Run configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

from .constants import LEPTON_MASSES
from .nuclear import KINDS

COMMANDS = ("uehling", "shift", "verify", "pv-sweep", "compare-ms")
FORMATS = ("csv", "json")
GRID_UNITS = ("natural", "fm", "bohr")
TOLERANCE_KEYS = ("potential_rel_tol", "shift_rel_tol")
DEFAULT_TOLERANCES = {"potential_rel_tol": 1e-12, "shift_rel_tol": 1e-11}


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (exit status 2)."""


def _pair(text, what):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{what} must be given as 'a,b', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"{what} needs integers, got {text!r}") from None


def parse_floats(text, what, count=None):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = [p for p in str(text).split(",") if p.strip()]
    try:
        vals = [float(p) for p in parts]
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) not in (count if isinstance(count, tuple) else (count,)):
        raise ConfigError(f"{what} needs {count} values, got {len(vals)}")
    return vals


def parse_state(text):
    """'n,l' (or 'n,kappa' for relativistic runs) as a pair of ints."""
    return _pair(text, "state")


@dataclass
class RunConfig:
    """Everything a command needs.  Lengths given in fm are converted only
    when used, so the canonical form keeps what the user wrote."""

    command: str = "uehling"
    model: str = "point"
    R: float = 0.0
    fermi_a: float = 0.0
    Z: float = 1.0
    lepton: str = "electron"
    states: list = field(default_factory=lambda: [[1, 0]])
    relativistic: bool = False
    reduced_mass: bool | None = None
    pv: list | None = None
    sweep: list | None = None
    sweep_ratio: float = 2.0
    grid: list | None = None
    grid_units: str = "natural"
    format: str = "csv"
    out: str | None = None
    inject_fault: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.states = [list(s) for s in self.states]
        if self.pv is not None:
            self.pv = [float(m) for m in self.pv]
        if self.sweep is not None:
            self.sweep = [float(m) for m in self.sweep]
        if self.grid is not None:
            self.grid = [float(self.grid[0]), float(self.grid[1]), int(self.grid[2])]
        self.tolerances = {**DEFAULT_TOLERANCES, **(self.tolerances or {})}
        self.validate()

    # --- checks -------------------------------------------------------------

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.model not in KINDS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {KINDS}")
        if self.model != "point" and not self.R > 0:
            raise ConfigError(f"model {self.model} needs --R (fm) > 0")
        if self.model == "fermi2" and not self.fermi_a > 0:
            raise ConfigError("model fermi2 needs --fermi-a (fm) > 0")
        if not self.Z >= 0:
            raise ConfigError("Z must be non-negative")
        if self.lepton not in LEPTON_MASSES:
            raise ConfigError(f"unknown lepton {self.lepton!r}; expected one of {tuple(LEPTON_MASSES)}")
        if not self.states:
            raise ConfigError("at least one state is needed")
        for n, q in self.states:
            if n < 1:
                raise ConfigError(f"state n={n} must be >= 1")
            if self.relativistic:
                if q == 0 or abs(q) > n or (abs(q) == n and q > 0):
                    raise ConfigError(f"state {n},{q} is not a valid n,kappa pair")
            elif not 0 <= q < n:
                raise ConfigError(f"state {n},{q} is not a valid n,l pair (need 0 <= l < n)")
        if self.pv is not None:
            if len(self.pv) == 2:
                self.pv = [1.0, *self.pv]
            if len(self.pv) != 3 or not 0 < self.pv[0] < self.pv[1] < self.pv[2]:
                raise ConfigError(f"--pv needs masses 1 < m1 < m2 (loop-mass units), got {self.pv}")
        if self.command == "pv-sweep":
            if not self.sweep:
                raise ConfigError("pv-sweep needs auxiliary mass scales, e.g. --sweep 10,30,100")
            if len(self.sweep) < 2 or any(m <= 1 for m in self.sweep) or len(set(self.sweep)) != len(self.sweep):
                raise ConfigError("pv-sweep needs at least two distinct mass scales above the loop mass")
            if not self.sweep_ratio > 1:
                raise ConfigError("sweep_ratio must exceed 1")
        if self.grid is not None:
            lo, hi, n = self.grid
            if not (0 < lo < hi) or n < 2:
                raise ConfigError(f"--grid needs 0 < rmin < rmax and N >= 2, got {self.grid}")
        if self.grid_units not in GRID_UNITS:
            raise ConfigError(f"grid units must be one of {GRID_UNITS}")
        if self.format not in FORMATS:
            raise ConfigError(f"--format must be one of {FORMATS}")
        if self.inject_fault not in (None, "c2-sign"):
            raise ConfigError(f"unknown fault {self.inject_fault!r}; only 'c2-sign' exists")
        bad = set(self.tolerances) - set(TOLERANCE_KEYS)
        if bad:
            raise ConfigError(f"unknown tolerance keys {sorted(bad)}; expected {TOLERANCE_KEYS}")
        if any(not float(v) > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        if self.Z == 0 and self.command in ("shift", "pv-sweep"):
            raise ConfigError("bound states need Z > 0")

    # --- derived ---------------------------------------------------------------------

    @property
    def use_reduced_mass(self) -> bool:
        if self.reduced_mass is None:
            return self.lepton == "muon"
        return self.reduced_mass

    @property
    def lepton_mass(self) -> float:
        return LEPTON_MASSES[self.lepton]

    # --- serialization ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"malformed config: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(data)


def load_config(path=None, **overrides) -> RunConfig:
    """Read ``path`` (if any) and apply ``overrides``; overrides win.

    ``None`` overrides are ignored so unset flags leave file values alone.
    """
    data: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        data = RunConfig.from_json(text).to_dict()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


def thread_count(env=None) -> int:
    """Parallelism cap from VPCS_THREADS (default 1)."""
    env = os.environ if env is None else env
    raw = env.get("VPCS_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"VPCS_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"VPCS_THREADS must be a positive integer, got {raw!r}")
    return n
