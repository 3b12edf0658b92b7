"""Tabulated radial potentials and their serialization."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import COMPTON_FM

INTERPOLATIONS = ("cubic_log_log", "cubic_log_rv")
UNITS = {"r": "hbar/(m_e c)", "V": "m_e c^2", "r_unit_fm": COMPTON_FM}


@dataclass
class PotentialTable:
    """V(r) on a strictly increasing radial grid.

    ``cubic_log_log`` splines ln|V| against ln r and needs values of one
    sign; ``cubic_log_rv`` splines r V against ln r and accepts any values.
    Below the first radius the local power law is continued, beyond
    the last radius ln|V| is continued linearly in r (exponential decay).
    """

    radii: np.ndarray
    values: np.ndarray
    interpolation: str = "cubic_log_log"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.ndim != 1 or self.radii.shape != self.values.shape:
            raise ValueError("radii and values must be one-dimensional and of equal length")
        if self.radii.size < 2:
            raise ValueError("a table needs at least two points")
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("table values must be finite")
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        if self.interpolation == "cubic_log_log" and not self._single_signed():
            self.interpolation = "cubic_log_rv"
        self._build()

    def _single_signed(self):
        v = self.values
        return bool(np.all(v < 0) or np.all(v > 0))

    def _build(self):
        lr = np.log(self.radii)
        if self.interpolation == "cubic_log_log":
            self._sign = float(np.sign(self.values[0]))
            self._spline = CubicSpline(lr, np.log(np.abs(self.values)))
        else:
            self._sign = 1.0
            self._spline = CubicSpline(lr, self.radii * self.values)

    @property
    def r_min(self):
        return float(self.radii[0])

    @property
    def r_max(self):
        return float(self.radii[-1])

    def __len__(self):
        return self.radii.size

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lr = np.log(r)
        inside = self._spline(np.clip(lr, np.log(self.r_min), np.log(self.r_max)))
        if self.interpolation == "cubic_log_log":
            out = self._sign * np.exp(inside)
            # power law below, exponential in r above
            s0 = float(self._spline(math.log(self.r_min), 1))
            low = self._sign * np.abs(self.values[0]) * (r / self.r_min) ** s0
            k = (math.log(abs(self.values[-1])) - math.log(abs(self.values[-2]))) / (self.radii[-1] - self.radii[-2])
            high = self._sign * np.abs(self.values[-1]) * np.exp(k * (r - self.r_max))
        else:
            out = inside / r
            low = self.values[0] * self.r_min / r
            k = (self.values[-1] * self.r_max - self.values[-2] * self.radii[-2]) / (self.radii[-1] - self.radii[-2])
            high = (self.values[-1] * self.r_max + k * (r - self.r_max)) / r
            high = np.where(np.sign(high) == np.sign(self.values[-1]), high, 0.0)
        out = np.where(r < self.r_min, low, np.where(r > self.r_max, high, out))
        return out if out.ndim else float(out)

    # arithmetic -------------------------------------------------------------

    def scaled(self, factor):
        return PotentialTable(self.radii, factor * self.values, self.interpolation, dict(self.metadata))

    def __add__(self, other):
        if not np.array_equal(self.radii, other.radii):
            raise ValueError("tables must share their radial grid")
        return PotentialTable(self.radii, self.values + other.values, "cubic_log_log", dict(self.metadata))

    # serialization ------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write("r,V\n")
        for r, v in zip(self.radii, self.values):
            buf.write(f"{r:.16e},{v:.16e}\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "units": dict(UNITS),
            "interpolation": self.interpolation,
            "metadata": self.metadata,
            "r": [float(x) for x in self.radii],
            "V": [float(x) for x in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt="csv"):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)

    @classmethod
    def from_csv(cls, text: str, **kw) -> "PotentialTable":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "r,V":
            raise ValueError("CSV potential table must start with the header 'r,V'")
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        return cls(data[:, 0], data[:, 1], **kw)

    @classmethod
    def from_json(cls, text: str) -> "PotentialTable":
        d = json.loads(text)
        return cls(d["r"], d["V"], d.get("interpolation", "cubic_log_log"), d.get("metadata", {}))

    @classmethod
    def read(cls, path) -> "PotentialTable":
        text = Path(path).read_text(encoding="utf-8")
        if str(path).endswith(".json"):
            return cls.from_json(text)
        return cls.from_csv(text)


def log_grid(r_min: float, r_max: float, points: int) -> np.ndarray:
    if not 0 < r_min < r_max:
        raise ValueError("grid needs 0 < r_min < r_max")
    if points < 2:
        raise ValueError("grid needs at least two points")
    return np.geomspace(r_min, r_max, points)


def tabulate(fn, radii, threads: int = 1, **metadata) -> PotentialTable:
    """Evaluate the scalar function ``fn`` on ``radii``, in parallel if asked.

    Results are assembled in grid order, so the table does not depend on
    the thread count.
    """
    radii = np.asarray(radii, dtype=float)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(fn, radii))
    else:
        values = [fn(r) for r in radii]
    return PotentialTable(radii, np.array(values, dtype=float), metadata=metadata)
