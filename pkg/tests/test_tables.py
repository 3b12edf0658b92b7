import json
import math

import numpy as np
import pytest

from vpcs.tables import PotentialTable, log_grid, tabulate


def _coulombish():
    r = log_grid(1e-3, 10, 200)
    return PotentialTable(r, -np.exp(-r) / r)


def test_interpolation_accuracy():
    t = _coulombish()
    r = np.geomspace(2e-3, 9, 57)
    np.testing.assert_allclose(t(r), -np.exp(-r) / r, rtol=1e-6)


def test_extrapolation():
    t = _coulombish()
    # 1/r continuation below the grid, exponential beyond it
    assert t(1e-4) == pytest.approx(-np.exp(-1e-4) / 1e-4, rel=2e-3)
    assert t(12.0) == pytest.approx(-np.exp(-12.0) / 12.0, rel=0.05)


def test_mixed_sign_falls_back():
    r = np.linspace(0.1, 3, 40)
    t = PotentialTable(r, np.sin(3 * r))
    assert t.interpolation == "cubic_log_rv"
    assert t(1.234) == pytest.approx(math.sin(3.702), abs=1e-4)
    z = PotentialTable(r, np.zeros_like(r))
    assert z(1.0) == 0.0


def test_validation():
    with pytest.raises(ValueError):
        PotentialTable([1.0, 0.5], [1.0, 1.0])
    with pytest.raises(ValueError):
        PotentialTable([1.0], [1.0])
    with pytest.raises(ValueError):
        PotentialTable([1.0, 2.0], [1.0, np.nan])
    with pytest.raises(ValueError):
        log_grid(1.0, 0.5, 10)


def test_csv_round_trip():
    t = _coulombish()
    text = t.to_csv()
    assert text.startswith("r,V\n")
    assert "\r" not in text
    back = PotentialTable.from_csv(text)
    np.testing.assert_array_equal(back.radii, t.radii)
    np.testing.assert_array_equal(back.values, t.values)
    with pytest.raises(ValueError):
        PotentialTable.from_csv("x,y\n1,2\n")


def test_json_round_trip(tmp_path):
    t = _coulombish()
    t.metadata["model"] = "test"
    d = json.loads(t.to_json())
    assert d["units"]["r"] and d["units"]["V"]
    path = tmp_path / "t.json"
    t.write(path, "json")
    back = PotentialTable.read(path)
    np.testing.assert_array_equal(back.values, t.values)
    assert back.metadata == {"model": "test"}


def test_write_is_deterministic(tmp_path):
    t = _coulombish()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    t.write(a)
    t.write(b)
    assert a.read_bytes() == b.read_bytes()


def test_arithmetic():
    t = _coulombish()
    s = t + t.scaled(2.0)
    np.testing.assert_allclose(s.values, 3 * t.values, rtol=1e-15)
    with pytest.raises(ValueError):
        t + PotentialTable([1.0, 2.0], [1.0, 2.0])


def test_tabulate_order_independent_of_threads():
    r = log_grid(0.1, 2, 33)
    f = lambda x: -1.0 / x
    a = tabulate(f, r, 1)
    b = tabulate(f, r, 8, tag=1)
    np.testing.assert_array_equal(a.values, b.values)
    assert b.metadata == {"tag": 1}
