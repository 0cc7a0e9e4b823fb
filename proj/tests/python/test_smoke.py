import math
import os

import pytest

import epirep

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def test_registry():
    assert "sqrt_example" in epirep.model_names()
    assert "quadratic" in epirep.terminal_names()
    assert "invariance" in epirep.subcommands()


def test_conjugate_matches_closed_form():
    for v in (-1.5, -0.3, 0.0, 0.7, 1.9):
        got = epirep.conjugate("sqrt_example", 0.0, 2.0, v)
        ref = epirep.closed_form_conjugate("sqrt_example", 0.0, 2.0, v)
        assert abs(got - ref) <= 1e-6
    assert math.isinf(epirep.conjugate("sqrt_example", 0.0, 1.0, 1.5))


def test_parameterize_fixes_epigraph_points():
    e = epirep.parameterize("quadratic", 0.0, 1.0, 0.5, 0.125 + 1.0)
    assert e["fixed_point"]
    assert e["f"] == pytest.approx(0.5)
    below = epirep.parameterize("quadratic", 0.0, 1.0, 0.5, -1.0)
    assert below["l"] >= 0.5 * below["f"] ** 2 - 1e-9


def test_steiner_point_of_a_square():
    s = epirep.steiner_point([(0, 0), (2, 0), (2, 2), (0, 2)])
    assert s == pytest.approx((1.0, 1.0), abs=1e-9)


def test_value_on_the_quadratic_instance():
    assert epirep.value("quadratic", "quadratic", 0.0, 1.0) == pytest.approx(0.25, abs=5e-3)
    assert epirep.value("quadratic", "quadratic", 0.0, 1.0, method="fd") == pytest.approx(0.25, abs=5e-2)


def test_errors_are_typed():
    with pytest.raises(epirep.ConfigError):
        epirep.hamiltonian("no_such_model", 0.0, 0.0, 0.0)
    with pytest.raises(epirep.ConfigError):
        epirep.value("quadratic", "quadratic", 0.0, 1.0, method="guess")


def test_run_is_deterministic(tmp_path):
    cfg = os.path.join(DATA, "sqrt_table.ini")
    a, b = tmp_path / "a", tmp_path / "b"
    code, audits = epirep.run("conjugate-table", cfg, out=str(a))
    assert code == 0
    assert all(r["pass"] for r in audits)
    epirep.run("conjugate-table", cfg, out=str(b))
    for name in ("conjugate-table.csv", "conjugate-table.json", "config.ini"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert len(epirep.config_hash(cfg)) == 16
