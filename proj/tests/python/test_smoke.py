import math
import os

import numpy as np
import pytest

import todalab

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
REFERENCE = os.path.join(ROOT, "configs", "reference.ini")

SMALL = """
[grid]
n_r = 96
n_theta = 16
delta_min = 0.002
[solve]
lambda = 0.01
"""


def test_bubble_closed_forms():
    assert todalab.bubble_value(2.0, 1.0, 0.0) == pytest.approx(math.log(8.0), rel=1e-14)
    assert todalab.bubble_value(4.0, 0.5, 0.0) == pytest.approx(math.log(512.0), rel=1e-14)
    m = todalab.bubble_mass(2.0, 0.1, 1.0)
    assert m["quadrature"] == pytest.approx(8 * math.pi / 1.01, rel=1e-10)


def test_disk_scales():
    d = todalab.disk_meanfield(6 * math.pi)
    assert d["z0"] == pytest.approx(2 * math.log(2.0))
    d1, d2 = todalab.compute_deltas(1e-4, 6 * math.pi, d["z0"], d["mass_integral"])
    assert d1 == pytest.approx(math.sqrt(2e-4) / 8, rel=1e-12)
    assert d2 == pytest.approx(2 ** -1.25 * 0.1, rel=1e-12)


def test_change_of_variables():
    v1, v2 = todalab.change_of_variables(np.array([1.0, 2.0]), np.array([1.0, -1.0]))
    np.testing.assert_allclose(v1, [1.0, 1.0])
    np.testing.assert_allclose(v2, [1.0, 0.0], atol=1e-15)


def test_config_round_trip():
    ref = todalab.Config.from_file(REFERENCE)
    assert ref.rho == pytest.approx(6 * math.pi)
    assert len(ref.lambdas()) == 8
    assert ref.hash() == todalab.Config.from_file(REFERENCE).hash()
    with pytest.raises(todalab.ConfigError):
        todalab.Config.from_string("[model]\nrho_over_pi = 9\n")
    with pytest.raises(todalab.TodaError):
        todalab.Config.from_string("[model]\nbogus = 1\n")


def test_solve_small_grid():
    cfg = todalab.Config.from_string(SMALL)
    mf = todalab.meanfield(cfg)
    assert mf["z_at_origin"] == pytest.approx(2 * math.log(2.0), rel=1e-2)
    rep = todalab.solve(cfg)
    assert rep["converged"]
    assert rep["phi_norm"] < rep["bound"]


def test_resolution_error_is_typed():
    cfg = todalab.Config.from_string(SMALL + "\n")
    cfg.solve_lambda = 1e-12
    with pytest.raises(todalab.ResolutionError):
        todalab.solve(cfg)


def test_quick_criterion():
    r = todalab.criterion(todalab.Config.from_file(REFERENCE), 4)
    assert r["pass"]
    assert r["id"] == 4
