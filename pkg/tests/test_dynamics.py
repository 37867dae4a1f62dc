import csv
import io
import json

import pytest

from hamcat.catalog import REGISTRY, get_system, load_catalog_file
from hamcat.dynamics import (drift_report, integrate, trajectory_csv, vector_field,
                             velocity_expressions)
from hamcat.expr import ZERO, evaluate, neg, parse


def _user_system(tmp_path, **fields):
    base = {"id": "user/sys", "kind": "realization", "algebra": "A4_1", "N": 1,
            "Q": ["x1", "p1", "x1", "p1"], "core": ["H"]}
    base.update(fields)
    path = tmp_path / "user.json"
    path.write_text(json.dumps({"systems": [base]}), encoding="utf-8")
    reg = REGISTRY.copy()
    load_catalog_file(path, reg)
    return reg.get_system(base["id"])


def _max_err(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def test_canonical_field_signs():
    s = get_system("A4_1/R6/1")
    z = (0.1, 0.2, 0.3, 0.9, 0.2, -1.1)
    # H = p2^2 - 2 p1 p3: x' = dH/dp, p' = -dH/dx = 0
    assert vector_field(s, z) == pytest.approx((2.2, 0.4, -1.8, 0.0, 0.0, 0.0))


def test_group_field_is_bivector_column():
    g = get_system("group/A4_9^1")
    z = g.start_point()
    pt = dict(zip(g.coordinates, z))
    # H = -x3, so x_mu' = -P^{mu 3}
    expected = [-evaluate(g.bivector[m, 2], pt) for m in range(4)]
    assert vector_field(g, z) == pytest.approx(expected, abs=1e-15)


def test_zero_hamiltonian_is_stationary():
    g = get_system("group/A4_3")
    tr = integrate(g, dt=0.01, T=1.0, H=ZERO)
    assert tr.completed and all(st == tr.states[0] for st in tr.states)


def test_step_count_and_times():
    tr = integrate(get_system("A4_1/R4"), dt=0.1, T=1.0)
    assert len(tr.states) == 11
    assert tr.times[-1] == pytest.approx(1.0)
    tr = integrate(get_system("A4_1/R4"), dt=0.3, T=1.0)
    assert len(tr.states) == 4


def test_a412_group_conserves_invariants():
    g = get_system("group/A4_12")
    tr = integrate(g, dt=1e-3, T=10.0)
    assert tr.completed
    drift = drift_report(tr, {"H": g.H, "Q2": g.Q[1]})
    assert drift["Q2"] <= 1e-6 and drift["H"] <= 1e-6


@pytest.mark.parametrize("method", ["rk4", "implicit_midpoint"])
def test_casimirs_of_degenerate_bivector_are_frozen(tmp_path, method):
    g = _user_system(tmp_path, kind="group", H="x1^2 + x2^2*x3 + sin(x4)*x1", Q=["x1"] * 4,
                     bivector=[[1, 2, "x3"]])
    tr = integrate(g, z0=(0.3, -0.2, 0.7, 1.1), dt=0.01, T=2.0, method=method)
    assert tr.completed
    drift = drift_report(tr, {"x3": parse("x3"), "x4": parse("x4"), "H": g.H})
    assert drift["x3"] == 0.0 and drift["x4"] == 0.0
    assert drift["H"] <= 1e-6


def test_rk4_is_fourth_order(tmp_path):
    s = _user_system(tmp_path, H=["p1^2/2 - cos(x1)"])
    z0 = (1.0, 0.0)
    ref = integrate(s, z0, dt=0.1 / 64, T=2.0).final
    e1 = _max_err(integrate(s, z0, dt=0.1, T=2.0).final, ref)
    e2 = _max_err(integrate(s, z0, dt=0.05, T=2.0).final, ref)
    assert 12.0 <= e1 / e2 <= 20.0


def test_implicit_midpoint_is_second_order_and_reversible(tmp_path):
    s = _user_system(tmp_path, H=["p1^2/2 - cos(x1)"])
    z0 = (1.0, 0.3)
    ref = integrate(s, z0, dt=0.1 / 64, T=2.0, method="rk4").final
    e1 = _max_err(integrate(s, z0, dt=0.1, T=2.0, method="implicit_midpoint").final, ref)
    e2 = _max_err(integrate(s, z0, dt=0.05, T=2.0, method="implicit_midpoint").final, ref)
    assert 3.0 <= e1 / e2 <= 5.0
    fwd = integrate(s, z0, dt=0.05, T=2.0, method="implicit_midpoint")
    back = integrate(s, fwd.final, dt=0.05, T=2.0, method="implicit_midpoint", H=neg(s.H))
    assert _max_err(back.final, z0) <= 1e-10


def test_midpoint_nonconvergence_is_reported(tmp_path):
    s = _user_system(tmp_path, H=["p1^2/2 - cos(x1)"])
    tr = integrate(s, (1.0, 0.3), dt=3.0, T=9.0, method="implicit_midpoint")
    assert not tr.completed
    assert tr.exit_time == 0.0
    assert "did not converge in 50 iterations" in tr.error


def test_overflow_stops_integration(tmp_path):
    s = _user_system(tmp_path, H=["p1^4 + x1^4"])
    tr = integrate(s, (2.0, 2.0), dt=1.0, T=5.0, method="implicit_midpoint")
    assert not tr.completed and "overflow" in tr.error


def test_domain_exit_returns_partial_trajectory(tmp_path):
    s = _user_system(tmp_path, N=2, Q=["x1", "p1", "x2", "p2"], H=["-p1 + p2*ln(x1)"])
    tr = integrate(s, (0.35, 0.0, 0.0, 0.0), dt=0.1, T=1.0)
    assert not tr.completed
    assert tr.exit_time == pytest.approx(0.3)
    assert len(tr.states) == 4
    assert "ln" in tr.error


def test_start_outside_domain(tmp_path):
    s = _user_system(tmp_path, H=["p1*ln(x1)"])
    tr = integrate(s, (-1.0, 0.0), dt=0.1, T=1.0)
    assert tr.exit_time == 0.0 and tr.states == [(-1.0, 0.0)]


@pytest.mark.parametrize("kwargs, fragment", [
    ({"method": "euler"}, "unknown method"),
    ({"dt": 0.0}, "dt must be positive"),
    ({"dt": 0.5, "T": 0.1}, "at least dt"),
    ({"z0": (1.0,)}, "expected 4 coordinates"),
])
def test_bad_arguments(kwargs, fragment):
    with pytest.raises(ValueError, match=fragment):
        integrate(get_system("A4_1/R4"), **kwargs)


def test_csv_round_trips_exactly():
    tr = integrate(get_system("group/A4_7"), dt=0.01, T=0.05)
    rows = list(csv.reader(io.StringIO(trajectory_csv(tr))))
    assert rows[0] == ["t", "x1", "x2", "x3", "x4"]
    assert len(rows) == len(tr.states) + 1
    for row, t, z in zip(rows[1:], tr.times, tr.states):
        assert float(row[0]) == t
        assert tuple(float(c) for c in row[1:]) == z


def test_velocity_expressions_length():
    assert len(velocity_expressions(get_system("A4_1/R6/2"))) == 6
    assert len(velocity_expressions(get_system("group/A4_1"))) == 4
