"""Acceptance suite: one test per criterion, summarized at the end of the run."""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from hamcat.catalog import BUILTIN, GROUPS, R4_SYSTEMS, R6_SYSTEMS, get_system
from hamcat.cli import main
from hamcat.dynamics import drift_report, integrate
from hamcat.expr import const, equal_on_samples, mul
from hamcat.poisson import CanonicalStructure, canonical_bracket, jacobi_defect_bivector
from hamcat.verify import (verify_bivector_jacobi, verify_casimir, verify_closure,
                           verify_darboux, verify_invariance, verify_printed_rhs, verify_system)

from _gen import random_polynomial, random_smooth


def _say(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.mark.criterion(1, "closure of every curated realization")
def test_criterion_1_closure():
    worst = {}
    for spec in BUILTIN:
        res = verify_closure(get_system(spec.id), n_samples=100, tol=1e-9)
        # exact cancellation is expected of polynomial canonical realizations;
        # group Q's are Darboux compositions of degree up to 12 and get 1e-9
        limit = 1e-12 if spec.polynomial and spec.kind == "realization" else 1e-9
        worst[spec.id] = (res.residual, limit)
    bad = {k: v for k, v in worst.items() if v[0] is None or v[0] > v[1]}
    _say(1, not bad, f"{len(worst)} systems, max residual "
                     f"{max(v[0] for v in worst.values() if v[0] is not None):.2e}")
    assert len(worst) == len(R4_SYSTEMS) + len(R6_SYSTEMS) + len(GROUPS) == 41
    assert not bad


@pytest.mark.criterion(2, "printed errata are detected without changing the exit code")
def test_criterion_2_errata(capsys):
    closure = verify_closure(get_system("A4_3/R4", variant="printed"))
    rhs = verify_printed_rhs(get_system("A4_1/R6/1", variant="printed"))
    labels = set(rhs.residuals)
    code = main(["verify", "A4_3/R4", "A4_1/R6/1", "--json"])
    doc = json.loads(capsys.readouterr().out)
    printed = [r for r in doc["reports"] if r["variant"] == "printed"]
    noted = all(any(n.startswith("discrepancy:") for n in r["notes"]) for r in printed)
    ok = (closure.residual >= 1e-2 and rhs.residuals["H=p2^2-2*p1*p2"] > 1e-2
          and code == 0 and noted and len(printed) == 2)
    _say(2, ok, f"closure residual {closure.residual:.3f}, printed rhs residual "
                f"{rhs.residuals.get('H=p2^2-2*p1*p2', float('nan')):.3f}, exit {code}")
    assert "H=p2^2-2*p1*p2" in labels
    assert ok


@pytest.mark.criterion(3, "invariance and Casimir brackets")
def test_criterion_3_invariance():
    worst, casimirs = 0.0, 0
    for spec in BUILTIN:
        s = get_system(spec.id)
        inv = verify_invariance(s)
        assert inv.passed, (spec.id, inv.worst, inv.residual)
        worst = max(worst, inv.residual)
        cas = verify_casimir(s)
        if cas is not None:
            casimirs += 1
            assert cas.passed, (spec.id, cas.worst, cas.residual)
            assert len(cas.residuals) == 4 * sum(h.casimir for h in s.hamiltonians)
            worst = max(worst, cas.residual)
    _say(3, True, f"max residual {worst:.2e}, {casimirs} Casimir Hamiltonians")
    assert casimirs > 0


@pytest.mark.criterion(4, "Darboux coordinates and bivector Jacobi identity")
def test_criterion_4_darboux():
    worst_d, worst_j = 0.0, 0.0
    for spec in GROUPS:
        g = get_system(spec.id)
        d = verify_darboux(g, n_samples=100, tol=1e-9)
        j = verify_bivector_jacobi(g, n_samples=100, tol=1e-9)
        pj = jacobi_defect_bivector(get_system(spec.id, variant="printed").bivector, g.domain, 100)
        assert d.passed, (spec.id, d.worst, d.residual)
        assert j.passed and pj <= 1e-9, spec.id
        assert len(d.residuals) == 6
        worst_d, worst_j = max(worst_d, d.residual), max(worst_j, j.residual, pj)
    _say(4, True, f"7 groups, Darboux residual {worst_d:.2e}, Jacobi defect {worst_j:.2e}")


@pytest.mark.criterion(5, "classification with discrepancy notes")
def test_criterion_5_classification():
    reports = {spec.id: verify_system(get_system(spec.id)) for spec in BUILTIN}
    a = reports["A4_1/R6/1"]
    b = reports["group/A4_2^-1"]
    assert (a.N, a.k, a.class_computed) == (3, 4, "superintegrable")
    assert (b.N, b.k, b.class_computed) == (2, 3, "maximal") and b.class_claimed == "maximal"
    missing = [sid for sid, r in reports.items() if r.class_computed != r.class_claimed
               and not any(n.startswith("class: claimed") for n in r.notes)]
    spurious = [sid for sid, r in reports.items() if r.class_computed == r.class_claimed
                and any(n.startswith("class:") for n in r.notes)]
    mismatched = sum(r.class_computed != r.class_claimed for r in reports.values())
    for sid in ("A4_9/R6/1", "A4_12/R6/1"):
        assert reports[sid].class_computed == "unverified"
    _say(5, not missing and not spurious,
         f"A4_1/R6/1 k=4 N=3, group/A4_2^-1 k=3 N=2, {mismatched} class notes")
    assert not missing and not spurious


def _err(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


@pytest.mark.criterion(6, "invariant drift and rk4 order")
def test_criterion_6_dynamics():
    s = get_system("A4_1/R6/1")
    tr = integrate(s, dt=1e-3, T=10.0, method="rk4")
    funcs = {"H": s.H, **{f"Q{i}": q for i, q in enumerate(s.Q, 1)}}
    drift = drift_report(tr, funcs)
    assert tr.completed and max(drift.values()) <= 1e-10, drift

    group_worst = 0.0
    for spec in GROUPS:
        g = get_system(spec.id)
        t = integrate(g, dt=1e-3, T=10.0)
        watch = {"H": g.H, **dict(zip((*g.core_labels, *g.extra_labels), (*g.core, *g.extra)))}
        d = drift_report(t, watch)
        assert t.completed and max(d.values()) <= 1e-6, (spec.id, d)
        group_worst = max(group_worst, max(d.values()))

    g = get_system("group/A4_3")
    ref = integrate(g, dt=0.1 / 64, T=2.0).final
    ratio = _err(integrate(g, dt=0.1, T=2.0).final, ref) / _err(integrate(g, dt=0.05, T=2.0).final, ref)
    _say(6, 12.8 <= ratio <= 19.2, f"A4_1/R6/1 drift {max(drift.values()):.1e}, "
                                   f"group drift {group_worst:.1e}, rk4 ratio {ratio:.2f}")
    assert 12.8 <= ratio <= 19.2


@pytest.mark.criterion(7, "bracket antisymmetry, Leibniz rule and Jacobi identity")
def test_criterion_7_bracket_properties():
    R = CanonicalStructure(2)
    b = lambda u, v: canonical_bracket(u, v, R)
    zero = const(0.0)
    rng = np.random.default_rng(7)
    for _ in range(200):
        F, G, H = (random_smooth(rng) for _ in range(3))
        assert equal_on_samples(b(F, G) + b(G, F), zero, n=5, tol=1e-12)
        assert equal_on_samples(b(F, mul(G, H)), b(F, G) * H + G * b(F, H), n=5, tol=1e-10)
    for _ in range(200):
        F, G, H = (random_polynomial(rng, depth=3) for _ in range(3))
        assert equal_on_samples(b(F, b(G, H)) + b(G, b(H, F)) + b(H, b(F, G)), zero,
                                n=5, tol=1e-9)
    _say(7, True, "200 random triples per property")


@pytest.mark.criterion(8, "deterministic JSON report within 60 s")
def test_criterion_8_determinism():
    cmd = [sys.executable, "-m", "hamcat", "verify", "--all", "--json", "--seed", "42"]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    elapsed = time.perf_counter() - start
    same = first.stdout == second.stdout and len(first.stdout) > 0
    ok = same and first.returncode == 0 == second.returncode and elapsed <= 60.0
    _say(8, ok, f"{len(first.stdout)} bytes, identical={same}, {elapsed:.1f} s for two runs")
    assert ok
