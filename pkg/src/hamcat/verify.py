"""Verification engine: closure, invariance, involution, rank, Darboux checks
and the integrability classification built from them.

Every check compares expressions at seeded random points.  The residual
of a comparison is ``|lhs-rhs| / (1+max(|lhs|,|rhs|))`` and a check passes
iff its worst residual is at most the tolerance.  Points come from a
generator keyed on ``system:variant:check`` so reports are reproducible
and raising ``n_samples`` only appends points.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .catalog import GroupSystem, RealizationSystem
from .expr import (ZERO, DomainError, Expression, ExprError, SamplingDomain, add,
                   const, differentiate, make_rng, mul, sample_values)
from .poisson import bivector_bracket, canonical_bracket, jacobi_sums

__all__ = [
    "CheckResult", "VerificationReport", "bracket", "verify_closure", "verify_invariance",
    "verify_casimir", "verify_involution_core", "verify_darboux", "verify_bivector_jacobi",
    "verify_printed_rhs", "independence_rank", "classify", "verify_system",
    "reports_to_json", "reports_to_text",
]

System = RealizationSystem | GroupSystem
RANK_THRESHOLD = 1e-8


@dataclass
class CheckResult:
    name: str
    residual: float | None
    tol: float
    samples: int
    seed: int
    passed: bool
    worst: str = ""
    point: dict[str, float] | None = None
    error: str = ""
    residuals: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"name": self.name, "residual": self.residual, "tol": self.tol,
             "samples": self.samples, "seed": self.seed, "pass": self.passed}
        if self.worst:
            d["worst"] = self.worst
        if self.point is not None:
            d["point"] = self.point
        if self.error:
            d["error"] = self.error
        return d


@dataclass
class VerificationReport:
    system: str
    variant: str
    params: dict[str, float]
    N: int
    checks: list[CheckResult]
    k: int
    core_size: int
    class_computed: str
    class_claimed: str
    notes: list[str]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "system": self.system, "variant": self.variant, "params": self.params,
            "N": self.N, "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed, "k": self.k, "core_size": self.core_size,
            "class_computed": self.class_computed, "class_claimed": self.class_claimed,
            "notes": self.notes,
        }


def bracket(F: Expression, G: Expression, sys: System) -> Expression:
    if isinstance(sys, GroupSystem):
        return bivector_bracket(F, G, sys.bivector)
    return canonical_bracket(F, G, sys.structure)


def _key(sys: System, check: str) -> str:
    return f"{sys.id}:{sys.variant}:{check}"


def _compare(name: str, sys: System, pairs: Sequence[tuple[str, Expression, Expression]],
             n_samples: int, tol: float, seed: int,
             domain: SamplingDomain | None = None, absolute: bool = False) -> CheckResult:
    """Worst normalized residual over all labelled ``lhs == rhs`` pairs."""
    if not pairs:
        return CheckResult(name, 0.0, tol, 0, seed, True)
    exprs = [e for _, lhs, rhs in pairs for e in (lhs, rhs)]
    rng = make_rng(seed, _key(sys, name))
    per = {label: 0.0 for label, _, _ in pairs}
    worst, worst_label, worst_pt = -1.0, "", None
    try:
        for point, values in sample_values(exprs, domain or sys.domain, n_samples, rng=rng,
                                           extra_variables=sys.coordinates):
            for idx, (label, _, _) in enumerate(pairs):
                a, b = values[2 * idx], values[2 * idx + 1]
                r = abs(a - b) if absolute else abs(a - b) / (1.0 + max(abs(a), abs(b)))
                if r != r:
                    r = float("inf")
                if r > per[label]:
                    per[label] = r
                if r > worst:
                    worst, worst_label, worst_pt = r, label, point
    except DomainError as err:
        return CheckResult(name, None, tol, n_samples, seed, False, error=str(err),
                           residuals=per)
    return CheckResult(name, float(worst), tol, n_samples, seed, bool(worst <= tol),
                       worst_label, dict(worst_pt), residuals=per)


def _structure_combo(sys: System, i: int, j: int) -> Expression:
    terms = []
    for k in range(1, 5):
        f = sys.algebra.f(i, j, k)
        if f != 0.0:
            terms.append(mul(const(f), sys.Q[k - 1]))
    return add(*terms) if terms else ZERO


def verify_closure(sys: System, n_samples: int = 100, tol: float = 1e-9,
                   seed: int = 42) -> CheckResult:
    pairs = []
    for i in range(1, 5):
        for j in range(i + 1, 5):
            lhs = bracket(sys.Q[i - 1], sys.Q[j - 1], sys)
            pairs.append((f"{{Q{i},Q{j}}}", lhs, _structure_combo(sys, i, j)))
    return _compare("closure", sys, pairs, n_samples, tol, seed)


def _ham_label(sys: System, idx: int) -> str:
    return "H" if len(sys.hamiltonians) == 1 else f"H{idx + 1}"


def verify_invariance(sys: System, n_samples: int = 100, tol: float = 1e-9,
                      seed: int = 42) -> CheckResult:
    """``{H, I}`` for every listed invariant and every stored Hamiltonian."""
    pairs = []
    labels = (*sys.core_labels, *sys.extra_labels)
    funcs = (*sys.core, *sys.extra)
    for h_idx, h in enumerate(sys.hamiltonians):
        hl = _ham_label(sys, h_idx)
        for label, inv in zip(labels, funcs):
            pairs.append((f"{{{hl},{label}}}", bracket(h.expr, inv, sys), ZERO))
    return _compare("invariance", sys, pairs, n_samples, tol, seed)


def verify_casimir(sys: System, n_samples: int = 100, tol: float = 1e-9,
                   seed: int = 42) -> CheckResult | None:
    """``{H, Q_i}`` for all i, for Hamiltonians declared to be Casimirs."""
    pairs = []
    for h_idx, h in enumerate(sys.hamiltonians):
        if not h.casimir:
            continue
        hl = _ham_label(sys, h_idx)
        for i, q in enumerate(sys.Q, 1):
            pairs.append((f"{{{hl},Q{i}}}", bracket(h.expr, q, sys), ZERO))
    if not pairs:
        return None
    return _compare("casimir", sys, pairs, n_samples, tol, seed)


def verify_involution_core(sys: System, n_samples: int = 100, tol: float = 1e-9,
                           seed: int = 42, core: Sequence[Expression] | None = None,
                           labels: Sequence[str] | None = None) -> CheckResult:
    core = sys.core if core is None else tuple(core)
    labels = labels or (sys.core_labels if core is sys.core else
                        tuple(f"I{i}" for i in range(1, len(core) + 1)))
    pairs = []
    for a in range(len(core)):
        for b in range(a + 1, len(core)):
            pairs.append((f"{{{labels[a]},{labels[b]}}}", bracket(core[a], core[b], sys), ZERO))
    return _compare("involution_core", sys, pairs, n_samples, tol, seed)


def verify_darboux(sys: GroupSystem, n_samples: int = 100, tol: float = 1e-9,
                   seed: int = 42) -> CheckResult:
    declared = {tuple(sorted(p)) for p in sys.pairing}
    pairs = []
    y = sys.darboux
    for i in range(1, len(y) + 1):
        for j in range(i + 1, len(y) + 1):
            expected = const(1.0) if (i, j) in declared else ZERO
            pairs.append((f"{{y{i},y{j}}}", bivector_bracket(y[i - 1], y[j - 1], sys.bivector),
                          expected))
    return _compare("darboux", sys, pairs, n_samples, tol, seed)


def verify_bivector_jacobi(sys: GroupSystem, n_samples: int = 100, tol: float = 1e-9,
                           seed: int = 42) -> CheckResult:
    """Largest absolute cyclic Jacobi sum of the bivector."""
    pairs = [(f"J{mu + 1}{nu + 1}{r + 1}", s, ZERO)
             for (mu, nu, r), s in jacobi_sums(sys.bivector).items()]
    return _compare("bivector_jacobi", sys, pairs, n_samples, tol, seed, absolute=True)


def verify_printed_rhs(sys: System, n_samples: int = 100, tol: float = 1e-9,
                       seed: int = 42) -> CheckResult | None:
    """Printed right-hand sides against the substituted Hamiltonians."""
    pairs = []
    for h_idx, h in enumerate(sys.hamiltonians):
        for r_idx, (text, rhs) in enumerate(h.rhs):
            label = f"{_ham_label(sys, h_idx)}={text}"
            pairs.append((label, h.expr, rhs))
    if not pairs:
        return None
    return _compare("printed_rhs", sys, pairs, n_samples, tol, seed)


def independence_rank(funcs: Sequence[Expression], variables: Sequence[str],
                      n_samples: int = 100, domain: SamplingDomain | None = None,
                      seed: int = 42, key: str = "rank") -> int:
    """Maximum numerical rank of the Jacobian ``d funcs / d variables``.

    Singular values below ``1e-8 * sigma_max`` count as zero.
    """
    funcs = list(funcs)
    if not funcs:
        return 0
    grads = [differentiate(f, v) for f in funcs for v in variables]
    rng = make_rng(seed, key)
    best = 0
    m, n = len(funcs), len(variables)
    for _, values in sample_values(grads, domain, n_samples, rng=rng,
                                   extra_variables=variables):
        J = np.asarray(values, dtype=float).reshape(m, n)
        s = np.linalg.svd(J, compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            continue
        best = max(best, int(np.sum(s > RANK_THRESHOLD * s[0])))
        if best == min(m, n):
            break
    return best


def classify(N: int, k: int, core_size: int) -> str:
    if core_size < N or k < N:
        return "unverified"
    if k == 2 * N - 1 and k >= N + 1:
        return "maximal"
    if k >= N + 1:
        return "superintegrable"
    return "integrable"


def _pool(sys: System, n_samples: int, tol: float, seed: int) -> list[Expression]:
    """H plus every Q and listed invariant commuting with H."""
    H = sys.H
    candidates = [(f"Q{i}", q) for i, q in enumerate(sys.Q, 1)]
    candidates += list(zip((*sys.core_labels, *sys.extra_labels), (*sys.core, *sys.extra)))
    pairs = [(label, bracket(H, f, sys), ZERO) for label, f in candidates]
    res = _compare("pool", sys, pairs, n_samples, tol, seed)
    if res.residual is None:
        return [H]
    return [H] + [f for label, f in candidates if res.residuals[label] <= tol]


def verify_system(sys: System, n_samples: int = 100, tol: float = 1e-9,
                  seed: int = 42) -> VerificationReport:
    checks = [verify_closure(sys, n_samples, tol, seed),
              verify_invariance(sys, n_samples, tol, seed)]
    cas = verify_casimir(sys, n_samples, tol, seed)
    if cas is not None:
        checks.append(cas)
    inv = verify_involution_core(sys, n_samples, tol, seed)
    checks.append(inv)
    if isinstance(sys, GroupSystem):
        checks.append(verify_darboux(sys, n_samples, tol, seed))
        checks.append(verify_bivector_jacobi(sys, n_samples, tol, seed))
    rhs = verify_printed_rhs(sys, n_samples, tol, seed)
    if rhs is not None:
        checks.append(rhs)

    coords = sys.coordinates
    try:
        pool = _pool(sys, n_samples, tol, seed)
        k = independence_rank(pool, coords, n_samples, sys.domain, seed, _key(sys, "rank"))
        core_ok = inv.passed and checks[1].passed
        core_size = independence_rank(sys.core, coords, n_samples, sys.domain, seed,
                                      _key(sys, "core_rank")) if core_ok else 0
    except (DomainError, ExprError):
        k, core_size = 0, 0
    computed = classify(sys.N, k, core_size)

    notes = []
    if computed != sys.claimed_class:
        notes.append(f"class: claimed {sys.claimed_class}, computed {computed} "
                     f"(N={sys.N}, k={k}, core={core_size})")
    failing = [c.name for c in checks if not c.passed]
    if failing:
        if sys.errata:
            notes.append(f"discrepancy: failing {', '.join(failing)}; errata: {sys.errata}")
        else:
            notes.append(f"failing checks: {', '.join(failing)}")
    if sys.notes:
        notes.append(f"remark: {sys.notes}")
    return VerificationReport(sys.id, sys.variant, dict(sys.params), sys.N, checks, k,
                              core_size, computed, sys.claimed_class, notes)


# ---------------------------------------------------------------------------
# serialization


def reports_to_json(reports: Iterable[VerificationReport], **meta) -> str:
    doc = {**meta, "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2) + "\n"


def _fmt_res(r: float | None) -> str:
    return "error" if r is None else f"{r:.3e}"


def reports_to_text(reports: Iterable[VerificationReport]) -> str:
    rows = [("system", "variant", "check", "residual", "tol", "result")]
    tail = []
    for rep in reports:
        for c in rep.checks:
            rows.append((rep.system, rep.variant, c.name, _fmt_res(c.residual), f"{c.tol:g}",
                         "pass" if c.passed else "FAIL"))
        tail.append((rep.system, rep.variant, str(rep.N), str(rep.k), str(rep.core_size),
                     rep.class_computed, rep.class_claimed))
        for n in rep.notes:
            tail.append((rep.system, rep.variant, "", "", "", "note:", n))

    def table(rs):
        widths = [max(len(r[i]) for r in rs if i < len(r)) for i in range(max(map(len, rs)))]
        out = []
        for r in rs:
            cells = [r[i].ljust(widths[i]) if i < len(r) - 1 else r[i] for i in range(len(r))]
            out.append("  ".join(cells).rstrip())
        return out

    lines = table(rows)
    lines.append("")
    lines += table([("system", "variant", "N", "k", "core", "computed", "claimed"), *tail])
    return "\n".join(lines) + "\n"
