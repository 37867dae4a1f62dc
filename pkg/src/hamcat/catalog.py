"""Declarative catalog of Hamiltonian systems.

Two kinds of entries:

* realization systems on R^4 / R^6: functions Q1..Q4 of (x_a, p_a)
  realizing a Lie algebra under the canonical bracket, and a Hamiltonian
  built from them;
* group systems on a four-dimensional Lie group: a Poisson bivector on
  coordinates x1..x4, a Darboux map y(x), and Q1..Q4, H in x.

Every entry exists in two variants.  ``printed`` reproduces the formulas
as originally written; ``curated`` repairs transcription errors found by the
verifier.  Entries without errata have identical variants.
"""
from __future__ import annotations

import fnmatch
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .algebra import ALGEBRAS, AlgebraError, LieAlgebra, canonical_algebra_name, get_algebra
from .expr import (Expression, ExprError, Guard, SamplingDomain, Variable, bind, parse,
                   substitute)
from .poisson import CanonicalStructure, PoissonBivector

__all__ = [
    "CatalogError", "ParamSpec", "HamiltonianSpec", "SystemSpec", "Hamiltonian",
    "RealizationSystem", "GroupSystem", "Registry", "REGISTRY",
    "list_systems", "get_system", "load_catalog_file", "CLASSES", "VARIANTS",
]

CLASSES = ("integrable", "superintegrable", "maximal")
VARIANTS = ("curated", "printed")


class CatalogError(ValueError):
    """Unknown system, inadmissible parameters, or a malformed catalog file."""


# ---------------------------------------------------------------------------
# declarative specs

_CONSTRAINT = re.compile(r"\s*(nonzero|>=|<=|>|<|!=|=)\s*(-?[\d.]+(?:[eE][+-]?\d+)?)?\s*$")
_INTERVAL = re.compile(r"\s*([\[(])\s*(-?[\d.]+|-inf)\s*,\s*(-?[\d.]+|inf)\s*([\])])\s*$")


def check_constraint(text: str, value: float) -> bool:
    """Evaluate a single-parameter constraint such as ``nonzero``, ``>0``,
    ``!=1``, ``=1`` or an interval ``[-1,1)``.  Several constraints may be
    joined with ``;``."""
    for part in filter(None, (p.strip() for p in text.split(";"))):
        m = _INTERVAL.match(part)
        if m:
            lo, hi = float(m.group(2)), float(m.group(3))
            ok_lo = value >= lo if m.group(1) == "[" else value > lo
            ok_hi = value <= hi if m.group(4) == "]" else value < hi
            if not (ok_lo and ok_hi):
                return False
            continue
        m = _CONSTRAINT.match(part)
        if not m:
            raise CatalogError(f"unreadable constraint {part!r}")
        op, num = m.group(1), m.group(2)
        if op == "nonzero":
            ok = value != 0
        else:
            if num is None:
                raise CatalogError(f"constraint {part!r} needs a number")
            ref = float(num)
            ok = {">=": value >= ref, "<=": value <= ref, ">": value > ref,
                  "<": value < ref, "!=": value != ref, "=": value == ref}[op]
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: float
    constraint: str = ""


@dataclass(frozen=True)
class HamiltonianSpec:
    """A Hamiltonian written in terms of Q1..Q4 (and variables).

    ``printed`` is the form as originally written when it differs from ``form``;
    ``rhs`` holds the printed substituted right-hand sides, which are
    audited against the mechanical substitution.
    """

    form: str
    printed: str | None = None
    rhs: tuple[str, ...] = ()
    casimir: bool = False


Relation = tuple[str, Callable[[Mapping[str, float]], bool]]


@dataclass(frozen=True)
class SystemSpec:
    id: str
    kind: str
    algebra: str
    Q: tuple[str, ...]
    hamiltonians: tuple[HamiltonianSpec, ...]
    core: tuple[str, ...]
    extra: tuple[str, ...]
    claimed_class: str
    params: tuple[ParamSpec, ...] = ()
    algebra_params: Mapping[str, float | str] = field(default_factory=dict)
    relations: tuple[Relation, ...] = ()
    N: int = 2
    Q_printed: tuple[str, ...] | None = None
    errata: str = ""
    notes: str = ""
    intervals: Mapping[str, tuple[tuple[float, float], ...]] = field(default_factory=dict)
    guards: tuple[tuple, ...] = ()  # (expr, positive[, margin])
    default_point: tuple[float, ...] | None = None
    # group systems
    bivector: tuple[tuple[int, int, str], ...] = ()
    darboux: tuple[str, ...] = ()
    darboux_printed: tuple[str, ...] | None = None
    pairing: tuple[tuple[int, int], ...] = ()
    polynomial: bool = False
    source: str = "builtin"

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @property
    def has_errata(self) -> bool:
        return bool(self.errata)


# ---------------------------------------------------------------------------
# materialized systems


@dataclass(frozen=True)
class Hamiltonian:
    form: str
    expr: Expression
    casimir: bool
    rhs: tuple[tuple[str, Expression], ...] = ()


@dataclass(frozen=True)
class _SystemBase:
    id: str
    variant: str
    params: Mapping[str, float]
    algebra: LieAlgebra
    Q: tuple[Expression, ...]
    hamiltonians: tuple[Hamiltonian, ...]
    core: tuple[Expression, ...]
    core_labels: tuple[str, ...]
    extra: tuple[Expression, ...]
    extra_labels: tuple[str, ...]
    claimed_class: str
    domain: SamplingDomain
    errata: str
    notes: str
    polynomial: bool
    default_point: tuple[float, ...] | None

    @property
    def H(self) -> Expression:
        return self.hamiltonians[0].expr

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def start_point(self) -> tuple[float, ...]:
        if self.default_point is not None:
            return self.default_point
        c = self.domain.centroid(self.coordinates)
        return tuple(c[v] for v in self.coordinates)


@dataclass(frozen=True)
class RealizationSystem(_SystemBase):
    N: int = 2
    kind = "realization"

    @property
    def structure(self) -> CanonicalStructure:
        return CanonicalStructure(self.N)

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.structure.coordinates


@dataclass(frozen=True)
class GroupSystem(_SystemBase):
    bivector: PoissonBivector | None = None
    darboux: tuple[Expression, ...] = ()
    pairing: tuple[tuple[int, int], ...] = ()
    N: int = 2
    kind = "group"

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.bivector.coordinates


# ---------------------------------------------------------------------------
# registry


class Registry:
    def __init__(self, specs: Sequence[SystemSpec] = ()):
        self._specs: dict[str, SystemSpec] = {}
        for s in specs:
            self.add(s)

    def add(self, spec: SystemSpec) -> None:
        if spec.id in self._specs:
            raise CatalogError(f"system id {spec.id!r} already registered")
        self._specs[spec.id] = spec

    def copy(self) -> "Registry":
        return Registry(list(self._specs.values()))

    def spec(self, system_id: str) -> SystemSpec:
        try:
            return self._specs[system_id]
        except KeyError:
            raise CatalogError(f"unknown system {system_id!r}") from None

    def ids(self, pattern: str | None = None) -> list[str]:
        ids = list(self._specs)
        if pattern is None:
            return ids
        return [i for i in ids if fnmatch.fnmatchcase(i, pattern)]

    def list_systems(self, pattern: str | None = None) -> list[tuple[str, str, str]]:
        return [(i, self._specs[i].kind, self._specs[i].claimed_class) for i in self.ids(pattern)]

    def get_system(self, system_id: str, params: Mapping[str, float] | None = None,
                   variant: str = "curated") -> RealizationSystem | GroupSystem:
        return materialize(self.spec(system_id), params, variant)

    def load_file(self, path: str | Path) -> list[SystemSpec]:
        specs = read_catalog_file(path)
        for s in specs:
            if s.id in self._specs:
                raise CatalogError(f"{path}: id {s.id!r} collides with an existing system")
        for s in specs:
            materialize(s, None, "curated")
            materialize(s, None, "printed")
        for s in specs:
            self.add(s)
        return specs


def resolve_params(spec: SystemSpec, overrides: Mapping[str, float] | None) -> dict[str, float]:
    values = {p.name: float(p.default) for p in spec.params}
    for name, v in (overrides or {}).items():
        if name not in values:
            raise CatalogError(f"{spec.id}: unknown parameter {name!r}"
                               f" (known: {', '.join(values) or 'none'})")
        values[name] = float(v)
    for p in spec.params:
        if p.constraint and not check_constraint(p.constraint, values[p.name]):
            raise CatalogError(f"{spec.id}: parameter {p.name}={values[p.name]:g} "
                               f"violates constraint {p.constraint!r}")
    for text, ok in spec.relations:
        if not ok(values):
            raise CatalogError(f"{spec.id}: constraint {text} violated by {values}")
    return values


def _algebra_for(spec: SystemSpec, values: Mapping[str, float]) -> LieAlgebra:
    family = ALGEBRAS[canonical_algebra_name(spec.algebra)]
    aparams = {}
    for name in family.parameters:
        src = spec.algebra_params.get(name, name)
        aparams[name] = values[src] if isinstance(src, str) else float(src)
    try:
        return get_algebra(family.name, aparams)
    except AlgebraError as err:
        raise CatalogError(f"{spec.id}: {err}") from None


def _parse(text: str, spec: SystemSpec, values: Mapping[str, float],
           bindings: Mapping[str, Expression] | None = None) -> Expression:
    try:
        e = parse(text, spec.param_names, bindings)
    except ExprError as err:
        raise CatalogError(f"{spec.id}: cannot parse {text!r}: {err}") from None
    return bind(e, values)


def materialize(spec: SystemSpec, overrides: Mapping[str, float] | None = None,
                variant: str = "curated") -> RealizationSystem | GroupSystem:
    if variant not in VARIANTS:
        raise CatalogError(f"unknown variant {variant!r}")
    printed = variant == "printed"
    values = resolve_params(spec, overrides)
    alg = _algebra_for(spec, values)

    bindings: dict[str, Expression] = {}
    bivector = None
    darboux: tuple[Expression, ...] = ()
    if spec.kind == "group":
        entries = {}
        for i, j, text in spec.bivector:
            entries[(i - 1, j - 1)] = _parse(text, spec, values)
        try:
            bivector = PoissonBivector(("x1", "x2", "x3", "x4"), entries)
        except ValueError as err:
            raise CatalogError(f"{spec.id}: {err}") from None
        dtexts = spec.darboux_printed if printed and spec.darboux_printed else spec.darboux
        darboux = tuple(_parse(t, spec, values) for t in dtexts)
        bindings.update({f"y{i}": y for i, y in enumerate(darboux, 1)})
    elif spec.kind != "realization":
        raise CatalogError(f"{spec.id}: unknown kind {spec.kind!r}")

    qtexts = spec.Q_printed if printed and spec.Q_printed else spec.Q
    Q = tuple(_parse(t, spec, values, bindings) for t in qtexts)
    if len(Q) != 4:
        raise CatalogError(f"{spec.id}: expected four Q functions, got {len(Q)}")
    qb = {**bindings, **{f"Q{i}": q for i, q in enumerate(Q, 1)}}

    hams = []
    for hs in spec.hamiltonians:
        form = hs.printed if printed and hs.printed else hs.form
        rhs = tuple((t, _parse(t, spec, values, bindings)) for t in hs.rhs) if printed else ()
        hams.append(Hamiltonian(form, _parse(form, spec, values, qb), hs.casimir, rhs))
    if not hams:
        raise CatalogError(f"{spec.id}: no Hamiltonian given")
    hb = {**qb, "H": hams[0].expr}
    core = tuple(_parse(t, spec, values, hb) for t in spec.core)
    extra = tuple(_parse(t, spec, values, hb) for t in spec.extra)

    coords = ("x1", "x2", "x3", "x4") if spec.kind == "group" else \
        CanonicalStructure(spec.N).coordinates
    everything = [*Q, *(h.expr for h in hams), *core, *extra]
    stray = set().union(*(e.variables() for e in everything)) - set(coords)
    if stray:
        raise CatalogError(f"{spec.id}: variables {sorted(stray)} outside phase space")
    guards = tuple(Guard(_parse(g[0], spec, values, bindings), *g[1:]) for g in spec.guards)
    domain = SamplingDomain(dict(spec.intervals), guards)

    common = dict(
        id=spec.id, variant=variant, params=values, algebra=alg, Q=Q,
        hamiltonians=tuple(hams), core=core, core_labels=spec.core, extra=extra,
        extra_labels=spec.extra, claimed_class=spec.claimed_class, domain=domain,
        errata=spec.errata, notes=spec.notes, polynomial=spec.polynomial,
        default_point=spec.default_point, N=spec.N,
    )
    if spec.kind == "group":
        return GroupSystem(**common, bivector=bivector, darboux=darboux,
                           pairing=tuple(spec.pairing))
    return RealizationSystem(**common)


# ---------------------------------------------------------------------------
# catalog file format


def _pointer(*parts) -> str:
    return "/" + "/".join(str(p) for p in parts)


def _require(obj, key, kind, where):
    if key not in obj:
        raise CatalogError(f"schema violation at {where}: missing {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise CatalogError(f"schema violation at {_pointer(where.strip('/'), key)}: "
                           f"expected {getattr(kind, '__name__', kind)}")
    return value


def _str_list(value, where) -> tuple[str, ...]:
    if isinstance(value, str):
        return (value,)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise CatalogError(f"schema violation at {where}: expected a string or list of strings")
    return tuple(value)


def _spec_from_json(obj, index: int, path: str) -> SystemSpec:
    where = _pointer("systems", index)
    if not isinstance(obj, dict):
        raise CatalogError(f"schema violation at {where}: expected an object")
    sid = _require(obj, "id", str, where)
    kind = _require(obj, "kind", str, where)
    if kind not in ("realization", "group"):
        raise CatalogError(f"schema violation at {where}/kind: must be 'realization' or 'group'")
    algebra = _require(obj, "algebra", str, where)
    try:
        canonical_algebra_name(algebra)
    except AlgebraError as err:
        raise CatalogError(f"{where}/algebra: {err}") from None

    params = []
    raw_params = obj.get("params", {})
    if not isinstance(raw_params, dict):
        raise CatalogError(f"schema violation at {where}/params: expected an object")
    for name, desc in raw_params.items():
        if isinstance(desc, str):
            constraint, default = desc, 1.0
        elif isinstance(desc, (int, float)):
            constraint, default = "", float(desc)
        elif isinstance(desc, dict):
            constraint = desc.get("constraint", "")
            default = float(desc.get("default", 1.0))
        else:
            raise CatalogError(f"schema violation at {where}/params/{name}")
        params.append(ParamSpec(name, default, constraint))

    N = obj.get("N", 2)
    if not isinstance(N, int) or N < 1:
        raise CatalogError(f"schema violation at {where}/N: expected a positive integer")
    Q = _str_list(_require(obj, "Q", (list,), where), f"{where}/Q")
    casimir = obj.get("casimir", False)
    if isinstance(casimir, bool):
        casimir = [casimir]
    Hs = _str_list(_require(obj, "H", (list, str), where), f"{where}/H")
    hamiltonians = tuple(
        HamiltonianSpec(h, casimir=bool(casimir[min(i, len(casimir) - 1)]))
        for i, h in enumerate(Hs))
    claimed = obj.get("claimed_class", "integrable")
    if claimed not in CLASSES:
        raise CatalogError(f"schema violation at {where}/claimed_class: one of {CLASSES}")

    bivector: list[tuple[int, int, str]] = []
    for k, entry in enumerate(obj.get("bivector", [])):
        if (not isinstance(entry, list) or len(entry) != 3 or not isinstance(entry[2], str)
                or not all(isinstance(v, int) for v in entry[:2])):
            raise CatalogError(f"schema violation at {where}/bivector/{k}: expected [mu, nu, expr]")
        bivector.append((entry[0], entry[1], entry[2]))
    seen = {}
    for mu, nu, text in bivector:
        if mu == nu:
            raise CatalogError(f"{where}/bivector: diagonal entry ({mu},{nu}) must vanish")
        if (nu, mu) in seen:
            other = seen[(nu, mu)]
            try:
                a = parse(text, [p.name for p in params])
                b = parse(other, [p.name for p in params])
            except ExprError as err:
                raise CatalogError(f"{where}/bivector: {err}") from None
            from .expr import add as _add, equal_on_samples
            cmp = equal_on_samples(_add(a, b), parse("0"), n=20, tol=1e-12,
                                   params={p.name: p.default for p in params})
            if not cmp.equal:
                raise CatalogError(f"{where}/bivector: entries ({nu},{mu}) and ({mu},{nu}) "
                                   "are not antisymmetric")
        seen[(mu, nu)] = text
    # keep only one orientation of each pair
    bivector = [(mu, nu, t) for mu, nu, t in bivector if not (mu > nu and (nu, mu) in seen)]
    if kind == "group" and not bivector:
        raise CatalogError(f"schema violation at {where}/bivector: required for group systems")

    default_pairing = [[1, 3], [2, 4]] if obj.get("darboux") else []
    pairing = tuple(tuple(p) for p in obj.get("pairing", default_pairing))
    printed = obj.get("printed", {})
    spec = SystemSpec(
        id=sid, kind=kind, algebra=algebra, Q=Q, hamiltonians=hamiltonians,
        core=_str_list(obj.get("core", []), f"{where}/core"),
        extra=_str_list(obj.get("extra", []), f"{where}/extra"),
        claimed_class=claimed, params=tuple(params),
        algebra_params=dict(obj.get("algebra_params", {})),
        N=2 if kind == "group" else N,
        Q_printed=_str_list(printed["Q"], f"{where}/printed/Q") if "Q" in printed else None,
        errata=obj.get("errata", ""), notes=obj.get("notes", ""),
        bivector=tuple(bivector),
        darboux=_str_list(obj.get("darboux", []), f"{where}/darboux"),
        pairing=pairing, source=str(path),
    )
    return spec


def read_catalog_file(path: str | Path) -> list[SystemSpec]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise CatalogError(f"{path}: invalid JSON: {err}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("systems"), list):
        raise CatalogError(f"{path}: schema violation at /systems: expected a list")
    return [_spec_from_json(obj, i, str(path)) for i, obj in enumerate(doc["systems"])]


# ---------------------------------------------------------------------------
# built-in data

NEG = ((-2.0, -0.1),)
POS = ((0.1, 2.0),)
# keeps ratios inside exp(-u/v) bounded so brackets stay well conditioned
AWAY = ((-2.0, -0.5), (0.5, 2.0))

_T1_INV_ALL = (("H", "Q1"), ("Q2", "Q3"))


def _t1(id, algebra, Q, hams, core, extra, claimed, **kw):
    return SystemSpec(id=id, kind="realization", algebra=algebra, Q=tuple(Q),
                      hamiltonians=tuple(hams), core=tuple(core), extra=tuple(extra),
                      claimed_class=claimed, N=2, **kw)


def _t2(id, algebra, Q, hams, claimed="superintegrable", core=("Q1", "Q2", "Q3"),
        extra=("H",), **kw):
    return SystemSpec(id=id, kind="realization", algebra=algebra, Q=tuple(Q),
                      hamiltonians=tuple(hams), core=tuple(core), extra=tuple(extra),
                      claimed_class=claimed, N=3, **kw)


def _H(form, *rhs, printed=None, casimir=True):
    return HamiltonianSpec(form, printed, tuple(rhs), casimir)


def _a45_order_relation(p):
    return -1 <= p["a"] < p["b"] < 1 and (p["a"] != -1 or p["b"] > 0)


R4_SYSTEMS = [
    _t1("A4_1/R4", "A4_1",
        ["-p1", "-x2*p1", "-x2^2/2*p1", "p2"],
        [_H("Q1", "-p1")], ("H", "Q2"), ("Q3",), "superintegrable", polynomial=True,
        notes="the algebra Casimir Q2^2-2*Q1*Q3 vanishes identically on this realization; "
              "the listed H=Q1 (central generator) is used"),
    _t1("A4_2^-1/R4", "A4_2^b",
        ["-p1", "-x2*p1", "-x2/2*ln(abs(x2))*p1", "x1*p1+2*x2*p2"],
        [_H("1/(Q1*Q2)", "1/(x2*p1^2)"), _H("Q2*exp(-Q3/Q2)", "-x2^(1/2)*p1")],
        *_T1_INV_ALL, "superintegrable", algebra_params={"b": -1},
        intervals={"x2": POS},
        notes="second printed form -x2^(1/2)*p1 holds for x2>0 only; sampling uses x2>0"),
    _t1("A4_3/R4", "A4_3",
        ["-p1", "-x2*p1", "x2*ln(abs(x2))*p1", "-x1*p1-x2*p2"],
        [_H("Q1*exp(-Q3/Q2)", "-x2*p1")], *_T1_INV_ALL, "superintegrable",
        Q_printed=("-p1", "-x2*p2", "x2*ln(abs(x2))*p1", "-x1*p1-x2*p2"),
        intervals={"x2": POS},
        errata="closure, invariance, casimir, printed_rhs: printed Q2=-x2*p2 does not close "
               "({Q3,Q4} = -x2*p1 must equal Q2); curated Q2=-x2*p1",
        notes="printed H=-x2*p1 equals Q1*exp(-Q3/Q2) for x2>0; sampling uses x2>0"),
    _t1("A4_4/R4", "A4_4",
        ["-p1", "-x2*p1", "-1/2*x2^2*p1", "-x1*p1+p2"],
        [_H("Q1*exp(-Q2/Q1)", "-exp(x2)*p1")], *_T1_INV_ALL, "superintegrable",
        errata="printed_rhs: printed H=-exp(x2)*p1, substitution gives -exp(-x2)*p1"),
    _t1("A4_5/R4", "A4_5^{a,b,c}",
        ["-p1", "-exp((a-b)*x2)*p1", "-exp((a-1)*x2)*p1", "-a*x1*p1-p2"],
        [_H("Q1^b/Q2^a", "p1^(b-1)/exp((b-a)*x2)", printed="Q1^b/Q2"),
         _H("Q1/Q3^a", "p1^(b-1)/exp((a-1)*x2)", printed="Q1^b/Q2")],
        *_T1_INV_ALL, "superintegrable",
        params=(ParamSpec("a", -0.5), ParamSpec("b", 0.5)),
        algebra_params={"c": 1.0},
        relations=(("-1 <= a < b < 1, b > 0 if a = -1", _a45_order_relation),),
        intervals={"p1": NEG},
        errata="casimir, printed_rhs: printed H=Q1^b/Q2 (both alternatives) commutes with Q4 "
               "only when a=1; curated Casimirs Q1^b/Q2^a and Q1/Q3^a. Printed right-hand "
               "sides p1^(b-1)/... are undefined for non-integer b at p1<0"),
    _t1("A4_6/R4", "A4_6^{a,b}",
        ["-p1", "-exp((a-b)*x2)*cos(x2)*p1", "exp((a-b)*x2)*sin(x2)*p1", "-a*x1*p1-p2"],
        [_H("Q1^(2*b/a)/(Q2^2+Q3^2)", "(-p1^(2*b/a)-2)/(2*exp(2*(a-b)*x2)*p1)")],
        *_T1_INV_ALL, "superintegrable",
        params=(ParamSpec("a", 1.0, "nonzero"), ParamSpec("b", 0.5, ">=0")),
        intervals={"p1": NEG},
        errata="printed_rhs: the printed right-hand side is garbled; substitution gives "
               "(-p1)^(2*b/a)/(exp(2*(a-b)*x2)*p1^2)"),
    _t1("A4_7/R4", "A4_7",
        ["-p1", "-x2*p1", "p2", "-(2*x1-1/2*x2^2)*p1-x2*p2"],
        [_H("Q2", "-x2*p1", casimir=False)], ("H", "Q1"), (), "integrable", polynomial=True),
    _t1("A4_9/R4", "A4_9^b",
        ["-p1", "-p2", "-x2*p1", "-(1+b)*x1*p1-x2*p2"],
        [_H("Q1", "-p1", casimir=False)], ("H", "Q2"), (), "integrable",
        params=(ParamSpec("b", 1.0, "[-1,1]"),), polynomial=True),
    _t1("A4_12/R4", "A4_12",
        ["-p1", "-x2*p1", "-x1*p1", "x1*x2*p1+(1+x2^2)*p2"],
        [_H("Q2", "-x2*p1", casimir=False)], ("H", "Q1"), (), "integrable", polynomial=True),
]

_A41 = "Q2^2-2*Q1*Q3"
_A42 = "Q2*exp(-Q3/Q2)"
_A43 = "Q1*exp(-Q3/Q2)"
_A44 = ("Q1*exp(-Q2/Q1)", "(2*Q1*Q3-Q2^2)/Q1^2")
_A46 = "Q1^(2*b/a)/(Q2^2+Q3^2)"
_P_A45 = (ParamSpec("a", 0.5, "nonzero"), ParamSpec("b", 1.5, "nonzero"),
          ParamSpec("c", 2.0, "nonzero"))
_P_A46 = (ParamSpec("a", 1.0, ">0"), ParamSpec("b", 0.5, ">=0"))
_P_B = (ParamSpec("b", 1.0, "nonzero"),)
_P_B9 = (ParamSpec("b", 1.0, "[-1,1]"),)

R6_SYSTEMS = [
    _t2("A4_1/R6/1", "A4_1", ["-p1", "-p2", "-p3", "-x2*p1-x3*p2"],
        [_H(_A41, "p2^2-p1*p3", "p2^2-2*p1*p2")], polynomial=True,
        errata="printed_rhs: substitution gives p2^2-2*p1*p3; printed values p2^2-p1*p3 "
               "and p2^2-2*p1*p2 both differ"),
    _t2("A4_1/R6/2", "A4_1", ["-p1", "-p2", "1/2*x3^2*p1-x3*p2", "-x2*p1+p3"],
        [_H(_A41, "p2^2+1/2*x3^2*p1^2-x3*p1*p2")], polynomial=True,
        errata="printed_rhs: substitution gives p2^2+x3^2*p1^2-2*x3*p1*p2"),
    _t2("A4_1/R6/3", "A4_1", ["-p1", "-x2*p1", "-p3", "-x2*x3*p1+p2"],
        [_H(_A41, "x2^2*p1^2-2*p1*p3")], polynomial=True),
    _t2("A4_1/R6/4", "A4_1", ["-p1", "-x2*p1", "-x3*p1", "p2+x2*p3"],
        [_H(_A41, "(x2^2-2*x3)*p1^2")], polynomial=True),
    _t2("A4_2/R6/1", "A4_2^b", ["-p1", "-p2", "-p3", "-b*x1*p1-(x2+x3)*p2-x3*p3"],
        [_H(_A42, "-p2*exp(-p3/p2)")], params=_P_B, intervals={"p2": AWAY}),
    _t2("A4_2/R6/2", "A4_2^b", ["-p1", "-p2", "-x3*p2", "-b*x1*p1-x2*p2+p3"],
        [_H(_A42, "-p2*exp(-x3)")], params=_P_B),
    _t2("A4_2/R6/3", "A4_2^b",
        ["-p1", "-x2*p1", "-x3*p1", "-b*x1*p1-(b-1)*x2*p2-((b-1)*x3-x2)*p3"],
        [_H(_A42, "-x2*p1*exp(-x3/x2)")], params=_P_B, intervals={"x2": AWAY}),
    _t2("A4_3/R6/1", "A4_3", ["-p1", "-p2", "-p3", "-x1*p1-x3*p2"],
        [_H(_A43, "-p1*exp(-p3/p2)")], intervals={"p2": AWAY}),
    _t2("A4_3/R6/2", "A4_3", ["-p1", "-x2*p1", "-p3", "-(x1+x2*x3)*p1-x2*p2"],
        [_H(_A43, "-p1*exp(-p3/(x2*p1))")], intervals={"x2": AWAY, "p1": AWAY}),
    _t2("A4_3/R6/3", "A4_3", ["-p1", "-x2*p1", "-x3*p1", "-x1*p1-x2*p2-(x3-x2)*p3"],
        [_H(_A43, "-p1*exp(-x3/x2)")], intervals={"x2": AWAY}),
    _t2("A4_4/R6/1", "A4_4", ["-p1", "-p2", "-p3", "-(x1+x2)*p1-(x2+x3)*p2-x3*p3"],
        [_H(_A44[0], "-p1*exp(-p2/p1)"), _H(_A44[1], "(2*p1*p3-p2^2)/p1^2")],
        intervals={"p1": AWAY}),
    _t2("A4_4/R6/2", "A4_4", ["-p1", "-p2", "1/2*x3^2*p1-x3*p2", "-(x1+x2)*p1-x2*p2+p3"],
        [_H(_A44[0], "-p1*exp(-p2/p1)"),
         _H(_A44[1], "(-x3^2*p1^2+2*x3*p1*p2-p2^2)/p1^2")], intervals={"p1": AWAY}),
    _t2("A4_4/R6/3", "A4_4", ["-p1", "-x2*p1", "-x3*p1", "-x1*p1+p2+x2*p3"],
        [_H(_A44[0], "-p1*exp(-x3/x2)"), _H(_A44[1], "2*x3-x2^2")],
        errata="printed_rhs: printed -p1*exp(-x3/x2); substitution of Q1*exp(-Q2/Q1) "
               "gives -p1*exp(-x2)"),
    _t2("A4_5/R6/1", "A4_5^{a,b,c}", ["-p1", "-p2", "-p3", "-a*x1*p1-b*x2*p2-c*x3*p3"],
        [_H("Q1^b/Q2^a", "(-p1)^b/p2", printed="Q1^b/Q2"),
         _H("Q1^c/Q3^a", "(-p1)^c/p3", printed="Q1^c/Q3")],
        params=_P_A45, intervals={"p1": NEG, "p2": NEG, "p3": NEG},
        errata="casimir, printed_rhs: printed H=Q1^b/Q2 and Q1^c/Q3 commute with Q4 only "
               "when a=1; curated Q1^b/Q2^a and Q1^c/Q3^a. Printed right-hand sides also "
               "drop the sign of Q2=-p2, Q3=-p3"),
    _t2("A4_5/R6/2", "A4_5^{a,b,c}",
        ["-p1", "-x2*p1", "-x3*p1", "-a*x1*p1-(a-b)*x2*p2-(a-c)*x3*p3"],
        [_H("Q1^b/Q2^a", "(-p1)^(b-1)/x2", printed="-Q1^b/Q2"),
         _H("Q1^c/Q3^a", "(-p1)^(c-1)/x3", printed="Q1^c/Q3")],
        params=_P_A45, intervals={"p1": NEG, "x2": POS, "x3": POS},
        errata="casimir, printed_rhs: printed H=-Q1^b/Q2 and Q1^c/Q3 commute with Q4 only "
               "when a=1; curated Q1^b/Q2^a and Q1^c/Q3^a"),
    _t2("A4_5/R6/3", "A4_5^{a,b,c}", ["-p1", "-x2*p1", "-p3", "-x1*p1-c*x3*p3"],
        [_H("Q1/Q2", "1/x2"), _H("Q1^c/Q3", "(-p1)^c/(-p3)")],
        params=(ParamSpec("c", 2.0, "nonzero;!=1"),), algebra_params={"a": 1.0, "b": 1.0},
        intervals={"p1": NEG}),
    _t2("A4_5/R6/4", "A4_5^{a,b,c}",
        ["-p1", "-x2*p1", "-p3", "-a*x1*p1-(a-b)*x2*p2-x3*p3"],
        [_H("Q1^b/Q2^a", "(-p1)^(b-1)/x2", printed="Q1^b/Q2"),
         _H("Q1/Q3^a", "p1/p3", printed="Q1/Q3")],
        params=(ParamSpec("a", -0.5, "nonzero"), ParamSpec("b", 0.5, "nonzero")),
        algebra_params={"c": 1.0},
        relations=(("-1 <= a < b < 1, b > 0 if a = -1", _a45_order_relation),),
        intervals={"p1": NEG, "x2": POS, "p3": NEG},
        errata="casimir: printed H=Q1^b/Q2 and Q1/Q3 commute with Q4 only "
               "when a=1; curated Q1^b/Q2^a and Q1/Q3^a"),
    _t2("A4_6/R6/1", "A4_6^{a,b}",
        ["-p1", "-p2", "-p3", "-a*x1*p1-(b*x2+x3)*p2-(-x2+b*x3)*p3"],
        [_H(_A46, "(-p1)^(2*b/a)/(p2^2+p3^2)")], params=_P_A46, intervals={"p1": NEG}),
    _t2("A4_6/R6/2", "A4_6^{a,b}",
        ["-p1", "-x2*p1", "-x3*p1", "-a*x1*p1-((a-b)*x2+x3)*p2-(-x2+(a-b)*x3)*p3"],
        [_H(_A46, "(-p1)^(2*(b-a)/a)/(x2^2+x3^2)")],
        params=(*_P_A46, ParamSpec("c", 1.0)), intervals={"p1": NEG},
        Q_printed=("-p1", "-x2*p1", "-x3*p1",
                   "-a*x1*p1-((a-b)*x2+x3)*p2-(-x2+(a-c)*x3)*p3"),
        errata="closure, casimir: printed Q4 contains an undeclared c in (a-c)*x3*p3; "
               "closure requires (a-b)",
        notes="parameter c only enters the printed Q4"),
    _t2("A4_9/R6/1", "A4_9^b", ["-p1", "-p2", "-x2*p1-p3", "-(1+b)*x1*p1-x2*p2-b*x3*p3"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (), params=_P_B9,
        polynomial=True, errata="printed_rhs: printed H=Q1=p1 but Q1=-p1"),
    _t2("A4_9/R6/2", "A4_9^b",
        ["-p1", "-p2", "-x2*p1-x3*p2", "-(1+b)*x1*p1-x2*p2-(1-b)*x3*p3"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (), params=_P_B9,
        polynomial=True, errata="printed_rhs: printed H=Q1=p1 but Q1=-p1"),
    _t2("A4_9/R6/3", "A4_9^b", ["-p1", "-p2", "-x2*p1", "-(1+b)*x1*p1-x2*p2-p3"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (), params=_P_B9,
        polynomial=True, errata="printed_rhs: printed H=Q1=p1 but Q1=-p1"),
    _t2("A4_12/R6/1", "A4_12", ["-p1", "-p2", "-x1*p1-x2*p2-p3", "-x2*p1+x1*p2-C*p3"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (),
        params=(ParamSpec("C", 1.0),), polynomial=True,
        errata="printed_rhs: printed H=Q1=p1 but Q1=-p1",
        notes="Q4 contains an undeclared constant C; treated as a parameter (default 1)"),
    _t2("A4_12/R6/2", "A4_12", ["-p1", "-x2*p1", "-x1*p1-p3", "x1*x2*p1+(1+x2^2)*p2"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (), polynomial=True,
        errata="printed_rhs: printed H=Q1=p1 but Q1=-p1"),
    _t2("A4_12/R6/3", "A4_12", ["-p1", "-p2", "-x1*p1-x2*p2", "-x2*p1+x1*p2-p3"],
        [_H("Q1", "p1", casimir=False)], "integrable", ("H", "Q2"), (), polynomial=True,
        errata="printed_rhs: printed H=Q1=p1 but Q1=-p1"),
]


# Group Q functions are R4 realizations written in Darboux coordinates:
# (x1, x2, p1, p2) -> (y1, y2, y3, y4).
def _in_darboux(r4_id: str, fixed: Mapping[str, float] | None = None) -> tuple[str, ...]:
    spec = next(s for s in R4_SYSTEMS if s.id == r4_id)
    rename = {"x1": Variable("y1"), "x2": Variable("y2"),
              "p1": Variable("y3"), "p2": Variable("y4")}
    out = []
    for text in spec.Q:
        e = parse(text, spec.param_names)
        if fixed:
            e = bind(e, fixed)
        out.append(str(substitute(e, rename)))
    return tuple(out)


def _g(id, algebra, bivector, darboux, Q_printed, hams, core, extra, claimed, realization,
       fixed=None, **kw):
    return SystemSpec(
        id=id, kind="group", algebra=algebra, Q=_in_darboux(realization, fixed),
        Q_printed=tuple(Q_printed), hamiltonians=tuple(hams), core=tuple(core),
        extra=tuple(extra), claimed_class=claimed, bivector=tuple(bivector),
        darboux=tuple(darboux), pairing=((1, 3), (2, 4)), N=2, **kw)


_W = "(-1 - exp(2*x4) + exp(4*x4)*x1 + exp(4*x4)*x2*x3)"
_A41_Y2 = ("-x1 + x3^2/c^2 + 1/4*c*d*x2*x4 - x3*x4^2/4 + x3*x4^2/(c*d) - 3*c^2*x4^4/64 "
           "+ x4^4/(4*d^2) - c*x4^4/(8*d)")
_A41_Y3 = "(x2 - (8*d*x3*x4 + 4*c*x4^3 + c^2*d*x4^3)/(4*c*d^2))"
_A42_Y2 = "((-2*a*exp(x4) - b*x1 + a*b*x2)/(a*b^2))"
_A42_Y3 = "(2*exp(x4)/b + x1/a)"
_A43_Y2 = ("(x1/h - d*exp(-x4)*x2/(f*h) - c*exp(-x4)*x3^2/(2*d*f) "
           "+ c*exp(-x4)*x3*x4/(f*h))")
_A412_U = "(a*x1*cos(x4) - b*x2*cos(x4) + b*x1*sin(x4) + a*x2*sin(x4))"
_A412_V = "(b*x1*cos(x4) + a*x2*cos(x4) - a*x1*sin(x4) + b*x2*sin(x4))"
_A412_K = "1/(a^2+b^2)"
_NZ = "nonzero"

GROUPS = [
    _g("group/A4_1", "A4_1",
       [(1, 2, "-c/2*x4^2"), (1, 3, "c*x4"), (1, 4, "-d"), (2, 3, "-c")],
       ["x3/c + c*x4^2/8 + x4^2/(2*d)", _A41_Y2,
        "x2 - 2*x3*x4/(c*d) - x4^3/d^2 - c*x4^3/(4*d)", "x4/d"],
       ["-x2 + 2*x3*x4/(c*d) + x4^3/d^2 + c*x4^3/(4*d)",
        ("(x1 - x3^2/c^2 - 1/4*c*d*x2*x4 + x3*x4^2/4 - x3*x4^2/(c*d) + 3*c^2*x4^4/64 "
         f"- x4^4/(4*d^2) + c*x4^4/(8*d))*{_A41_Y3}"),
        f"-1/2*({_A41_Y2})^2*{_A41_Y3}",
        "x4/d"],
       [_H("Q1", "-x2 + 2*x3*x4/(c*d) + x4^3/d^2 + c*x4^3/(4*d)")],
       ("H", "Q2"), ("Q3",), "superintegrable", "A4_1/R4",
       params=(ParamSpec("c", 1.0, _NZ), ParamSpec("d", 1.0, _NZ)),
       default_point=(0.3, -1.2, 0.7, 0.5), polynomial=True),
    _g("group/A4_2^-1", "A4_2^b",
       [(1, 2, "2*a"), (1, 3, "-a"), (2, 4, "b*exp(-x4)")],
       ["-exp(x4)/b + x3", _A42_Y2, _A42_Y3, "exp(x4)"],
       [f"-{_A42_Y3}", f"-{_A42_Y2}*{_A42_Y3}",
        f"-1/2*{_A42_Y2}*{_A42_Y3}*ln(abs{_A42_Y2})",
        f"2*exp(x4)*{_A42_Y2} + (-exp(x4)/b + x3)*{_A42_Y3}"],
       [_H("1/(Q1*Q2)", f"1/({_A42_Y3}^2*{_A42_Y2})")],
       ("H", "Q1"), ("Q2", "Q3"), "maximal", "A4_2^-1/R4",
       params=(ParamSpec("a", 1.0, _NZ), ParamSpec("b", 1.0, _NZ)),
       algebra_params={"b": -1.0}, guards=(("y2", False, 0.3), ("y3", False, 0.3)),
       default_point=(1.0, 2.5, 0.3, -0.5)),
    _g("group/A4_3", "A4_3",
       [(1, 2, "c*x4*exp(-x4)"), (1, 3, "d*exp(-x4)"), (1, 4, "h*exp(-x4)"), (2, 3, "f")],
       ["d*x2/f + c*h*x3^2/(2*d*f) - c*x3*x4/f", _A43_Y2, "x3/d", "exp(x4)"],
       ["-x3/d",
        ("x3/d*(-x1/h + d*exp(-x4)*x2/(f*h) + c*exp(-x4)*x3^2/(2*d*f) "
         "- c*exp(-x4)*x3*x4/(f*h))"),
        f"x3/d*{_A43_Y2}*ln(abs{_A43_Y2})",
        "-exp(x4)*x1/h + (d - h*x3)*(2*d^2*x2 + c*h*x3^2 - 2*c*d*x3*x4)/(2*d^2*h*f)"],
       [_H("Q1*exp(-Q3/Q2)",
           "exp(-x4)*x3/(2*d^2*f*h)*(c*h*x3^2 - 2*d*(f*exp(x4)*x1 - d*x2 + c*x3*x4))")],
       ("H", "Q1"), ("Q2", "Q3"), "maximal", "A4_3/R4",
       params=tuple(ParamSpec(n, 1.0, _NZ) for n in "cdhf"),
       guards=(("y2", True), ("y3", False)),
       default_point=(1.5, -0.5, 0.8, 0.2),
       notes="printed H equals Q1*exp(-Q3/Q2) where y2>0; sampling uses y2>0"),
    _g("group/A4_6^{a,0}", "A4_6^{a,b}",
       [(1, 4, "d*exp(-a*x4)"), (2, 3, "c")],
       ["x3", "-exp(2*a*x4)*x1/(a*d)", "-x2/c", "exp(-a*x4)"],
       ["x2/c",
        "exp(-(exp(2*a*x4)*x1/d))*x2*cos(exp(2*a*x4)*x1/(a*d))/c",
        "exp(-(exp(2*a*x4)*x1/d))*x2*sin(exp(2*a*x4)*x1/(a*d))/c",
        "-exp(-a*x4) + a/c*x2*x3"],
       [_H("Q2^2 + Q3^2", "exp(-(2*exp(2*a*x4)*x1/d))*x2^2/c^2")],
       ("H", "Q1"), ("Q2", "Q3"), "maximal", "A4_6/R4", fixed={"b": 0.0},
       params=(ParamSpec("a", 1.0, _NZ), ParamSpec("c", 1.0, _NZ), ParamSpec("d", 1.0, _NZ)),
       algebra_params={"b": 0.0},
       intervals={"x1": ((-1.0, -0.1), (0.1, 1.0)), "x4": ((-1.0, -0.1), (0.1, 0.5))},
       default_point=(0.5, 0.3, 0.7, -0.5),
       notes="H=Q2^2+Q3^2 is the reciprocal of the b=0 Casimir 1/(Q2^2+Q3^2); "
             "x1 sampled in [-1,1] and x4 in [-1,0.5] to keep nested exponentials in range"),
    _g("group/A4_7", "A4_7",
       [(1, 3, "-2*c*x3*exp(-2*x4)"), (1, 4, "c*exp(-2*x4)"), (2, 3, "2*c*exp(-2*x4)")],
       ["exp(2*x4)*x2/(2*c)", f"-{_W}/(2*c)", "x3", "exp(-2*x4)"],
       ["-x3", f"x3*{_W}/(2*c)", "exp(-2*x4)",
        f"x3*(-exp(2*x4)*x2/c + {_W}^2/(8*c^2)) + exp(-2*x4)*{_W}/(2*c)"],
       [_H("Q2", f"x3*{_W}/(2*c)", casimir=False)],
       ("H", "Q1"), (), "integrable", "A4_7/R4",
       params=(ParamSpec("c", 1.0, _NZ),),
       intervals={"x4": ((-1.0, -0.1), (0.1, 1.0))},
       default_point=(0.4, -0.3, 0.5, 0.2)),
    _g("group/A4_9^1", "A4_9^b",
       [(1, 3, "2*c*x3*exp(-2*x4)"), (1, 4, "-c*exp(-2*x4)"), (2, 3, "-2*c*exp(-2*x4)")],
       ["-exp(2*x4)*x2/(2*c)", f"{_W}/(2*c)", "x3", "exp(-2*x4)"],
       ["-x3", "-exp(-2*x4)", f"-x3*{_W}/(2*c)",
        f"exp(2*x4)*x2*x3/c - exp(-2*x4)*{_W}/(2*c)"],
       [_H("Q1", "-x3", casimir=False)],
       ("H", "Q2"), (), "integrable", "A4_9/R4", fixed={"b": 1.0},
       params=(ParamSpec("c", 1.0, _NZ),), algebra_params={"b": 1.0},
       intervals={"x4": ((-1.0, -0.1), (0.1, 1.0))},
       default_point=(0.4, -0.3, 0.5, 0.2)),
    _g("group/A4_12", "A4_12",
       [(1, 3, f"-{_A412_K}*exp(-x3)*(a*cos(x4) + b*sin(x4))"),
        (1, 4, f"{_A412_K}*exp(-x3)*(-b*cos(x4) + a*sin(x4))"),
        (2, 3, f"{_A412_K}*exp(-x3)*(b*cos(x4) - a*sin(x4))"),
        (2, 4, f"-{_A412_K}*exp(-x3)*(a*cos(x4) + b*sin(x4))")],
       [f"exp(2*x3)*{_A412_U}", f"-exp(x3)*{_A412_V}", "exp(-x3)", "x4"],
       ["-exp(-x3)", _A412_V, f"-exp(x3)*{_A412_U}",
        f"-exp(2*x3)*{_A412_U}*{_A412_V} + x4*(1 - exp(2*x3)*{_A412_V})"],
       [_H("Q1", "-exp(-2*x4)", printed="-exp(-2*x4)", casimir=False)],
       ("H", "Q2"), (), "integrable", "A4_12/R4",
       params=(ParamSpec("a", 1.0), ParamSpec("b", 1.0)),
       relations=(("a^2 + b^2 != 0", lambda p: p["a"] ** 2 + p["b"] ** 2 != 0),),
       darboux_printed=(f"exp(2*x3)*{_A412_U}", f"-exp(x3)*{_A412_V}", "exp(x3)", "x4"),
       default_point=(0.4, -0.3, 0.5, 0.2),
       errata="darboux, closure, invariance, involution_core: printed y3=exp(x3) gives "
              "{y1,y3}=-exp(2*x3); y3=exp(-x3) is canonical and matches the printed Q1..Q3. "
              "Printed Q4 has x4*(1-exp(2*x3)*V) where the realization gives "
              "x4*(1+exp(2*x3)*V^2). Printed H=-exp(-2*x4) does not commute with Q2; "
              "curated H=Q1=-exp(-x3)",
       notes="structure constant c fixed to 1/(a^2+b^2) as printed"),
]

BUILTIN: tuple[SystemSpec, ...] = (*R4_SYSTEMS, *R6_SYSTEMS, *GROUPS)

REGISTRY = Registry(BUILTIN)


def list_systems(pattern: str | None = None) -> list[tuple[str, str, str]]:
    """``(id, kind, claimed class)`` in catalog order."""
    return REGISTRY.list_systems(pattern)


def get_system(system_id: str, params: Mapping[str, float] | None = None,
               variant: str = "curated") -> RealizationSystem | GroupSystem:
    return REGISTRY.get_system(system_id, params, variant)


def load_catalog_file(path: str | Path, registry: Registry | None = None) -> list[SystemSpec]:
    """Validate a JSON catalog file and merge its systems into ``registry``."""
    return (registry or REGISTRY).load_file(path)
