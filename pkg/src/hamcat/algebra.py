"""Four-dimensional real Lie algebras given by structure constants.

Each algebra is a named family ``[e_i, e_j] = f_ij^k e_k`` whose
constants may depend on parameters.  Only the brackets with ``i < j``
are stored; the other triangle follows from antisymmetry.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .expr import Expression, evaluate, parse

__all__ = ["LieAlgebra", "AlgebraError", "ALGEBRAS", "get_algebra", "jacobi_defect",
           "canonical_algebra_name"]

DIM = 4


class AlgebraError(ValueError):
    """Unknown algebra or inadmissible parameter values."""


Constraint = tuple[str, Callable[[Mapping[str, float]], bool]]


@dataclass(frozen=True)
class AlgebraFamily:
    name: str
    parameters: tuple[str, ...]
    relations: Mapping[tuple[int, int], Mapping[int, str]]
    constraints: tuple[Constraint, ...] = ()


@dataclass(frozen=True)
class LieAlgebra:
    """A Lie algebra with concrete parameter values.

    ``upper[(i, j)]`` holds ``{k: f_ij^k}`` for ``i < j`` (1-based).
    """

    name: str
    params: Mapping[str, float]
    upper: Mapping[tuple[int, int], Mapping[int, Expression]] = field(repr=False)

    def f(self, i: int, j: int, k: int) -> float:
        """Structure constant f_ij^k with 1-based indices."""
        if i == j:
            return 0.0
        sign = 1.0
        if i > j:
            i, j, sign = j, i, -1.0
        coeff = self.upper.get((i, j), {}).get(k)
        return 0.0 if coeff is None else sign * evaluate(coeff, dict(self.params))

    def bracket(self, i: int, j: int) -> dict[int, float]:
        """Nonzero components of [e_i, e_j]."""
        out = {}
        for k in range(1, DIM + 1):
            v = self.f(i, j, k)
            if v != 0.0:
                out[k] = v
        return out

    def tensor(self) -> list[list[list[float]]]:
        """Dense ``f[i][j][k]`` with 0-based indices."""
        return [[[self.f(i, j, k) for k in range(1, DIM + 1)]
                 for j in range(1, DIM + 1)] for i in range(1, DIM + 1)]


def _fam(name, params, relations, constraints=()):
    return AlgebraFamily(name, tuple(params), relations, tuple(constraints))


ALGEBRAS: dict[str, AlgebraFamily] = {f.name: f for f in [
    _fam("A4_1", (), {(2, 4): {1: "1"}, (3, 4): {2: "1"}}),
    _fam("A4_2^b", ("b",), {(1, 4): {1: "b"}, (2, 4): {2: "1"}, (3, 4): {2: "1", 3: "1"}},
         [("b != 0", lambda p: p["b"] != 0)]),
    _fam("A4_3", (), {(1, 4): {1: "1"}, (3, 4): {2: "1"}}),
    _fam("A4_4", (), {(1, 4): {1: "1"}, (2, 4): {1: "1", 2: "1"}, (3, 4): {2: "1", 3: "1"}}),
    _fam("A4_5^{a,b,c}", ("a", "b", "c"),
         {(1, 4): {1: "a"}, (2, 4): {2: "b"}, (3, 4): {3: "c"}},
         [("a*b*c != 0", lambda p: p["a"] * p["b"] * p["c"] != 0)]),
    _fam("A4_6^{a,b}", ("a", "b"),
         {(1, 4): {1: "a"}, (2, 4): {2: "b", 3: "-1"}, (3, 4): {2: "1", 3: "b"}},
         [("a != 0", lambda p: p["a"] != 0), ("b >= 0", lambda p: p["b"] >= 0)]),
    _fam("A4_7", (), {(1, 4): {1: "2"}, (2, 4): {2: "1"}, (3, 4): {2: "1", 3: "1"},
                      (2, 3): {1: "1"}}),
    _fam("A4_9^b", ("b",),
         {(2, 3): {1: "1"}, (1, 4): {1: "1+b"}, (2, 4): {2: "1"}, (3, 4): {3: "b"}},
         [("|b| <= 1", lambda p: abs(p["b"]) <= 1)]),
    _fam("A4_12", (), {(1, 3): {1: "1"}, (2, 3): {2: "1"}, (1, 4): {2: "-1"},
                       (2, 4): {1: "1"}}),
]}


def canonical_algebra_name(name: str) -> str:
    """Resolve short aliases such as ``A4_9`` to the catalog key ``A4_9^b``."""
    if name in ALGEBRAS:
        return name
    matches = [k for k in ALGEBRAS if k.split("^")[0] == name.split("^")[0]]
    if len(matches) == 1:
        return matches[0]
    raise AlgebraError(f"unknown Lie algebra {name!r}")


def get_algebra(name: str, params: Mapping[str, float] | None = None) -> LieAlgebra:
    """Materialize a catalog algebra at the given parameter values."""
    family = ALGEBRAS[canonical_algebra_name(name)]
    params = dict(params or {})
    missing = [p for p in family.parameters if p not in params]
    if missing:
        raise AlgebraError(f"{family.name}: missing parameter(s) {', '.join(missing)}")
    extra = sorted(set(params) - set(family.parameters))
    if extra:
        raise AlgebraError(f"{family.name}: unknown parameter(s) {', '.join(extra)}")
    values = {k: float(v) for k, v in params.items()}
    for text, ok in family.constraints:
        if not ok(values):
            raise AlgebraError(f"{family.name}: constraint {text} violated by {values}")
    upper = {
        ij: {k: parse(c, family.parameters) for k, c in row.items()}
        for ij, row in family.relations.items()
    }
    return LieAlgebra(family.name, values, upper)


def jacobi_defect(alg: LieAlgebra) -> float:
    """Largest |sum_m f_ij^m f_mk^l + f_jk^m f_mi^l + f_ki^m f_mj^l| over all index tuples."""
    f = alg.tensor()
    r = range(DIM)
    worst = 0.0
    for i, j, k, l in itertools.product(r, r, r, r):
        s = sum(f[i][j][m] * f[m][k][l] + f[j][k][m] * f[m][i][l] + f[k][i][m] * f[m][j][l]
                for m in r)
        worst = max(worst, abs(s))
    return worst
