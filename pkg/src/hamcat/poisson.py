"""Poisson brackets of expressions.

Canonical brackets use the convention

    {F, G} = sum_a (dF/dx_a dG/dp_a - dF/dp_a dG/dx_a),

so that ``{x_a, p_a} = 1``.  With this sign the realization
``Q2 = -p2``, ``Q4 = -x2 p1 - x3 p2`` gives ``{Q2, Q4} = -p1 = Q1``, i.e.
``[e2, e4] = e1`` of A4,1.  Bivector brackets take the coefficients
``P^{mu nu} = {x_mu, x_nu}`` as data.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .expr import (ZERO, Expression, SamplingDomain, add, bind, differentiate, make_rng,
                   mul, neg, sample_values, sub)

__all__ = ["CanonicalStructure", "PoissonBivector", "canonical_bracket",
           "bivector_bracket", "jacobi_defect_bivector", "jacobi_sums"]


@dataclass(frozen=True)
class CanonicalStructure:
    """Phase space R^{2N} with coordinates x1..xN and momenta p1..pN."""

    N: int

    @property
    def positions(self) -> tuple[str, ...]:
        return tuple(f"x{a}" for a in range(1, self.N + 1))

    @property
    def momenta(self) -> tuple[str, ...]:
        return tuple(f"p{a}" for a in range(1, self.N + 1))

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.positions + self.momenta


def canonical_bracket(F: Expression, G: Expression, s: CanonicalStructure) -> Expression:
    terms = []
    for x, p in zip(s.positions, s.momenta):
        terms.append(mul(differentiate(F, x), differentiate(G, p)))
        terms.append(neg(mul(differentiate(F, p), differentiate(G, x))))
    return add(*terms)


class PoissonBivector:
    """Antisymmetric coefficient matrix ``P^{mu nu}(x)`` on named coordinates.

    Only entries with ``mu < nu`` are given; the lower triangle is their
    negative by construction.
    """

    def __init__(self, coordinates: Sequence[str],
                 upper: Mapping[tuple[int, int], Expression]):
        self.coordinates = tuple(coordinates)
        n = len(self.coordinates)
        self._upper: dict[tuple[int, int], Expression] = {}
        for (mu, nu), expr in upper.items():
            if not (0 <= mu < n and 0 <= nu < n) or mu == nu:
                raise ValueError(f"bad bivector index pair ({mu}, {nu})")
            if mu > nu:
                if (nu, mu) in upper:
                    raise ValueError(f"entry ({mu},{nu}) given together with ({nu},{mu})")
                mu, nu, expr = nu, mu, neg(expr)
            self._upper[(mu, nu)] = expr

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def __getitem__(self, index: tuple[int, int]) -> Expression:
        mu, nu = index
        if mu == nu:
            return ZERO
        if mu < nu:
            return self._upper.get((mu, nu), ZERO)
        return neg(self._upper.get((nu, mu), ZERO))

    def entries(self) -> dict[tuple[int, int], Expression]:
        """Nonzero upper-triangle entries (0-based)."""
        return dict(sorted(self._upper.items()))

    def bind(self, params: Mapping[str, float]) -> "PoissonBivector":
        return PoissonBivector(self.coordinates,
                               {k: bind(v, params) for k, v in self._upper.items()})


def bivector_bracket(F: Expression, G: Expression, P: PoissonBivector) -> Expression:
    dF = [differentiate(F, c) for c in P.coordinates]
    dG = [differentiate(G, c) for c in P.coordinates]
    terms = []
    for (mu, nu), coeff in P.entries().items():
        terms.append(mul(coeff, sub(mul(dF[mu], dG[nu]), mul(dF[nu], dG[mu]))))
    return add(*terms)


def jacobi_sums(P: PoissonBivector) -> dict[tuple[int, int, int], Expression]:
    """Cyclic sums ``P^{mu s} d_s P^{nu r} + P^{nu s} d_s P^{r mu} + P^{r s} d_s P^{mu nu}``.

    The sum is totally antisymmetric, so only ``mu < nu < r`` is built.
    """
    n = P.dimension
    grads = {(a, b): [differentiate(P[a, b], c) for c in P.coordinates]
             for a in range(n) for b in range(n)}
    out = {}
    for mu, nu, r in itertools.combinations(range(n), 3):
        terms = []
        for s in range(n):
            terms.append(mul(P[mu, s], grads[nu, r][s]))
            terms.append(mul(P[nu, s], grads[r, mu][s]))
            terms.append(mul(P[r, s], grads[mu, nu][s]))
        out[(mu, nu, r)] = add(*terms)
    return out


def jacobi_defect_bivector(P: PoissonBivector, dom: SamplingDomain | None = None,
                           n_samples: int = 100, params: Mapping[str, float] | None = None,
                           seed: int = 0) -> float:
    """Largest absolute Jacobi cyclic sum over all coordinate triples and samples."""
    sums = list(jacobi_sums(P).values())
    if not sums:
        return 0.0
    rng = make_rng(seed, "bivector-jacobi")
    worst = 0.0
    for _, values in sample_values(sums, dom, n_samples, params, rng,
                                   extra_variables=P.coordinates):
        worst = max(worst, max(abs(v) for v in values))
    return worst
