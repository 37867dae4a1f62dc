"""Seeded random expression generators shared by the property tests."""
import numpy as np

from hamcat.expr import (Abs, Cos, Exp, Ln, Sin, Variable, add, const, div, mul, neg, power,
                         sub)

CANONICAL_VARS = ("x1", "x2", "p1", "p2")


def random_polynomial(rng: np.random.Generator, variables=CANONICAL_VARS, depth=3):
    """Polynomial with small integer coefficients.

    Powers are only applied to leaves so degrees stay moderate; towers like
    ((x^3)^3)^3 make the Jacobi sum a cancellation between 1e8-sized terms.
    """
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.3:
            return const(float(rng.integers(-3, 4)))
        return Variable(str(rng.choice(variables)))
    a = random_polynomial(rng, variables, depth - 1)
    b = random_polynomial(rng, variables, depth - 1)
    op = rng.integers(0, 4 if depth == 1 else 3)
    if op == 0:
        return add(a, b)
    if op == 1:
        return sub(a, b)
    if op == 2:
        return mul(a, b)
    return power(a, const(float(rng.integers(2, 4))))


def random_smooth(rng: np.random.Generator, variables=CANONICAL_VARS, depth=3):
    """Expression that is smooth and moderate wherever its leaves are in [-2, 2]."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.3:
            return const(round(float(rng.uniform(-2, 2)), 3))
        return Variable(str(rng.choice(variables)))
    a = random_smooth(rng, variables, depth - 1)
    b = random_smooth(rng, variables, depth - 1)
    one_plus_sq = add(const(1.0), mul(b, b))
    op = int(rng.integers(0, 10))
    if op == 0:
        return add(a, b)
    if op == 1:
        return sub(a, b)
    if op == 2:
        return mul(a, b)
    if op == 3:
        return div(a, one_plus_sq)
    if op == 4:
        return Sin(a)
    if op == 5:
        return Cos(a)
    if op == 6:
        return Exp(Sin(a))
    if op == 7:
        return Ln(one_plus_sq)
    if op == 8:
        return power(one_plus_sq, const(0.5))
    return neg(Abs(add(a, const(3.0))) if rng.random() < 0.5 else a)
