"""Symbolic expressions over phase-space variables and parameters.

Expressions are immutable trees.  They can be parsed from text, printed
back, differentiated exactly, evaluated at a point, compiled to fast
Python callables, and compared numerically on random samples.

Variables are the phase-space coordinates ``x1..x9``, ``p1..p9`` and
``y1..y9``; parameters are single letters declared by the caller.
"""
from __future__ import annotations

import math
import re
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Expression", "Constant", "Parameter", "Variable", "Sum", "Product",
    "Quotient", "Power", "Negate", "Exp", "Ln", "Abs", "Sin", "Cos",
    "ExprError", "ParseError", "DomainError", "UnassignedSymbolError",
    "Point", "SamplingDomain", "Guard", "Comparison",
    "parse", "differentiate", "evaluate", "substitute", "bind",
    "compile_expressions", "equal_on_samples", "make_rng",
    "const", "add", "sub", "mul", "div", "power", "neg",
    "ZERO", "ONE",
]


class ExprError(ValueError):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class DomainError(ExprError):
    """Evaluation left the domain of a function (log of non-positive, x/0, ...)."""

    def __init__(self, message: str, node: "Expression | None" = None):
        if node is not None:
            message = f"{message} in `{node}`"
        super().__init__(message)
        self.node = node


class UnassignedSymbolError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"symbol {name!r} has no assigned value")
        self.name = name


# ---------------------------------------------------------------------------
# nodes


class Expression:
    """Base class of all expression nodes."""

    __slots__ = ()
    precedence = 100

    def children(self) -> tuple["Expression", ...]:
        return ()

    def variables(self) -> frozenset[str]:
        return frozenset().union(*(c.variables() for c in self.children()))

    def parameters(self) -> frozenset[str]:
        return frozenset().union(*(c.parameters() for c in self.children()))

    def __str__(self) -> str:
        return to_text(self)

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, other):
        return power(self, _lift(other))

    def __neg__(self):
        return neg(self)


def _lift(value) -> Expression:
    if isinstance(value, Expression):
        return value
    return Constant(float(value))


@dataclass(frozen=True, eq=True, repr=True)
class Constant(Expression):
    value: float


@dataclass(frozen=True)
class Parameter(Expression):
    name: str

    def parameters(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Variable(Expression):
    name: str

    def variables(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Sum(Expression):
    terms: tuple[Expression, ...]
    precedence = 10

    def children(self):
        return self.terms


@dataclass(frozen=True)
class Product(Expression):
    factors: tuple[Expression, ...]
    precedence = 20

    def children(self):
        return self.factors


@dataclass(frozen=True)
class Quotient(Expression):
    numerator: Expression
    denominator: Expression
    precedence = 20

    def children(self):
        return (self.numerator, self.denominator)


@dataclass(frozen=True)
class Power(Expression):
    base: Expression
    exponent: Expression
    precedence = 30

    def children(self):
        return (self.base, self.exponent)


@dataclass(frozen=True)
class Negate(Expression):
    operand: Expression
    precedence = 25

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class _Function(Expression):
    operand: Expression
    name = ""

    def children(self):
        return (self.operand,)


class Exp(_Function):
    name = "exp"


class Ln(_Function):
    name = "ln"


class Abs(_Function):
    name = "abs"


class Sin(_Function):
    name = "sin"


class Cos(_Function):
    name = "cos"


FUNCTIONS: dict[str, type[_Function]] = {
    cls.name: cls for cls in (Exp, Ln, Abs, Sin, Cos)
}

ZERO = Constant(0.0)
ONE = Constant(1.0)


# ---------------------------------------------------------------------------
# simplifying constructors (local rewrites only)


def const(value: float) -> Constant:
    return Constant(float(value))


def _is_const(e: Expression, value: float | None = None) -> bool:
    return isinstance(e, Constant) and (value is None or e.value == value)


def add(*terms: Expression) -> Expression:
    flat: list[Expression] = []
    total = 0.0
    for t in terms:
        parts = t.terms if isinstance(t, Sum) else (t,)
        for p in parts:
            if isinstance(p, Constant):
                total += p.value
            else:
                flat.append(p)
    if total != 0.0 or not flat:
        flat.append(Constant(total))
    return flat[0] if len(flat) == 1 else Sum(tuple(flat))


def neg(e: Expression) -> Expression:
    if isinstance(e, Constant):
        return Constant(-e.value)
    if isinstance(e, Negate):
        return e.operand
    return Negate(e)


def sub(a: Expression, b: Expression) -> Expression:
    return add(a, neg(b))


def mul(*factors: Expression) -> Expression:
    flat: list[Expression] = []
    coeff = 1.0
    for f in factors:
        parts = f.factors if isinstance(f, Product) else (f,)
        for p in parts:
            if isinstance(p, Negate):
                coeff = -coeff
                p = p.operand
            if isinstance(p, Constant):
                coeff *= p.value
            else:
                flat.append(p)
    if coeff == 0.0:
        return ZERO
    if not flat:
        return Constant(coeff)
    body = flat[0] if len(flat) == 1 else Product(tuple(flat))
    if coeff == 1.0:
        return body
    if coeff == -1.0:
        return Negate(body)
    return Product((Constant(coeff), *flat))


def div(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    if _is_const(b, -1.0):
        return neg(a)
    if isinstance(a, Constant) and isinstance(b, Constant) and b.value != 0.0:
        return Constant(a.value / b.value)
    return Quotient(a, b)


def power(b: Expression, e: Expression) -> Expression:
    if _is_const(e, 0.0):
        return ONE
    if _is_const(e, 1.0):
        return b
    if isinstance(b, Constant) and isinstance(e, Constant):
        return _fold(Power(b, e))
    return Power(b, e)


def _fold(e: Expression) -> Expression:
    try:
        return Constant(_eval_node(e, {}, {}))
    except ExprError:
        return e


def _apply(cls: type[_Function], u: Expression) -> Expression:
    node = cls(u)
    return _fold(node) if isinstance(u, Constant) else node


# ---------------------------------------------------------------------------
# printing


def _num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        text = str(int(v))
    else:
        text = repr(v)
    return f"({text})" if v < 0 or text.startswith("-") else text


def to_text(e: Expression) -> str:
    """Render in the input grammar; ``parse(to_text(e))`` evaluates like ``e``."""
    if isinstance(e, Constant):
        return _num(e.value)
    if isinstance(e, (Parameter, Variable)):
        return e.name
    if isinstance(e, _Function):
        return f"{e.name}({to_text(e.operand)})"
    if isinstance(e, Sum):
        out = to_text(e.terms[0])
        for t in e.terms[1:]:
            if isinstance(t, Negate):
                out += " - " + _wrap(t.operand, 11)
            else:
                out += " + " + to_text(t)
        return out
    if isinstance(e, Product):
        return "*".join(_wrap(f, 20) for f in e.factors)
    if isinstance(e, Quotient):
        return f"{_wrap(e.numerator, 20)}/{_wrap(e.denominator, 30)}"
    if isinstance(e, Power):
        return f"{_wrap(e.base, 31)}^{_wrap(e.exponent, 31)}"
    if isinstance(e, Negate):
        return "-" + _wrap(e.operand, 21)
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expression, min_prec: int) -> str:
    text = to_text(e)
    if isinstance(e, Constant):
        return text
    return f"({text})" if e.precedence < min_prec else text


# ---------------------------------------------------------------------------
# parsing (Pratt style)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_VARIABLE = re.compile(r"[xpy][1-9]")


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    raw = text.encode("utf-8")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            at = pos + stripped
            raise ParseError(f"unexpected character {text[at]!r}",
                             len(text[:at].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), len(text[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(_Token("end", "", len(raw)))
    return tokens


_INFIX = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_PREFIX_MINUS = 25


class _Parser:
    def __init__(self, text: str, parameters: frozenset[str],
                 bindings: Mapping[str, Expression]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.parameters = parameters
        self.bindings = bindings

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind == "end":
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                             self.tok.offset)
        self.advance()

    def expression(self, rbp: int = 0) -> Expression:
        left = self.nud(self.advance())
        while self.tok.kind == "op" and _INFIX.get(self.tok.text, 0) > rbp:
            op = self.advance()
            left = self.led(op, left)
        return left

    def nud(self, t: _Token) -> Expression:
        if t.kind == "num":
            return Constant(float(t.text))
        if t.kind == "ident":
            return self.identifier(t)
        if t.text == "-":
            return Negate(self.expression(_PREFIX_MINUS))
        if t.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset)

    def led(self, op: _Token, left: Expression) -> Expression:
        if op.text == "^":
            return Power(left, self.expression(_INFIX["^"] - 1))
        right = self.expression(_INFIX[op.text])
        if op.text == "+":
            return Sum((left, right))
        if op.text == "-":
            return Sum((left, Negate(right)))
        if op.text == "*":
            return Product((left, right))
        return Quotient(left, right)

    def identifier(self, t: _Token) -> Expression:
        name = t.text
        if name in FUNCTIONS:
            if self.tok.text != "(":
                raise ParseError(f"expected '(' after {name}", self.tok.offset)
            self.advance()
            arg = self.expression()
            self.expect(")")
            return FUNCTIONS[name](arg)
        if name in self.bindings:
            return self.bindings[name]
        if _VARIABLE.fullmatch(name):
            return Variable(name)
        if name in self.parameters:
            return Parameter(name)
        raise ParseError(f"unknown identifier {name!r}", t.offset)


def parse(text: str, parameters: Iterable[str] = (),
          bindings: Mapping[str, Expression] | None = None) -> Expression:
    """Parse ``text`` into an expression tree.

    ``parameters`` declares the admissible single-letter parameter names.
    ``bindings`` maps extra identifiers (e.g. ``Q1`` or ``H``) to
    expressions that are spliced in place.
    """
    params = frozenset(parameters)
    for p in params:
        if len(p) != 1 or not p.isalpha():
            raise ValueError(f"parameter names are single letters, got {p!r}")
    parser = _Parser(text, params, bindings or {})
    if parser.tok.kind == "end":
        raise ParseError("empty expression", parser.tok.offset)
    result = parser.expression()
    if parser.tok.kind != "end":
        raise ParseError(f"unexpected {parser.tok.text!r}", parser.tok.offset)
    return result


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e: Expression, v: str) -> Expression:
    """Exact partial derivative of ``e`` with respect to variable ``v``."""
    memo: dict[int, Expression] = {}
    keep: list[Expression] = []

    def d(n: Expression) -> Expression:
        key = id(n)
        if key in memo:
            return memo[key]
        keep.append(n)
        r = _derive(n, v, d)
        memo[key] = r
        return r

    return d(e)


def _derive(n: Expression, v: str, d: Callable[[Expression], Expression]) -> Expression:
    if isinstance(n, Variable):
        return ONE if n.name == v else ZERO
    if isinstance(n, (Constant, Parameter)):
        return ZERO
    if isinstance(n, Sum):
        return add(*(d(t) for t in n.terms))
    if isinstance(n, Product):
        terms = []
        for i, f in enumerate(n.factors):
            df = d(f)
            if _is_const(df, 0.0):
                continue
            terms.append(mul(*n.factors[:i], df, *n.factors[i + 1:]))
        return add(*terms) if terms else ZERO
    if isinstance(n, Quotient):
        du, dw = d(n.numerator), d(n.denominator)
        if _is_const(dw, 0.0):
            return div(du, n.denominator)
        return div(sub(mul(du, n.denominator), mul(n.numerator, dw)),
                   power(n.denominator, Constant(2.0)))
    if isinstance(n, Power):
        b, ex = n.base, n.exponent
        db, dex = d(b), d(ex)
        if _is_const(dex, 0.0):
            if _is_const(db, 0.0):
                return ZERO
            return mul(ex, power(b, sub(ex, ONE)), db)
        log_part = mul(dex, Ln(b))
        if _is_const(db, 0.0):
            return mul(n, log_part)
        return mul(n, add(log_part, div(mul(ex, db), b)))
    if isinstance(n, Negate):
        return neg(d(n.operand))
    u = n.operand
    du = d(u)
    if _is_const(du, 0.0):
        return ZERO
    if isinstance(n, Exp):
        return mul(n, du)
    if isinstance(n, Ln):
        return div(du, u)
    if isinstance(n, Abs):
        return mul(div(u, n), du)
    if isinstance(n, Sin):
        return mul(_apply(Cos, u), du)
    if isinstance(n, Cos):
        return neg(mul(_apply(Sin, u), du))
    raise TypeError(f"cannot differentiate {n!r}")


# ---------------------------------------------------------------------------
# substitution


def substitute(e: Expression, mapping: Mapping[str, Expression]) -> Expression:
    """Replace variables and parameters by expressions, simplifying locally."""
    memo: dict[int, Expression] = {}
    keep: list[Expression] = []

    def s(n: Expression) -> Expression:
        key = id(n)
        if key in memo:
            return memo[key]
        keep.append(n)
        if isinstance(n, (Variable, Parameter)):
            r = mapping.get(n.name, n)
        elif isinstance(n, Constant):
            r = n
        elif isinstance(n, Sum):
            r = add(*(s(t) for t in n.terms))
        elif isinstance(n, Product):
            r = mul(*(s(f) for f in n.factors))
        elif isinstance(n, Quotient):
            r = div(s(n.numerator), s(n.denominator))
        elif isinstance(n, Power):
            r = power(s(n.base), s(n.exponent))
        elif isinstance(n, Negate):
            r = neg(s(n.operand))
        else:
            r = _apply(type(n), s(n.operand))
        memo[key] = r
        return r

    return s(e)


def bind(e: Expression, params: Mapping[str, float]) -> Expression:
    """Fix parameter values as constants."""
    return substitute(e, {k: Constant(float(v)) for k, v in params.items()})


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Point:
    """Variable assignment plus parameter assignment."""

    variables: Mapping[str, float]
    parameters: Mapping[str, float] = field(default_factory=dict)

    def lookup(self) -> dict[str, float]:
        return {**self.parameters, **self.variables}


def _pow_value(b: float, e: float, node=None) -> float:
    if float(e).is_integer():
        if b == 0.0 and e < 0:
            raise DomainError("zero raised to a negative power", node)
        try:
            return float(b ** int(e))
        except OverflowError:
            raise DomainError("overflow in power", node) from None
    if b <= 0.0:
        raise DomainError("non-integer power of a non-positive base", node)
    try:
        return math.pow(b, e)
    except OverflowError:
        raise DomainError("overflow in power", node) from None


def _eval_node(n: Expression, env: Mapping[str, float], memo: dict) -> float:
    key = id(n)
    if key in memo:
        return memo[key]
    if isinstance(n, Constant):
        r = n.value
    elif isinstance(n, (Variable, Parameter)):
        if n.name not in env:
            raise UnassignedSymbolError(n.name)
        r = float(env[n.name])
    elif isinstance(n, Sum):
        r = 0.0
        for t in n.terms:
            r += _eval_node(t, env, memo)
    elif isinstance(n, Product):
        r = 1.0
        for f in n.factors:
            r *= _eval_node(f, env, memo)
    elif isinstance(n, Quotient):
        num = _eval_node(n.numerator, env, memo)
        den = _eval_node(n.denominator, env, memo)
        if den == 0.0:
            raise DomainError("division by zero", n)
        r = num / den
    elif isinstance(n, Power):
        r = _pow_value(_eval_node(n.base, env, memo), _eval_node(n.exponent, env, memo), n)
    elif isinstance(n, Negate):
        r = -_eval_node(n.operand, env, memo)
    else:
        u = _eval_node(n.operand, env, memo)
        if isinstance(n, Exp):
            try:
                r = math.exp(u)
            except OverflowError:
                raise DomainError("overflow in exp", n) from None
        elif isinstance(n, Ln):
            if u <= 0.0:
                raise DomainError("logarithm of a non-positive value", n)
            r = math.log(u)
        elif isinstance(n, Abs):
            r = abs(u)
        elif isinstance(n, Sin):
            r = math.sin(u)
        else:
            r = math.cos(u)
    if math.isinf(r) or math.isnan(r):
        raise DomainError("non-finite value", n)
    memo[key] = r
    return r


def evaluate(e: Expression, pt: Point | Mapping[str, float]) -> float:
    """Evaluate ``e`` in double precision.

    Raises DomainError naming the offending subexpression, or
    UnassignedSymbolError for a free symbol without a value.
    """
    env = pt.lookup() if isinstance(pt, Point) else pt
    return _eval_node(e, env, {})


# ---------------------------------------------------------------------------
# compilation to Python callables


def _c_div(a, b):
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def _c_ln(u):
    if u <= 0.0:
        raise DomainError("logarithm of a non-positive value")
    return math.log(u)


def _c_exp(u):
    try:
        return math.exp(u)
    except OverflowError:
        raise DomainError("overflow in exp") from None


_RUNTIME = {"_div": _c_div, "_ln": _c_ln, "_exp": _c_exp, "_pow": _pow_value,
            "_sin": math.sin, "_cos": math.cos, "_abs": abs, "_isfinite": math.isfinite,
            "DomainError": DomainError}


def compile_expressions(exprs: Sequence[Expression], names: Sequence[str]
                        ) -> Callable[..., tuple[float, ...]]:
    """Compile expressions into one function of positional ``names``.

    The returned callable evaluates every expression (sharing common
    subtrees) and returns a tuple.  On a domain failure it re-evaluates
    with :func:`evaluate` so the error names the offending subexpression.
    """
    index = {name: i for i, name in enumerate(names)}
    lines: list[str] = []
    slots: dict[int, str] = {}
    keep: list[Expression] = []

    def emit(n: Expression) -> str:
        key = id(n)
        if key in slots:
            return slots[key]
        keep.append(n)
        if isinstance(n, Constant):
            ref = repr(n.value)
            slots[key] = ref
            return ref
        if isinstance(n, (Variable, Parameter)):
            if n.name not in index:
                raise UnassignedSymbolError(n.name)
            ref = f"a{index[n.name]}"
            slots[key] = ref
            return ref
        if isinstance(n, Sum):
            code = " + ".join(emit(t) for t in n.terms)
        elif isinstance(n, Product):
            code = " * ".join(emit(f) for f in n.factors)
        elif isinstance(n, Quotient):
            code = f"_div({emit(n.numerator)}, {emit(n.denominator)})"
        elif isinstance(n, Power):
            code = f"_pow({emit(n.base)}, {emit(n.exponent)})"
        elif isinstance(n, Negate):
            code = f"-{emit(n.operand)}"
        else:
            code = f"_{n.name}({emit(n.operand)})"
        ref = f"t{len(lines)}"
        lines.append(f"    {ref} = {code}")
        slots[key] = ref
        return ref

    outs = [emit(e) for e in exprs]
    args = ", ".join(f"a{i}" for i in range(len(names)))
    body = "\n".join(lines)
    check = " and ".join(f"_isfinite({o})" for o in outs) or "True"
    src = (f"def _f({args}):\n{body}\n"
           f"    if not ({check}):\n        raise DomainError('non-finite value')\n"
           f"    return ({', '.join(outs)}{',' if len(outs) == 1 else ''})\n")
    namespace = dict(_RUNTIME)
    exec(compile(src, "<hamcat-expr>", "exec"), namespace)
    fast = namespace["_f"]
    exprs = tuple(exprs)
    names = tuple(names)

    def run(*values: float) -> tuple[float, ...]:
        try:
            return fast(*values)
        except (DomainError, ZeroDivisionError, OverflowError, ValueError):
            env = dict(zip(names, values))
            results = tuple(evaluate(e, env) for e in exprs)
            return results

    return run


# ---------------------------------------------------------------------------
# randomized equality


@dataclass(frozen=True)
class Guard:
    """Sampling restriction: reject points where ``|expr| < margin``
    (or ``expr < margin`` when ``positive``)."""

    expr: Expression
    positive: bool = False
    margin: float = 0.1

    def admits(self, value: float) -> bool:
        return value >= self.margin if self.positive else abs(value) >= self.margin


DEFAULT_INTERVALS: tuple[tuple[float, float], ...] = ((-2.0, -0.1), (0.1, 2.0))


@dataclass(frozen=True)
class SamplingDomain:
    """Per-variable unions of intervals, plus guard expressions.

    Variables without an entry use [-2,-0.1] U [0.1,2].
    """

    intervals: Mapping[str, tuple[tuple[float, float], ...]] = field(default_factory=dict)
    guards: tuple[Guard, ...] = ()
    default: tuple[tuple[float, float], ...] = DEFAULT_INTERVALS

    def for_variable(self, name: str) -> tuple[tuple[float, float], ...]:
        return tuple(self.intervals.get(name, self.default))

    def draw(self, names: Sequence[str], rng: np.random.Generator) -> dict[str, float]:
        point = {}
        for name in names:
            ivs = self.for_variable(name)
            lengths = [hi - lo for lo, hi in ivs]
            u = float(rng.random()) * sum(lengths)
            for (lo, hi), length in zip(ivs, lengths):
                if u <= length:
                    point[name] = lo + u
                    break
                u -= length
            else:
                point[name] = ivs[-1][1]
        return point

    def centroid(self, names: Sequence[str]) -> dict[str, float]:
        """Midpoint of each variable's rightmost interval."""
        return {n: 0.5 * sum(self.for_variable(n)[-1]) for n in names}

    def restricted(self, **intervals: tuple[tuple[float, float], ...]) -> "SamplingDomain":
        merged = dict(self.intervals)
        merged.update(intervals)
        return SamplingDomain(merged, self.guards, self.default)


def make_rng(seed: int, key: str = "") -> np.random.Generator:
    """Deterministic generator from a run seed and a stable string key."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF,
                                                          zlib.crc32(key.encode())]))


@dataclass(frozen=True)
class Comparison:
    equal: bool
    residual: float
    point: dict[str, float] | None
    samples: int

    def __bool__(self) -> bool:
        return self.equal


MAX_ATTEMPTS = 1000


def sample_values(exprs: Sequence[Expression], domain: SamplingDomain | None, n: int,
                  params: Mapping[str, float] | None = None,
                  rng: np.random.Generator | None = None, seed: int = 0,
                  extra_variables: Iterable[str] = ()):
    """Yield ``(point, values)`` for ``n`` valid random points.

    A point is valid when every guard admits it and every expression
    evaluates without a domain error.
    """
    domain = domain or SamplingDomain()
    params = dict(params or {})
    rng = rng if rng is not None else make_rng(seed)
    names = sorted(set().union(*(e.variables() for e in exprs), extra_variables,
                               *(g.expr.variables() for g in domain.guards)))
    pnames = sorted(params)
    allnames = [*names, *pnames]
    guard_fn = compile_expressions([g.expr for g in domain.guards], allnames) \
        if domain.guards else None
    fn = compile_expressions(list(exprs), allnames)
    pvals = [params[p] for p in pnames]
    for _ in range(n):
        for _attempt in range(MAX_ATTEMPTS):
            point = domain.draw(names, rng)
            args = [point[v] for v in names] + pvals
            try:
                if guard_fn is not None:
                    gv = guard_fn(*args)
                    if not all(g.admits(x) for g, x in zip(domain.guards, gv)):
                        continue
                values = fn(*args)
            except ExprError:
                continue
            break
        else:
            raise DomainError(f"no valid sample point found in {MAX_ATTEMPTS} attempts")
        yield point, values


def equal_on_samples(e1: Expression, e2: Expression, dom: SamplingDomain | None = None,
                     n: int = 100, tol: float = 1e-9, *,
                     params: Mapping[str, float] | None = None,
                     rng: np.random.Generator | None = None, seed: int = 0) -> Comparison:
    """Compare two expressions at ``n`` random points.

    Equal iff ``|e1-e2| <= tol*(1+max(|e1|,|e2|))`` everywhere; the
    reported residual is the worst normalized difference.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    worst, worst_pt = 0.0, None
    for point, (a, b) in sample_values([e1, e2], dom, n, params, rng, seed):
        r = abs(a - b) / (1.0 + max(abs(a), abs(b)))
        if worst_pt is None or r > worst:
            worst, worst_pt = r, point
    return Comparison(bool(worst <= tol), float(worst), worst_pt, n)
