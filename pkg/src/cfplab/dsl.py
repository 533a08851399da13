"""Interval-piecewise real functions: parsing, evaluation, inversion, canonical text.

Grammar::

    fn       := "piece" interval ":" expr (";" "piece" interval ":" expr)*
    interval := ("(" | "[") rational "," rational (")" | "]")
    expr     := arithmetic over rationals and "x" with + - * / and parentheses

Rationals are written ``p/q`` or as decimals; whitespace is insignificant.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .errors import DomainError, EvalError, InversionError, ParseError, StructureError
from .metric import EPS_DOM, Domain, Interval, as_point, as_rational, format_rational

TOL_PRE = 1e-12
MAX_HALVINGS = 200
_MONOTONE_PROBES = 65


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Neg, BinOp]
X = Var()


def evaluate(expr: Expr, x):
    """Evaluate at ``x``; Fraction input gives an exact Fraction result."""
    if isinstance(expr, Const):
        return expr.value if isinstance(x, Fraction) else float(expr.value)
    if isinstance(expr, Var):
        return x
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, x)
    a = evaluate(expr.left, x)
    b = evaluate(expr.right, x)
    if expr.op == "+":
        return a + b
    if expr.op == "-":
        return a - b
    if expr.op == "*":
        return a * b
    if b == 0:
        raise EvalError(f"division by zero evaluating {format_expr(expr)} at x={x}")
    return a / b


def affine_coefficients(expr: Expr) -> tuple[Fraction, Fraction] | None:
    """``(c, m)`` with ``expr == c + m*x`` when the body is affine in x, else ``None``."""
    if isinstance(expr, Const):
        return expr.value, Fraction(0)
    if isinstance(expr, Var):
        return Fraction(0), Fraction(1)
    if isinstance(expr, Neg):
        inner = affine_coefficients(expr.operand)
        return None if inner is None else (-inner[0], -inner[1])
    left, right = affine_coefficients(expr.left), affine_coefficients(expr.right)
    if left is None or right is None:
        return None
    (c1, m1), (c2, m2) = left, right
    if expr.op == "+":
        return c1 + c2, m1 + m2
    if expr.op == "-":
        return c1 - c2, m1 - m2
    if expr.op == "*":
        if m1 and m2:
            return None
        return c1 * c2, c1 * m2 + m1 * c2
    if m2 or c2 == 0:
        return None
    return c1 / c2, m1 / c2


def has_var(expr: Expr) -> bool:
    if isinstance(expr, Var):
        return True
    if isinstance(expr, Const):
        return False
    if isinstance(expr, Neg):
        return has_var(expr.operand)
    return has_var(expr.left) or has_var(expr.right)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _const_prec(q: Fraction) -> int:
    if q < 0:
        return 2  # "-p/q" and "-p" both re-parse as a unary-led term
    return 4 if q.denominator == 1 else 2


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        return _PREC[expr.op]
    if isinstance(expr, Neg):
        return 3
    if isinstance(expr, Const):
        return _const_prec(expr.value)
    return 4


def format_expr(expr: Expr) -> str:
    """Deterministic text that re-parses to the same tree."""
    if isinstance(expr, Const):
        return format_rational(expr.value)
    if isinstance(expr, Var):
        return "x"
    if isinstance(expr, Neg):
        inner = format_expr(expr.operand)
        if _prec(expr.operand) < 4:
            inner = f"({inner})"
        return "-" + inner
    p = _PREC[expr.op]
    left = format_expr(expr.left)
    if _prec(expr.left) < p:
        left = f"({left})"
    right = format_expr(expr.right)
    right_prec = _prec(expr.right)
    if right_prec <= p or (isinstance(expr.right, Const) and expr.right.value < 0):
        right = f"({right})"
    sep = f" {expr.op} " if p == 1 else expr.op
    return f"{left}{sep}{right}"


# -------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/():;,\[\]]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos, text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str):
        raise ParseError(message, self.tok.pos, self.text)

    def take(self, *texts: str) -> _Tok | None:
        if self.tok.kind in ("op", "name") and self.tok.text in texts:
            tok = self.tok
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> _Tok:
        tok = self.take(text)
        if tok is None:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return tok

    # fn := piece (";" piece)*
    def function(self) -> list[tuple[Interval, Expr]]:
        pieces = [self.piece()]
        while self.take(";"):
            if self.tok.kind == "end":  # tolerate a trailing separator
                break
            pieces.append(self.piece())
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r} after piece")
        return pieces

    def piece(self) -> tuple[Interval, Expr]:
        self.expect("piece")
        interval = self.interval()
        self.expect(":")
        return interval, self.expr()

    def interval(self) -> Interval:
        left = self.take("(", "[")
        if left is None:
            self.error("expected '(' or '[' to open an interval")
        lo = self.signed_rational()
        self.expect(",")
        hi = self.signed_rational()
        right = self.take(")", "]")
        if right is None:
            self.error("expected ')' or ']' to close an interval")
        try:
            return Interval(lo, hi, left.text == "[", right.text == "]")
        except ValueError as exc:
            raise ParseError(str(exc), left.pos, self.text) from exc

    def signed_rational(self) -> Fraction:
        sign = -1 if self.take("-") else 1
        if self.tok.kind != "num":
            self.error("expected a number")
        value = as_rational(self.tok.text)
        self.i += 1
        if self.take("/"):
            if self.tok.kind != "num":
                self.error("expected a denominator")
            den = as_rational(self.tok.text)
            if den == 0:
                self.error("zero denominator")
            self.i += 1
            value /= den
        return sign * value

    def expr(self) -> Expr:
        node = self.term()
        while (tok := self.take("+", "-")) is not None:
            node = _fold(BinOp(tok.text, node, self.term()))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self.take("*", "/")) is not None:
            rhs = self.unary()
            if tok.text == "/" and isinstance(rhs, Const) and rhs.value == 0:
                raise ParseError("division by zero constant", tok.pos, self.text)
            node = _fold(BinOp(tok.text, node, rhs))
        return node

    def unary(self) -> Expr:
        if self.take("-"):
            return _fold(Neg(self.unary()))
        if self.take("+"):
            return self.unary()
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(as_rational(tok.text))
        if tok.kind == "name":
            if tok.text != "x":
                self.error(f"unknown name {tok.text!r}; only 'x' is allowed")
            self.i += 1
            return X
        if self.take("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"expected a number, 'x' or '(' but found {tok.text or 'end of input'!r}")


def _fold(node: Expr) -> Expr:
    """Collapse constant sub-trees so rationals like ``5/12`` become single constants."""
    if isinstance(node, Neg) and isinstance(node.operand, Const):
        return Const(-node.operand.value)
    if isinstance(node, BinOp) and isinstance(node.left, Const) and isinstance(node.right, Const):
        return Const(evaluate(node, Fraction(0)))
    return node


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return node


# ------------------------------------------------------------ piecewise maps


class Policy(str, enum.Enum):
    LEFTMOST = "leftmost"
    RIGHTMOST = "rightmost"
    NEAREST = "nearest"


@dataclass(frozen=True)
class Piece:
    interval: Interval
    body: Expr

    def __str__(self) -> str:
        return f"piece {self.interval}: {format_expr(self.body)}"


@dataclass(frozen=True)
class PiecewiseFn:
    """A real map given by pieces on pairwise-disjoint intervals, kept sorted left to right."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: (p.interval.lo, not p.interval.lo_closed)))
        if not pieces:
            raise StructureError("a piecewise function needs at least one piece")
        for i, a in enumerate(pieces):
            for b in pieces[i + 1 :]:
                if a.interval.intersects(b.interval):
                    raise StructureError(f"pieces {a.interval} and {b.interval} overlap")
        object.__setattr__(self, "pieces", pieces)

    @functools.cached_property
    def domain(self) -> Domain:
        return Domain(tuple(p.interval for p in self.pieces))

    @functools.cached_property
    def breakpoints(self) -> list[Fraction]:
        pts = set()
        for p in self.pieces:
            pts.update((p.interval.lo, p.interval.hi))
        return sorted(pts)

    def piece_index(self, x: float) -> int | None:
        """Index of the piece holding ``x``; open ends of the whole domain keep the EPS_DOM margin."""
        for i, p in enumerate(self.pieces):
            if p.interval.holds(x):
                return i if self.domain.contains(x) else None
        return None

    def __call__(self, x) -> float:
        return eval_fn(self, x)

    def __str__(self) -> str:
        return canonical_format(self)

    def with_body(self, index: int, body: Expr) -> PiecewiseFn:
        pieces = list(self.pieces)
        pieces[index] = Piece(pieces[index].interval, body)
        return PiecewiseFn(tuple(pieces))


def parse_piecewise(text: str, domain=None) -> PiecewiseFn:
    """Parse function text; with ``domain`` given, also require the pieces to cover it exactly."""
    raw = _Parser(text).function()
    fn = PiecewiseFn(tuple(Piece(iv, body) for iv, body in raw))
    if domain is not None:
        check_coverage(fn, domain)
    return fn


def check_coverage(fn: PiecewiseFn, domain) -> None:
    declared = Domain.of(domain)
    if fn.domain != declared:
        raise StructureError(f"pieces cover {fn.domain} but the declared domain is {declared}")


def canonical_format(f: PiecewiseFn) -> str:
    return "; ".join(str(p) for p in f.pieces)


def eval_fn(f: PiecewiseFn, x):
    """Value of the unique piece containing ``x``; Fraction input is evaluated exactly."""
    if isinstance(x, Fraction):
        for p in f.pieces:
            if p.interval.contains_exact(x):
                return evaluate(p.body, x)
        raise DomainError(f"{x} is outside the domain {f.domain}", point=x)
    x = as_point(x)
    idx = f.piece_index(x)
    if idx is None:
        raise DomainError(f"{x!r} is outside the domain {f.domain}", point=x)
    return float(evaluate(f.pieces[idx].body, x))


def _piece_solutions(piece: Piece, y: float, tol: float, constant_rep: str) -> Iterator[float]:
    iv = piece.interval
    lo, hi = iv.effective_bounds()
    coeffs = affine_coefficients(piece.body)
    if coeffs is not None:
        c, m = coeffs
        if m == 0:
            if abs(float(c) - y) <= tol:
                yield {"midpoint": iv.midpoint, "left": lo, "right": hi}[constant_rep]
            return
        x = float((Fraction(y) - c) / m)
        # closed endpoints absorb rounding of the exact solution
        if iv.hi_closed and hi < x <= hi + tol:
            x = hi
        if iv.lo_closed and lo - tol <= x < lo:
            x = lo
        if iv.holds(x):
            yield x
        return
    yield from _bisect_piece(piece, y, lo, hi, tol)


def _bisect_piece(piece: Piece, y: float, lo: float, hi: float, tol: float) -> Iterator[float]:
    def g(t):
        return float(evaluate(piece.body, t)) - y

    if lo == hi:
        if abs(g(lo)) <= tol:
            yield lo
        return
    probes = [lo + (hi - lo) * k / (_MONOTONE_PROBES - 1) for k in range(_MONOTONE_PROBES)]
    values = [g(t) for t in probes]
    for t, v in zip(probes, values):
        if v == 0.0:
            yield t
            return
    # compare signs, not the product: tiny values underflow to zero when multiplied
    bracket = next(((a, b) for a, b, va, vb in zip(probes, probes[1:], values, values[1:]) if (va < 0) != (vb < 0)), None)
    if bracket is None:
        near = [t for t, v in zip(probes, values) if abs(v) <= tol]
        if near:
            yield near[0]
            return
        diffs = [b - a for a, b in zip(values, values[1:])]
        if not (all(d >= 0 for d in diffs) or all(d <= 0 for d in diffs)):
            raise InversionError(f"cannot bracket y={y} on non-monotone piece {piece}")
        return
    a, b = bracket
    ga = g(a)
    for _ in range(MAX_HALVINGS):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm == 0.0 or (b - a) <= tol:
            break
        if (gm < 0) == (ga < 0):
            a, ga = mid, gm
        else:
            b = mid
    x = 0.5 * (a + b)
    if abs(g(x)) <= tol or (b - a) <= tol:
        yield x


def preimage(
    f: PiecewiseFn,
    y,
    policy: Policy | str = Policy.LEFTMOST,
    previous: float | None = None,
    tol: float = TOL_PRE,
    constant_rep: str = "midpoint",
) -> float | None:
    """Some ``x`` with ``f(x) = y`` (within ``tol``), chosen across pieces by ``policy``.

    Constant pieces matching ``y`` contribute a representative point (the piece
    midpoint by default). Returns ``None`` when ``y`` lies outside the range.
    """
    y = as_point(y)
    policy = Policy(policy)
    candidates = []
    for piece in f.pieces:
        for x in _piece_solutions(piece, y, tol, constant_rep):
            if abs(eval_fn(f, x) - y) <= tol:
                candidates.append(x)
    if not candidates:
        return None
    if policy is Policy.RIGHTMOST:
        return candidates[-1]
    if policy is Policy.NEAREST and previous is not None:
        return min(candidates, key=lambda c: (abs(c - previous), c))
    return candidates[0]


def range_contains(f: PiecewiseFn, y, tol: float = TOL_PRE) -> bool:
    return preimage(f, y, tol=tol) is not None


def identity(domain) -> PiecewiseFn:
    return PiecewiseFn(tuple(Piece(iv, X) for iv in Domain.of(domain).components))


def constant(domain, value) -> PiecewiseFn:
    return PiecewiseFn(tuple(Piece(iv, Const(as_rational(value))) for iv in Domain.of(domain).components))


def to_python_source(f: PiecewiseFn, name: str = "f") -> str:
    """Straight-line Python source for ``f`` over floats (used to JIT long iterations)."""
    lines = [f"def {name}(x):"]
    for p in f.pieces:
        lo, hi = p.interval.effective_bounds()
        lines.append(f"    if {lo!r} <= x <= {hi!r}:")
        lines.append(f"        return {_py_expr(p.body)}")
    lines.append("    return math.nan")
    return "\n".join(lines) + "\n"


def _py_expr(expr: Expr) -> str:
    if isinstance(expr, Const):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return "x"
    if isinstance(expr, Neg):
        return f"(-{_py_expr(expr.operand)})"
    return f"({_py_expr(expr.left)} {expr.op} {_py_expr(expr.right)})"


__all__ = [
    "BinOp",
    "Const",
    "Expr",
    "Neg",
    "Piece",
    "PiecewiseFn",
    "Policy",
    "Var",
    "X",
    "affine_coefficients",
    "canonical_format",
    "constant",
    "eval_fn",
    "evaluate",
    "format_expr",
    "has_var",
    "identity",
    "parse_expr",
    "parse_piecewise",
    "preimage",
    "range_contains",
    "to_python_source",
    "EPS_DOM",
]
