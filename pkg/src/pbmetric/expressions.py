"""The piecewise real-function expression language.

Grammar (EBNF)::

    expr     := term (("+"|"-") term)* ;
    term     := factor (("*"|"/") factor)* ;
    factor   := unary ("^" factor)? ;                  (right-associative)
    unary    := "-" unary | primary ;
    primary  := NUMBER | IDENT | IDENT "(" args ")" | "(" expr ")" | piecewise ;
    piecewise:= "piecewise" "(" branch (";" branch)* ";" "otherwise" ":" expr ")" ;
    branch   := IDENT "in" setexpr ":" expr ;
    setexpr  := interval ("or" interval)* ;
    interval := ("["|"(") bound "," bound (")"|"]") ;   bound := ["-"] (NUMBER | "inf") ;

Operator precedence: ``^`` binds tighter than ``*``/``/``, which bind
tighter than ``+``/``-``; ``^`` is right-associative.  Per the grammar,
the left operand of ``^`` is a *unary*, so ``-2^2`` parses as ``(-2)^2``.
Built-in calls: max/2, min/2, sqrt/1, cbrt/1, abs/1 and log/1 (natural
logarithm).  Piecewise branches are tried in order, first match wins, and
an ``otherwise`` branch is mandatory so evaluation is total.

Two-variable expressions use the variables ``x`` (first argument) and
``y`` (second).  One-variable expressions may use any single identifier.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import (
    ArityError,
    DivisionByZero,
    DomainError,
    EvaluationError,
    ExprSyntaxError,
)
from .intervals import INF, Interval, IntervalUnion, _format_bound

BUILTIN_ARITY = {"max": 2, "min": 2, "sqrt": 1, "cbrt": 1, "log": 1, "abs": 1}
KEYWORDS = {"piecewise", "otherwise", "in", "or", "inf"}
RESERVED = KEYWORDS | set(BUILTIN_ARITY)

TWO_VAR_NAMES = ("x", "y")


# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class Branch:
    var: Var
    condition: IntervalUnion
    value: "Expr"


@dataclass(frozen=True)
class Piecewise:
    branches: tuple
    otherwise: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call, Piecewise]


# --- tokenizer -------------------------------------------------------------


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<sym>[-+*/^(),;:\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "sym" | "eof"
    text: str
    pos: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"illegal character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, arity: int, var_names):
        self.text = text
        self.tokens = tokenize(text)
        self.idx = 0
        self.arity = arity
        # fixed names for arity 2; arity 1 binds the first identifier seen
        self.var_names = list(var_names) if var_names else None
        self.seen: dict[str, int] = {}

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, text: str, what: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind == "eof" or tok.text != text:
            msg = "unexpected end of input" if tok.kind == "eof" else f"unexpected {tok.text!r}"
            raise ExprSyntaxError(msg, tok.pos, expected=(what or repr(text),))
        return self.advance()

    def fail(self, expected: tuple) -> ExprSyntaxError:
        tok = self.peek()
        msg = "unexpected end of input" if tok.kind == "eof" else f"unexpected {tok.text!r}"
        return ExprSyntaxError(msg, tok.pos, expected=expected)

    # grammar rules ---------------------------------------------------------

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.unary()
        if self.peek().text == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.text == "piecewise":
            return self.piecewise()
        if tok.kind == "ident":
            if tok.text in BUILTIN_ARITY:
                return self.call()
            if tok.text in KEYWORDS:
                raise ExprSyntaxError(f"reserved word {tok.text!r}", tok.pos)
            self.advance()
            if self.peek().text == "(":
                raise ExprSyntaxError(f"unknown function {tok.text!r}", tok.pos,
                                      expected=tuple(sorted(BUILTIN_ARITY)))
            return self.variable(tok)
        raise self.fail(("NUMBER", "IDENT", "'('", "'piecewise'", "'-'"))

    def call(self) -> Expr:
        name_tok = self.advance()
        name = name_tok.text
        self.expect("(")
        args = [self.expr()]
        while self.peek().text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        want = BUILTIN_ARITY[name]
        if len(args) != want:
            raise ExprSyntaxError(
                f"{name} takes {want} argument(s), got {len(args)}", name_tok.pos
            )
        return Call(name, tuple(args))

    def variable(self, tok: _Token) -> Var:
        name = tok.text
        if name in self.seen:
            return Var(name, self.seen[name])
        if self.var_names is not None:
            if name not in self.var_names:
                raise ArityError(
                    f"variable {name!r} not allowed; expected one of "
                    f"{tuple(self.var_names)} (offset {tok.pos})"
                )
            index = self.var_names.index(name)
        else:
            if len(self.seen) >= self.arity:
                raise ArityError(
                    f"variable {name!r} exceeds declared arity {self.arity} "
                    f"(offset {tok.pos})"
                )
            index = len(self.seen)
        self.seen[name] = index
        return Var(name, index)

    def piecewise(self) -> Expr:
        self.expect("piecewise")
        self.expect("(")
        branches = [self.branch()]
        self.expect(";")
        while self.peek().text != "otherwise":
            branches.append(self.branch())
            self.expect(";")
        self.expect("otherwise")
        self.expect(":")
        otherwise = self.expr()
        self.expect(")")
        return Piecewise(tuple(branches), otherwise)

    def branch(self) -> Branch:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in RESERVED:
            raise self.fail(("IDENT",))
        self.advance()
        var = self.variable(tok)
        self.expect("in")
        condition = self.setexpr()
        self.expect(":")
        value = self.expr()
        return Branch(var, condition, value)

    def setexpr(self) -> IntervalUnion:
        intervals = [self.interval()]
        while self.peek().text == "or":
            self.advance()
            intervals.append(self.interval())
        return IntervalUnion(tuple(intervals))

    def interval(self) -> Interval:
        open_tok = self.peek()
        if open_tok.text not in ("[", "("):
            raise self.fail(("'['", "'('"))
        self.advance()
        lo = self.bound()
        self.expect(",")
        hi = self.bound()
        close_tok = self.peek()
        if close_tok.text not in ("]", ")"):
            raise self.fail(("']'", "')'"))
        self.advance()
        try:
            return Interval(lo, hi, open_tok.text == "[", close_tok.text == "]")
        except ValueError as exc:
            raise ExprSyntaxError(str(exc), open_tok.pos) from exc

    def bound(self) -> float:
        sign = 1.0
        if self.peek().text == "-":
            self.advance()
            sign = -1.0
        tok = self.peek()
        if tok.text == "inf":
            self.advance()
            return sign * INF
        if tok.kind == "num":
            self.advance()
            return sign * float(tok.text)
        raise self.fail(("NUMBER", "'inf'"))


def parse_expression(text: str, arity: int, var_names=None) -> Expr:
    """Parse ``text`` into an AST with at most ``arity`` distinct variables.

    Arity-2 expressions must use the canonical names ``x`` (first argument)
    and ``y`` (second); arity-1 expressions may use any single identifier.
    Raises ExprSyntaxError (with offset and expected-token set) or
    ArityError.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    if arity not in (1, 2):
        raise ValueError("arity must be 1 or 2")
    if var_names is None and arity == 2:
        var_names = TWO_VAR_NAMES
    return _Parser(text, arity, var_names).parse()


# --- evaluation -------------------------------------------------------------


def _cbrt(x: float) -> float:
    if x == 0.0:
        return 0.0
    r = math.copysign(abs(x) ** (1.0 / 3.0), x)
    return r - (r * r * r - x) / (3.0 * r * r)


def _pow(a: float, b: float) -> float:
    if a == 0.0 and b < 0.0:
        raise DivisionByZero(f"0.0 ^ {b}")
    if a < 0.0 and b != math.floor(b):
        raise DomainError(f"negative base {a} with fractional exponent {b}")
    try:
        return a ** b
    except OverflowError:
        sign = -1.0 if (a < 0.0 and int(b) % 2 == 1) else 1.0
        return sign * INF


def _ev_num(node, args):
    return node.value


def _ev_var(node, args):
    return args[node.index]


def _ev_neg(node, args):
    return -_evaluate(node.operand, args)


def _ev_binop(node, args):
    a = _evaluate(node.left, args)
    b = _evaluate(node.right, args)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            raise DivisionByZero(f"{a} / 0")
        return a / b
    return _pow(a, b)


def _ev_call(node, args):
    vals = [_evaluate(a, args) for a in node.args]
    f = node.func
    if f == "max":
        return max(vals[0], vals[1])
    if f == "min":
        return min(vals[0], vals[1])
    if f == "abs":
        return abs(vals[0])
    if f == "sqrt":
        if vals[0] < 0.0:
            raise DomainError(f"sqrt({vals[0]})")
        return math.sqrt(vals[0])
    if f == "cbrt":
        return _cbrt(vals[0])
    # natural logarithm
    if vals[0] <= 0.0:
        raise DomainError(f"log({vals[0]})")
    return math.log(vals[0])


def _ev_piecewise(node, args):
    for branch in node.branches:
        if branch.condition.contains(args[branch.var.index]):
            return _evaluate(branch.value, args)
    return _evaluate(node.otherwise, args)


_EVAL = {
    Num: _ev_num,
    Var: _ev_var,
    Neg: _ev_neg,
    BinOp: _ev_binop,
    Call: _ev_call,
    Piecewise: _ev_piecewise,
}


def _evaluate(node, args):
    return _EVAL[type(node)](node, args)


def eval_expr(ast: Expr, *args: float) -> float:
    """Evaluate an AST at one or two real arguments.

    Deterministic and side-effect free.  Raises DomainError or
    DivisionByZero when the point is outside the expression's domain.
    """
    value = _evaluate(ast, args)
    if isinstance(value, bool) or math.isnan(value):
        raise EvaluationError(f"expression produced {value!r} at {args}")
    return float(value)


# --- printing ----------------------------------------------------------------

_PREC_SUM, _PREC_TERM, _PREC_POW, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return {"+": _PREC_SUM, "-": _PREC_SUM,
                "*": _PREC_TERM, "/": _PREC_TERM, "^": _PREC_POW}[node.op]
    if isinstance(node, Neg):
        return _PREC_UNARY
    return _PREC_ATOM


def _render(node, min_prec: int) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_render(a, _PREC_SUM) for a in node.args)})"
    if isinstance(node, Piecewise):
        parts = [
            f"{b.var.name} in {b.condition.to_source()}: {_render(b.value, _PREC_SUM)}"
            for b in node.branches
        ]
        parts.append(f"otherwise: {_render(node.otherwise, _PREC_SUM)}")
        return "piecewise(" + "; ".join(parts) + ")"
    if isinstance(node, Neg):
        # the operand of unary minus is itself a unary
        return "-" + _render(node.operand, _PREC_UNARY)
    # BinOp
    prec = _prec(node)
    if node.op == "^":
        # left side of ^ is a unary, right side another factor
        body = f"{_render(node.left, _PREC_UNARY)} ^ {_render(node.right, _PREC_POW)}"
    else:
        body = (
            f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
        )
    if prec < min_prec:
        return f"({body})"
    return body


def to_source(ast: Expr) -> str:
    """Pretty-print an AST; ``parse_expression(to_source(t))`` is
    structurally identical to ``t``."""
    return _render(ast, _PREC_SUM)


def variables_used(ast: Expr) -> dict[str, int]:
    """Map of variable name -> positional index appearing in the tree."""
    out: dict[str, int] = {}

    def walk(node):
        if isinstance(node, Var):
            out[node.name] = node.index
        elif isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Call):
            for a in node.args:
                walk(a)
        elif isinstance(node, Piecewise):
            for b in node.branches:
                walk(b.var)
                walk(b.value)
            walk(node.otherwise)

    walk(ast)
    return out


def piecewise_breakpoints(ast: Expr) -> list[float]:
    """All finite interval endpoints appearing in piecewise conditions."""
    found: set[float] = set()

    def walk(node):
        if isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Call):
            for a in node.args:
                walk(a)
        elif isinstance(node, Piecewise):
            for b in node.branches:
                for iv in b.condition.intervals:
                    if iv.lo > -INF:
                        found.add(iv.lo)
                    if iv.hi < INF:
                        found.add(iv.hi)
                walk(b.value)
            walk(node.otherwise)

    walk(ast)
    return sorted(found)
