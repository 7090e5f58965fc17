"""A small predicate language over coordinate variables ``x[j]``.

Grammar (whitespace-insensitive, ``x[j]`` is 1-based)::

    expr   := or
    or     := and { "or" and }
    and    := not { "and" not }
    not    := "not" not | atom
    atom   := cmp | "(" expr ")"
    cmp    := sum [ ("<" | "<=" | ">" | ">=" | "==" | "!=") sum ]
    sum    := term { ("+" | "-") term }
    term   := factor { "*" factor }
    factor := INT | INT "/" INT | "x" "[" INT "]" | "-" factor | "(" sum ")"

Parenthesised groups are parsed as full expressions and typed afterwards,
which resolves the ``"(" expr ")"`` / ``"(" sum ")"`` overlap without
backtracking.  Comparison chains are rejected.  Evaluation is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import InputError, PredicateSyntaxError
from .model import Event, ProductSpace, normalize_support


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, as written


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Arith:
    op: str  # "+", "-", "*"
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and", "or"
    left: "Node"
    right: "Node"


Node = Union[Num, Var, Neg, Arith, Compare, Not, BoolOp]

ARITH, BOOL = "arithmetic", "boolean"
COMPARISONS = ("<=", ">=", "==", "!=", "<", ">")

_TOKEN = re.compile(r"\s*(?:(\d+)|(<=|>=|==|!=|[<>+\-*/()\[\]])|([A-Za-z_]\w*))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "op", "word", "end"
    text: str
    pos: int  # 1-based column


def _tokenize(text: str) -> list[_Tok]:
    toks, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise PredicateSyntaxError(f"unexpected character {text[i]!r}", i + 1, text)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), start + 1))
        elif m.group(2) is not None:
            toks.append(_Tok("op", m.group(2), start + 1))
        else:
            toks.append(_Tok("word", m.group(3), start + 1))
        i = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        return PredicateSyntaxError(f"{message}, found {what}", tok.pos, self.text)

    def accept(self, kind, text=None):
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind, text=None, what=None):
        t = self.accept(kind, text)
        if t is None:
            raise self.error(f"expected {what or text or kind}")
        return t

    # precedence levels, loosest first
    def parse_or(self):
        node = self.parse_and()
        while (t := self.accept("word", "or")) is not None:
            node = BoolOp("or", self._typed(node, BOOL, t), self._typed(self.parse_and(), BOOL, t))
        return node

    def parse_and(self):
        node = self.parse_not()
        while (t := self.accept("word", "and")) is not None:
            node = BoolOp("and", self._typed(node, BOOL, t), self._typed(self.parse_not(), BOOL, t))
        return node

    def parse_not(self):
        if (t := self.accept("word", "not")) is not None:
            return Not(self._typed(self.parse_not(), BOOL, t))
        return self.parse_cmp()

    def parse_cmp(self):
        left = self.parse_sum()
        t = self.tok
        if t.kind == "op" and t.text in COMPARISONS:
            self.i += 1
            right = self.parse_sum()
            node = Compare(t.text, self._typed(left, ARITH, t), self._typed(right, ARITH, t))
            nxt = self.tok
            if nxt.kind == "op" and nxt.text in COMPARISONS:
                raise PredicateSyntaxError("comparison chains are not allowed", nxt.pos, self.text)
            return node
        return left

    def parse_sum(self):
        node = self.parse_term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.tok
            self.i += 1
            node = Arith(t.text, self._typed(node, ARITH, t), self._typed(self.parse_term(), ARITH, t))
        return node

    def parse_term(self):
        node = self.parse_factor()
        while (t := self.accept("op", "*")) is not None:
            node = Arith("*", self._typed(node, ARITH, t), self._typed(self.parse_factor(), ARITH, t))
        return node

    def parse_factor(self):
        t = self.tok
        if (num := self.accept("int")) is not None:
            if self.accept("op", "/") is not None:
                den = self.expect("int", what="an integer denominator")
                if int(den.text) == 0:
                    raise PredicateSyntaxError("zero denominator", den.pos, self.text)
                return Num(Fraction(int(num.text), int(den.text)))
            return Num(Fraction(int(num.text)))
        if self.accept("word", "x") is not None:
            self.expect("op", "[")
            idx = self.expect("int", what="a coordinate index")
            self.expect("op", "]")
            if int(idx.text) < 1:
                raise PredicateSyntaxError("coordinate indices start at 1", idx.pos, self.text)
            return Var(int(idx.text))
        if self.accept("op", "-") is not None:
            return Neg(self._typed(self.parse_factor(), ARITH, t))
        if self.accept("op", "(") is not None:
            inner = self.parse_or()
            self.expect("op", ")")
            return inner
        raise self.error("expected a number, x[j], '-' or '('")

    def _typed(self, node, want, tok):
        got = node_type(node)
        if got != want:
            raise PredicateSyntaxError(
                f"type mismatch: {tok.text!r} needs a {want} operand, got a {got} one", tok.pos, self.text
            )
        return node


def node_type(node: Node) -> str:
    return BOOL if isinstance(node, (Compare, Not, BoolOp)) else ARITH


def parse_predicate(text: str, n_coords: int | None = None, *, allow_arithmetic: bool = False) -> Node:
    """Parse ``text`` into an AST.

    With ``n_coords`` given, references beyond ``x[n_coords]`` are rejected.
    The top level must be boolean unless ``allow_arithmetic`` is set.
    """
    if not text or not text.strip():
        raise PredicateSyntaxError("empty predicate", 1, text)
    p = _Parser(text)
    node = p.parse_or()
    if p.tok.kind != "end":
        raise p.error("unexpected trailing input")
    if not allow_arithmetic and node_type(node) != BOOL:
        raise PredicateSyntaxError("predicate must be a comparison or boolean expression", 1, text)
    if n_coords is not None:
        for j in sorted(variables(node)):
            if j > n_coords:
                raise InputError(f"x[{j}] refers to an undeclared coordinate (space has {n_coords})")
    return node


def variables(node: Node) -> set[int]:
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Not)):
        return variables(node.operand)
    return variables(node.left) | variables(node.right)


_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "neg": 7, "atom": 8}


def _prec(node: Node) -> int:
    if isinstance(node, BoolOp):
        return _PREC[node.op]
    if isinstance(node, Not):
        return _PREC["not"]
    if isinstance(node, Compare):
        return _PREC["cmp"]
    if isinstance(node, Arith):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Num) and node.value.denominator != 1:
        return _PREC["*"]  # "1/2" must be bracketed under unary minus
    return _PREC["atom"]


def unparse(node: Node) -> str:
    """Render with the minimum parentheses needed to parse back to ``node``."""

    def wrap(child, min_prec):
        s = unparse(child)
        return f"({s})" if _prec(child) < min_prec else s

    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Var):
        return f"x[{node.index}]"
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _PREC["neg"])
    if isinstance(node, Not):
        return "not " + wrap(node.operand, _PREC["not"])
    if isinstance(node, Compare):
        return f"{wrap(node.left, _PREC['+'])} {node.op} {wrap(node.right, _PREC['+'])}"
    p = _prec(node)
    # all binary operators are left-associative
    return f"{wrap(node.left, p)} {node.op} {wrap(node.right, p + 1)}"


def evaluate(node: Node, env):
    """Evaluate exactly. ``env`` maps 1-based indices to ints, Fractions or
    broadcastable object arrays of them."""
    if isinstance(node, Num):
        v = node.value
        return v.numerator if v.denominator == 1 else v
    if isinstance(node, Var):
        return env[node.index]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Arith):
        a, b = evaluate(node.left, env), evaluate(node.right, env)
        return a + b if node.op == "+" else a - b if node.op == "-" else a * b
    if isinstance(node, Compare):
        a, b = evaluate(node.left, env), evaluate(node.right, env)
        out = {"<": lambda: a < b, "<=": lambda: a <= b, ">": lambda: a > b,
               ">=": lambda: a >= b, "==": lambda: a == b, "!=": lambda: a != b}[node.op]()
        return np.asarray(out, dtype=bool)
    if isinstance(node, Not):
        return np.logical_not(evaluate(node.operand, env))
    a, b = evaluate(node.left, env), evaluate(node.right, env)
    return np.logical_and(a, b) if node.op == "and" else np.logical_or(a, b)


def _grid_env(space: ProductSpace, support: list[int]) -> dict:
    env = {}
    k = len(support)
    for ax, j in enumerate(support):
        coord = space.coords[j]
        if not coord.is_numeric:
            raise InputError(f"x[{j + 1}] ({coord.name!r}) has non-numeric atoms and cannot be used arithmetically")
        shape = [1] * k
        shape[ax] = coord.size
        env[j + 1] = np.array(coord.atoms, dtype=object).reshape(shape)
    return env


def compile_predicate(space: ProductSpace, ast: Node, name: str = "event") -> Event:
    """Tabulate ``ast`` over its referenced coordinates and normalize the support."""
    if node_type(ast) != BOOL:
        raise InputError("only boolean predicates compile to events")
    refs = sorted(variables(ast))
    if refs and refs[-1] > space.m:
        raise InputError(f"x[{refs[-1]}] refers to an undeclared coordinate (space has {space.m})")
    support = [j - 1 for j in refs]
    env = _grid_env(space, support)
    table = np.broadcast_to(evaluate(ast, env), space.dims(support))
    return normalize_support(space, Event(name, tuple(support), np.array(table, dtype=bool)))
