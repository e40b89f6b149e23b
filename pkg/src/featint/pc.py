"""Presence conditions: propositional formulas over feature names.

The same grammar serves feature-model constraints and ``#if`` expressions::

    expr   := or
    or     := and ('||' and)*
    and    := unary ('&&' unary)*
    unary  := '!' unary | atom
    atom   := IDENT | 'defined' '(' IDENT ')' | 'defined' IDENT
            | '0' | '1' | 'true' | 'false' | '(' expr ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import numpy as np

from .errors import FeatintError, UnknownFeatureError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self):
        return "1" if self.value else "0"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "PC"

    def __str__(self):
        if isinstance(self.arg, (Var, Const)):
            return f"!{self.arg}"
        return f"!({self.arg})"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self):
        if not self.args:
            return "1"
        if len(self.args) == 1:
            return str(self.args[0])
        return " && ".join(_wrap(a, (And, Or)) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self):
        if not self.args:
            return "0"
        return " || ".join(_wrap(a, (Or,)) for a in self.args)


PC = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def _wrap(node, needs_parens):
    # nested same-kind nodes are parenthesised too, so str() round-trips through parse()
    if isinstance(node, needs_parens) and len(node.args) > 1:
        return f"({node})"
    return str(node)


def conj(*pcs: PC) -> PC:
    """Conjunction that keeps each argument as one conjunct (no flattening)."""
    if len(pcs) == 1:
        return pcs[0]
    return And(tuple(pcs))


def conj_flat(*pcs: PC) -> PC:
    """Conjunction with nested Ands flattened, TRUE dropped and exact duplicates removed."""
    out = []
    for pc in pcs:
        parts = pc.args if isinstance(pc, And) else (pc,)
        for p in parts:
            if p == TRUE or p in out:
                continue
            if p == FALSE:
                return FALSE
            out.append(p)
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def conjuncts(pc: PC) -> tuple:
    if isinstance(pc, And):
        return pc.args
    if pc == TRUE:
        return ()
    return (pc,)


def features_of(pc: PC) -> frozenset:
    if isinstance(pc, Var):
        return frozenset((pc.name,))
    if isinstance(pc, Not):
        return features_of(pc.arg)
    if isinstance(pc, (And, Or)):
        out = frozenset()
        for a in pc.args:
            out |= features_of(a)
        return out
    return frozenset()


def evaluate(pc: PC, assignment: Mapping[str, bool]) -> bool:
    """Evaluate under a total assignment (any mapping, including a Configuration)."""
    if isinstance(pc, Var):
        try:
            return bool(assignment[pc.name])
        except KeyError:
            raise UnknownFeatureError(pc.name, "not in configuration") from None
    if isinstance(pc, Const):
        return pc.value
    if isinstance(pc, Not):
        return not evaluate(pc.arg, assignment)
    if isinstance(pc, And):
        # evaluate every argument so unknown names are reported even after a false conjunct
        return all([evaluate(a, assignment) for a in pc.args])
    if isinstance(pc, Or):
        return any([evaluate(a, assignment) for a in pc.args])
    raise TypeError(f"not a presence condition: {pc!r}")


def evaluate_matrix(pc: PC, columns: Mapping[str, np.ndarray], n_rows: int) -> np.ndarray:
    """Vectorised evaluation; ``columns`` maps feature name to a boolean column."""
    if isinstance(pc, Var):
        try:
            return columns[pc.name]
        except KeyError:
            raise UnknownFeatureError(pc.name) from None
    if isinstance(pc, Const):
        return np.full(n_rows, pc.value, dtype=bool)
    if isinstance(pc, Not):
        return ~evaluate_matrix(pc.arg, columns, n_rows)
    if isinstance(pc, And):
        out = np.ones(n_rows, dtype=bool)
        for a in pc.args:
            out &= evaluate_matrix(a, columns, n_rows)
        return out
    if isinstance(pc, Or):
        out = np.zeros(n_rows, dtype=bool)
        for a in pc.args:
            out |= evaluate_matrix(a, columns, n_rows)
        return out
    raise TypeError(f"not a presence condition: {pc!r}")


def positive_features(pc: PC) -> frozenset:
    """Features that occur un-negated once negations are pushed to the literals."""
    out = set()

    def walk(node, positive):
        if isinstance(node, Var):
            if positive:
                out.add(node.name)
        elif isinstance(node, Not):
            walk(node.arg, not positive)
        elif isinstance(node, (And, Or)):
            for a in node.args:
                walk(a, positive)

    walk(pc, True)
    return frozenset(out)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:(&&)|(\|\|)|(!)|(\()|(\))|([A-Za-z_][A-Za-z0-9_]*)|([0-9]+))")


class ExprSyntaxError(FeatintError):
    pass


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        pos = m.end()
        kind = m.lastindex
        tokens.append((kind, m.group(kind)))
    return tokens


class _Parser:
    def __init__(self, text, resolve):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.resolve = resolve

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None):
        tok = self.peek()
        if tok[0] is None or (kind is not None and tok[0] != kind):
            raise ExprSyntaxError(f"malformed expression {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ExprSyntaxError("empty expression")
        node = self.parse_or()
        if self.i != len(self.tokens):
            raise ExprSyntaxError(f"trailing tokens in {self.text!r}")
        return node

    def parse_or(self):
        args = [self.parse_and()]
        while self.peek()[0] == 2:
            self.take()
            args.append(self.parse_and())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def parse_and(self):
        args = [self.parse_unary()]
        while self.peek()[0] == 1:
            self.take()
            args.append(self.parse_unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def parse_unary(self):
        if self.peek()[0] == 3:
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        kind, value = self.take()
        if kind == 4:
            node = self.parse_or()
            self.take(5)
            return node
        if kind == 7:
            if value not in ("0", "1"):
                raise ExprSyntaxError(f"only 0/1 integer literals are supported, got {value}")
            return Const(value == "1")
        if kind == 6:
            if value == "defined":
                if self.peek()[0] == 4:
                    self.take()
                    _, name = self.take(6)
                    self.take(5)
                else:
                    _, name = self.take(6)
                return self.resolve(name)
            if value in ("true", "false"):
                return Const(value == "true")
            return self.resolve(value)
        raise ExprSyntaxError(f"malformed expression {self.text!r}")


def parse(text: str, resolve: Callable[[str], PC] = Var) -> PC:
    """Parse ``!``/``&&``/``||`` syntax. ``resolve`` maps an identifier to a node."""
    return _Parser(text, resolve).parse()


def random_pc(rng, names: Iterable[str], depth: int = 3) -> PC:
    """Small random formula; used by generators and tests."""
    names = list(names)
    if depth <= 0 or rng.random() < 0.3:
        return Var(names[rng.randrange(len(names))])
    r = rng.random()
    if r < 0.25:
        return Not(random_pc(rng, names, depth - 1))
    args = tuple(random_pc(rng, names, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(args) if r < 0.65 else Or(args)
