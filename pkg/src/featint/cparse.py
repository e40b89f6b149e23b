"""Variability-aware parser for C-lite sources with conditional compilation.

Every function definition and call site is kept exactly once, annotated with
the conjunction of the enclosing ``#if`` branch conditions (its presence
condition). See ``docs/grammar.md`` for the accepted subset.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from . import pc as pcs
from .errors import FeatintError, ParseError
from .features import FeatureModel, satisfiable

KEYWORDS = frozenset(
    """if else while for do switch case default return goto break continue sizeof
    typeof alignof _Alignof _Generic __attribute__ asm __asm__ _Static_assert""".split()
)
IGNORED_DIRECTIVES = frozenset(
    "define undef include include_next pragma error warning line ident".split()
)
_PUNCT = set("{}()[];,.<>=+-*/%&|^!~?:")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9][0-9A-Za-z_.]*|\.[0-9][0-9A-Za-z_.]*")


@dataclass(frozen=True)
class SourceUnit:
    path: str
    text: str


@dataclass(frozen=True)
class CallSite:
    callee: str
    pc: object
    location: tuple  # (file, line)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    pc: object
    calls: tuple
    location: tuple  # (file, first line)
    end_line: int


@dataclass(frozen=True)
class VariableAst:
    functions: tuple
    by_name: dict = field(compare=False, repr=False)

    @classmethod
    def build(cls, functions) -> "VariableAst":
        index: dict = {}
        for f in functions:
            index.setdefault(f.name, []).append(f)
        return cls(tuple(functions), {k: tuple(v) for k, v in index.items()})


@dataclass
class _Tok:
    kind: str  # id, num, str, punct, dir
    value: object
    line: int


# ------------------------------------------------------------------ lexing

def _strip_directive_comments(text: str) -> tuple:
    """Remove comments from a directive; returns (text, opens_block_comment)."""
    out = []
    i = 0
    while i < len(text):
        if text.startswith("//", i):
            break
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                return "".join(out), True
            out.append(" ")
            i = end + 2
            continue
        out.append(text[i])
        i += 1
    return "".join(out), False


def lex(path: str, text: str) -> list:
    lines = text.splitlines()
    tokens = []
    in_comment = False
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i]
        if not in_comment and line.lstrip().startswith("#"):
            body = line.lstrip()[1:]
            while body.endswith("\\") and i + 1 < len(lines):
                i += 1
                body = body[:-1] + " " + lines[i]
            body, in_comment = _strip_directive_comments(body)
            m = _IDENT.match(body.strip())
            keyword = m.group(0) if m else ""
            rest = body.strip()[len(keyword):].strip()
            tokens.append(_Tok("dir", (keyword, rest), lineno))
            i += 1
            continue
        pos = 0
        while pos < len(line):
            if in_comment:
                end = line.find("*/", pos)
                if end < 0:
                    pos = len(line)
                    break
                in_comment = False
                pos = end + 2
                continue
            ch = line[pos]
            if ch.isspace():
                pos += 1
            elif line.startswith("//", pos):
                break
            elif line.startswith("/*", pos):
                in_comment = True
                pos += 2
            elif ch in "\"'":
                end = pos + 1
                while end < len(line) and line[end] != ch:
                    end += 2 if line[end] == "\\" else 1
                if end >= len(line):
                    raise ParseError("unterminated string or character literal", path, lineno)
                tokens.append(_Tok("str", line[pos:end + 1], lineno))
                pos = end + 1
            elif (m := _IDENT.match(line, pos)):
                tokens.append(_Tok("id", m.group(0), lineno))
                pos = m.end()
            elif (m := _NUMBER.match(line, pos)):
                tokens.append(_Tok("num", m.group(0), lineno))
                pos = m.end()
            elif line.startswith("->", pos):
                tokens.append(_Tok("punct", "->", lineno))
                pos += 2
            elif ch in _PUNCT:
                tokens.append(_Tok("punct", ch, lineno))
                pos += 1
            else:
                raise ParseError(f"character {ch!r} is outside the C-lite grammar", path, lineno)
        i += 1
    return tokens


# ------------------------------------------------------------------ parsing

@dataclass
class _Frame:
    raw: list  # raw conditions of the branches seen so far
    branch: object  # condition of the active branch
    line: int
    mode: str
    depth: int
    seen_else: bool = False


class _FileParser:
    def __init__(self, unit: SourceUnit, fm: FeatureModel, allow: frozenset):
        self.unit = unit
        self.path = unit.path
        self.fm = fm
        self.allow = allow
        self.stack: list = []
        self.mode = "top"  # top | body | agg
        self.depth = 0
        self.pending: list = []
        self.functions: list = []
        self.func = None

    def err(self, msg, line):
        return ParseError(msg, self.path, line)

    def current_pc(self):
        if not self.stack:
            return pcs.TRUE
        return pcs.And(tuple(f.branch for f in self.stack))

    # -- conditions
    def resolve(self, line):
        def _resolve(name):
            if name in self.fm or name in self.allow:
                return pcs.Var(name)
            raise self.err(f"conditional references undeclared feature {name!r}", line)
        return _resolve

    def condition(self, keyword, rest, line):
        if keyword in ("ifdef", "ifndef"):
            if not _IDENT.fullmatch(rest):
                raise self.err(f"#{keyword} expects one identifier", line)
            expr = self.resolve(line)(rest)
            if keyword == "ifndef":
                expr = pcs.Not(expr)
        else:
            try:
                expr = pcs.parse(rest, self.resolve(line))
            except ParseError:
                raise
            except FeatintError as e:
                raise self.err(f"bad #{keyword} expression: {e}", line) from None
        erased = _erase(expr, self.allow)
        return pcs.TRUE if erased is None else erased

    def check_balanced(self, frame, keyword, line):
        if self.pending and self.mode == "top":
            raise self.err(f"#{keyword} inside a top-level declaration", line)
        if frame.mode != self.mode or frame.depth != self.depth:
            raise self.err(
                f"#{keyword} does not balance braces with the #if at line {frame.line}", line
            )

    def directive(self, tok):
        keyword, rest = tok.value
        line = tok.line
        if keyword in ("if", "ifdef", "ifndef"):
            if self.pending and self.mode == "top":
                raise self.err(f"#{keyword} inside a top-level declaration", line)
            cond = self.condition(keyword, rest, line)
            self.stack.append(_Frame([cond], cond, line, self.mode, self.depth))
        elif keyword in ("elif", "else", "endif"):
            if not self.stack:
                raise self.err(f"#{keyword} without matching #if", line)
            frame = self.stack[-1]
            self.check_balanced(frame, keyword, line)
            if keyword == "endif":
                self.stack.pop()
                return
            if frame.seen_else:
                raise self.err(f"#{keyword} after #else", line)
            negated = [pcs.Not(c) for c in frame.raw]
            if keyword == "elif":
                cond = self.condition("elif", rest, line)
                frame.raw.append(cond)
                frame.branch = pcs.And(tuple(negated) + (cond,))
            else:
                frame.seen_else = True
                frame.branch = negated[0] if len(negated) == 1 else pcs.And(tuple(negated))
        elif keyword in IGNORED_DIRECTIVES or keyword == "":
            pass
        else:
            raise self.err(f"unsupported directive #{keyword}", line)

    # -- top level
    def top_token(self, tok):
        v = tok.value
        if tok.kind == "punct" and v == "}":
            raise self.err("unmatched '}'", tok.line)
        if tok.kind == "punct" and v == ";" and self._paren_balance() == 0:
            self.finish_declaration(tok.line)
            return
        if tok.kind == "punct" and v == "{":
            if self.pending and self.pending[-1].value == ")" and not self._has_assignment():
                self.start_function(tok)
            else:
                self.pending.append(tok)
                self.mode, self.depth = "agg", 1
            return
        self.pending.append(tok)

    def _paren_balance(self):
        bal = 0
        for t in self.pending:
            if t.kind == "punct":
                bal += {"(": 1, ")": -1}.get(t.value, 0)
        return bal

    def _has_assignment(self):
        return any(t.kind == "punct" and t.value == "=" for t in self.pending)

    def finish_declaration(self, line):
        toks = self.pending
        if any(t.kind == "punct" and t.value == "=" for t in toks):
            start = next(i for i, t in enumerate(toks) if t.kind == "punct" and t.value == "=")
            for a, b in zip(toks[start:], toks[start + 1:]):
                if a.kind == "id" and a.value not in KEYWORDS and b.value == "(":
                    raise self.err(f"call to {a.value!r} outside any function", a.line)
        self.pending = []

    def start_function(self, brace):
        toks = self.pending
        bal = 0
        j = len(toks) - 1
        while j >= 0:
            t = toks[j]
            if t.kind == "punct" and t.value == ")":
                bal += 1
            elif t.kind == "punct" and t.value == "(":
                bal -= 1
                if bal == 0:
                    break
            j -= 1
        if j <= 0 or toks[j - 1].kind != "id" or toks[j - 1].value in KEYWORDS:
            raise self.err("malformed function definition", brace.line)
        self.func = {
            "name": toks[j - 1].value,
            "pc": self.current_pc(),
            "calls": [],
            "line": toks[0].line,
            "stack": len(self.stack),
        }
        self.pending = []
        self.mode, self.depth = "body", 1

    # -- bodies
    def body_token(self, tokens, k):
        tok = tokens[k]
        if tok.kind == "punct" and tok.value == "{":
            self.depth += 1
        elif tok.kind == "punct" and tok.value == "}":
            self.depth -= 1
            if self.depth == 0:
                if len(self.stack) != self.func["stack"]:
                    raise self.err("conditional block crosses the end of a function", tok.line)
                f = self.func
                self.functions.append(
                    FunctionDef(f["name"], f["pc"], tuple(f["calls"]), (self.path, f["line"]), tok.line)
                )
                self.func = None
                self.mode = "top"
        elif tok.kind == "id" and tok.value not in KEYWORDS:
            nxt = tokens[k + 1] if k + 1 < len(tokens) else None
            prev = tokens[k - 1] if k > 0 else None
            member = prev is not None and prev.kind == "punct" and prev.value in (".", "->")
            if nxt is not None and nxt.kind == "punct" and nxt.value == "(" and not member:
                self.func["calls"].append(CallSite(tok.value, self.current_pc(), (self.path, tok.line)))

    def agg_token(self, tok):
        self.pending.append(tok)
        if tok.kind == "punct" and tok.value == "{":
            self.depth += 1
        elif tok.kind == "punct" and tok.value == "}":
            self.depth -= 1
            if self.depth == 0:
                self.mode = "top"

    def run(self) -> list:
        tokens = lex(self.path, self.unit.text)
        for k, tok in enumerate(tokens):
            if tok.kind == "dir":
                self.directive(tok)
            elif self.mode == "top":
                self.top_token(tok)
            elif self.mode == "body":
                self.body_token(tokens, k)
            else:
                self.agg_token(tok)
        if self.stack:
            raise self.err("unterminated conditional (#if without #endif)", self.stack[-1].line)
        if self.mode != "top" or self.pending:
            last = tokens[-1].line if tokens else 1
            raise self.err("unexpected end of file", last)
        return self.functions


def _erase(node, allow):
    """Drop allow-listed macros from a condition; None when nothing is left."""
    if isinstance(node, pcs.Var):
        return None if node.name in allow else node
    if isinstance(node, pcs.Not):
        inner = _erase(node.arg, allow)
        return None if inner is None else pcs.Not(inner)
    if isinstance(node, (pcs.And, pcs.Or)):
        args = tuple(a for a in (_erase(x, allow) for x in node.args) if a is not None)
        if not args:
            return None
        return args[0] if len(args) == 1 else type(node)(args)
    return node


def parse_unit(unit: SourceUnit, fm: FeatureModel, allow: Iterable[str] = ()) -> list:
    return _FileParser(unit, fm, frozenset(allow)).run()


def parse_corpus(units, fm: FeatureModel, allow: Iterable[str] = ()) -> VariableAst:
    allow = frozenset(allow)
    functions = []
    for unit in units:
        functions.extend(parse_unit(unit, fm, allow))
    ast = VariableAst.build(functions)
    _check_alternatives(ast)
    return ast


def _check_alternatives(ast: VariableAst):
    for name, defs in ast.by_name.items():
        for i, a in enumerate(defs):
            for b in defs[i + 1:]:
                both = pcs.conj_flat(a.pc, b.pc)
                free = FeatureModel(tuple(sorted(pcs.features_of(both))))
                if satisfiable(both, free):
                    raise ParseError(
                        f"function {name!r} is also defined at {b.location[0]}:{b.location[1]} "
                        "under a presence condition that is not mutually exclusive",
                        a.location[0], a.location[1],
                    )


def configured_calls(ast: VariableAst, config) -> list:
    """(caller, callee) pairs of the call sites active in one configuration."""
    out = []
    for f in ast.functions:
        if not pcs.evaluate(f.pc, config):
            continue
        for call in f.calls:
            if pcs.evaluate(call.pc, config):
                out.append((f.name, call.callee))
    return out
