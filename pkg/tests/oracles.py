"""Independent reference implementations used only by the tests.

Nothing here imports the code paths it checks: the preprocessor oracle has its
own expression evaluator and its own regex-based call extraction.
"""
import itertools
import re

import numpy as np

KEYWORDS = {"if", "while", "for", "switch", "return", "sizeof"}


# ------------------------------------------------------------ preprocessing

def _eval_expr(expr, enabled):
    expr = re.sub(r"defined\s*\(\s*(\w+)\s*\)", r"\1", expr)
    expr = re.sub(r"defined\s+(\w+)", r"\1", expr)
    py = expr.replace("&&", " and ").replace("||", " or ")
    py = re.sub(r"!(?!=)", " not ", py)
    py = re.sub(r"\b([A-Za-z_]\w*)\b",
                lambda m: m.group(1) if m.group(1) in ("and", "or", "not") else str(m.group(1) in enabled),
                py)
    return bool(eval(py))


def preprocess(text, enabled):
    """Select the active branches of every conditional for one configuration."""
    out = []
    stack = []  # (parent_active, branch_taken, this_active)
    for line in text.splitlines():
        s = line.strip()
        active = all(frame[2] for frame in stack)
        m = re.match(r"#\s*(\w+)\s*(.*)", s)
        if not m:
            if active:
                out.append(line)
            continue
        kw, rest = m.group(1), m.group(2).strip()
        if kw in ("if", "ifdef", "ifndef"):
            if kw == "ifdef":
                cond = rest in enabled
            elif kw == "ifndef":
                cond = rest not in enabled
            else:
                cond = _eval_expr(rest, enabled)
            stack.append([active, cond, cond])
        elif kw == "elif":
            frame = stack[-1]
            cond = (not frame[1]) and _eval_expr(rest, enabled)
            frame[2] = cond
            frame[1] = frame[1] or cond
        elif kw == "else":
            frame = stack[-1]
            frame[2] = not frame[1]
            frame[1] = True
        elif kw == "endif":
            stack.pop()
    return "\n".join(out)


def single_config_calls(text):
    """(caller, callee) pairs of a preprocessed, conditional-free C-lite unit."""
    text = re.sub(r"/\*.*?\*/", " ", text, flags=re.S)
    text = re.sub(r"//[^\n]*", " ", text)
    calls = []
    pos = 0
    header = re.compile(r"\b([A-Za-z_]\w*)\s*\([^;{}()]*\)\s*\{")
    while True:
        m = header.search(text, pos)
        if not m:
            break
        name = m.group(1)
        depth = 1
        i = m.end()
        while depth:
            depth += {"{": 1, "}": -1}.get(text[i], 0)
            i += 1
        body = text[m.end():i - 1]
        for c in re.finditer(r"(->|\.)?\s*\b([A-Za-z_]\w*)\s*\(", body):
            if c.group(1) or c.group(2) in KEYWORDS:
                continue
            calls.append((name, c.group(2)))
        pos = i
    return calls


# ------------------------------------------------------------ random corpora

class CorpusGen:
    """Random C-lite corpora with nested #if/#elif/#else and alternative definitions."""

    def __init__(self, rng, features):
        self.rng = rng
        self.features = list(features)
        self.names = [f"fun{i}" for i in range(rng.randint(3, 7))]
        self.used = set()

    def cond_line(self):
        r = self.rng.random()
        f = self.rng.choice(self.features)
        if r < 0.35:
            return f"#ifdef {f}"
        if r < 0.5:
            return f"#ifndef {f}"
        return f"#if {self.expr(2)}"

    def expr(self, depth):
        r = self.rng.random()
        if depth == 0 or r < 0.35:
            f = self.rng.choice(self.features)
            return self.rng.choice([f, f"defined({f})", f"defined {f}"])
        if r < 0.5:
            return f"!({self.expr(depth - 1)})"
        op = self.rng.choice(["&&", "||"])
        return f"({self.expr(depth - 1)} {op} {self.expr(depth - 1)})"

    def stmts(self, depth, indent="  "):
        out = []
        for _ in range(self.rng.randint(1, 4)):
            r = self.rng.random()
            if r < 0.45:
                callee = self.rng.choice(self.names + ["printf", "memcpy"])
                out.append(f"{indent}{callee}(x, {self.rng.randint(0, 9)});")
            elif r < 0.55:
                out.append(f"{indent}x = y + 1; /* opaque */")
            elif r < 0.65:
                out.append(f"{indent}s->cb(x);")
            elif r < 0.75 and depth > 0:
                out.append(f"{indent}if (x) {{")
                out.extend(self.stmts(depth - 1, indent + "  "))
                out.append(f"{indent}}}")
            elif depth > 0:
                out.extend(self.conditional(lambda: self.stmts(depth - 1, indent), depth))
        return out

    def conditional(self, make, depth):
        out = [self.cond_line()]
        out.extend(make())
        for _ in range(self.rng.randint(0, 2)):
            out.append(f"#elif {self.expr(1)}")
            out.extend(make())
        if self.rng.random() < 0.5:
            out.append("#else")
            out.extend(make())
        out.append("#endif")
        return out

    def function(self, name):
        return [f"int {name}(int x, char *s) {{", *self.stmts(3), "}"]

    def top_items(self, depth):
        out = []
        for _ in range(self.rng.randint(1, 3)):
            free = [n for n in self.names if n not in self.used]
            if not free:
                break
            name = self.rng.choice(free)
            self.used.add(name)
            r = self.rng.random()
            if r < 0.3:
                out.extend(self.function(name))
            elif r < 0.6:
                # alternative definitions: exactly one branch is compiled
                out.append(self.cond_line())
                out.extend(self.function(name))
                out.append("#else")
                out.extend(self.function(name))
                out.append("#endif")
            else:
                out.append(self.cond_line())
                out.extend(self.function(name))
                if depth > 0:
                    out.extend(self.top_items(depth - 1))
                out.append("#endif")
            if self.rng.random() < 0.3:
                out.append(f"int {name}_count = 0;")
        return out

    def corpus(self, n_files=2):
        files = []
        for k in range(n_files):
            lines = ["/* generated */", "#include <stdio.h>", *self.top_items(1)]
            files.append((f"unit{k}.c", "\n".join(lines) + "\n"))
        return files


# ------------------------------------------------------------ other oracles

def brute_force_support(transactions, max_size=5):
    items = sorted(set().union(*transactions)) if transactions else []
    out = {}
    for k in range(1, min(max_size, len(items)) + 1):
        for combo in itertools.combinations(items, k):
            s = sum(1 for t in transactions if set(combo) <= t)
            if s:
                out[frozenset(combo)] = s
    return out


def brute_force_relate(perf_sets, cf_sets):
    out = []
    for p in perf_sets:
        for c in cf_sets:
            if p.issubset(c) or c.issubset(p):
                out.append((p, c, len(p & c) / len(p | c)))
    return out


def all_assignments(features):
    for bits in itertools.product([False, True], repeat=len(features)):
        yield dict(zip(features, bits))


def lstsq_on_terms(features, rows, terms):
    """Direct least squares of ``rows`` [(enabled set, y)] on a fixed term set."""
    X = np.array([[1.0] + [float(t <= e) for t in terms] for e, _ in rows])
    y = np.array([v for _, v in rows])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef
