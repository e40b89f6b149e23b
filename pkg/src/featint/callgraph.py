"""Variability-aware call graph and control-flow feature interactions."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import pc as pcs
from .cparse import VariableAst
from .errors import FeatintError
from .features import FeatureModel, satisfiable

OVERLAY = "overlay"


@dataclass(frozen=True)
class CallEdge:
    caller: str
    callee: str
    pc: object
    location: object  # (file, line) or OVERLAY

    @property
    def from_overlay(self) -> bool:
        return self.location == OVERLAY


@dataclass(frozen=True)
class OverlayEntry:
    caller: str
    callee: str
    pc: object
    occurrences: int = 1

    def __post_init__(self):
        if not isinstance(self.occurrences, int) or self.occurrences < 1:
            raise FeatintError(f"overlay {self.caller}->{self.callee}: occurrences must be >= 1")


@dataclass(frozen=True)
class CfInteraction:
    features: frozenset
    occurrences: int
    sites: tuple

    @property
    def from_overlay(self) -> bool:
        return OVERLAY in self.sites

    def key(self):
        return tuple(sorted(self.features))


def build_graph(ast: VariableAst, fm: FeatureModel, overlay=()) -> list:
    edges = []
    for f in ast.functions:
        for site in f.calls:
            for target in ast.by_name.get(site.callee, ()):
                pc = pcs.conj_flat(f.pc, site.pc, target.pc)
                edges.append(CallEdge(f.name, site.callee, pc, site.location))
    for entry in overlay:
        for name in (entry.caller, entry.callee):
            if name not in ast.by_name:
                raise FeatintError(f"overlay references unknown function {name!r}")
        edges.extend(
            CallEdge(entry.caller, entry.callee, entry.pc, OVERLAY) for _ in range(entry.occurrences)
        )
    # one satisfiability check per distinct condition
    sat = {pc: satisfiable(pc, fm) for pc in dict.fromkeys(e.pc for e in edges)}
    return [e for e in edges if sat[e.pc]]


def unresolved_calls(ast: VariableAst) -> list:
    """Call sites whose callee has no definition in the corpus (library calls)."""
    out = []
    for f in ast.functions:
        for site in f.calls:
            if site.callee not in ast.by_name:
                out.append((f.name, site.callee, site.location))
    return out


def derive_cf_interactions(edges, fm: FeatureModel = None) -> list:
    """Group edges by the positive features of their condition.

    With ``fm``, feature sets that no valid configuration enables together
    (possible under disjunctive conditions) are dropped.
    """
    groups: dict = {}
    for e in edges:
        feats = pcs.positive_features(e.pc)
        if len(feats) >= 2:
            groups.setdefault(feats, []).append(e.location)
    out = [
        CfInteraction(feats, len(sites), tuple(sorted(sites, key=_site_key)))
        for feats, sites in groups.items()
        if fm is None or satisfiable(pcs.And(tuple(pcs.Var(f) for f in sorted(feats))), fm)
    ]
    out.sort(key=lambda i: (-i.occurrences, i.key()))
    return out


def _site_key(site):
    # overlay sites sort after source locations
    return (1, "", 0) if site == OVERLAY else (0, site[0], site[1])


def interaction_histogram(ints, unique: bool = True) -> dict:
    counts = Counter()
    for i in ints:
        counts[len(i.features)] += 1 if unique else i.occurrences
    return dict(sorted(counts.items()))


def to_dot(edges) -> str:
    lines = ["digraph callgraph {"]
    for e in edges:
        style = ' style="dashed"' if e.from_overlay else ""
        label = str(e.pc).replace('"', '\\"')
        lines.append(f'  "{e.caller}" -> "{e.callee}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
