"""Relating performance interactions to control-flow interactions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import FeatintError

PERF_SUBSET = "perf-subset-of-cf"
CF_SUBSET = "cf-subset-of-perf"
EQUAL = "equal"


def jaccard(a, b) -> float:
    a, b = frozenset(a), frozenset(b)
    if not a or not b:
        raise FeatintError("jaccard index is undefined for empty feature sets")
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class RelationRecord:
    perf: object  # PerfInteraction
    cf: object  # CfInteraction
    direction: str
    jaccard: float


def relate(perf, cf) -> list:
    records = []
    for p in perf:
        for c in cf:
            if p.features == c.features:
                direction = EQUAL
            elif p.features < c.features:
                direction = PERF_SUBSET
            elif c.features < p.features:
                direction = CF_SUBSET
            else:
                continue
            records.append(RelationRecord(p, c, direction, jaccard(p.features, c.features)))
    return records


@dataclass(frozen=True)
class SummaryRow:
    interaction: object
    relations: int
    mean_jaccard: Optional[float]
    overlay: bool  # some relation involves an overlay-sourced control-flow interaction


def summarize(records, by: str = "perf", interactions=None) -> list:
    """Per-interaction relation counts and mean Jaccard index.

    ``by="perf"`` lists every interaction in ``interactions`` (or those seen in
    ``records``), including unrelated ones with count 0. ``by="cf"`` lists only
    control-flow interactions that have at least one relation.
    """
    if by not in ("perf", "cf"):
        raise FeatintError(f"summarize by 'perf' or 'cf', not {by!r}")
    side = (lambda r: r.perf) if by == "perf" else (lambda r: r.cf)
    groups: dict = {}
    for r in records:
        groups.setdefault(side(r), []).append(r)
    if by == "perf" and interactions is not None:
        order = list(interactions)
    elif interactions is not None:
        order = [i for i in interactions if i in groups]
    else:
        order = list(groups)
    rows = []
    for inter in order:
        rs = groups.get(inter, [])
        mean = sum(r.jaccard for r in rs) / len(rs) if rs else None
        rows.append(SummaryRow(inter, len(rs), mean, any(r.cf.from_overlay for r in rs)))
    return rows
