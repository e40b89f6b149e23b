"""Predicting performance interactions from control-flow interactions."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import pc as pcs
from .errors import FeatintError
from .features import FeatureModel, count_combinations, satisfiable


@dataclass(frozen=True)
class MinedItemSet:
    items: frozenset
    support_abs: int
    support_rel: float


@dataclass(frozen=True)
class PredictionReport:
    predicted: tuple
    actual: tuple
    precision: float
    recall: float


def _sorted_sets(sets):
    return sorted(set(map(frozenset, sets)), key=lambda s: (len(s), tuple(sorted(s))))


def predict_direct(cf) -> list:
    return _sorted_sets(i.features for i in cf)


def transactions(cf, unique: bool = False) -> list:
    """One transaction per interaction occurrence (or per unique interaction)."""
    out = []
    for i in cf:
        out.extend([frozenset(i.features)] * (1 if unique else i.occurrences))
    return out


def _min_count(threshold, n, relative):
    if threshold < 0:
        raise FeatintError("threshold must be >= 0")
    if relative:
        if threshold > 1:
            raise FeatintError("relative threshold must lie in [0, 1]")
        # support_abs / n >= threshold, guarded against float round-off
        need = math.ceil(threshold * n - 1e-9)
    else:
        need = math.ceil(threshold)
    # zero-support item sets are never enumerated
    return max(need, 1)


def mine_itemsets(ts, threshold=0.0, min_size: int = 2, relative: bool = True) -> list:
    """Apriori: every item set of size >= ``min_size`` with support >= threshold."""
    if min_size < 2:
        raise FeatintError("min_size must be >= 2")
    ts = [frozenset(t) for t in ts]
    n = len(ts)
    if n == 0:
        return []
    need = _min_count(threshold, n, relative)

    def support(items):
        return sum(1 for t in ts if items <= t)

    counts: dict = {}
    for t in ts:
        for item in t:
            counts[item] = counts.get(item, 0) + 1
    level = {(item,): c for item, c in counts.items() if c >= need}
    found = []
    k = 1
    while level:
        if k >= min_size:
            found.extend((frozenset(items), c) for items, c in level.items())
        keys = sorted(level)
        frequent = set(keys)
        nxt = {}
        for a, b in itertools.combinations(keys, 2):
            if a[:-1] != b[:-1]:
                continue
            cand = a + (b[-1],)
            # anti-monotone pruning: every (k)-subset must be frequent
            if any(sub not in frequent for sub in itertools.combinations(cand, k)):
                continue
            s = support(frozenset(cand))
            if s >= need:
                nxt[cand] = s
        level = nxt
        k += 1
    found.sort(key=lambda fc: (len(fc[0]), tuple(sorted(fc[0]))))
    return [MinedItemSet(items, s, s / n) for items, s in found]


def evaluate(predicted, actual) -> PredictionReport:
    """Exact-set matching of predicted feature sets against performance interactions."""
    pred = _sorted_sets(predicted)
    act = _sorted_sets(getattr(a, "features", a) for a in actual)
    hits = len(set(pred) & set(act))
    if pred:
        precision = hits / len(pred)
    else:
        precision = 1.0 if not act else 0.0
    recall = hits / len(act) if act else 1.0
    return PredictionReport(tuple(pred), tuple(act), precision, recall)


def threshold_sweep(ts, actual, thresholds, min_size: int = 2, relative: bool = True) -> list:
    """Rows of (threshold, number predicted, precision, recall) for the item-set predictor."""
    rows = []
    for e in thresholds:
        mined = mine_itemsets(ts, e, min_size, relative)
        rep = evaluate([m.items for m in mined], actual)
        rows.append((e, len(rep.predicted), rep.precision, rep.recall))
    return rows


@dataclass(frozen=True)
class SearchSpace:
    candidates: tuple
    total: int
    ratio: float  # math.inf when there are no candidates


def reduce_search_space(cf, fm: FeatureModel, sizes=(2, 3)) -> SearchSpace:
    sizes = sorted(set(sizes))
    subsets = set()
    for i in cf:
        items = sorted(i.features)
        for k in sizes:
            subsets.update(frozenset(c) for c in itertools.combinations(items, k))
    realizable = [
        s for s in _sorted_sets(subsets)
        if satisfiable(pcs.And(tuple(pcs.Var(f) for f in sorted(s))), fm)
    ]
    total = count_combinations(fm, sizes)
    ratio = total / len(realizable) if realizable else math.inf
    return SearchSpace(tuple(realizable), total, ratio)
