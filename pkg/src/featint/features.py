"""Feature models, configurations and exhaustive validity reasoning."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import pc as pcs
from .errors import FeatintError, UnknownFeatureError

MAX_ENUM_FEATURES = 30
_CHUNK_BITS = 16


@dataclass(frozen=True)
class FeatureModel:
    features: tuple
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        seen = set()
        for name in self.features:
            if not isinstance(name, str) or not pcs.IDENT_RE.fullmatch(name):
                raise FeatintError(f"invalid feature name {name!r}")
            if name in seen:
                raise FeatintError(f"duplicate feature {name!r}")
            seen.add(name)
        for c in self.constraints:
            for name in sorted(pcs.features_of(c)):
                if name not in seen:
                    raise UnknownFeatureError(name, f"constraint {c}")

    def __contains__(self, name):
        return name in self.index

    @property
    def index(self) -> dict:
        return _index(self.features)

    def config(self, enabled: Iterable[str] = ()) -> "Configuration":
        """Configuration with exactly ``enabled`` switched on."""
        enabled = set(enabled)
        for name in sorted(enabled):
            if name not in self:
                raise UnknownFeatureError(name)
        return Configuration(self.features, tuple(f in enabled for f in self.features))

    def is_valid(self, c: "Configuration") -> bool:
        return all(pcs.evaluate(k, c) for k in self.constraints)


@lru_cache(maxsize=None)
def _index(features: tuple) -> dict:
    return {f: i for i, f in enumerate(features)}


@dataclass(frozen=True)
class Configuration(Mapping):
    """Total assignment; behaves as a read-only mapping feature -> bool."""

    features: tuple
    values: tuple = field(compare=True)

    def __post_init__(self):
        if len(self.features) != len(self.values):
            raise FeatintError("configuration values do not match its feature list")

    def __getitem__(self, name):
        return self.values[_index(self.features)[name]]

    def __iter__(self):
        return iter(self.features)

    def __len__(self):
        return len(self.features)

    def __hash__(self):
        return hash((self.features, self.values))

    @property
    def enabled(self) -> frozenset:
        return frozenset(f for f, v in zip(self.features, self.values) if v)

    def bits(self) -> tuple:
        return tuple(int(v) for v in self.values)

    def __repr__(self):
        on = ",".join(f for f in self.features if self[f]) or "-"
        return f"Configuration({on})"


def _assignment_block(n: int, start: int, stop: int) -> np.ndarray:
    # row r encodes integer start + r; first feature is the most significant bit,
    # so ascending integers give lexicographic bit-vector order
    ints = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ints[:, None] >> shifts[None, :]) & 1).astype(bool)


def _check_bound(n: int):
    if n > MAX_ENUM_FEATURES:
        raise FeatintError(
            f"{n} features exceed the exhaustive enumeration bound of {MAX_ENUM_FEATURES}; "
            "use constraint-free counting (a model without constraints) or reduce the model"
        )


def _valid_rows(features: tuple, constraints: tuple) -> Iterator[np.ndarray]:
    n = len(features)
    _check_bound(n)
    total = 1 << n
    step = 1 << _CHUNK_BITS
    for start in range(0, total, step):
        block = _assignment_block(n, start, min(total, start + step))
        cols = {f: block[:, i] for i, f in enumerate(features)}
        keep = np.ones(len(block), dtype=bool)
        for k in constraints:
            keep &= pcs.evaluate_matrix(k, cols, len(block))
        yield block[keep]


@lru_cache(maxsize=64)
def valid_matrix(fm: FeatureModel) -> np.ndarray:
    """Boolean matrix, one row per valid configuration, lexicographic order."""
    blocks = list(_valid_rows(fm.features, fm.constraints))
    out = np.concatenate(blocks) if blocks else np.zeros((0, len(fm.features)), dtype=bool)
    out.setflags(write=False)
    return out


def enumerate_valid(fm: FeatureModel) -> list:
    return [Configuration(fm.features, tuple(bool(b) for b in row)) for row in valid_matrix(fm)]


def satisfiable(pc, fm: FeatureModel) -> bool:
    """Whether ``pc`` holds in some valid configuration.

    Only the constraints connected to ``pc`` through shared features are
    enumerated, so large models work as long as that component stays small.
    The rest of the model is assumed to be non-void.
    """
    for name in sorted(pcs.features_of(pc)):
        if name not in fm:
            raise UnknownFeatureError(name)
    relevant = set(pcs.features_of(pc))
    pending = list(fm.constraints)
    chosen = []
    changed = True
    while changed:
        changed = False
        for k in list(pending):
            kf = pcs.features_of(k)
            if kf & relevant or not kf:
                relevant |= kf
                chosen.append(k)
                pending.remove(k)
                changed = True
    feats = tuple(f for f in fm.features if f in relevant)
    for rows in _valid_rows(feats, tuple(chosen) + (pc,)):
        if len(rows):
            return True
    return False


def count_combinations(fm: FeatureModel, sizes: Iterable[int]) -> int:
    """Number of feature subsets of the given sizes enabled together in some valid configuration."""
    sizes = sorted(set(sizes))
    if not sizes or any(k < 2 for k in sizes):
        raise FeatintError("sizes must be a nonempty set of integers >= 2")
    n = len(fm.features)
    if not fm.constraints:
        return sum(math.comb(n, k) for k in sizes)
    rows = valid_matrix(fm)
    # only maximal enabled sets matter: every subset of an enabled set is enabled too
    enabled = {frozenset(np.flatnonzero(r).tolist()) for r in rows}
    maximal = [s for s in enabled if not any(s < t for t in enabled)]
    seen = set()
    for s in maximal:
        items = sorted(s)
        for k in sizes:
            seen.update(itertools.combinations(items, k))
    return len(seen)
