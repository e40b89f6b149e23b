"""Performance influence models learned by forward feature selection."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import FeatintError
from .features import Configuration, FeatureModel

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LearnOptions:
    error_goal: float = 0.001
    min_improvement: float = 0.001  # absolute, in error fraction (0.1 percentage points)
    max_order: int = 3


@dataclass(frozen=True)
class InfluenceModel:
    intercept: float
    terms: tuple = ()  # ((frozenset, coefficient), ...)
    fit_error: float = 0.0
    history: tuple = field(default=(), compare=False)  # training error after each round

    def __post_init__(self):
        sets = [t for t, _ in self.terms]
        if len(set(sets)) != len(sets):
            raise FeatintError("influence model terms must have distinct feature sets")

    def predict(self, config) -> float:
        enabled = config.enabled if isinstance(config, Configuration) else frozenset(
            f for f, v in config.items() if v
        )
        return self.intercept + sum(c for t, c in self.terms if t <= enabled)

    def __add__(self, other: "InfluenceModel") -> "InfluenceModel":
        coefs = dict(self.terms)
        for t, c in other.terms:
            coefs[t] = coefs.get(t, 0.0) + c
        return InfluenceModel(self.intercept + other.intercept, tuple(coefs.items()))

    def coefficient(self, *features) -> float:
        return dict(self.terms).get(frozenset(features), 0.0)


def predict(m: InfluenceModel, config) -> float:
    return m.predict(config)


@dataclass(frozen=True)
class PerfInteraction:
    features: frozenset
    influence: float

    def key(self):
        return tuple(sorted(self.features))


class MeasurementSet:
    """Repeated performance observations (seconds) of full configurations."""

    def __init__(self, fm: FeatureModel, rows=()):
        self.fm = fm
        self.rows = []
        for config, value in rows:
            self.add(config, value)

    def add(self, config: Configuration, value: float):
        if config.features != self.fm.features:
            raise FeatintError("measurement configuration does not match the feature model")
        if not self.fm.is_valid(config):
            raise FeatintError(f"measured configuration {config!r} is not valid")
        if not value > 0:
            raise FeatintError(f"performance must be positive, got {value}")
        self.rows.append((config, float(value)))

    def __len__(self):
        return len(self.rows)

    def grouped(self) -> dict:
        """Configuration -> list of repetitions, in lexicographic configuration order."""
        groups: dict = {}
        for config, value in self.rows:
            groups.setdefault(config, []).append(value)
        return dict(sorted(groups.items(), key=lambda kv: kv[0].bits()))


def mean_stddev(ms: MeasurementSet) -> float:
    groups = ms.grouped()
    if not groups:
        raise FeatintError("empty measurement set")
    devs = []
    for config, values in groups.items():
        if len(values) < 2:
            raise FeatintError(f"configuration {config!r} has a single repetition; stddev undefined")
        devs.append(np.std(values, ddof=1))
    return float(np.mean(devs))


def _solve_normal(X: np.ndarray, y: np.ndarray):
    """Least squares via the normal equations; None when a pivot falls below tolerance."""
    A = X.T @ X
    b = X.T @ y
    n = len(A)
    A = A.astype(float).copy()
    b = b.astype(float).copy()
    scale = max(1.0, float(np.max(np.abs(np.diag(A))))) if n else 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= PIVOT_TOL * scale:
            return None
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        b[k + 1:] -= f * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def relative_error(pred, y) -> float:
    """Root-mean-square relative error, the quantity the weighted refit minimises."""
    return float(np.sqrt(np.mean(((pred - y) / y) ** 2)))


class _Fitter:
    def __init__(self, ms: MeasurementSet):
        groups = ms.grouped()
        if not groups:
            raise FeatintError("empty measurement set")
        self.features = ms.fm.features
        self.bits = np.array([c.values for c in groups], dtype=bool).reshape(len(groups), len(self.features))
        self.y = np.array([np.mean(v) for v in groups.values()])
        self.weights = 1.0 / self.y
        self.index = {f: i for i, f in enumerate(self.features)}
        self._columns: dict = {}

    def column(self, term) -> np.ndarray:
        col = self._columns.get(term)
        if col is None:
            idx = [self.index[f] for f in sorted(term)]
            col = self._columns[term] = np.all(self.bits[:, idx], axis=1).astype(float)
        return col

    def fit(self, terms):
        """Least squares on relative residuals (rows weighted by 1/y)."""
        if len(self.y) < len(terms) + 1:
            return None
        X = np.column_stack([np.ones(len(self.y))] + [self.column(t) for t in terms])
        coef = _solve_normal(X * self.weights[:, None], self.y * self.weights)
        if coef is None:
            return None
        return coef, relative_error(X @ coef, self.y)


def _term_order(term):
    return (len(term), tuple(sorted(term)))


def _candidates(features, selected, max_order):
    pool = {frozenset((f,)) for f in features}
    for t in selected:
        for f in features:
            if f not in t and len(t) + 1 <= max_order:
                pool.add(t | {f})
    pool -= set(selected)
    return sorted(pool, key=_term_order)


def learn(ms: MeasurementSet, opts: LearnOptions = LearnOptions()) -> InfluenceModel:
    fitter = _Fitter(ms)
    y = fitter.y
    if np.ptp(y) == 0:
        return InfluenceModel(float(y[0]), (), 0.0, (0.0,))
    selected: list = []
    coef, err = fitter.fit(selected)
    history = [err]
    while err > opts.error_goal:
        best = None
        for cand in _candidates(fitter.features, selected, opts.max_order):
            res = fitter.fit(selected + [cand])
            if res is None:
                continue
            # strict comparison keeps the earliest candidate on ties (smaller, then lexicographic)
            if best is None or res[1] < best[2]:
                best = (cand, res[0], res[1])
        if best is None:
            break
        cand, new_coef, new_err = best
        if err - new_err < opts.min_improvement:
            break
        log.debug("round %d: add %s, error %.6f", len(selected) + 1, sorted(cand), new_err)
        selected.append(cand)
        coef, err = new_coef, new_err
        history.append(err)
    selected, coef, err = _drop_null_terms(fitter, selected, coef, err)
    terms = tuple((t, float(c)) for t, c in zip(selected, coef[1:]))
    return InfluenceModel(float(coef[0]), terms, err, tuple(history))


def _drop_null_terms(fitter, selected, coef, err):
    # terms that only served as stepping stones for higher-order ones end at zero
    tol = 1e-9 * max(1.0, float(np.max(np.abs(fitter.y))))
    keep = [t for t, c in zip(selected, coef[1:]) if abs(c) > tol]
    if len(keep) == len(selected):
        return selected, coef, err
    res = fitter.fit(keep)
    if res is None or res[1] > err + 1e-12:
        return selected, coef, err
    return keep, res[0], res[1]


def extract_interactions(m: InfluenceModel, noise: float = 0.0) -> list:
    if noise < 0:
        raise FeatintError("noise threshold must be >= 0")
    out = [PerfInteraction(t, c) for t, c in m.terms if len(t) >= 2 and abs(c) >= noise]
    out.sort(key=lambda p: (-abs(p.influence), p.key()))
    return out
