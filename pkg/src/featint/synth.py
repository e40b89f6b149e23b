"""Synthetic configurable systems with a known ground truth.

A spec says which feature calls which under what condition, and which of those
calls carry a performance effect. From it we emit an annotated C-lite corpus and
simulated benchmark measurements.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import pc as pcs
from .cparse import SourceUnit
from .errors import FeatintError, UnknownFeatureError
from .features import FeatureModel, enumerate_valid, satisfiable
from .learner import InfluenceModel, MeasurementSet

FILLERS = ("counter++;", "buf[i] = buf[i] ^ key;", "len = len - 1;", "state = next;", "i = i + 1;")


@dataclass(frozen=True)
class CallPlanEntry:
    caller: str
    callee: str
    pc: object
    occurrences: int = 1

    @property
    def features(self) -> frozenset:
        return pcs.positive_features(self.pc)


@dataclass(frozen=True)
class SyntheticSpec:
    fm: FeatureModel
    truth: InfluenceModel
    call_plan: tuple = ()
    noise_sigma: float = 0.0
    seed: int = 0
    function_names: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "call_plan", tuple(self.call_plan))
        if self.noise_sigma < 0:
            raise FeatintError("noise_sigma must be >= 0")
        for t, _ in self.truth.terms:
            for f in sorted(t):
                if f not in self.fm:
                    raise UnknownFeatureError(f, "truth model term")
        for e in self.call_plan:
            for f in (e.caller, e.callee, *sorted(pcs.features_of(e.pc))):
                if f not in self.fm:
                    raise UnknownFeatureError(f, f"call plan {e.caller}->{e.callee}")
            if e.occurrences < 1:
                raise FeatintError("call plan occurrences must be >= 1")
            if not {e.caller, e.callee} <= e.features:
                raise FeatintError(
                    f"call plan {e.caller}->{e.callee}: pc {e.pc} must enable caller and callee"
                )
            if not satisfiable(pcs.conj_flat(pcs.Var(e.caller), e.pc, pcs.Var(e.callee)), self.fm):
                raise FeatintError(f"call plan {e.caller}->{e.callee}: pc {e.pc} is unsatisfiable")
        planned = {e.features for e in self.call_plan}
        for t, c in self.truth.terms:
            if len(t) >= 2 and t not in planned:
                raise FeatintError(f"interaction {sorted(t)} has no call plan entry causing it")
        names = [self.function_name(f) for f in self.fm.features]
        if len(set(names)) != len(names):
            raise FeatintError("function names must be distinct")

    def function_name(self, feature: str) -> str:
        return self.function_names.get(feature, f"fn_{feature}")

    def interactions(self) -> list:
        """Ground-truth performance interaction feature sets."""
        return sorted((t for t, _ in self.truth.terms if len(t) >= 2), key=lambda s: sorted(s))


def generate_corpus(spec: SyntheticSpec) -> list:
    """One ``<feature>.c`` per feature; call sites nested under the plan's conditions."""
    rng = random.Random(spec.seed)
    by_caller: dict = {}
    for e in spec.call_plan:
        by_caller.setdefault(e.caller, []).append(e)
    units = []
    for feature in spec.fm.features:
        blocks = [[f"  {rng.choice(FILLERS)}"] for _ in range(rng.randint(1, 3))]
        for e in by_caller.get(feature, ()):
            for _ in range(e.occurrences):
                blocks.append(_call_block(e, spec.function_name(e.callee)))
        rng.shuffle(blocks)
        lines = [
            f"/* feature {feature} */",
            f"#ifdef {feature}",
            f"void {spec.function_name(feature)}(void) {{",
            *(line for block in blocks for line in block),
            "}",
            "#endif",
        ]
        units.append(SourceUnit(f"{feature}.c", "\n".join(lines) + "\n"))
    return units


def _call_block(entry: CallPlanEntry, callee_fn: str) -> list:
    conds = [c for c in pcs.conjuncts(entry.pc) if c != pcs.Var(entry.caller)]
    lines = [f"#if {c}" for c in conds]
    lines.append(f"  {callee_fn}();")
    lines.extend("#endif" for _ in conds)
    return lines


def simulate_benchmark(spec: SyntheticSpec, reps: int = 1) -> MeasurementSet:
    if reps < 1:
        raise FeatintError("reps must be >= 1")
    rng = np.random.default_rng(spec.seed)
    ms = MeasurementSet(spec.fm)
    for config in enumerate_valid(spec.fm):
        base = spec.truth.predict(config)
        for _ in range(reps):
            value = base + (rng.normal(0.0, spec.noise_sigma) if spec.noise_sigma > 0 else 0.0)
            ms.add(config, max(value, 1e-6))
    return ms


def random_spec(
    n_features: int = 6,
    n_interactions: int = 3,
    n_distractors: int = 0,
    max_order: int = 3,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SyntheticSpec:
    """Random unconstrained system; interaction and distractor sets are disjoint."""
    if n_features < 2:
        raise FeatintError("need at least two features")
    rng = random.Random(seed)
    features = tuple(f"F{i}" for i in range(n_features))
    chosen: list = []
    attempts = 0
    while len(chosen) < n_interactions + n_distractors and attempts < 1000:
        attempts += 1
        size = rng.randint(2, min(max_order, n_features))
        s = frozenset(rng.sample(features, size))
        if s not in chosen:
            chosen.append(s)
    inter, distract = chosen[:n_interactions], chosen[n_interactions:]
    terms = []
    for f in rng.sample(features, rng.randint(1, n_features)):
        terms.append((frozenset((f,)), _coef(rng)))
    for s in inter:
        terms.append((s, _coef(rng)))
    intercept = 10.0 + sum(abs(c) for _, c in terms)
    plan = []
    for s in inter + distract:
        caller, callee = rng.sample(sorted(s), 2)
        plan.append(CallPlanEntry(caller, callee, pcs.And(tuple(pcs.Var(f) for f in sorted(s))),
                                  rng.randint(1, 4)))
    return SyntheticSpec(FeatureModel(features), InfluenceModel(intercept, tuple(terms)),
                         tuple(plan), noise_sigma, seed)


def _coef(rng) -> float:
    # magnitudes >= 1, rounded so generated specs serialise exactly
    return round(rng.choice((-1, 1)) * rng.uniform(1.0, 10.0), 3)
