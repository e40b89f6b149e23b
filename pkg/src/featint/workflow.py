"""Analysis stages shared by the CLI and the experiment scripts.

Each stage returns plain objects plus a JSON-ready report dict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import callgraph, formats, predictor, relator
from .cparse import parse_corpus
from .errors import FeatintError
from .learner import LearnOptions, extract_interactions, learn, mean_stddev
from .synth import generate_corpus, simulate_benchmark

DEFAULT_SWEEP = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)


def _loc(site):
    return site if site == callgraph.OVERLAY else f"{site[0]}:{site[1]}"


def _feats(s):
    return sorted(s)


# ---------------------------------------------------------------- callgraph

@dataclass
class CallgraphResult:
    ast: object
    edges: list
    interactions: list
    report: dict


def run_callgraph(units, fm, overlay=(), allow=()) -> CallgraphResult:
    ast = parse_corpus(units, fm, allow)
    edges = callgraph.build_graph(ast, fm, overlay)
    ints = callgraph.derive_cf_interactions(edges, fm)
    report = {
        "functions": len(ast.functions),
        "edges": [
            {"caller": e.caller, "callee": e.callee, "pc": str(e.pc), "location": _loc(e.location)}
            for e in edges
        ],
        "unresolved_calls": [
            {"caller": a, "callee": b, "location": _loc(loc)} for a, b, loc in callgraph.unresolved_calls(ast)
        ],
        "interactions": [_cf_json(i) for i in ints],
        "unique_interactions": len(ints),
        "total_occurrences": sum(i.occurrences for i in ints),
        "histogram": {
            "unique": callgraph.interaction_histogram(ints, unique=True),
            "weighted": callgraph.interaction_histogram(ints, unique=False),
        },
    }
    return CallgraphResult(ast, edges, ints, report)


def _cf_json(i):
    return {
        "features": _feats(i.features),
        "occurrences": i.occurrences,
        "overlay": i.from_overlay,
        "sites": [_loc(s) for s in i.sites],
    }


# ---------------------------------------------------------------- learning

@dataclass
class LearnResult:
    model: object
    interactions: list
    noise: float
    report: dict


def run_learn(ms, opts: LearnOptions = LearnOptions(), noise=None) -> LearnResult:
    msd = None
    if noise is None:
        try:
            msd = mean_stddev(ms)
        except FeatintError as e:
            raise FeatintError(f"{e}; pass --noise to set the noise threshold explicitly") from None
        noise = msd
    model = learn(ms, opts)
    ints = extract_interactions(model, noise)
    report = {
        "model": formats.model_to_dict(model),
        "mean_stddev": msd,
        "noise_threshold": noise,
        "options": {"error_goal": opts.error_goal, "min_improvement": opts.min_improvement,
                    "max_order": opts.max_order},
        "interactions": [{"features": _feats(p.features), "influence": p.influence} for p in ints],
    }
    return LearnResult(model, ints, noise, report)


# ---------------------------------------------------------------- relating

def run_relate(perf, cf) -> dict:
    records = relator.relate(perf, cf)
    by_perf = relator.summarize(records, "perf", perf)
    by_cf = relator.summarize(records, "cf", cf)
    return {
        "perf_to_cf": [
            {"features": _feats(r.interaction.features), "influence": r.interaction.influence,
             "relations": r.relations, "mean_jaccard": r.mean_jaccard, "overlay": r.overlay}
            for r in by_perf
        ],
        "cf_to_perf": [
            {"features": _feats(r.interaction.features), "occurrences": r.interaction.occurrences,
             "relations": r.relations, "mean_jaccard": r.mean_jaccard, "overlay": r.overlay}
            for r in by_cf
        ],
        "records": [
            {"perf": _feats(r.perf.features), "cf": _feats(r.cf.features), "direction": r.direction,
             "jaccard": r.jaccard, "overlay": r.cf.from_overlay}
            for r in records
        ],
    }


# ---------------------------------------------------------------- predicting

@dataclass
class PredictOptions:
    threshold: float = 0.0
    relative: bool = True
    unique: bool = False
    min_size: int = 2
    sizes: tuple = (2, 3)
    sweep: tuple = field(default=DEFAULT_SWEEP)


def _report_json(rep):
    return {
        "predicted": [_feats(s) for s in rep.predicted],
        "actual": [_feats(s) for s in rep.actual],
        "precision": rep.precision,
        "recall": rep.recall,
    }


def run_predict(cf, perf, fm, opts: PredictOptions = PredictOptions()) -> dict:
    direct = predictor.evaluate(predictor.predict_direct(cf), perf)
    ts = predictor.transactions(cf, unique=opts.unique)
    mined = predictor.mine_itemsets(ts, opts.threshold, opts.min_size, opts.relative)
    itemset = predictor.evaluate([m.items for m in mined], perf)
    sweep = predictor.threshold_sweep(ts, perf, opts.sweep, opts.min_size, opts.relative)
    space = predictor.reduce_search_space(cf, fm, opts.sizes)
    actual = {p.features for p in perf}
    covered = sum(1 for a in actual if a in set(space.candidates))
    return {
        "direct": _report_json(direct),
        "itemsets": {
            "threshold": opts.threshold,
            "relative": opts.relative,
            "unique_transactions": opts.unique,
            "transactions": len(ts),
            "mined": [{"items": _feats(m.items), "support_abs": m.support_abs,
                       "support_rel": m.support_rel} for m in mined],
            **_report_json(itemset),
        },
        "sweep": [{"threshold": e, "predicted": n, "precision": p, "recall": r}
                  for e, n, p, r in sweep],
        "search_space": {
            "sizes": list(opts.sizes),
            "candidates": [_feats(s) for s in space.candidates],
            "candidate_count": len(space.candidates),
            "total": space.total,
            "ratio": space.ratio,
            "candidate_recall": covered / len(actual) if actual else 1.0,
        },
    }


# ---------------------------------------------------------------- pipeline

def materialize(spec, out_dir, reps: int) -> dict:
    """Write corpus, feature model, empty overlay, measurements and truth under ``out_dir``."""
    out = Path(out_dir)
    units = generate_corpus(spec)
    formats.write_corpus(units, out / "corpus")
    ms = simulate_benchmark(spec, reps)
    formats.write_report(formats.feature_model_to_dict(spec.fm), out / "feature_model.json")
    formats.write_report([], out / "overlay.json")
    (out / "measurements.csv").write_text(formats.measurements_to_csv(ms))
    formats.write_report(formats.model_to_dict(spec.truth), out / "truth.json")
    formats.write_report(formats.spec_to_dict(spec), out / "spec.json")
    return {"units": units, "measurements": ms}


def run_pipeline(spec, out_dir=None, reps: int = 5, learn_opts=LearnOptions(),
                 predict_opts=PredictOptions(), noise=None) -> dict:
    """Generate a system, run every stage and check the end-to-end invariants."""
    if out_dir is not None:
        made = materialize(spec, out_dir, reps)
        units, ms = made["units"], made["measurements"]
    else:
        units, ms = generate_corpus(spec), simulate_benchmark(spec, reps)
    if noise is None and reps < 2:
        noise = 0.0
    cg = run_callgraph(units, spec.fm)
    lr = run_learn(ms, learn_opts, noise)
    rel = run_relate(lr.interactions, cg.interactions)
    pred = run_predict(cg.interactions, lr.interactions, spec.fm, predict_opts)

    truth = set(spec.interactions())
    planned = {e.features for e in spec.call_plan if len(e.features) >= 2}
    found_cf = {i.features for i in cg.interactions}
    learned = {p.features for p in lr.interactions}
    cands = set(predictor.reduce_search_space(cg.interactions, spec.fm, predict_opts.sizes).candidates)
    sized_truth = {t for t in truth if len(t) in predict_opts.sizes}
    truth_recall = predictor.evaluate(sorted(cands, key=sorted), [t for t in sized_truth]).recall
    direct_truth = predictor.evaluate(predictor.predict_direct(cg.interactions), list(truth)).recall
    checks = {
        "cf_interactions_match_call_plan": found_cf == planned,
        "candidate_recall_is_1": truth_recall == 1.0,
        "direct_recall_is_1": direct_truth == 1.0,
    }
    if spec.noise_sigma == 0:
        checks["learned_interactions_match_truth"] = learned == truth
    report = {
        "truth_interactions": [_feats(t) for t in sorted(truth, key=sorted)],
        "candidate_recall_vs_truth": truth_recall,
        "direct_recall_vs_truth": direct_truth,
        "search_space_ratio": pred["search_space"]["ratio"],
        "checks": checks,
        "passed": all(checks.values()),
        "callgraph": cg.report,
        "learn": lr.report,
        "relate": rel,
        "predict": pred,
    }
    return report
