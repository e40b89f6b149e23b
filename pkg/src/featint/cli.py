"""Command-line entry point.

Exit codes: 0 success, 1 pipeline check failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import callgraph, formats
from .errors import FeatintError
from .learner import LearnOptions
from .workflow import (
    DEFAULT_SWEEP,
    PredictOptions,
    materialize,
    run_callgraph,
    run_learn,
    run_pipeline,
    run_predict,
    run_relate,
)

log = logging.getLogger("featint")


def _sizes(text):
    try:
        sizes = tuple(sorted({int(s) for s in text.split(",") if s.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 2:
        raise argparse.ArgumentTypeError("sizes must be integers >= 2")
    return sizes


def _floats(text):
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="featint",
        description="Control-flow vs performance feature interactions in configurable C code.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp, corpus=False, measurements=False):
        sp.add_argument("--feature-model", required=True, help="feature model JSON")
        if corpus:
            sp.add_argument("--corpus", required=True, help="directory of .c files")
            sp.add_argument("--overlay", help="JSON array of indirect call edges")
            sp.add_argument("--allow-list", help="JSON array of non-feature macros to ignore in conditions")
        if measurements:
            sp.add_argument("--measurements", required=True, help="measurements CSV")

    def learner(sp):
        d = LearnOptions()
        sp.add_argument("--noise", type=float, help="noise threshold in seconds (default: mean stddev)")
        sp.add_argument("--error-goal", type=float, default=d.error_goal)
        sp.add_argument("--min-improvement", type=float, default=d.min_improvement)
        sp.add_argument("--max-order", type=int, default=d.max_order)

    def predictor(sp):
        sp.add_argument("--threshold", type=float, default=0.0,
                        help="support threshold, a fraction of transactions unless --absolute")
        sp.add_argument("--absolute", action="store_true", help="read --threshold as a count")
        sp.add_argument("--unique", action="store_true", help="one transaction per unique interaction")
        sp.add_argument("--sizes", type=_sizes, default=(2, 3))
        sp.add_argument("--sweep", type=_floats, default=DEFAULT_SWEEP, help="thresholds for the sweep table")

    def output(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--text", action="store_true", help="also print plain-text tables to stderr")

    sp = sub.add_parser("callgraph", help="control-flow interactions of a corpus")
    inputs(sp, corpus=True)
    output(sp)
    sp.add_argument("--dot", help="also write the call graph in DOT format")

    sp = sub.add_parser("learn", help="learn an influence model and performance interactions")
    inputs(sp, measurements=True)
    learner(sp)
    output(sp)

    sp = sub.add_parser("relate", help="relate performance and control-flow interactions")
    inputs(sp, corpus=True, measurements=True)
    learner(sp)
    output(sp)

    sp = sub.add_parser("predict", help="predict performance interactions from control flow")
    inputs(sp, corpus=True, measurements=True)
    learner(sp)
    predictor(sp)
    output(sp)

    sp = sub.add_parser("gen", help="materialise a synthetic system from a spec")
    sp.add_argument("spec", help="synthetic spec JSON")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--seed", type=int, help="override the spec seed")
    sp.add_argument("--reps", type=int, default=5)

    sp = sub.add_parser("pipeline", help="gen -> callgraph -> learn -> relate -> predict with checks")
    sp.add_argument("spec", help="synthetic spec JSON")
    sp.add_argument("--out", help="directory for the generated system and reports")
    sp.add_argument("--seed", type=int, help="override the spec seed")
    sp.add_argument("--reps", type=int, default=5)
    learner(sp)
    predictor(sp)
    sp.add_argument("--text", action="store_true", help="also print plain-text tables to stderr")
    return p


# ---------------------------------------------------------------- helpers

def _learn_opts(args) -> LearnOptions:
    return LearnOptions(args.error_goal, args.min_improvement, args.max_order)


def _predict_opts(args) -> PredictOptions:
    return PredictOptions(threshold=args.threshold, relative=not args.absolute, unique=args.unique,
                          sizes=args.sizes, sweep=args.sweep)


def _callgraph_inputs(args):
    fm = formats.load_feature_model(args.feature_model)
    units = formats.load_corpus(args.corpus)
    overlay = formats.load_overlay(args.overlay) if args.overlay else []
    allow = formats.load_allow_list(args.allow_list) if args.allow_list else ()
    return fm, run_callgraph(units, fm, overlay, allow)


def _learn_inputs(args, fm):
    ms = formats.read_measurements(args.measurements, fm)
    return run_learn(ms, _learn_opts(args), args.noise)


def _emit(report, args):
    text = formats.write_report(report, args.out)
    if not args.out:
        sys.stdout.write(text)


def render_table(headers, rows) -> str:
    cells = [[str(h) for h in headers]] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(c):
    if isinstance(c, float):
        return f"{c:.4g}"
    if isinstance(c, list):
        return ", ".join(map(str, c))
    if isinstance(c, bool):
        return "'" if c else ""
    return "-" if c is None else str(c)


def _tables(report) -> str:
    out = []
    if "interactions" in report and "histogram" in report:
        out.append(render_table(("features", "occurrences", "overlay"),
                                [(i["features"], i["occurrences"], i["overlay"]) for i in report["interactions"]]))
    if "perf_to_cf" in report:
        out.append(render_table(("performance interaction", "influence", "relations", "mean J", "'"),
                                [(r["features"], r["influence"], r["relations"], r["mean_jaccard"], r["overlay"])
                                 for r in report["perf_to_cf"]]))
        out.append(render_table(("control-flow interaction", "relations", "mean J", "'"),
                                [(r["features"], r["relations"], r["mean_jaccard"], r["overlay"])
                                 for r in report["cf_to_perf"]]))
    if "sweep" in report:
        out.append(render_table(("threshold", "predicted", "precision", "recall"),
                                [(r["threshold"], r["predicted"], r["precision"], r["recall"])
                                 for r in report["sweep"]]))
    if "model" in report:
        out.append(render_table(("term", "coefficient"),
                                [(["(intercept)"], report["model"]["intercept"])]
                                + [(t["features"], t["coefficient"]) for t in report["model"]["terms"]]))
    return "\n".join(out)


def _load_spec(args):
    spec = formats.load_spec(args.spec)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    return spec


# ---------------------------------------------------------------- commands

def cmd_callgraph(args) -> int:
    fm, cg = _callgraph_inputs(args)
    for caller, callee, loc in callgraph.unresolved_calls(cg.ast):
        log.debug("unresolved call %s -> %s at %s:%s", caller, callee, *loc)
    if args.dot:
        Path(args.dot).write_text(callgraph.to_dot(cg.edges))
    _emit(cg.report, args)
    if args.text:
        sys.stderr.write(_tables(cg.report))
    return 0


def cmd_learn(args) -> int:
    fm = formats.load_feature_model(args.feature_model)
    lr = _learn_inputs(args, fm)
    _emit(lr.report, args)
    if args.text:
        sys.stderr.write(_tables(lr.report))
    return 0


def cmd_relate(args) -> int:
    fm, cg = _callgraph_inputs(args)
    lr = _learn_inputs(args, fm)
    report = run_relate(lr.interactions, cg.interactions)
    _emit(report, args)
    if args.text:
        sys.stderr.write(_tables(report))
    return 0


def cmd_predict(args) -> int:
    fm, cg = _callgraph_inputs(args)
    lr = _learn_inputs(args, fm)
    report = run_predict(cg.interactions, lr.interactions, fm, _predict_opts(args))
    _emit(report, args)
    if args.text:
        sys.stderr.write(_tables(report))
    return 0


def cmd_gen(args) -> int:
    spec = _load_spec(args)
    materialize(spec, args.out, args.reps)
    return 0


def cmd_pipeline(args) -> int:
    spec = _load_spec(args)
    report = run_pipeline(spec, args.out, args.reps, _learn_opts(args), _predict_opts(args), args.noise)
    text = formats.dumps(report)
    if args.out:
        formats.write_report(report, Path(args.out) / "pipeline.json")
    else:
        sys.stdout.write(text)
    if args.text:
        sys.stderr.write(_tables(report["relate"]) + _tables(report["predict"]))
    for name, ok in report["checks"].items():
        if not ok:
            log.error("pipeline check failed: %s", name)
    return 0 if report["passed"] else 1


COMMANDS = {
    "callgraph": cmd_callgraph,
    "learn": cmd_learn,
    "relate": cmd_relate,
    "predict": cmd_predict,
    "gen": cmd_gen,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (FeatintError, OSError, json.JSONDecodeError) as e:
        print(f"featint: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
