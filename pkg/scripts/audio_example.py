"""Run every analysis stage on the audio-streaming example and print the tables.

    python3 scripts/audio_example.py [--sigma 0.5] [--reps 30]
"""
import argparse
from dataclasses import replace
from pathlib import Path

from featint import formats
from featint.cli import render_table
from featint.synth import simulate_benchmark
from featint.workflow import run_callgraph, run_learn, run_predict, run_relate

AUDIO = Path(__file__).resolve().parent.parent / "data" / "audio"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, default=0.5, help="measurement noise (seconds)")
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    fm = formats.load_feature_model(AUDIO / "feature_model.json")
    cg = run_callgraph(formats.load_corpus(AUDIO / "corpus"), fm, formats.load_overlay(AUDIO / "overlay.json"))
    print("control-flow interactions")
    print(render_table(("features", "occurrences", "overlay"),
                       [(sorted(i.features), i.occurrences, i.from_overlay) for i in cg.interactions]))

    spec = replace(formats.load_spec(AUDIO / "spec.json"), noise_sigma=args.sigma, seed=args.seed)
    lr = run_learn(simulate_benchmark(spec, args.reps))
    print(f"learned model (noise threshold {lr.noise:.3f}s, fit error {lr.model.fit_error:.2e})")
    print(render_table(("term", "coefficient"),
                       [(["(intercept)"], lr.model.intercept)]
                       + [(sorted(t), c) for t, c in lr.model.terms]))

    rel = run_relate(lr.interactions, cg.interactions)
    print("performance -> control flow")
    print(render_table(("features", "influence", "relations", "mean J"),
                       [(r["features"], r["influence"], r["relations"], r["mean_jaccard"])
                        for r in rel["perf_to_cf"]]))

    pred = run_predict(cg.interactions, lr.interactions, fm)
    d, s = pred["direct"], pred["search_space"]
    print(f"direct prediction: precision {d['precision']:.2f}, recall {d['recall']:.2f}")
    print(f"search space: {s['total']} combinations -> {s['candidate_count']} candidates "
          f"(ratio {s['ratio']:.2f}, candidate recall {s['candidate_recall']:.2f})")


if __name__ == "__main__":
    main()
