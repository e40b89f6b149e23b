"""How much the control-flow candidates shrink the interaction search space.

For growing feature counts, generates noise-free synthetic systems and reports
the number of feature combinations of the requested sizes, the number of
candidates derived from control flow and whether every true interaction is
still among the candidates.

    python3 scripts/search_space.py [--sizes 2,3] [--max-features 14]
"""
import argparse

import numpy as np

from featint.cli import render_table
from featint.predictor import reduce_search_space
from featint.synth import generate_corpus, random_spec
from featint.workflow import run_callgraph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2,3")
    ap.add_argument("--max-features", type=int, default=14)
    ap.add_argument("--systems", type=int, default=20, help="systems per feature count")
    args = ap.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))

    table = []
    for n in range(4, args.max_features + 1, 2):
        ratios, cands, recall = [], [], []
        total = None
        for k in range(args.systems):
            spec = random_spec(n, 3, 3, max(sizes), 0.0, seed=n * 1000 + k)
            cg = run_callgraph(generate_corpus(spec), spec.fm)
            space = reduce_search_space(cg.interactions, spec.fm, sizes)
            truth = [t for t in spec.interactions() if len(t) in sizes]
            total = space.total
            ratios.append(space.ratio)
            cands.append(len(space.candidates))
            recall.append(np.mean([t in set(space.candidates) for t in truth]) if truth else 1.0)
        table.append((n, total, float(np.mean(cands)), float(np.mean(ratios)), float(np.min(recall))))
    print(render_table(("features", "combinations", "mean candidates", "mean ratio", "min recall"), table))


if __name__ == "__main__":
    main()
