#!/usr/bin/env python3
"""Sample weight vectors around uniform four-way qutrit mixing and tally grid verdicts.

The scan is empirical: it reports how many samples at each radius stay
CP-divisible, without claiming an analytic neighbourhood.
"""

import argparse
from collections import Counter

import numpy as np

from weylmaps.mixtures import probe_markovian_neighborhood
from weylmaps.phase_space import enumerate_subgroups


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radii", type=float, nargs="+", default=[0.01, 0.05, 0.1, 0.2])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    lines = enumerate_subgroups(3, 3)
    rng = np.random.default_rng(args.seed)
    print("radius,samples,markovian,non_markovian,eternal")
    for radius in args.radii:
        out = probe_markovian_neighborhood(lines, [0.25] * 4, radius, args.samples, rng)
        tally = Counter(v.verdict.value for _, v in out)
        markov = tally["CPDivisible"] + tally["MarkovianSemigroup"]
        print(f"{radius},{len(out)},{markov},{tally['NonMarkovian']},"
              f"{tally['EternallyNonMarkovian']}")


if __name__ == "__main__":
    main()
