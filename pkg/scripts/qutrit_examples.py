#!/usr/bin/env python3
"""Write decay-rate traces for the standard qutrit examples as CSV files.

    python scripts/qutrit_examples.py --out results/qutrit
"""

import argparse
import json
from pathlib import Path

from weylmaps.classify import classify_on_grid
from weylmaps.dynamics import ExponentialProfile, WeylDynamics, default_grid, rate_trace, rates_csv
from weylmaps.mixtures import MixtureSpec, gp_mixture_d3
from weylmaps.phase_space import PhasePoint, cyclic_subgroup, enumerate_subgroups


def examples(c: float):
    lines = enumerate_subgroups(3, 3)
    three = [cyclic_subgroup(PhasePoint(i, j, 3)) for i, j in [(0, 1), (1, 0), (1, 2)]]
    eps = 0.01
    return {
        "dephasing_r2_3": WeylDynamics.dephasing((1, 0), ExponentialProfile(2 / 3, c), d=3),
        "semigroup_line": WeylDynamics.isotropic(lines[0], ExponentialProfile(2 / 3, c)),
        "three_way_equal": MixtureSpec.theorem2(3, [1 / 3] * 3, three, c).family(),
        "four_way_uniform": MixtureSpec.theorem2(3, [0.25] * 4, lines, c).family(),
        "four_way_skewed": MixtureSpec.theorem2(3, [eps] + [(1 - eps) / 3] * 3, lines, c).family(),
        "gp_two_semigroups": gp_mixture_d3([0.5, 0.5, 0.0, 0.0], c),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/qutrit"))
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=64)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    grid = default_grid(args.c, points=args.points)
    summary = {}
    for name, fam in examples(args.c).items():
        (args.out / f"{name}.csv").write_text(rates_csv(grid, rate_trace(fam, grid)))
        summary[name] = classify_on_grid(fam, grid).to_json()
        print(f"{name:20s} {summary[name]['verdict']}")
    (args.out / "verdicts.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
