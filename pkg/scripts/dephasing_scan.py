#!/usr/bin/env python3
"""Compare the closed-form ENM predicate for dephasing maps with grid verdicts.

Prints one CSV row per (d, cyclic order, r) with the number of directions u
of that order and how many of them the two methods agree on.
"""

import argparse
from collections import defaultdict

from weylmaps.classify import classify_on_grid, enm_dephasing_predicate
from weylmaps.dynamics import ExponentialProfile, WeylDynamics, default_grid
from weylmaps.phase_space import all_points, cyclic_order


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d-max", type=int, default=8)
    ap.add_argument("--r", type=float, nargs="+", default=[0.1, 0.5, 2 / 3, 0.9])
    args = ap.parse_args()

    grid = default_grid()
    print("d,order,r,directions,predicate_enm,grid_enm,agree")
    for d in range(2, args.d_max + 1):
        for r in args.r:
            rows = defaultdict(lambda: [0, 0, 0, 0])
            for u in all_points(d):
                if u.is_zero():
                    continue
                pred = enm_dephasing_predicate(u, r)
                got = classify_on_grid(WeylDynamics.dephasing(u, ExponentialProfile(r, 1.0)),
                                       grid).is_enm
                row = rows[cyclic_order(u)]
                row[0] += 1
                row[1] += pred
                row[2] += got
                row[3] += pred == got
            for ell in sorted(rows):
                n, p, g, a = rows[ell]
                print(f"{d},{ell},{r:.4g},{n},{p},{g},{a}")


if __name__ == "__main__":
    main()
