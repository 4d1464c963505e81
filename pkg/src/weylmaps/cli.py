"""Command-line front end.

Exit codes: 0 success, 1 acceptance failure, 2 usage or parse error,
3 the map is not invertible somewhere on the requested grid.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import acceptance
from .classify import DEFAULT_TOL, classify_on_grid
from .dynamics import (
    WeylDynamics,
    check_invertible_window,
    make_grid,
    profile_from_json,
    rate_trace,
    rates_csv,
    semigroup_profile,
)
from .mixtures import (
    MixtureSpec,
    coverage_report,
    mixture_rates_closed_form,
    theorem2_bound,
)
from .phase_space import (
    PhasePoint,
    SubgroupHNF,
    classify_subgroup,
    count_subgroups,
    divisors,
    dual_subgroup,
    enumerate_subgroups,
)
from .weyl_core import NonInvertibleError

EXIT_OK, EXIT_ACCEPTANCE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("weylmaps")


class UsageError(Exception):
    """Bad flags or an unparseable spec (exit code 2)."""


# --- spec parsing -------------------------------------------------------------------


def load_json_arg(value: str) -> dict:
    """Accept either a path to a JSON file or an inline JSON document."""
    text = value.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read spec {value!r}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise UsageError("spec must be a JSON object")
    return obj


def parse_spec(obj: dict) -> WeylDynamics | MixtureSpec:
    """Build a family or mixture from its JSON description.

    Recognized shapes, chosen by ``kind`` or by the keys present:
      pattern    {"d", "profile", "pattern": [{"i", "j", "w"}]}
      isotropic  {"d", "G": {"m", "w", "n"}, "profile"?}   (semigroup profile if omitted)
      dephasing  {"d", "u": [i, j], "profile"}
      mixture    {"d", "components": [{"x", "G"}], "profile"?}
    An omitted profile means the semigroup amplitude (K-1)/K with rate ``c`` (default 1).
    """
    try:
        d = int(obj["d"])
        kind = obj.get("kind") or next(
            (k for k in ("components", "pattern", "G", "u") if k in obj), None
        )
        c = float(obj.get("c", 1.0))
        if kind in ("mixture", "components"):
            if "profile" in obj:
                return MixtureSpec.from_json(obj)
            subs = [SubgroupHNF.from_json({"d": d, **e["G"]}) for e in obj["components"]]
            return MixtureSpec.theorem2(d, [float(e["x"]) for e in obj["components"]], subs, c)
        if kind == "pattern":
            pattern = {(int(e["i"]), int(e["j"])): float(e["w"]) for e in obj["pattern"]}
            return WeylDynamics.from_pattern(d, pattern, profile_from_json(obj["profile"]))
        if kind in ("isotropic", "G"):
            G = SubgroupHNF.from_json({"d": d, **obj["G"]})
            prof = (profile_from_json(obj["profile"]) if "profile" in obj
                    else semigroup_profile(G.order, c))
            return WeylDynamics.isotropic(G, prof)
        if kind in ("dephasing", "u"):
            return WeylDynamics.dephasing(tuple(obj["u"]), profile_from_json(obj["profile"]), d)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid spec: {exc!r}") from exc
    raise UsageError("spec needs one of: components, pattern, G, u (or an explicit kind)")


def _family(obj) -> WeylDynamics:
    return obj.family() if isinstance(obj, MixtureSpec) else obj


def _grid(args, family: WeylDynamics) -> np.ndarray:
    c = getattr(family.profile, "c", 1.0)
    t_min = args.t_min if args.t_min is not None else 1e-3 / c
    t_max = args.t_max if args.t_max is not None else 10.0 / c
    try:
        return make_grid(t_min, t_max, args.points, args.spacing)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands ----------------------------------------------------------------------


def cmd_subgroups(args) -> int:
    d = args.d
    if d is None or d < 2:
        raise UsageError("subgroups needs --d >= 2")
    lines = []
    if args.k is None:
        counts = [(K, count_subgroups(d, K)) for K in divisors(d * d)]
        top = max(n for _, n in counts)
        lines.append("order,count,max")
        for K, n in counts:
            lines.append(f"{K},{n},{'*' if n == top else ''}")
    else:
        K = args.k
        if K < 1 or (d * d) % K:
            raise UsageError(f"order {K} does not divide d^2 = {d * d}")
        lines.append("m,w,n,type,order,dual_m,dual_w,dual_n")
        for H in enumerate_subgroups(d, K):
            D = dual_subgroup(H)
            lines.append(f"{H.m},{H.w},{H.n},{classify_subgroup(H).value},{H.order},"
                         f"{D.m},{D.w},{D.n}")
        lines.append(f"# count({d},{K}) = {count_subgroups(d, K)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _load_family(args) -> tuple[object, WeylDynamics]:
    if not args.spec:
        raise UsageError(f"{args.command} needs --spec")
    obj = parse_spec(load_json_arg(args.spec))
    return obj, _family(obj)


def cmd_rates(args) -> int:
    _, fam = _load_family(args)
    grid = _grid(args, fam)
    trace = rate_trace(fam, grid, strict_window=True)
    _emit(rates_csv(grid, trace), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    _, fam = _load_family(args)
    grid = _grid(args, fam)
    check_invertible_window(fam, grid)
    verdict = classify_on_grid(fam, grid, args.tol)
    _emit(json.dumps(verdict.to_json(), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_mixture(args) -> int:
    mix, fam = _load_family(args)
    if not isinstance(mix, MixtureSpec):
        raise UsageError("mixture needs a spec with a components list")
    grid = _grid(args, fam)
    check_invertible_window(fam, grid)
    report = coverage_report(mix)
    out = {"mixture": mix.to_json(), "coverage": report.to_json()}
    if mix.common_order is not None:
        bound, sizes = theorem2_bound(mix.d, mix.common_order)
        out["size_bound"] = {"bound": bound, "admissible_N": sizes, "N": mix.N}
    if mix.theorem2_mode:
        trace = rate_trace(fam, grid)
        dev = 0.0
        for k, t in enumerate(grid):
            for a in range(1, mix.d * mix.d):
                cf = mixture_rates_closed_form(mix, PhasePoint.from_index(a, mix.d), t, report)
                dev = max(dev, abs(cf - trace[k, a]))
        out["closed_form_max_deviation"] = dev
    out["verdict"] = classify_on_grid(fam, grid, args.tol).to_json()
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_paper(args) -> int:
    names = acceptance.select(args.filter)
    if not names:
        raise UsageError(f"no acceptance check matches {args.filter!r}")
    cfg = acceptance.SuiteConfig(seed=args.seed, tol=args.tol_override)
    results = [acceptance.run_check(n, cfg) for n in names]
    text = "\n".join(r.line() for r in results)
    passed = sum(r.passed for r in results)
    text += f"\n{passed}/{len(results)} checks passed\n"
    _emit(text, args.out)
    return EXIT_OK if passed == len(results) else EXIT_ACCEPTANCE


COMMANDS = {
    "subgroups": cmd_subgroups,
    "classify": cmd_classify,
    "rates": cmd_rates,
    "mixture": cmd_mixture,
    "paper": cmd_paper,
}


# --- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message terse
        raise UsageError(message)


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, help="qudit dimension")
    common.add_argument("--k", type=int, help="subgroup order")
    common.add_argument("--spec", help="JSON spec: a file path or inline JSON")
    common.add_argument("--t-min", type=_positive_float, dest="t_min")
    common.add_argument("--t-max", type=_positive_float, dest="t_max")
    common.add_argument("--points", type=int, default=64)
    common.add_argument("--spacing", choices=("log", "linear"), default="log")
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="rate-sign tolerance; for 'paper' it replaces every threshold")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--filter", help="run only acceptance checks whose name contains this")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="weylmaps", description="Weyl dynamical maps on qudits.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.points < 2:
            raise UsageError("--points must be >= 2")
        args.tol_override = args.tol
        if args.tol is None:
            args.tol = DEFAULT_TOL
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonInvertibleError as exc:
        v = list(exc.v) if exc.v is not None else None
        print(json.dumps({"error": "noninvertible", "v": v, "t": exc.t}), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
