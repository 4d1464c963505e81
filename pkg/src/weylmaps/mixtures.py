"""Convex combinations of isotropic Weyl semigroups.

In the equal-order setting every component G_k has order K and all share the
semigroup profile p(t) = (K-1)/K (1 - e^{-ct}); the mixture eigenvalue at u is
then X_u + (1 - X_u) e^{-ct}, where X_u is the total weight of components whose
dual contains u. The closed-form rates below are built on

    f(x) = c x / (x + (1 - x) e^{-ct}).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classify import MarkovVerdict, classify_on_grid
from .dynamics import (
    ExponentialProfile,
    Profile,
    WeylDynamics,
    default_grid,
    profile_from_json,
)
from .phase_space import (
    PhasePoint,
    PointLike,
    SubgroupHNF,
    all_points,
    as_point,
    count_subgroups,
    dual_subgroup,
    symplectic_matrix,
)
from .weyl_core import WeylMapSpec, omega_powers


@dataclass(frozen=True)
class MixtureComponent:
    x: float
    G: SubgroupHNF


@dataclass(frozen=True)
class MixtureSpec:
    d: int
    components: tuple[MixtureComponent, ...]
    profile: Profile

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, MixtureComponent) else MixtureComponent(float(c[0]), c[1])
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a mixture needs at least one component")
        for c in comps:
            if c.G.d != self.d:
                raise ValueError(f"component {c.G} does not live in d={self.d}")
            if c.G.order < 2:
                raise ValueError("components must be nontrivial subgroups")
            if not 0 < c.x <= 1:
                raise ValueError(f"mixing weight {c.x} outside (0, 1]")
        total = sum(c.x for c in comps)
        if abs(total - 1) > 1e-12:
            raise ValueError(f"mixing weights sum to {total!r}, not 1")
        sets = [c.G.pairs for c in comps]
        if len(set(sets)) != len(sets):
            raise ValueError("mixture components must be pairwise distinct subgroups")

    @classmethod
    def theorem2(cls, d: int, weights: Sequence[float], subgroups: Sequence[SubgroupHNF],
                 c: float = 1.0) -> "MixtureSpec":
        """Equal-order mixture with the shared semigroup profile pinned."""
        orders = {G.order for G in subgroups}
        if len(orders) != 1:
            raise ValueError("theorem-2 mixtures need components of one common order")
        K = orders.pop()
        comps = tuple(MixtureComponent(float(x), G) for x, G in zip(weights, subgroups))
        return cls(d, comps, ExponentialProfile((K - 1) / K, c))

    @property
    def N(self) -> int:
        return len(self.components)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.x for c in self.components])

    @property
    def common_order(self) -> int | None:
        orders = {c.G.order for c in self.components}
        return orders.pop() if len(orders) == 1 else None

    @property
    def theorem2_mode(self) -> bool:
        K = self.common_order
        return (
            K is not None
            and isinstance(self.profile, ExponentialProfile)
            and abs(self.profile.r - (K - 1) / K) <= 1e-12
        )

    def family(self) -> WeylDynamics:
        w = np.zeros(self.d * self.d)
        for comp in self.components:
            K = comp.G.order
            for u in comp.G.elements:
                if not u.is_zero():
                    w[u.index] += comp.x / (K - 1)
        return WeylDynamics(self.d, w, self.profile)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "profile": self.profile.to_json(),
            "components": [{"x": c.x, "G": c.G.to_json()} for c in self.components],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MixtureSpec":
        d = int(obj["d"])
        comps = tuple(
            MixtureComponent(float(e["x"]), SubgroupHNF.from_json({"d": d, **e["G"]}))
            for e in obj["components"]
        )
        return cls(d, comps, profile_from_json(obj["profile"]))


def effective_weights(mix: MixtureSpec, t: float) -> WeylMapSpec:
    """Single Weyl map equal to the mixture at time t."""
    return mix.family().spec_at(t)


def _require_theorem2(mix: MixtureSpec) -> ExponentialProfile:
    if not mix.theorem2_mode:
        raise ValueError(
            "closed forms need equal orders and p = (K-1)/K (1 - e^{-ct}); "
            "use dynamics.decay_rates for generic mixtures"
        )
    return mix.profile  # type: ignore[return-value]


# --- coverage --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    d: int
    covered: frozenset[PhasePoint]
    uncovered: tuple[PhasePoint, ...]
    dual_intersections: frozenset[PhasePoint]
    multiplicity: dict  # pair -> X_u
    N: int
    K: int | None

    def X(self, u: PointLike) -> float:
        return self.multiplicity[as_point(u, self.d).pair]

    def to_json(self) -> dict:
        return {
            "covered": [list(p.pair) for p in sorted(self.covered)],
            "uncovered": [list(p.pair) for p in self.uncovered],
            "dual_intersections": [list(p.pair) for p in sorted(self.dual_intersections)],
            "covered_count": len(self.covered),
            "subadditivity_bound": None if self.K is None else self.N * (self.K - 1),
        }


def coverage_report(mix: MixtureSpec) -> CoverageReport:
    d = mix.d
    duals = [dual_subgroup(c.G) for c in mix.components]
    covered = frozenset(u for c in mix.components for u in c.G.elements if not u.is_zero())
    uncovered = tuple(u for u in all_points(d) if not u.is_zero() and u not in covered)
    inter = frozenset(
        u
        for a, b in itertools.combinations(range(mix.N), 2)
        for u in duals[a].elements & duals[b].elements
    )
    mult = {
        u.pair: sum(c.x for c, D in zip(mix.components, duals) if u.pair in D.pairs)
        for u in all_points(d)
    }
    return CoverageReport(d, covered, uncovered, inter, mult, mix.N, mix.common_order)


def mixture_eigenvalue(mix: MixtureSpec, u: PointLike, t: float) -> float:
    """X_u + (1 - X_u) e^{-ct}."""
    prof = _require_theorem2(mix)
    u = as_point(u, mix.d)
    X = sum(c.x for c in mix.components if u.pair in dual_subgroup(c.G).pairs)
    return X + (1 - X) * math.exp(-prof.c * t)


# --- closed-form rates -----------------------------------------------------------------


def subadditivity_f(x, c: float, t: float):
    x = np.asarray(x, dtype=float)
    return c * x / (x + (1 - x) * math.exp(-c * t))


def subadditivity_gap(xs: Sequence[float], c: float, t: float) -> float:
    """sum_i f(x_i) - f(sum_i x_i); nonnegative for x_i in [0, 1] with sum <= 1."""
    xs = np.asarray(xs, dtype=float)
    return float(np.sum(subadditivity_f(xs, c, t)) - subadditivity_f(xs.sum(), c, t))


def mixture_rates_closed_form(mix: MixtureSpec, alpha: PointLike, t: float,
                              report: CoverageReport | None = None) -> float:
    """Decay rate of channel alpha from subgroup coverage and the overlap gap.

    gamma = d^-2 [ c + sum_k f(x_k) (|G_k^perp| [alpha in G_k] - 1)
                   - sum_{u in S_int, u != 0} omega^(-alpha ^ u) M(u, t) ]
    with M(u, t) = sum_k f(x_k) [u in G_k^perp] - f(X_u). Without overlaps this
    collapses to the uncovered form (c - sum f(x_k)) / d^2 or the single-cover form.
    """
    prof = _require_theorem2(mix)
    d, c = mix.d, prof.c
    alpha = as_point(alpha, d)
    if alpha.is_zero():
        return 0.0
    report = coverage_report(mix) if report is None else report
    fx = subadditivity_f(mix.weights, c, t)
    dual_sizes = [d * d // comp.G.order for comp in mix.components]
    overlaps = [u for u in report.dual_intersections if not u.is_zero()]

    if not overlaps:
        owners = [k for k, comp in enumerate(mix.components) if alpha.pair in comp.G.pairs]
        if not owners:
            return float((c - fx.sum()) / (d * d))
        if len(owners) == 1:
            k = owners[0]
            return float((c - (fx.sum() - fx[k]) + (dual_sizes[k] - 1) * fx[k]) / (d * d))

    total = c
    for k, comp in enumerate(mix.components):
        total += fx[k] * ((dual_sizes[k] if alpha.pair in comp.G.pairs else 0) - 1)
    S = symplectic_matrix(d)
    w = omega_powers(d)
    duals = [dual_subgroup(comp.G).pairs for comp in mix.components]
    for u in overlaps:
        in_dual = np.array([u.pair in D for D in duals], dtype=float)
        M = float(np.dot(fx, in_dual) - subadditivity_f(report.X(u), c, t))
        total -= (w[(-S[alpha.index, u.index]) % d] * M).real
    return float(total / (d * d))


def theorem2_bound(d: int, K: int) -> tuple[float, list[int]]:
    """min{(d^2 - 1)/(K - 1), N(K)} and the admissible mixture sizes 2 <= N < bound."""
    if K < 2:
        raise ValueError("needs K >= 2")
    bound = min((d * d - 1) / (K - 1), count_subgroups(d, K))
    return float(bound), [N for N in range(2, math.ceil(bound)) if N < bound]


def classify_mixture(mix: MixtureSpec, grid: Sequence[float] | None = None,
                     tol: float = 1e-12) -> MarkovVerdict:
    if grid is None:
        grid = default_grid(getattr(mix.profile, "c", 1.0))
    return classify_on_grid(mix.family(), grid, tol)


# --- generalized Pauli embedding (d = 3) ---------------------------------------------

# single index alpha = 3 i + j; pairs share one MUB projector family
GP_PAIRS_D3 = ((1, 2), (3, 6), (4, 8), (5, 7))


def gp_embedding_d3(q: Sequence[float]) -> WeylMapSpec:
    """Qutrit generalized Pauli channel with probabilities q_0..q_4 as a Weyl map."""
    q = np.asarray(q, dtype=float)
    if q.shape != (5,) or np.any(q < 0) or abs(q.sum() - 1) > 1e-12:
        raise ValueError("q must be five nonnegative probabilities summing to 1")
    p = np.zeros(9)
    p[0] = q[0]
    for qk, (a, b) in zip(q[1:], GP_PAIRS_D3):
        p[a] = p[b] = qk / 2
    return WeylMapSpec.from_array(3, p)


def gp_mixture_d3(x: Sequence[float], c: float = 1.0) -> WeylDynamics:
    """q_0 = 1 - p, q_k = x_k p with p = (2/3)(1 - e^{-ct}); x has four entries."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,) or np.any(x < 0) or abs(x.sum() - 1) > 1e-12:
        raise ValueError("x must be four nonnegative weights summing to 1")
    w = np.zeros(9)
    for xk, (a, b) in zip(x, GP_PAIRS_D3):
        w[a] = w[b] = xk / 2
    return WeylDynamics(3, w, ExponentialProfile(2 / 3, c))


# --- Markovian neighbourhood probe ------------------------------------------------------


def probe_markovian_neighborhood(subgroups: Sequence[SubgroupHNF], center: Sequence[float],
                                 radius: float, samples: int, rng: np.random.Generator,
                                 c: float = 1.0, grid: Sequence[float] | None = None,
                                 tol: float = 1e-12) -> list[tuple[np.ndarray, MarkovVerdict]]:
    """Grid verdicts for weight vectors sampled in a ball around ``center``.

    Samples live on the simplex plane; points leaving the open simplex are skipped.
    """
    center = np.asarray(center, dtype=float)
    N = center.size
    out = []
    while len(out) < samples:
        step = rng.normal(size=N)
        step -= step.mean()
        step *= radius * rng.uniform() ** (1 / max(N - 1, 1)) / np.linalg.norm(step)
        x = center + step
        if np.any(x <= 0) or np.any(x >= 1):
            continue
        x[-1] = 1.0 - x[:-1].sum()
        mix = MixtureSpec.theorem2(subgroups[0].d, x, subgroups, c)
        out.append((x, classify_mixture(mix, grid, tol)))
    return out
