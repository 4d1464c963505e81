"""Markovianity verdicts from decay-rate signs, plus the closed-form predicates."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .dynamics import (
    ExponentialProfile,
    Profile,
    RateTable,
    WeylDynamics,
    decay_rates,
    rate_trace,
)
from .phase_space import PhasePoint, PointLike, SubgroupHNF, as_point, cyclic_order
from .weyl_core import character_table, superoperator

DEFAULT_TOL = 1e-12
ZERO_LIMIT_TIME = 1e-9
ZERO_LIMIT_TOL = 1e-8


class Verdict(enum.Enum):
    MARKOVIAN_SEMIGROUP = "MarkovianSemigroup"
    CP_DIVISIBLE = "CPDivisible"
    NON_MARKOVIAN = "NonMarkovian"
    ETERNALLY_NON_MARKOVIAN = "EternallyNonMarkovian"


@dataclass(frozen=True)
class Witness:
    alpha: PhasePoint
    t: float
    gamma: float

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha.pair), "t": self.t, "gamma": self.gamma}


@dataclass(frozen=True)
class MarkovVerdict:
    verdict: Verdict
    witness: Witness | None
    window: tuple[float, float]

    @property
    def is_markovian(self) -> bool:
        return self.verdict in (Verdict.MARKOVIAN_SEMIGROUP, Verdict.CP_DIVISIBLE)

    @property
    def is_non_markovian(self) -> bool:
        return not self.is_markovian

    @property
    def is_enm(self) -> bool:
        return self.verdict is Verdict.ETERNALLY_NON_MARKOVIAN

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_json(),
            "window": list(self.window),
        }


RateSource = WeylDynamics | Callable[[float], RateTable]


def _rate_fn(source: RateSource) -> Callable[[float], RateTable]:
    if isinstance(source, WeylDynamics):
        return lambda t: decay_rates(source, t)
    return source


def _rate_matrix(source: RateSource, grid: Sequence[float]) -> tuple[int, np.ndarray]:
    if isinstance(source, WeylDynamics):
        return source.d, rate_trace(source, grid)
    fn = _rate_fn(source)
    tables = [fn(float(t)) for t in grid]
    return tables[0].d, np.array([tab.gamma for tab in tables])


# --- semigroup tests ----------------------------------------------------------------


def check_semigroup_form(G: SubgroupHNF, profile: Profile) -> bool:
    """True iff the profile is (|G|-1)/|G| (1 - e^{-ct}) with c > 0."""
    if G.order < 2:
        raise ValueError("semigroup test needs |G| >= 2")
    if not isinstance(profile, ExponentialProfile):
        return False
    target = (G.order - 1) / G.order
    return abs(profile.r - target) <= 1e-12 and profile.c > 0


def semigroup_residual(family: WeylDynamics, t: float, s: float) -> float:
    """max |S(t+s) - S(t) S(s)| on explicit superoperators."""
    S_ts = superoperator(family.spec_at(t + s))
    S_t = superoperator(family.spec_at(t))
    S_s = superoperator(family.spec_at(s))
    return float(np.max(np.abs(S_ts - S_t @ S_s)))


def anisotropic_obstruction(weights: Mapping, d: int,
                            tol: float = 1e-10) -> tuple[PhasePoint, PhasePoint] | None:
    """Two phase points with distinct nonzero beta_v = 1 - sum_u w_u omega^(u ^ v).

    A returned pair certifies that no single scalar p(t) makes the map
    (1 - p) rho + p sum_u w_u U_u rho U_u^dagger a semigroup.
    """
    w = np.zeros(d * d)
    for key, val in weights.items():
        u = as_point(key, d)
        if u.is_zero():
            raise ValueError("anisotropic weights live on nonzero points only")
        w[u.index] += val
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("weights must be a probability vector")
    beta = 1.0 - w @ character_table(d)
    nonzero = [a for a in range(d * d) if abs(beta[a]) > tol]
    if not nonzero:
        return None
    first = nonzero[0]
    for b in nonzero[1:]:
        if abs(beta[b] - beta[first]) > tol:
            return PhasePoint.from_index(first, d), PhasePoint.from_index(b, d)
    return None


# --- grid verdicts -----------------------------------------------------------------------


def cp_divisible_on_grid(source: RateSource, grid: Sequence[float],
                         tol: float = DEFAULT_TOL) -> MarkovVerdict:
    grid = np.asarray(grid, dtype=float)
    window = (float(grid[0]), float(grid[-1]))
    d, rates = _rate_matrix(source, grid)
    neg = rates < -tol
    if neg.any():
        k, a = np.argwhere(neg)[0]  # earliest time, then lowest channel index
        w = Witness(PhasePoint.from_index(int(a), d), float(grid[k]), float(rates[k, a]))
        return MarkovVerdict(Verdict.NON_MARKOVIAN, w, window)
    spread = rates.max(axis=0) - rates.min(axis=0)
    if np.all(spread < tol):
        return MarkovVerdict(Verdict.MARKOVIAN_SEMIGROUP, None, window)
    return MarkovVerdict(Verdict.CP_DIVISIBLE, None, window)


def enm_on_grid(source: RateSource, grid: Sequence[float],
                tol: float = DEFAULT_TOL) -> MarkovVerdict:
    """ENM if one channel is below -tol on the whole grid and vanishes as t -> 0+.

    Otherwise falls back to the plain CP-divisibility verdict. The certificate
    only covers the sampled window.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] <= 0:
        raise ValueError("the ENM grid must start at t > 0")
    window = (float(grid[0]), float(grid[-1]))
    d, rates = _rate_matrix(source, grid)
    always_neg = np.flatnonzero(np.all(rates < -tol, axis=0))
    if always_neg.size:
        limit = _rate_fn(source)(ZERO_LIMIT_TIME).gamma
        for a in always_neg:
            if abs(limit[a]) < ZERO_LIMIT_TOL:
                k = int(np.argmin(rates[:, a]))
                w = Witness(PhasePoint.from_index(int(a), d), float(grid[k]), float(rates[k, a]))
                return MarkovVerdict(Verdict.ETERNALLY_NON_MARKOVIAN, w, window)
    return cp_divisible_on_grid(source, grid, tol)


def classify_on_grid(source: RateSource, grid: Sequence[float],
                     tol: float = DEFAULT_TOL) -> MarkovVerdict:
    """Strongest verdict supported by the grid."""
    return enm_on_grid(source, grid, tol)


# --- closed-form predicates ------------------------------------------------------------------


def enm_dephasing_predicate(u: PointLike, r: float, d: int | None = None) -> bool:
    """Whether dephasing along u with p = r(1 - e^{-ct}) is eternally non-Markovian.

    Odd order l >= 3: always, through channel 2u. Even order l >= 4: iff
    r <= 1/2, again through channel 2u. Order 2 is never ENM: the only channel
    has rate p'/(1 - 2p), positive whenever the map is invertible.
    """
    u = as_point(u, d)
    if not 0 < r <= 1:
        raise ValueError("amplitude r must lie in (0, 1]")
    ell = cyclic_order(u)
    if ell % 2:
        return ell >= 3
    return ell >= 4 and r <= 0.5


@dataclass(frozen=True)
class ElementParity:
    u: PhasePoint
    order: int

    @property
    def odd(self) -> bool:
        return self.order % 2 == 1


@dataclass(frozen=True)
class Theorem1Report:
    elements: tuple[ElementParity, ...]
    summary: str  # "ENMConstituents", "NonENMConstituents" or "Mixed"


def theorem1_case(G: SubgroupHNF) -> Theorem1Report:
    """Parity of the cyclic order of each non-identity element of G."""
    if G.order < 3:
        raise ValueError("needs |G| >= 3")
    elems = tuple(
        ElementParity(u, cyclic_order(u)) for u in sorted(G.elements) if not u.is_zero()
    )
    if all(e.odd and e.order >= 3 for e in elems):
        summary = "ENMConstituents"
    elif all(not e.odd for e in elems):
        summary = "NonENMConstituents"
    else:
        summary = "Mixed"
    return Theorem1Report(elems, summary)
