"""Exact integer arithmetic on the discrete phase space Z_d x Z_d.

Subgroups are stored in Hermite normal form: the rows (m, w) and (0, n) of an
upper-triangular integer matrix generate the pre-image lattice, which always
contains d*Z x d*Z. Everything here is pure integer arithmetic.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, order=True)
class PhasePoint:
    """An element (i, j) of Z_d x Z_d. Coordinates are reduced mod d on construction."""

    i: int
    j: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        object.__setattr__(self, "i", int(self.i) % self.d)
        object.__setattr__(self, "j", int(self.j) % self.d)

    @classmethod
    def from_index(cls, alpha: int, d: int) -> "PhasePoint":
        """Inverse of the row-major single index alpha = d*i + j."""
        return cls(alpha // d, alpha % d, d)

    @property
    def pair(self) -> Pair:
        return (self.i, self.j)

    @property
    def index(self) -> int:
        return self.d * self.i + self.j

    def is_zero(self) -> bool:
        return self.i == 0 and self.j == 0

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        _check_same_d(self, other)
        return PhasePoint(self.i + other.i, self.j + other.j, self.d)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.i, -self.j, self.d)

    def __mul__(self, k: int) -> "PhasePoint":
        return PhasePoint(k * self.i, k * self.j, self.d)

    __rmul__ = __mul__


PointLike = Union[PhasePoint, Sequence[int]]


def as_point(u: PointLike, d: int | None = None) -> PhasePoint:
    """Coerce a PhasePoint or an (i, j) pair into a PhasePoint of dimension d."""
    if isinstance(u, PhasePoint):
        if d is not None and u.d != d:
            raise ValueError(f"dimension mismatch: point has d={u.d}, expected {d}")
        return u
    if d is None:
        raise ValueError("a bare (i, j) pair needs an explicit dimension")
    i, j = u
    return PhasePoint(i, j, d)


def all_points(d: int) -> list[PhasePoint]:
    """All d^2 phase points in row-major order (index d*i + j)."""
    return [PhasePoint(i, j, d) for i in range(d) for j in range(d)]


def _check_same_d(u: PhasePoint, v: PhasePoint) -> None:
    if u.d != v.d:
        raise ValueError(f"dimension mismatch: {u.d} != {v.d}")


def symplectic_product(u: PhasePoint, v: PhasePoint) -> int:
    """u ^ v = (j_u * i_v - i_u * j_v) mod d.

    Governs the Weyl commutation phase U_u U_v = omega^(u^v) U_v U_u.
    """
    _check_same_d(u, v)
    return (u.j * v.i - u.i * v.j) % u.d


@lru_cache(maxsize=None)
def symplectic_matrix(d: int) -> np.ndarray:
    """Integer matrix S[a, b] = u_a ^ u_b over row-major flat indices (read-only)."""
    idx = np.arange(d * d)
    i, j = idx // d, idx % d
    s = (np.outer(j, i) - np.outer(i, j)) % d
    s.setflags(write=False)
    return s


# --- Hermite normal form -----------------------------------------------------


def hnf_validate(d: int, m: int, w: int, n: int) -> bool:
    """True iff (m, w, n) is a canonical HNF of a subgroup of Z_d x Z_d."""
    if d < 2 or m <= 0 or n <= 0:
        return False
    if d % m or d % n:
        return False
    if not 0 <= w < n:
        return False
    return (w * (d // m)) % n == 0


class SubgroupType(enum.Enum):
    CYCLIC = "Cyclic"
    SPLIT_RANK2 = "SplitRank2"
    NONSPLIT_RANK2 = "NonSplitRank2"


class ClassificationError(ValueError):
    pass


@dataclass(frozen=True)
class SubgroupHNF:
    """Subgroup <(m, w), (0, n)> of Z_d x Z_d in canonical Hermite normal form."""

    d: int
    m: int
    w: int
    n: int

    def __post_init__(self):
        if not hnf_validate(self.d, self.m, self.w, self.n):
            raise ValueError(
                f"invalid HNF for d={self.d}: (m={self.m}, w={self.w}, n={self.n})"
            )

    @property
    def order(self) -> int:
        return self.d * self.d // (self.m * self.n)

    @property
    def generators(self) -> tuple[PhasePoint, PhasePoint]:
        return PhasePoint(self.m, self.w, self.d), PhasePoint(0, self.n, self.d)

    @cached_property
    def elements(self) -> frozenset[PhasePoint]:
        return subgroup_elements(self)

    @cached_property
    def pairs(self) -> frozenset[Pair]:
        return frozenset(p.pair for p in self.elements)

    def __contains__(self, u: PointLike) -> bool:
        return as_point(u, self.d).pair in self.pairs

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "w": self.w, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "SubgroupHNF":
        return cls(int(obj["d"]), int(obj["m"]), int(obj["w"]), int(obj["n"]))

    def __str__(self) -> str:
        return f"HNF(d={self.d}; m={self.m}, w={self.w}, n={self.n})"


def subgroup_elements(H: SubgroupHNF) -> frozenset[PhasePoint]:
    d, m, w, n = H.d, H.m, H.w, H.n
    return frozenset(
        PhasePoint(m * u, w * u + n * v, d)
        for u in range(d // m)
        for v in range(d // n)
    )


def elements_to_json(points: Iterable[PhasePoint]) -> list[list[int]]:
    return [list(p.pair) for p in sorted(points)]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def hnf_from_generators(gens: Iterable[PointLike], d: int) -> SubgroupHNF:
    """Canonical HNF of the subgroup generated by ``gens``.

    Row-reduces the generator rows together with (d, 0) and (0, d) over the
    integers; the pivot of the first column gives m, the gcd of the leftover
    second-column entries gives n, and w is reduced mod n.
    """
    rows = [as_point(g, d).pair for g in gens] + [(d, 0), (0, d)]
    a, b = d, 0  # pivot row; (d, 0) is always present
    second = []
    for x, y in rows:
        if x == 0:
            second.append(y)
            continue
        g, s, t = _egcd(a, x)
        a, b, leftover = g, s * b + t * y, (x // g) * b - (a // g) * y
        second.append(leftover)
    n = 0
    for y in second:
        n = math.gcd(n, y)
    n = math.gcd(n, d)
    return SubgroupHNF(d, a, b % n, n)


def hnf_from_elements(points: Iterable[PointLike], d: int) -> SubgroupHNF:
    return hnf_from_generators(points, d)


def redundancy_threshold(H: SubgroupHNF) -> int:
    return math.gcd(H.w * (H.d // H.m), H.d)


def classify_subgroup(H: SubgroupHNF) -> SubgroupType:
    """Type 1/2/3 by redundancy of the second HNF generator.

    Note the labels describe the HNF, not the abstract group: for example
    2Z_6 x 3Z_6 is reported as split rank-2 although it is isomorphic to Z_6.
    """
    nu = redundancy_threshold(H)
    if H.n == nu:
        return SubgroupType.CYCLIC
    if H.w == 0 and H.n < H.d:
        return SubgroupType.SPLIT_RANK2
    if H.w != 0 and H.n < nu:
        return SubgroupType.NONSPLIT_RANK2
    # n | nu always holds for a valid HNF, so this is unreachable for valid input
    logger.error("unclassifiable HNF triple %s (nu=%d)", H, nu)
    raise ClassificationError(f"no type condition applies to {H} (nu={nu})")


def dual_subgroup(H: SubgroupHNF) -> SubgroupHNF:
    """Symplectic dual: every v with u ^ v = 0 for both HNF generators u."""
    d = H.d
    g1, g2 = H.generators
    dual = [
        v for v in all_points(d)
        if symplectic_product(g1, v) == 0 and symplectic_product(g2, v) == 0
    ]
    return hnf_from_elements(dual, d)


# --- enumeration and counting ------------------------------------------------


def divisors(n: int) -> list[int]:
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _diagonal_pairs(d: int, K: int) -> list[tuple[int, int]]:
    if K <= 0 or (d * d) % K:
        raise ValueError(f"order K={K} does not divide d^2={d * d}")
    target = d * d // K
    return [(m, target // m) for m in divisors(d)
            if target % m == 0 and d % (target // m) == 0]


def enumerate_subgroups(d: int, K: int) -> list[SubgroupHNF]:
    """Every subgroup of order K, each exactly once, in canonical HNF."""
    out = []
    for m, n in _diagonal_pairs(d, K):
        g = math.gcd(n, d // m)
        out.extend(SubgroupHNF(d, m, k * (n // g), n) for k in range(g))
    return out


def count_subgroups(d: int, K: int) -> int:
    return sum(math.gcd(n, d // m) for m, n in _diagonal_pairs(d, K))


def all_subgroups(d: int) -> list[SubgroupHNF]:
    return [H for K in divisors(d * d) for H in enumerate_subgroups(d, K)]


def sigma1(d: int) -> int:
    return sum(divisors(d))


def cyclic_order(u: PhasePoint) -> int:
    """Order of <u>, i.e. d / gcd(i, j, d)."""
    if u.is_zero():
        raise ValueError("the identity (0, 0) has no nontrivial cyclic order")
    return u.d // math.gcd(math.gcd(u.i, u.j), u.d)


def cyclic_subgroup(u: PhasePoint) -> SubgroupHNF:
    return hnf_from_generators([u], u.d)
