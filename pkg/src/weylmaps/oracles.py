"""Brute-force references that share no code path with the closed forms.

Subgroups are generated by closing pairs of phase points under addition;
spectra come from diagonalizing explicit superoperators.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .weyl_core import WeylMapSpec, superoperator, weyl_operator

Pair = tuple[int, int]


def span(a: Pair, b: Pair, d: int) -> frozenset[Pair]:
    """All x*a + y*b mod d."""
    return frozenset(
        ((x * a[0] + y * b[0]) % d, (x * a[1] + y * b[1]) % d)
        for x in range(d) for y in range(d)
    )


@lru_cache(maxsize=None)
def brute_force_subgroups(d: int) -> dict[int, frozenset[frozenset[Pair]]]:
    """Every subgroup of Z_d x Z_d (all are 2-generated), grouped by order."""
    pts = [(i, j) for i in range(d) for j in range(d)]
    seen: set[frozenset[Pair]] = set()
    for a, b in combinations_with_replacement(pts, 2):
        seen.add(span(a, b, d))
    by_order: dict[int, set] = defaultdict(set)
    for g in seen:
        by_order[len(g)].add(g)
    return {k: frozenset(v) for k, v in by_order.items()}


def is_closed(points: frozenset[Pair], d: int) -> bool:
    return (0, 0) in points and all(
        ((a[0] + b[0]) % d, (a[1] + b[1]) % d) in points for a in points for b in points
    )


def brute_force_dual(points: frozenset[Pair], d: int) -> frozenset[Pair]:
    """Every v commuting with every element (not just generators)."""
    return frozenset(
        (k, l) for k in range(d) for l in range(d)
        if all((j * k - i * l) % d == 0 for i, j in points)
    )


def brute_force_order(u: Pair, d: int) -> int:
    """Repeated addition until the identity comes back."""
    x, n = u, 1
    while x != (0, 0):
        x = ((x[0] + u[0]) % d, (x[1] + u[1]) % d)
        n += 1
    return n


def superoperator_spectrum(spec: WeylMapSpec) -> np.ndarray:
    return np.linalg.eigvals(superoperator(spec))


def generator_superoperator_fd(family, t: float, h: float = 1e-6) -> np.ndarray:
    """L(t) = S'(t) S(t)^-1 from central differences of explicit superoperators."""
    S = superoperator(family.spec_at(t))
    dS = (superoperator(family.spec_at(t + h)) - superoperator(family.spec_at(t - h))) / (2 * h)
    return dS @ np.linalg.inv(S)


def gkls_superoperator(gamma: np.ndarray, d: int) -> np.ndarray:
    """sum_a gamma_a (U_a . U_a^dagger - id) as a column-stacked matrix."""
    L = np.zeros((d * d, d * d), dtype=complex)
    eye = np.eye(d * d)
    for a, g in enumerate(gamma):
        if g:
            U = weyl_operator(a // d, a % d, d)
            L += g * (np.kron(U.conj(), U) - eye)
    return L
