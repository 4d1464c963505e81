"""Dense matrix realization of Weyl operators and random-unitary Weyl maps.

This is the brute-force oracle layer: everything is built from explicit d x d
and d^2 x d^2 complex matrices. Vectorization is column stacking throughout,
so vec(A X B) = (B^T kron A) vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .phase_space import PhasePoint, PointLike, as_point, symplectic_matrix

MAX_ORACLE_DIM = 16


class NonInvertibleError(ArithmeticError):
    """A map eigenvalue vanished; carries the offending phase point and time."""

    def __init__(self, v, t, value=None):
        self.v = v
        self.t = t
        self.value = value
        msg = f"map not invertible: lambda_{v} ~ 0 at t={t}"
        if value is not None:
            msg += f" (|lambda|={abs(value):.3e})"
        super().__init__(msg)


@lru_cache(maxsize=None)
def omega_powers(d: int) -> np.ndarray:
    """omega^k for k = 0..d-1, omega = exp(2 pi i / d)."""
    out = np.exp(2j * np.pi * np.arange(d) / d)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def character_table(d: int) -> np.ndarray:
    """W[u, v] = omega^(u ^ v) over flat indices; exponents are reduced mod d first."""
    out = omega_powers(d)[symplectic_matrix(d)]
    out.setflags(write=False)
    return out


def weyl_operator(k: int, l: int, d: int) -> np.ndarray:
    """U_kl = sum_m omega^(k m) |m><m + l|."""
    k, l = k % d, l % d
    U = np.zeros((d, d), dtype=complex)
    m = np.arange(d)
    U[m, (m + l) % d] = omega_powers(d)[(k * m) % d]
    return U


@lru_cache(maxsize=None)
def weyl_basis(d: int) -> np.ndarray:
    """Unitary d^2 x d^2 matrix whose column a is vec(U_a) / sqrt(d), a = d*k + l."""
    B = np.empty((d * d, d * d), dtype=complex)
    for a in range(d * d):
        B[:, a] = weyl_operator(a // d, a % d, d).reshape(-1, order="F")
    B /= np.sqrt(d)
    B.setflags(write=False)
    return B


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(x: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(x).reshape((d, d), order="F")


@dataclass(frozen=True)
class WeylMapSpec:
    """A static random-unitary map rho -> sum_u p_u U_u rho U_u^dagger."""

    d: int
    weights: Mapping[tuple[int, int], float]

    def __post_init__(self):
        clean = {}
        for key, p in self.weights.items():
            u = as_point(key, self.d)
            clean[u.pair] = clean.get(u.pair, 0.0) + float(p)
        if any(p < 0 for p in clean.values()):
            raise ValueError("Weyl map weights must be nonnegative")
        total = sum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"Weyl map weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def from_array(cls, d: int, p: np.ndarray) -> "WeylMapSpec":
        p = np.asarray(p, dtype=float).reshape(-1)
        return cls(d, {(a // d, a % d): float(p[a]) for a in range(d * d) if p[a] != 0})

    @property
    def array(self) -> np.ndarray:
        out = np.zeros(self.d * self.d)
        for (i, j), p in self.weights.items():
            out[self.d * i + j] = p
        return out

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "weights": [{"i": i, "j": j, "p": p} for (i, j), p in sorted(self.weights.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeylMapSpec":
        d = int(obj["d"])
        return cls(d, {(int(e["i"]), int(e["j"])): float(e["p"]) for e in obj["weights"]})


def identity_spec(d: int) -> WeylMapSpec:
    return WeylMapSpec(d, {(0, 0): 1.0})


def dft_eigenvalues(weights: np.ndarray, d: int) -> np.ndarray:
    """lambda_v = sum_u omega^(u ^ v) p_u for a flat weight vector (any real vector)."""
    return np.asarray(weights) @ character_table(d)


def apply_map(spec: WeylMapSpec, rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    d = spec.d
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape} does not match d={d}")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ValueError("rho is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("rho does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("rho is not positive semidefinite")
    out = np.zeros_like(rho)
    for (i, j), p in spec.weights.items():
        U = weyl_operator(i, j, d)
        out += p * U @ rho @ U.conj().T
    return out


def superoperator(spec: WeylMapSpec) -> np.ndarray:
    """Column-stacked d^2 x d^2 matrix of the map, built from explicit Kraus products."""
    d = spec.d
    if d > MAX_ORACLE_DIM:
        raise ValueError(f"oracle matrices are capped at d <= {MAX_ORACLE_DIM}")
    S = np.zeros((d * d, d * d), dtype=complex)
    for (i, j), p in spec.weights.items():
        U = weyl_operator(i, j, d)
        S += p * np.kron(U.conj(), U)
    return S


def superoperator_from_eigenvalues(lams: np.ndarray, d: int) -> np.ndarray:
    """Superoperator of the Weyl-diagonal map U_v -> lams[v] U_v."""
    B = weyl_basis(d)
    return (B * np.asarray(lams)) @ B.conj().T


def choi_from_superoperator(S: np.ndarray, d: int) -> np.ndarray:
    """C = sum_ij E(|i><j|) kron |i><j|, i.e. d (E x id)(|Omega><Omega|)."""
    # S[(b, a), (j, i)] = <a|E(|i><j|)|b> in column-stacked order
    S4 = np.asarray(S).reshape(d, d, d, d)
    return S4.transpose(1, 3, 0, 2).reshape(d * d, d * d)


def choi_matrix(spec: WeylMapSpec) -> np.ndarray:
    return choi_from_superoperator(superoperator(spec), spec.d)


def is_cp(C: np.ndarray, tol: float = 1e-10) -> bool:
    C = np.asarray(C)
    H = 0.5 * (C + C.conj().T)
    return bool(np.linalg.eigvalsh(H).min() >= -tol)


def intermediate_map(spec_t: WeylMapSpec, spec_s: WeylMapSpec, s: float | None = None,
                     threshold: float = 1e-10) -> np.ndarray:
    """E(t) E(s)^-1, assembled from eigenvalue ratios in the Weyl eigenbasis."""
    if spec_t.d != spec_s.d:
        raise ValueError("dimension mismatch")
    d = spec_t.d
    lam_t = dft_eigenvalues(spec_t.array, d)
    lam_s = dft_eigenvalues(spec_s.array, d)
    bad = np.flatnonzero(np.abs(lam_s) < threshold)
    if bad.size:
        a = int(bad[0])
        raise NonInvertibleError(PhasePoint.from_index(a, d).pair, s, lam_s[a])
    return superoperator_from_eigenvalues(lam_t / lam_s, d)


def match_multisets(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> float:
    """Greedy nearest pairing of two complex multisets; returns the worst pair distance.

    Returns inf if some element finds no partner within ``tol``.
    """
    a = list(np.asarray(a).ravel())
    remaining = list(np.asarray(b).ravel())
    if len(a) != len(remaining):
        return float("inf")
    worst = 0.0
    for x in a:
        dists = np.abs(np.asarray(remaining) - x)
        k = int(np.argmin(dists))
        if dists[k] > tol:
            return float("inf")
        worst = max(worst, float(dists[k]))
        remaining.pop(k)
    return worst


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_spec(d: int, rng: np.random.Generator, support: int | None = None) -> WeylMapSpec:
    """Random weights over ``support`` random phase points (all d^2 by default)."""
    p = np.zeros(d * d)
    k = d * d if support is None else support
    idx = rng.choice(d * d, size=k, replace=False)
    p[idx] = rng.dirichlet(np.ones(k))
    p[idx[0]] += 1.0 - p.sum()
    return WeylMapSpec.from_array(d, p)


def point_weight(spec: WeylMapSpec, u: PointLike) -> float:
    return spec.weights.get(as_point(u, spec.d).pair, 0.0)
