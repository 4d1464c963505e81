"""Time-dependent Weyl maps: eigenvalues, generator eigenvalues and decay rates.

A family is described by a profile p(t) and a fixed weight pattern w_u over
the nonzero phase points: p_0(t) = 1 - p(t), p_u(t) = p(t) w_u. Isotropic maps,
dephasing maps, anisotropic maps and convex mixtures of isotropic semigroups
sharing one profile are all of this form.

Rates come from the inverse transform
    gamma_alpha(t) = d^-2 sum_v omega^(-alpha ^ v) mu_v(t),  mu_v = lambda_v' / lambda_v
and, where available, from closed forms that are checked against it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .phase_space import (
    PhasePoint,
    PointLike,
    SubgroupHNF,
    as_point,
    cyclic_order,
)
from .weyl_core import (
    NonInvertibleError,
    WeylMapSpec,
    character_table,
    dft_eigenvalues,
)

INVERTIBILITY_THRESHOLD = 1e-10
IMAG_RESIDUE_TOL = 1e-10


# --- probability profiles ----------------------------------------------------


@dataclass(frozen=True)
class ExponentialProfile:
    """p(t) = r (1 - exp(-c t)).

    r = 0 is accepted as the degenerate identity dynamics.
    """

    r: float
    c: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"amplitude r must lie in [0, 1], got {self.r}")
        if self.c <= 0:
            raise ValueError(f"rate c must be positive, got {self.c}")

    def p(self, t):
        return self.r * -np.expm1(-self.c * np.asarray(t, dtype=float))

    def pdot(self, t):
        return self.r * self.c * np.exp(-self.c * np.asarray(t, dtype=float))

    def to_json(self) -> dict:
        return {"r": self.r, "c": self.c}


@dataclass(frozen=True)
class TabulatedProfile:
    """p(t) from samples, interpolated by a cubic spline; p'(t) by central difference."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != y.shape or t.size < 2:
            raise ValueError("need matching 1-d time and value samples (at least 2)")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(y < 0) or np.any(y > 1):
            raise ValueError("tabulated p(t) must stay within [0, 1]")
        if t[0] == 0 and y[0] != 0:
            raise ValueError("p(0) must be 0")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "values", tuple(y))
        object.__setattr__(self, "_spline", CubicSpline(t, y))

    def p(self, t):
        return self._spline(np.asarray(t, dtype=float))

    def pdot(self, t):
        t = np.asarray(t, dtype=float)
        h = 1e-6 * np.maximum(1.0, t)
        lo = np.maximum(t - h, self.times[0])
        hi = np.minimum(t + h, self.times[-1])
        return (self._spline(hi) - self._spline(lo)) / (hi - lo)

    def to_json(self) -> dict:
        return {"times": list(self.times), "values": list(self.values)}


Profile = ExponentialProfile | TabulatedProfile


def profile_from_json(obj: Mapping) -> Profile:
    if "times" in obj:
        return TabulatedProfile(tuple(obj["times"]), tuple(obj["values"]))
    return ExponentialProfile(float(obj["r"]), float(obj["c"]))


def semigroup_profile(order: int, c: float = 1.0) -> ExponentialProfile:
    """The profile (K-1)/K (1 - e^{-ct}) that makes an order-K isotropic map a semigroup."""
    return ExponentialProfile((order - 1) / order, c)


# --- families ------------------------------------------------------------------


@dataclass(frozen=True)
class WeylDynamics:
    """p_0 = 1 - p(t), p_u = p(t) * pattern[u] for u != 0."""

    d: int
    pattern: np.ndarray
    profile: Profile

    def __post_init__(self):
        w = np.array(self.pattern, dtype=float).reshape(-1)
        if w.size != self.d * self.d:
            raise ValueError("pattern must have d^2 entries")
        if w[0] != 0:
            raise ValueError("pattern must not put weight on (0, 0)")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("pattern must be a probability vector over nonzero points")
        w.setflags(write=False)
        object.__setattr__(self, "pattern", w)

    @classmethod
    def from_pattern(cls, d: int, pattern: Mapping, profile: Profile) -> "WeylDynamics":
        w = np.zeros(d * d)
        for key, val in pattern.items():
            w[as_point(key, d).index] += val
        return cls(d, w, profile)

    @classmethod
    def isotropic(cls, G: SubgroupHNF, profile: Profile) -> "WeylDynamics":
        if G.order < 2:
            raise ValueError("isotropic maps need |G| >= 2")
        w = np.zeros(G.d * G.d)
        for u in G.elements:
            if not u.is_zero():
                w[u.index] = 1.0 / (G.order - 1)
        return cls(G.d, w, profile)

    @classmethod
    def dephasing(cls, u: PointLike, profile: Profile, d: int | None = None) -> "WeylDynamics":
        u = as_point(u, d)
        if u.is_zero():
            raise ValueError("dephasing needs a nonzero phase point")
        w = np.zeros(u.d * u.d)
        w[u.index] = 1.0
        return cls(u.d, w, profile)

    def weights(self, t: float) -> np.ndarray:
        p = float(self.profile.p(t))
        out = p * self.pattern
        out[0] = 1.0 - p
        return out

    def weight_derivatives(self, t: float) -> np.ndarray:
        pd = float(self.profile.pdot(t))
        out = pd * self.pattern
        out[0] = -pd
        return out

    def spec_at(self, t: float) -> WeylMapSpec:
        return WeylMapSpec.from_array(self.d, self.weights(t))

    def to_json(self) -> dict:
        d = self.d
        return {
            "d": d,
            "profile": self.profile.to_json(),
            "pattern": [
                {"i": a // d, "j": a % d, "w": float(x)}
                for a, x in enumerate(self.pattern) if x != 0
            ],
        }


# --- spectra and rates ---------------------------------------------------------


def spectrum(family: WeylDynamics, t: float) -> np.ndarray:
    """All lambda_v(t) as a flat array over v = d*k + l."""
    return dft_eigenvalues(family.weights(t), family.d)


def eigenvalue(family: WeylDynamics, v: PointLike, t: float) -> complex:
    v = as_point(v, family.d)
    return complex(spectrum(family, t)[v.index])


def spectrum_derivative(family: WeylDynamics, t: float) -> np.ndarray:
    return dft_eigenvalues(family.weight_derivatives(t), family.d)


def spectrum_derivative_fd(family: WeylDynamics, t: float, h: float | None = None) -> np.ndarray:
    """Central difference of lambda_v; the weight difference is transformed directly.

    The default step is relative to t, which keeps truncation and rounding error
    balanced when p' decays by orders of magnitude along a log grid.
    """
    if h is None:
        h = 1e-4 * t if t > 0 else 1e-8
    lo = max(t - h, 0.0)
    dw = family.weights(t + h) - family.weights(lo)
    return dft_eigenvalues(dw, family.d) / (t + h - lo)


def _check_invertible(lams: np.ndarray, d: int, t: float) -> None:
    bad = np.flatnonzero(np.abs(lams) <= INVERTIBILITY_THRESHOLD)
    if bad.size:
        a = int(bad[0])
        raise NonInvertibleError(PhasePoint.from_index(a, d).pair, t, lams[a])


def generator_eigenvalues(family: WeylDynamics, t: float) -> np.ndarray:
    """mu_v(t) = lambda_v'(t) / lambda_v(t) as a flat array."""
    lams = spectrum(family, t)
    _check_invertible(lams, family.d, t)
    return spectrum_derivative(family, t) / lams


def generator_eigenvalue(family: WeylDynamics, v: PointLike, t: float) -> complex:
    v = as_point(v, family.d)
    lam = eigenvalue(family, v, t)
    if abs(lam) <= INVERTIBILITY_THRESHOLD:
        raise NonInvertibleError(v.pair, t, lam)
    return complex(spectrum_derivative(family, t)[v.index] / lam)


class NonRealRateError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RateTable:
    """Decay rates gamma_alpha at one time; gamma[0] (alpha = 0) is fixed to 0."""

    d: int
    t: float
    gamma: np.ndarray  # flat, index alpha = d*i + j

    def __getitem__(self, alpha) -> float:
        if isinstance(alpha, (int, np.integer)):
            return float(self.gamma[alpha])
        return float(self.gamma[as_point(alpha, self.d).index])

    def items(self):
        for a in range(1, self.d * self.d):
            yield PhasePoint.from_index(a, self.d), float(self.gamma[a])


def _real_rates(g: np.ndarray, t, imag_tol: float) -> np.ndarray:
    worst = float(np.max(np.abs(g[..., 1:].imag))) if g.shape[-1] > 1 else 0.0
    if worst > imag_tol:
        raise NonRealRateError(f"decay rates have imaginary residue {worst:.3e} at t={t}")
    out = g.real.copy()
    out[..., 0] = 0.0
    return out


def rates_from_generator_eigenvalues(mu: np.ndarray, d: int, t: float = float("nan"),
                                     imag_tol: float = IMAG_RESIDUE_TOL) -> RateTable:
    g = character_table(d).conj() @ np.asarray(mu) / (d * d)
    out = _real_rates(g, t, imag_tol)
    out.setflags(write=False)
    return RateTable(d, t, out)


def forward_transform(rates: RateTable) -> np.ndarray:
    """mu_v = sum_alpha gamma_alpha (omega^(alpha ^ v) - 1)."""
    g = np.asarray(rates.gamma)
    W = character_table(rates.d)
    return g @ W - g.sum()


def decay_rates(family: WeylDynamics, t: float) -> RateTable:
    return rates_from_generator_eigenvalues(generator_eigenvalues(family, t), family.d, t)


def default_grid(c: float = 1.0, points: int = 64, t_min: float = 1e-3,
                 t_max: float = 10.0) -> np.ndarray:
    """Log-spaced grid on [t_min, t_max] in units of 1/c."""
    return np.geomspace(t_min, t_max, points) / c


def make_grid(t_min: float, t_max: float, points: int, spacing: str = "log") -> np.ndarray:
    if points < 2:
        raise ValueError("a grid needs at least 2 points")
    if spacing == "log":
        if t_min <= 0:
            raise ValueError("log spacing needs t_min > 0")
        return np.geomspace(t_min, t_max, points)
    if spacing == "linear":
        return np.linspace(t_min, t_max, points)
    raise ValueError(f"unknown spacing {spacing!r}")


def check_invertible_window(family: WeylDynamics, grid: Sequence[float]) -> None:
    """Raise if some eigenvalue vanishes on the grid or a real eigenvalue changes
    sign between neighbouring grid points (the zero is then located by bisection)."""
    grid = np.asarray(grid, dtype=float)
    d = family.d
    lams = np.array([spectrum(family, t) for t in grid])
    for t, row in zip(grid, lams):
        _check_invertible(row, d, float(t))
    real = np.abs(lams.imag) < 1e-12
    flips = (np.sign(lams.real[:-1]) * np.sign(lams.real[1:]) < 0) & real[:-1] & real[1:]
    for k, a in zip(*np.nonzero(flips)):
        f = lambda s: spectrum(family, s)[a].real  # noqa: E731
        root = brentq(f, grid[k], grid[k + 1], xtol=1e-14)
        raise NonInvertibleError(PhasePoint.from_index(int(a), d).pair, root, 0.0)


def rate_trace(family: WeylDynamics, grid: Iterable[float],
               strict_window: bool = False) -> np.ndarray:
    """Rates over a grid, shape (len(grid), d^2); column 0 is identically zero.

    Vectorized over time; same checks as ``decay_rates`` at every grid point.
    """
    grid = np.asarray(list(grid), dtype=float)
    if strict_window:
        check_invertible_window(family, grid)
    d = family.d
    W = character_table(d)
    p = np.asarray(family.profile.p(grid), dtype=float).reshape(-1)
    pd = np.asarray(family.profile.pdot(grid), dtype=float).reshape(-1)
    P = np.outer(p, family.pattern)
    P[:, 0] = 1.0 - p
    Pd = np.outer(pd, family.pattern)
    Pd[:, 0] = -pd
    lams = P @ W
    for t, row in zip(grid, lams):
        _check_invertible(row, d, float(t))
    mu = (Pd @ W) / lams
    g = mu @ W.conj().T / (d * d)
    return _real_rates(g, "grid", IMAG_RESIDUE_TOL)


def rates_csv(grid: Sequence[float], trace: np.ndarray) -> str:
    """CSV text: header t,gamma_0,...,gamma_{d^2-1}; 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n = trace.shape[1]
    writer.writerow(["t"] + [f"gamma_{a}" for a in range(n)])
    for t, row in zip(grid, trace):
        writer.writerow([f"{t:.12g}"] + [f"{x:.12g}" for x in _clean_zeros(row)])
    return buf.getvalue()


def _clean_zeros(row: np.ndarray) -> np.ndarray:
    """Snap round-off residue (below 1e-14 of the row scale) to an unsigned 0."""
    out = np.array(row, dtype=float)
    scale = max(1.0, float(np.max(np.abs(out))) if out.size else 0.0)
    out[np.abs(out) <= 1e-14 * scale] = 0.0
    return out


# --- closed forms ------------------------------------------------------------------


def dephasing_rate_closed_form(u: PhasePoint, y: int, profile: Profile, t: float) -> float:
    """Rate of channel alpha = y*u for the dephasing map along u.

    gamma_y = p' (-B)^(y-1) A^(l-1-y) / (A^l - (-B)^l),  A = 1 - p, B = p, l = ord(u).
    """
    ell = cyclic_order(u)
    if not 1 <= y <= ell - 1:
        raise ValueError(f"y must lie in [1, {ell - 1}], got {y}")
    B = float(profile.p(t))
    A = 1.0 - B
    denom = A**ell - (-B) ** ell
    if abs(denom) < 1e-14:
        raise ZeroDivisionError(f"dephasing rate is singular at t={t} (p = {B})")
    return float(profile.pdot(t)) * (-B) ** (y - 1) * A ** (ell - 1 - y) / denom


def isotropic_rate_closed_form(G: SubgroupHNF, profile: Profile, t: float) -> RateTable:
    """gamma_alpha = -(1/|G|) Lambda'/Lambda on G minus the identity, 0 elsewhere."""
    K = G.order
    lam = 1.0 - K * float(profile.p(t)) / (K - 1)
    if abs(lam) <= INVERTIBILITY_THRESHOLD:
        raise NonInvertibleError(None, t, lam)
    lam_dot = -K * float(profile.pdot(t)) / (K - 1)
    gamma = np.zeros(G.d * G.d)
    for u in G.elements:
        if not u.is_zero():
            gamma[u.index] = -lam_dot / (K * lam)
    gamma.setflags(write=False)
    return RateTable(G.d, t, gamma)


def polynomial_identity_check(A: complex, B: complex, z: complex, n: int) -> float:
    """|1/(A + Bz) - sum_m (-B)^m A^(n-1-m) z^m / (A^n - (-B)^n)| for z^n = 1."""
    if abs(z**n - 1) > 1e-12:
        raise ValueError("z must be an n-th root of unity")
    lhs_den = A + B * z
    rhs_den = A**n - (-B) ** n
    if abs(lhs_den) == 0 or abs(rhs_den) == 0:
        raise ZeroDivisionError("singular input: A + Bz = 0 or A^n = (-B)^n")
    num = sum((-B) ** m * A ** (n - 1 - m) * z**m for m in range(n))
    return abs(1.0 / lhs_den - num / rhs_den)


def lambda_zero_time(r: float, c: float) -> float | None:
    """Time at which 1 - 2 p(t) vanishes for p = r(1 - e^{-ct}); None if r <= 1/2."""
    if r <= 0.5:
        return None
    return math.log(2 * r / (2 * r - 1)) / c
