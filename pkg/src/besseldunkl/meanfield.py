"""Empirical measures, the limiting-flow right-hand side, and residual checks.

The mean-field limit equation pairs a test function f against the empirical
measure through the symmetric difference quotients

    Dm(x,y) = (f'(x) - f'(y)) / (x - y)   (f''(x) on the diagonal)
    Dp(x,y) = (f'(x) + f'(y)) / (x + y)   (f''(0) at the origin, x,y >= 0)

with D = Dm in type A and D = Dm + Dp in types B and D.  Test functions are
monomials here: unbounded, but moment growth is controlled at desk scale,
and the even ones used for B/D satisfy f'(0) = 0 as the plus-variant
requires.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .integrate import Trajectory
from .roots import RootSystem


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniformly weighted atoms on the one-dimensional state space."""

    atoms: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "atoms", np.asarray(self.atoms, dtype=float))

    @property
    def weight(self) -> float:
        return 1.0 / len(self.atoms)

    def pair(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.mean(f(self.atoms)))

    def moment(self, p: int) -> float:
        return float(np.mean(self.atoms ** p))


def empirical(rs: RootSystem, x: np.ndarray, convention: str = "standard") -> EmpiricalMeasure:
    """Empirical measure of a chamber configuration.

    Types A and B take the coordinates as atoms.  In type D the standard
    convention drops the (possibly signed) last coordinate and weights the
    remaining N-1; the "magnitude" variant keeps all N absolute values.
    """
    x = np.asarray(x, dtype=float)
    if rs.rtype != "D":
        return EmpiricalMeasure(x)
    if convention == "standard":
        return EmpiricalMeasure(x[..., :-1])
    if convention == "magnitude":
        return EmpiricalMeasure(np.abs(x))
    raise ValueError("convention must be 'standard' or 'magnitude'")


@dataclass(frozen=True)
class TestFunction:
    """A C^2 test function with explicit first and second derivatives."""

    f: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    name: str = "f"


def monomial(p: int) -> TestFunction:
    """x^p with exact derivatives; p even is required for types B and D."""
    if p < 1:
        raise ValueError("monomial degree must be >= 1")
    return TestFunction(
        f=lambda x: np.asarray(x, dtype=float) ** p,
        d1=lambda x: p * np.asarray(x, dtype=float) ** (p - 1),
        d2=lambda x: (p * (p - 1) * np.asarray(x, dtype=float) ** (p - 2)
                      if p >= 2 else np.zeros_like(np.asarray(x, dtype=float))),
        name=f"x^{p}",
    )


def D_f_minus(f: TestFunction, x, y) -> np.ndarray:
    """(f'(x)-f'(y))/(x-y) with the diagonal limit f''(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    same = diff == 0.0
    safe = np.where(same, 1.0, diff)
    return np.where(same, f.d2(x), (f.d1(x) - f.d1(y)) / safe)


def D_f_plus(f: TestFunction, x, y) -> np.ndarray:
    """(f'(x)+f'(y))/(x+y) for x,y >= 0 with the origin limit f''(0).

    Requires f'(0) = 0 when the origin diagonal is actually evaluated.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("plus-variant requires nonnegative arguments")
    tot = x + y
    zero = tot == 0.0
    if np.any(zero) and abs(float(f.d1(np.array(0.0)))) > 1e-13:
        raise ValueError("plus-variant at the origin requires f'(0) = 0")
    safe = np.where(zero, 1.0, tot)
    return np.where(zero, f.d2(np.zeros_like(x)), (f.d1(x) + f.d1(y)) / safe)


def D_f(rtype: str, f: TestFunction, x, y) -> np.ndarray:
    """Type-dependent pair kernel: minus-variant alone in A, plus both in B/D."""
    if rtype == "A":
        return D_f_minus(f, x, y)
    return D_f_minus(f, x, y) + D_f_plus(f, x, y)


def limit_rhs(rtype: str, mu: EmpiricalMeasure, f: TestFunction, t: float,
              b: Callable[[float, np.ndarray], np.ndarray],
              k_pair: Callable[[float, np.ndarray, np.ndarray], np.ndarray],
              k_short: Callable[[float, np.ndarray], np.ndarray] | None = None,
              ) -> float:
    """Right-hand side of the limiting measure flow paired with f.

    int b f' dmu  +  [type B] int k(t,x) f'(x)/x dmu  +
    (1/2) int int D_f(x,y) k(t,x,y) dmu dmu   (diagonal included; the
    origin quotient is read as k(t,0) f''(0)).
    """
    a = mu.atoms
    w = mu.weight
    out = w * float(np.sum(np.asarray(b(t, a), dtype=float) * f.d1(a)))
    if rtype == "B":
        if k_short is None:
            raise ValueError("type B requires the short-root kernel")
        zero = a == 0.0
        safe = np.where(zero, 1.0, a)
        h = np.where(zero,
                     np.asarray(k_short(t, a), dtype=float) * f.d2(np.zeros_like(a)),
                     np.asarray(k_short(t, a), dtype=float) * f.d1(a) / safe)
        out += w * float(np.sum(h))
    xx = a[:, None]
    yy = a[None, :]
    dmat = D_f(rtype, f, xx, yy)
    kmat = np.asarray(k_pair(t, xx, yy), dtype=float)
    out += 0.5 * w * w * float(np.sum(dmat * kmat))
    return out


@dataclass
class ResidualStats:
    """Mismatch between d/dt <mu_t, f> and the limiting right-hand side."""

    name: str
    per_traj_mean: np.ndarray
    mean: float
    sd: float
    mean_abs: float
    sem_abs: float


def residual_check(rs: RootSystem, trajectories: Sequence[Trajectory],
                   fs: Sequence[TestFunction],
                   b: Callable, k_pair: Callable, k_short: Callable | None = None,
                   convention: str = "standard", burn_windows: int = 2,
                   ) -> list[ResidualStats]:
    """Central-difference time derivative of <mu,f> minus the limit RHS.

    The derivative uses the recording cadence of the trajectories; the first
    ``burn_windows`` interior windows are skipped (transients from singular
    starts sit there).  Statistics are over ensemble members of the
    per-member mean residual.
    """
    out = []
    for f in fs:
        per = []
        for traj in trajectories:
            times = traj.times
            if len(times) < 3 + burn_windows:
                raise ValueError("trajectory too short for a residual estimate")
            mus = [empirical(rs, traj.states[w], convention) for w in range(len(times))]
            vals = np.array([mu.pair(f.f) for mu in mus])
            res = []
            for w in range(1 + burn_windows, len(times) - 1):
                delta = times[w + 1] - times[w - 1]
                deriv = (vals[w + 1] - vals[w - 1]) / delta
                rhs = limit_rhs(rs.rtype, mus[w], f, float(times[w]), b, k_pair, k_short)
                res.append(deriv - rhs)
            per.append(float(np.mean(res)))
        per = np.array(per)
        absper = np.abs(per)
        out.append(ResidualStats(
            name=f.name,
            per_traj_mean=per,
            mean=float(per.mean()),
            sd=float(per.std(ddof=1)) if len(per) > 1 else 0.0,
            mean_abs=float(absper.mean()),
            sem_abs=float(absper.std(ddof=1) / np.sqrt(len(per))) if len(per) > 1 else 0.0,
        ))
    return out


def dyson_moment_reference(beta: float, m2_0: float, m4_0: float, t: float):
    """Closed-form first, second and fourth moments of the centered Dyson flow.

    Substituting monomials into the limiting equation gives m1' = 0,
    m2' = beta and, for m1(0) = 0, m4' = 4 beta m2(t); integrated:
    m2 = m2_0 + beta t and m4 = m4_0 + 4 beta m2_0 t + 2 beta^2 t^2.
    """
    m2 = m2_0 + beta * t
    m4 = m4_0 + 4.0 * beta * m2_0 * t + 2.0 * beta ** 2 * t ** 2
    return 0.0, m2, m4
