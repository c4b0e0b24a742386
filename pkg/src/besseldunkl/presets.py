"""Ready-made coefficient models for the worked particle-system examples.

Every constructor validates its parameters (closed-form thresholds where
available, e.g. the zero-block margins of the Wishart embedding) and rejects
invalid configurations; the sampled assumption checkers are exercised on
these presets by the test suite.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np

from .model import CoefficientModel
from .roots import PAIR_MINUS, PAIR_PLUS, SHORT, RootSystem, build_root_system


def _kind_indices(rs: RootSystem):
    kinds = np.array([r.kind for r in rs.positive_roots])
    return kinds, rs.support_i, rs.support_j


def log_root_barrier(rs: RootSystem, m=1.0, sigma=None, b=None) -> CoefficientModel:
    """Time-dependent logarithmic root-barrier repulsion: k_alpha(t,x) = m_alpha(t) > 0.

    ``m`` may be a positive constant, a callable t -> positive constant, or a
    dict Root -> constant/callable.  ``sigma`` and ``b`` default to 1 and 0.
    """
    roots = rs.positive_roots

    def m_of(t: float) -> np.ndarray:
        if isinstance(m, dict):
            vals = [m[r] for r in roots]
            return np.array([v(t) if callable(v) else float(v) for v in vals])
        v = m(t) if callable(m) else m
        return np.full(len(roots), float(v))

    if np.any(m_of(0.0) <= 0.0):
        raise ValueError("log-root-barrier multiplicities must be strictly positive")

    def k_alpha(t, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(m_of(t), x.shape[:-1] + (len(roots),)).copy()

    def sig(t, x):
        x = np.asarray(x, dtype=float)
        if sigma is None:
            return np.ones_like(x)
        return np.asarray(sigma(t, x), dtype=float)

    def drift(t, x):
        x = np.asarray(x, dtype=float)
        if b is None:
            return np.zeros_like(x)
        return np.asarray(b(t, x), dtype=float)

    return CoefficientModel("log_root_barrier", rs, sig, drift, k_alpha,
                            meta={"advertised": ["A1", "C2", "G1", "U3"]})


def dyson(n: int, beta: float) -> CoefficientModel:
    """Dyson log-gas in type A: unit noise and pair repulsion beta/2 per root,

    which produces the drift (beta/2) sum_{j != i} 1/(x_i - x_j).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    rs = build_root_system("A", n)
    mdl = log_root_barrier(rs, m=beta / 2.0)
    mdl.name = f"dyson(beta={beta})"
    mdl.meta["beta"] = beta
    return mdl


def wishart_zero_block_margins(n: int, beta: float, delta: float,
                               theta0: float, theta_plus: float) -> np.ndarray:
    """C_r = delta - theta0 - (N-r) beta - (r-1) theta_plus for r = 1..N."""
    r = np.arange(1, n + 1)
    return delta - theta0 - (n - r) * beta - (r - 1) * theta_plus


def beta_wishart(n: int, beta: float, delta: float, gamma: float = 0.0,
                 theta0: float | None = None, theta_plus: float | None = None,
                 validate: bool = True) -> CoefficientModel:
    """Beta-Wishart eigenvalue dynamics embedded in type B.

    sigma_i = 2 sqrt(x_i); k = beta (x_i + x_j) on difference roots.  The
    sum roots and short roots carry theta_+ (x_i+x_j) and theta_0 x_i; these
    auxiliary coefficients rewrite constant drift pieces, so at interior
    points the drift b_i = delta - 2 gamma x_i - theta_0 - (N-1) theta_+
    reassembles exactly delta - 2 gamma x_i + beta sum (x_i+x_j)/(x_i-x_j).

    Auto-theta mode (both thetas None) picks theta_+ = beta and
    theta_0 = (delta - beta (N-1))/2, which requires delta > beta (N-1).
    Explicit configurations with some zero-block margin C_r <= 0 are
    rejected (facewise escape would fail there); pass validate=False to
    construct such a model anyway for checker demonstrations.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if theta0 is None and theta_plus is None:
        slack = delta - beta * (n - 1)
        if slack <= 0:
            raise ValueError(
                f"auto-theta requires delta > beta (N-1) = {beta * (n - 1)}, got delta = {delta}"
            )
        theta_plus = beta
        theta0 = slack / 2.0
    if theta0 is None or theta_plus is None:
        raise ValueError("give both theta0 and theta_plus, or neither")
    if theta0 <= 0 or theta_plus <= 0:
        raise ValueError("theta0 and theta_plus must be positive")
    margins = wishart_zero_block_margins(n, beta, delta, theta0, theta_plus)
    if np.any(margins <= 0):
        bad = int(np.argmax(margins <= 0)) + 1
        msg = (f"zero-block margin C_{bad} = {margins[bad - 1]:.6g} <= 0 "
               f"(delta - beta (N-1) = {delta - beta * (n - 1):.6g})")
        if validate:
            raise ValueError("beta-Wishart configuration rejected: " + msg)
        warnings.warn("constructing invalid beta-Wishart model: " + msg)

    rs = build_root_system("B", n)
    kinds, ii, jj = _kind_indices(rs)
    k_coef = np.where(kinds == PAIR_MINUS, beta,
                      np.where(kinds == PAIR_PLUS, theta_plus, 0.0))
    k_short = np.where(kinds == SHORT, theta0, 0.0)
    b_const = delta - theta0 - (n - 1) * theta_plus

    def sig(t, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * np.sqrt(np.maximum(x, 0.0))

    def drift(t, x):
        x = np.asarray(x, dtype=float)
        return b_const - 2.0 * gamma * x

    def k_alpha(t, x):
        x = np.asarray(x, dtype=float)
        return k_coef * (x[..., ii] + x[..., jj]) + k_short * x[..., ii]

    mdl = CoefficientModel(f"beta_wishart(beta={beta},delta={delta})", rs,
                           sig, drift, k_alpha,
                           meta={"advertised": ["C2", "D1", "D2", "D3", "G1", "U1", "U2", "U3"],
                                 "beta": beta, "delta": delta, "gamma": gamma,
                                 "theta0": theta0, "theta_plus": theta_plus,
                                 "zero_block_margins": margins.tolist(),
                                 "nonsticky_threshold_ok": bool(delta > beta * (n - 1))})
    if validate:
        res = beta_wishart_interior_residual(mdl, 0.0, _wishart_test_point(n))
        if res > 1e-12:
            raise AssertionError(f"interior drift identity violated: residual {res:.3e}")
    return mdl


def _wishart_test_point(n: int) -> np.ndarray:
    return np.arange(2 * n, n, -1, dtype=float) / 2.0


def beta_wishart_interior_residual(model: CoefficientModel, t: float, x: np.ndarray) -> float:
    """Relative mismatch between assembled drift and the raw pair-interaction form."""
    from .model import singular_force
    x = np.asarray(x, dtype=float)
    beta = model.meta["beta"]
    delta = model.meta["delta"]
    gamma = model.meta["gamma"]
    assembled = model.drift_b(t, x) + singular_force(model, model.rs, t, x)
    n = x.shape[-1]
    pair = np.zeros_like(x)
    for i in range(n):
        for j in range(n):
            if j != i:
                pair[..., i] += (x[..., i] + x[..., j]) / (x[..., i] - x[..., j])
    target = delta - 2.0 * gamma * x + beta * pair
    scale = 1.0 + np.abs(target).max()
    return float(np.abs(assembled - target).max() / scale)


def abs_squared_bessel_A(n: int, beta: float, delta: float, gamma: float = 0.0) -> CoefficientModel:
    """Ordered-particle model with square-root noise on the whole line (type A).

    sigma_i = 2 sqrt|x_i|, b_i = delta - 2 gamma x_i, and pair repulsion
    beta (|x_i| + |x_j|), which dominates the normal variation with the exact
    global ratio beta/4.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    rs = build_root_system("A", n)
    _, ii, jj = _kind_indices(rs)

    def sig(t, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * np.sqrt(np.abs(x))

    def drift(t, x):
        x = np.asarray(x, dtype=float)
        return delta - 2.0 * gamma * x

    def k_alpha(t, x):
        ax = np.abs(np.asarray(x, dtype=float))
        return beta * (ax[..., ii] + ax[..., jj])

    return CoefficientModel(f"abs_squared_bessel_A(beta={beta})", rs, sig, drift, k_alpha,
                            meta={"advertised": ["C2", "D1", "D2", "G1", "U1", "U2", "U3"],
                                  "beta": beta, "delta": delta, "gamma": gamma,
                                  "dominance_ratio": beta / 4.0})


def gm_pair_system(n: int, sigma: Callable[[float, np.ndarray], np.ndarray],
                   b: Callable[[float, np.ndarray], np.ndarray],
                   H: Callable[[float, np.ndarray, np.ndarray], np.ndarray] | dict,
                   ) -> CoefficientModel:
    """Type-A pair-repulsion system k_{e_i-e_j}(t,x) = H_ij(t, x_i, x_j).

    ``sigma`` and ``b`` are one-coordinate kernels applied coordinatewise;
    ``H`` is either a single exchangeable kernel or a dict keyed by (i, j)
    with i < j (0-based).  Symmetry H_ji(t,y,x) = H_ij(t,x,y) is enforced by
    construction: each root evaluates its kernel at (x_i, x_j) with i < j.
    """
    rs = build_root_system("A", n)
    _, ii, jj = _kind_indices(rs)
    if isinstance(H, dict):
        kernels = []
        for r in rs.positive_roots:
            if (r.i, r.j) in H:
                kernels.append((H[(r.i, r.j)], False))
            elif (r.j, r.i) in H:
                kernels.append((H[(r.j, r.i)], True))
            else:
                raise ValueError(f"missing pair kernel for ({r.i}, {r.j})")

        def k_alpha(t, x):
            x = np.asarray(x, dtype=float)
            cols = []
            for m, r in enumerate(rs.positive_roots):
                fn, swapped = kernels[m]
                a, c = x[..., r.i], x[..., r.j]
                cols.append(fn(t, c, a) if swapped else fn(t, a, c))
            return np.stack(cols, axis=-1)
    else:
        def k_alpha(t, x):
            x = np.asarray(x, dtype=float)
            return np.asarray(H(t, x[..., ii], x[..., jj]), dtype=float)

    def sig(t, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(sigma(t, x), dtype=float)

    def drift(t, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(b(t, x), dtype=float)

    return CoefficientModel("gm_pair_system", rs, sig, drift, k_alpha,
                            meta={"advertised": ["C2", "D1", "D2", "D3", "G1"]})


def bridge_A(n: int, t_bridge: float) -> CoefficientModel:
    """Noncolliding Brownian bridge collapsing at the origin at t_bridge (type A)."""
    return _bridge(build_root_system("A", n), t_bridge)


def bridge_B(n: int, t_bridge: float) -> CoefficientModel:
    """Type-B bridge: unit repulsion on every root (short roots included)."""
    return _bridge(build_root_system("B", n), t_bridge)


def _bridge(rs: RootSystem, t_bridge: float) -> CoefficientModel:
    if t_bridge <= 0:
        raise ValueError("t_bridge must be positive")

    def sig(t, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def drift(t, x):
        x = np.asarray(x, dtype=float)
        if t >= t_bridge:
            raise ValueError(f"bridge drift undefined at t >= {t_bridge}")
        return -x / (t_bridge - t)

    def k_alpha(t, x):
        x = np.asarray(x, dtype=float)
        return np.ones(x.shape[:-1] + (rs.num_roots,))

    return CoefficientModel(f"bridge_{rs.rtype}(T={t_bridge})", rs, sig, drift, k_alpha,
                            meta={"advertised": ["A1", "C2", "G1"], "t_bridge": t_bridge},
                            valid_until=t_bridge)


def bessel_rank1(k0: float) -> CoefficientModel:
    """Rank-one reduction: dX = dB + k0/X dt on the half-line.

    Equivalent to a Bessel process of dimension 2 k0 + 1 (index k0 - 1/2).
    """
    if k0 <= 0:
        raise ValueError("k0 must be positive")
    rs = build_root_system("B", 1)
    mdl = log_root_barrier(rs, m=k0)
    mdl.name = f"bessel_rank1(k0={k0})"
    mdl.meta.update({"k0": k0, "dimension": 2.0 * k0 + 1.0, "index": k0 - 0.5})
    return mdl


def meanfield_system(rtype: str, n: int,
                     sigma: Callable[[float, np.ndarray], np.ndarray],
                     b: Callable[[float, np.ndarray], np.ndarray],
                     k_pair: Callable[[float, np.ndarray, np.ndarray], np.ndarray],
                     k_short: Callable[[float, np.ndarray], np.ndarray] | None = None,
                     ) -> CoefficientModel:
    """Classical mean-field scaling: sigma / sqrt(N), pair k / N, short k unscaled.

    All kernels are one- or two-coordinate functions; in type D coefficients
    see the absolute value of the (possibly signed) last coordinate.
    """
    rs = build_root_system(rtype, n)
    kinds, ii, jj = _kind_indices(rs)
    is_short = kinds == SHORT
    if rtype == "B" and k_short is None:
        raise ValueError("type B requires a short-root kernel")
    scale_sigma = 1.0 / math.sqrt(n)
    scale_pair = np.where(is_short, 1.0, 1.0 / n)

    def coords(x):
        x = np.asarray(x, dtype=float)
        return np.abs(x) if rtype == "D" else x

    def sig(t, x):
        return scale_sigma * np.asarray(sigma(t, coords(x)), dtype=float)

    def drift(t, x):
        return np.asarray(b(t, coords(x)), dtype=float)

    def k_alpha(t, x):
        y = coords(x)
        a, c = y[..., ii], y[..., jj]
        pair = np.asarray(k_pair(t, a, c), dtype=float)
        if np.any(is_short):
            short = np.asarray(k_short(t, a), dtype=float)
            pair = np.where(is_short, short, pair)
        return scale_pair * pair

    return CoefficientModel(f"meanfield_{rtype}{n}", rs, sig, drift, k_alpha,
                            meta={"advertised": ["G1"], "scaling": "classical-1/N"})


def meanfield_dyson(n: int, beta: float) -> CoefficientModel:
    """Mean-field Dyson system: unit sigma, zero drift, constant pair kernel beta."""
    mdl = meanfield_system(
        "A", n,
        sigma=lambda t, x: np.ones_like(x),
        b=lambda t, x: np.zeros_like(x),
        k_pair=lambda t, a, c: np.full(np.broadcast(a, c).shape, beta),
    )
    mdl.name = f"meanfield_dyson(N={n},beta={beta})"
    mdl.meta["beta"] = beta
    return mdl


PRESETS: dict[str, Callable[..., CoefficientModel]] = {
    "dyson": dyson,
    "beta_wishart": beta_wishart,
    "abs_squared_bessel": abs_squared_bessel_A,
    "bridge_a": bridge_A,
    "bridge_b": bridge_B,
    "bessel_rank1": bessel_rank1,
    "meanfield_dyson": meanfield_dyson,
}


def make_preset(name: str, params: dict) -> CoefficientModel:
    """Build a registry preset from plain config parameters."""
    if name == "log_root_barrier":
        rs = build_root_system(params["rtype"], params["n"])
        extra = {k: v for k, v in params.items() if k not in ("rtype", "n")}
        return log_root_barrier(rs, **extra)
    if name not in PRESETS:
        known = sorted(PRESETS) + ["log_root_barrier"]
        raise ValueError(f"unknown preset {name!r}; known presets: {known}")
    return PRESETS[name](**params)
