"""Symmetric-polynomial machinery behind the invariant-coordinate scheme.

Power sums use the normalized convention p_k = (1/k) sum x_i^k throughout
(the factor shortens the stochastic calculus; the Newton identities below
convert to and from the unnormalized sums internally).

The continuous inverse ``f_tilde`` reconstructs a closed-chamber point from
arbitrary invariant coordinates via companion-matrix root extraction: real
parts of the polynomial roots, ordering, and (types B/D) clamping realize
the collapse of non-image values onto the chamber boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .roots import PAIR_MINUS, PAIR_PLUS, SHORT, Root, RootSystem


@dataclass(frozen=True)
class InvariantCoords:
    """Invariant coordinates u together with their root-system context."""

    u: np.ndarray
    rtype: str
    n: int

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        if self.u.shape[-1] != self.n:
            raise ValueError("coordinate count does not match n")


def power_sums(x: np.ndarray, count: int, normalized: bool = True) -> np.ndarray:
    """p_k for k = 1..count; normalized means the 1/k factor is applied."""
    if count < 1:
        raise ValueError("count must be >= 1")
    x = np.asarray(x, dtype=float)
    ks = np.arange(1, count + 1)
    p = np.stack([np.sum(x ** k, axis=-1) for k in ks], axis=-1)
    if normalized:
        p = p / ks
    return p


def newton_e_from_p(p: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials from normalized power sums.

    Uses k e_k = sum_{j=1..k} (-1)^(j-1) e_{k-j} P_j with P_j = j p_j.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[-1]
    big = (np.arange(1, n + 1) * p)
    e = np.zeros(p.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for k in range(1, n + 1):
        acc = np.zeros(p.shape[:-1])
        for j in range(1, k + 1):
            acc += (-1.0) ** (j - 1) * e[..., k - j] * big[..., j - 1]
        e[..., k] = acc / k
    return e[..., 1:]


def newton_p_from_e(e: np.ndarray) -> np.ndarray:
    """Inverse Newton recursion; returns normalized power sums."""
    e = np.asarray(e, dtype=float)
    n = e.shape[-1]
    big = np.zeros(e.shape[:-1] + (n + 1,))
    for k in range(1, n + 1):
        acc = (-1.0) ** (k - 1) * k * e[..., k - 1]
        for j in range(1, k):
            acc += (-1.0) ** (j - 1) * e[..., j - 1] * big[..., k - j]
        big[..., k] = acc
    return big[..., 1:] / np.arange(1, n + 1)


def e_all(x: np.ndarray) -> np.ndarray:
    """All elementary symmetric polynomials e_1..e_n of the coordinates."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    e = np.zeros(x.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        xi = x[..., i, None]
        e[..., 1:i + 2] = e[..., 1:i + 2] + xi * e[..., 0:i + 1]
    return e[..., 1:]


def e_excl(x: np.ndarray, k: int, excluded=()) -> np.ndarray:
    """e_k over the coordinates outside ``excluded`` (e_0 = 1, e_{<0} = 0)."""
    if k < 0:
        return np.zeros(np.asarray(x).shape[:-1])
    x = np.asarray(x, dtype=float)
    keep = [i for i in range(x.shape[-1]) if i not in set(excluded)]
    if k > len(keep):
        return np.zeros(x.shape[:-1])
    e = np.zeros(x.shape[:-1] + (k + 1,))
    e[..., 0] = 1.0
    for i in keep:
        xi = x[..., i, None]
        e[..., 1:] = e[..., 1:] + xi * e[..., :-1]
    return e[..., k]


def F_alpha_k(alpha: Root, k: int, x: np.ndarray) -> np.ndarray:
    """The desingularizing factor with sum_i x_i^(k-1) alpha_i = <x,alpha> F.

    Defined for pair-minus roots at every k >= 1 (empty sum = 0 at k = 1)
    and for pair-plus / short roots at even k >= 2.
    """
    x = np.asarray(x, dtype=float)
    if alpha.kind == PAIR_MINUS:
        if k < 1:
            raise ValueError("k must be >= 1")
    else:
        if k < 2 or k % 2:
            raise ValueError(f"{alpha.kind!r} roots require even k >= 2, got {k}")
    if alpha.kind == SHORT:
        return x[..., alpha.i] ** (k - 2)
    xn = x[..., alpha.i]
    xm = x[..., alpha.j] if alpha.kind == PAIR_MINUS else -x[..., alpha.j]
    acc = np.zeros(np.broadcast(xn, xm).shape)
    for j in range(k - 1):
        acc = acc + xn ** j * xm ** (k - 2 - j)
    return acc


def G_alpha_n(alpha: Root, n: int, x: np.ndarray) -> np.ndarray:
    """Signed e_{n-2} excluding the root's pair, with
    sum_i alpha_i e_{n-1}^(excl i) = <x,alpha> G (pair roots only).

    The sign is -1 for difference roots and +1 for sum roots: removing one
    variable gives e_{n-1}^(excl a) = x_b e_{n-2}^(excl a,b) + e_{n-1}^(excl a,b),
    so the difference root pairing picks up x_b - x_a = -<x,alpha>.
    """
    if alpha.kind == SHORT:
        raise ValueError("G is defined for pair roots only")
    sign = -1.0 if alpha.kind == PAIR_MINUS else 1.0
    return sign * e_excl(x, n - 2, excluded=(alpha.i, alpha.j))


def w_map(rs: RootSystem, x: np.ndarray) -> InvariantCoords:
    """Basic invariant polynomials of the chamber point.

    A: normalized power sums p_1..p_N.  B: p_2, p_4, ..., p_2N.
    D: p_2..p_{2(N-1)} plus w_N = e_N = prod x_i (controls the sign of x_N).
    """
    x = np.asarray(x, dtype=float)
    n = rs.n
    if rs.rtype == "A":
        u = power_sums(x, n)
    elif rs.rtype == "B":
        u = power_sums(x * x, n) / 2.0
    else:
        u = np.empty(x.shape[:-1] + (n,))
        if n > 1:
            u[..., :n - 1] = power_sums(x * x, n - 1) / 2.0
        u[..., n - 1] = np.prod(x, axis=-1)
    return InvariantCoords(u, rs.rtype, n)


def _poly_coeffs_from_e(e: np.ndarray) -> np.ndarray:
    """Monic coefficients [1, -e1, e2, ...] of prod (t - x_i)."""
    n = e.shape[-1]
    signs = (-1.0) ** np.arange(1, n + 1)
    return np.concatenate(
        [np.ones(e.shape[:-1] + (1,)), signs * e], axis=-1
    )


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Batched polynomial roots via companion-matrix eigenvalues.

    ``coeffs`` holds monic coefficients, highest degree first, shape (..., n+1).
    One guarded Newton polish step sharpens each eigenvalue.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.shape[-1] - 1
    if n == 0:
        return np.zeros(coeffs.shape[:-1] + (0,), dtype=complex)
    comp = np.zeros(coeffs.shape[:-1] + (n, n))
    idx = np.arange(n - 1)
    comp[..., idx + 1, idx] = 1.0
    comp[..., 0, :] = -coeffs[..., 1:]
    r = np.linalg.eigvals(comp)

    # Newton polish: r <- r - q(r)/q'(r), keeping the step only if it helps.
    def horner(c, z, deriv=False):
        p = np.zeros_like(z)
        d = np.zeros_like(z)
        for k in range(c.shape[-1]):
            if deriv:
                d = d * z + p
            p = p * z + c[..., k, None]
        return (p, d) if deriv else p

    q, dq = horner(coeffs, r, deriv=True)
    ok = np.abs(dq) > 1e-300
    step = np.where(ok, q / np.where(ok, dq, 1.0), 0.0)
    r_new = r - step
    better = np.abs(horner(coeffs, r_new)) <= np.abs(q)
    return np.where(better & ok, r_new, r)


def _desc_sort(x: np.ndarray) -> np.ndarray:
    return np.sort(x, axis=-1)[..., ::-1]


def f_tilde(rs: RootSystem, u) -> np.ndarray:
    """Continuous extension of the inverse invariant map onto the closed chamber.

    Values outside the invariant image land on the chamber boundary: complex
    roots contribute their real parts (conjugate pairs coincide), negative
    squared coordinates are clamped to zero before the square root (B, D),
    and in type D the last coordinate carries sign(u_N).
    """
    uu = u.u if isinstance(u, InvariantCoords) else np.asarray(u, dtype=float)
    n = rs.n
    if uu.shape[-1] != n:
        raise ValueError("invariant coordinate count does not match the root system")
    if not np.all(np.isfinite(uu)):
        raise FloatingPointError("non-finite invariant coordinates")
    if rs.rtype == "A":
        e = newton_e_from_p(uu)
        r = _companion_roots(_poly_coeffs_from_e(e))
        return _desc_sort(r.real)
    if rs.rtype == "B":
        e = newton_e_from_p(2.0 * uu)
        y = _companion_roots(_poly_coeffs_from_e(e)).real
        return _desc_sort(np.sqrt(np.maximum(y, 0.0)))
    # D: first N-1 power sums of the squares plus e_N(y) = u_N^2
    e = np.empty(uu.shape[:-1] + (n,))
    if n > 1:
        e[..., :n - 1] = newton_e_from_p(2.0 * uu[..., :n - 1])
    e[..., n - 1] = uu[..., n - 1] ** 2
    y = _companion_roots(_poly_coeffs_from_e(e)).real
    x = _desc_sort(np.sqrt(np.maximum(y, 0.0)))
    x[..., -1] *= np.sign(uu[..., n - 1])
    return x


def roundtrip_error(rs: RootSystem, x: np.ndarray) -> np.ndarray:
    """sup-norm error of f_tilde(w(x)) - x, batched."""
    x = np.asarray(x, dtype=float)
    back = f_tilde(rs, w_map(rs, x))
    return np.max(np.abs(back - x), axis=-1)


def partial_x_wrt_p(x: np.ndarray, min_gap: float = 1e-7) -> np.ndarray:
    """Jacobian [d x_i / d p_k] of the type-A inverse map (normalized sums).

    Computed as the matrix inverse of [d p_k / d x_j] = [x_j^(k-1)].  Refuses
    near-confluent points where the Vandermonde is numerically singular.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if n > 1:
        gaps = np.abs(np.subtract.outer(x, x)[np.triu_indices(n, 1)])
        if gaps.min() < min_gap:
            raise ValueError(
                f"coordinates too close (min gap {gaps.min():.3e} < {min_gap:.0e})"
            )
    v = np.stack([x ** (k - 1) for k in range(1, n + 1)])  # v[k-1, j]
    return np.linalg.inv(v)


def inverse_jacobian_closed_form(x: np.ndarray) -> np.ndarray:
    """Closed-form candidate (-1)^(k+1) e_{N-k} without x_i over prod (x_i - x_j).

    The sign convention differs per entry from the matrix-inverse Jacobian
    (a Vandermonde ordering artifact); callers compare absolute values.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = np.empty((n, n))
    for i in range(n):
        denom = np.prod([x[i] - x[j] for j in range(n) if j != i])
        for k in range(1, n + 1):
            out[i, k - 1] = (-1.0) ** (k + 1) * e_excl(x, n - k, (i,)) / denom
    return out


def vandermonde_minor(x: np.ndarray, k: int) -> float:
    """Determinant of the Vandermonde matrix with the power-(k-1) column removed.

    Columns are x_i^p for p in {0..N} minus {k-1}; equals the plain Vandermonde
    determinant times e_{N-k+1}(x).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if not 1 <= k <= n + 1:
        raise ValueError("k must be in 1..N+1")
    powers = [p for p in range(n + 1) if p != k - 1]
    m = np.stack([x ** p for p in powers], axis=-1)
    return float(np.linalg.det(m))


def vandermonde_det(x: np.ndarray) -> float:
    """prod_{i<j} (x_j - x_i)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            out *= x[j] - x[i]
    return out
