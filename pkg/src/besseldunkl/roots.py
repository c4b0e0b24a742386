"""Root-system combinatorics for the classical families A, B, D.

Roots are stored sparsely (a kind tag plus one or two coordinate indices);
every inner product with a root touches at most two coordinates.  Dense
vectors and the dense root matrix are materialized on demand for batched
numerics.  Indices are 0-based internally; ``Root.__str__`` prints the
usual 1-based form (``e1-e2`` etc.).

All operations here are pure and stateless.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PAIR_MINUS = "pm"  # e_i - e_j
PAIR_PLUS = "pp"   # e_i + e_j
SHORT = "s"        # e_i

_VALID_TYPES = ("A", "B", "D")


class InteriorPointError(ValueError):
    """Raised when a boundary operation receives an interior point."""


@dataclass(frozen=True, order=True)
class Root:
    """A positive root of one of the classical systems.

    ``kind`` is one of ``"pm"`` (e_i - e_j), ``"pp"`` (e_i + e_j) or
    ``"s"`` (e_i); for pair kinds ``i < j``.  Squared length is 2 for the
    pair kinds and 1 for the short kind.
    """

    kind: str
    i: int
    j: int = -1

    def __post_init__(self):
        if self.kind not in (PAIR_MINUS, PAIR_PLUS, SHORT):
            raise ValueError(f"unknown root kind {self.kind!r}")
        if self.kind != SHORT and not 0 <= self.i < self.j:
            raise ValueError("pair roots require 0 <= i < j")

    @property
    def norm2(self) -> float:
        return 1.0 if self.kind == SHORT else 2.0

    def vector(self, n: int) -> np.ndarray:
        v = np.zeros(n)
        v[self.i] = 1.0
        if self.kind == PAIR_MINUS:
            v[self.j] = -1.0
        elif self.kind == PAIR_PLUS:
            v[self.j] = 1.0
        return v

    @property
    def support(self) -> tuple[int, ...]:
        return (self.i,) if self.kind == SHORT else (self.i, self.j)

    def __str__(self):
        if self.kind == SHORT:
            return f"e{self.i + 1}"
        sign = "-" if self.kind == PAIR_MINUS else "+"
        return f"e{self.i + 1}{sign}e{self.j + 1}"


class RootSystem:
    """Positive roots of type A, B or D realized in R^N.

    Type A is used in its non-essential realization: the roots span only
    the sum-zero hyperplane and the center-of-mass direction is free.
    """

    def __init__(self, rtype: str, n: int, positive_roots: Sequence[Root]):
        self.rtype = rtype
        self.n = n
        self.positive_roots = tuple(positive_roots)
        self._index = {r: k for k, r in enumerate(self.positive_roots)}
        m = len(self.positive_roots)
        # Sparse gap representation: <x, alpha> = ci * x[I] + cj * x[J].
        self._I = np.empty(m, dtype=np.intp)
        self._J = np.empty(m, dtype=np.intp)
        self._cI = np.empty(m)
        self._cJ = np.empty(m)
        for k, r in enumerate(self.positive_roots):
            self._I[k] = r.i
            self._J[k] = r.j if r.kind != SHORT else r.i
            self._cI[k] = 1.0
            self._cJ[k] = {PAIR_MINUS: -1.0, PAIR_PLUS: 1.0, SHORT: 0.0}[r.kind]
        self._norm2 = np.array([r.norm2 for r in self.positive_roots])
        self._matrix: np.ndarray | None = None
        # Scatter plan: per-coordinate segment sums via add.reduceat keep the
        # reduction order fixed regardless of batch width (bit-reproducible).
        cols = np.concatenate([self._I, self._J])
        weights = np.concatenate([self._cI, self._cJ])
        order = np.argsort(cols, kind="stable")
        self._scatter_order = order
        self._scatter_weights = weights[order]
        self._scatter_offsets = np.searchsorted(cols[order], np.arange(n))

    @property
    def num_roots(self) -> int:
        return len(self.positive_roots)

    @property
    def norm2(self) -> np.ndarray:
        return self._norm2

    @property
    def support_i(self) -> np.ndarray:
        """First support index of each root."""
        return self._I

    @property
    def support_j(self) -> np.ndarray:
        """Second support index (equals the first for short roots)."""
        return self._J

    @property
    def support_coef(self) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients (c_i, c_j) with <x,alpha> = c_i x_i + c_j x_j."""
        return self._cI, self._cJ

    @property
    def matrix(self) -> np.ndarray:
        """Dense (num_roots, n) matrix whose rows are the positive roots."""
        if self._matrix is None:
            a = np.zeros((self.num_roots, self.n))
            a[np.arange(self.num_roots), self._I] += self._cI
            # short roots have cJ = 0, so the J column write is harmless
            a[np.arange(self.num_roots), self._J] += self._cJ
            self._matrix = a
        return self._matrix

    def root_index(self, root: Root) -> int:
        return self._index[root]

    def gaps(self, x: np.ndarray) -> np.ndarray:
        """<x, alpha> for every positive root; batched over leading axes."""
        x = np.asarray(x, dtype=float)
        return x[..., self._I] * self._cI + x[..., self._J] * self._cJ

    def gap(self, x: np.ndarray, root: Root) -> float:
        x = np.asarray(x, dtype=float)
        if root.kind == PAIR_MINUS:
            return x[..., root.i] - x[..., root.j]
        if root.kind == PAIR_PLUS:
            return x[..., root.i] + x[..., root.j]
        return x[..., root.i]

    def scatter(self, coeffs: np.ndarray) -> np.ndarray:
        """Assemble sum_alpha c_alpha * alpha from per-root coefficients."""
        coeffs = np.asarray(coeffs, dtype=float)
        if self.num_roots == 0:
            return np.zeros(coeffs.shape[:-1] + (self.n,))
        vals = np.concatenate([coeffs, coeffs], axis=-1)[..., self._scatter_order]
        vals = vals * self._scatter_weights
        return np.add.reduceat(vals, self._scatter_offsets, axis=-1)

    def __repr__(self):
        return f"RootSystem({self.rtype}, N={self.n}, {self.num_roots} positive roots)"


def build_root_system(rtype: str, n: int) -> RootSystem:
    """Enumerate the positive roots in canonical order.

    Order: pair-minus by (i, j) lexicographic, then pair-plus, then short.
    Counts: A -> N(N-1)/2, B -> N^2, D -> N(N-1).
    """
    if rtype not in _VALID_TYPES:
        raise ValueError(f"root system type must be one of {_VALID_TYPES}, got {rtype!r}")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if rtype == "D" and n < 2:
        raise ValueError("type D requires N >= 2")
    roots: list[Root] = []
    roots += [Root(PAIR_MINUS, i, j) for i in range(n) for j in range(i + 1, n)]
    if rtype in ("B", "D"):
        roots += [Root(PAIR_PLUS, i, j) for i in range(n) for j in range(i + 1, n)]
    if rtype == "B":
        roots += [Root(SHORT, i) for i in range(n)]
    return RootSystem(rtype, n, roots)


def reflect(x: np.ndarray, root: Root) -> np.ndarray:
    """Orthogonal reflection of x across the hyperplane perpendicular to the root."""
    x = np.array(x, dtype=float)
    g = 2.0 * _gap_any(x, root) / root.norm2
    if root.kind == PAIR_MINUS:
        x[..., root.i] -= g
        x[..., root.j] += g
    elif root.kind == PAIR_PLUS:
        x[..., root.i] -= g
        x[..., root.j] -= g
    else:
        x[..., root.i] -= g
    return x


def _gap_any(x: np.ndarray, root: Root):
    if root.kind == PAIR_MINUS:
        return x[..., root.i] - x[..., root.j]
    if root.kind == PAIR_PLUS:
        return x[..., root.i] + x[..., root.j]
    return x[..., root.i]


def root_inner(a: Root, b: Root) -> float:
    """<a, b> for two roots (touches at most two coordinates)."""
    va = {a.i: 1.0}
    if a.kind == PAIR_MINUS:
        va[a.j] = -1.0
    elif a.kind == PAIR_PLUS:
        va[a.j] = 1.0
    out = 0.0
    out += va.get(b.i, 0.0)
    if b.kind == PAIR_MINUS:
        out -= va.get(b.j, 0.0)
    elif b.kind == PAIR_PLUS:
        out += va.get(b.j, 0.0)
    return out


def _classify_vector(v: dict[int, float]) -> tuple[Root, int]:
    """Turn a sparse +-1 vector into (positive root, sign)."""
    items = sorted((i, c) for i, c in v.items() if c != 0)
    if len(items) == 1:
        (i, c), = items
        return Root(SHORT, i), (1 if c > 0 else -1)
    (i, ci), (j, cj) = items
    if ci == cj:
        return Root(PAIR_PLUS, i, j), (1 if ci > 0 else -1)
    if ci == -cj:
        # leading (smaller-index) coefficient decides the sign
        return Root(PAIR_MINUS, i, j), (1 if ci > 0 else -1)
    raise ValueError(f"not a classical root: {items}")


def reflected_positive(alpha: Root, beta: Root) -> tuple[Root, int]:
    """Reflect alpha across beta and flip sign so the result is positive.

    Returns (gamma, sign) with gamma = sign * s_beta(alpha).  For alpha == beta
    the reflection is -beta, hence (beta, -1).  The result satisfies, for all x,

        <alpha,beta><x,alpha> + <gamma,beta><x,gamma>
            = 2 <alpha,beta>^2 <x,beta> / |beta|^2.
    """
    c = 2.0 * root_inner(alpha, beta) / beta.norm2
    v: dict[int, float] = {alpha.i: 1.0}
    if alpha.kind == PAIR_MINUS:
        v[alpha.j] = -1.0
    elif alpha.kind == PAIR_PLUS:
        v[alpha.j] = 1.0
    v[beta.i] = v.get(beta.i, 0.0) - c
    if beta.kind == PAIR_MINUS:
        v[beta.j] = v.get(beta.j, 0.0) + c
    elif beta.kind == PAIR_PLUS:
        v[beta.j] = v.get(beta.j, 0.0) - c
    return _classify_vector(v)


def chamber_contains(rs: RootSystem, x: np.ndarray, closed: bool = True, tol: float = 0.0) -> bool:
    """True iff <x,alpha> > 0 for all positive roots (>= -tol when closed)."""
    g = rs.gaps(np.asarray(x, dtype=float))
    if closed:
        return bool(np.all(g >= -tol))
    return bool(np.all(g > tol))


def neighbor_sets(rs: RootSystem, subset: Iterable[Root], alpha: Root):
    """The interacting-root sets attached to alpha within a root subset.

    N1 collects the roots of the subset non-orthogonal to alpha; N2 collects
    the ordered pairs (beta, gamma) of distinct subset roots with
    <alpha,beta> != 0 whose positive reflection s_gamma(beta) is alpha.
    """
    subset = list(subset)
    n1 = [b for b in subset if b != alpha and root_inner(alpha, b) != 0.0]
    n2 = []
    for b, g in itertools.permutations(subset, 2):
        if root_inner(alpha, b) == 0.0:
            continue
        if reflected_positive(b, g)[0] == alpha:
            n2.append((b, g))
    return n1, n2


@dataclass(frozen=True)
class Cluster:
    """A set of positive roots sharing a nonzero coordinate (the pivot)."""

    roots: tuple[Root, ...]
    pivot: int


def is_cluster(rs: RootSystem, roots: Iterable[Root]):
    """Return a pivot index k with alpha_k != 0 for all members, or None."""
    roots = tuple(roots)
    if not roots:
        return None
    common = set(roots[0].support)
    for r in roots[1:]:
        common &= set(r.support)
        if not common:
            return None
    return min(common)


def cluster_closure(rs: RootSystem, cluster: Cluster | Iterable[Root]) -> tuple[Root, ...]:
    """Positive roots generated by reflecting cluster members in each other.

    Computed as a fixpoint: reflections of already-generated roots are folded
    back in until stable, which yields the positive roots of the subsystem
    generated by the cluster (one application alone would miss e.g. e3-e4 in
    the closure of {e2, e2+e3, e2-e4}).  Idempotent.
    """
    roots = cluster.roots if isinstance(cluster, Cluster) else tuple(cluster)
    out = set(roots)
    while True:
        new = set()
        for a, b in itertools.permutations(out, 2):
            g, _ = reflected_positive(a, b)
            if g not in out:
                new.add(g)
        if not new:
            break
        out |= new
    return tuple(sorted(out, key=rs.root_index))


def enumerate_clusters(rs: RootSystem, m: int, max_n: int = 8, max_len: int = 4) -> list[Cluster]:
    """All clusters of length m (exhaustive; capped for combinatorial safety)."""
    if rs.n > max_n or m > max_len:
        raise ValueError(
            f"cluster enumeration capped at N <= {max_n}, length <= {max_len}"
        )
    seen = set()
    out = []
    for k in range(rs.n):
        pool = [r for r in rs.positive_roots if k in r.support]
        for combo in itertools.combinations(pool, m):
            if combo in seen:
                continue
            pivot = is_cluster(rs, combo)
            if pivot is None:
                continue
            seen.add(combo)
            out.append(Cluster(combo, pivot))
    return out


@dataclass(frozen=True)
class FaceSignature:
    """The set S of positive roots vanishing at a boundary point.

    ``roots`` are indices into ``rs.positive_roots``; ``witness`` is a closed
    chamber point y with <y,alpha> = 0 exactly for alpha in S.
    """

    roots: tuple[int, ...]
    witness: tuple[float, ...]

    def root_objects(self, rs: RootSystem) -> tuple[Root, ...]:
        return tuple(rs.positive_roots[k] for k in self.roots)

    def witness_array(self) -> np.ndarray:
        return np.array(self.witness)


def face_signature(rs: RootSystem, y: np.ndarray, tol: float = 1e-9) -> FaceSignature:
    """Detect which roots vanish at a closed-chamber boundary point."""
    y = np.asarray(y, dtype=float)
    if not chamber_contains(rs, y, closed=True, tol=tol):
        raise ValueError("witness point is not in the closed chamber")
    g = rs.gaps(y)
    s = tuple(int(k) for k in np.flatnonzero(np.abs(g) <= tol))
    if not s:
        raise InteriorPointError("point is interior: no root vanishes")
    return FaceSignature(s, tuple(float(v) for v in y))


@dataclass(frozen=True)
class Detector:
    """An admissible detector direction u for a collision face.

    tau_u(x) = <u,x> is nonnegative on the closed chamber, vanishes on the
    face, and <u,alpha> >= 0 for every alpha in S.  ``crossed`` holds the
    indices of the roots of S with <u,alpha> > 0.
    """

    direction: tuple[float, ...]
    face: FaceSignature
    crossed: tuple[int, ...]
    label: str = ""

    def direction_array(self) -> np.ndarray:
        return np.array(self.direction)

    def tau(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.direction_array()


def _chamber_generators(rs: RootSystem) -> list[np.ndarray]:
    """Generators of the closed chamber as a cone (plus the free A-direction)."""
    n = rs.n
    gens = []
    if rs.rtype == "A":
        for k in range(1, n):
            g = np.zeros(n)
            g[:k] = 1.0
            gens.append(g)
        gens.append(np.ones(n))
        gens.append(-np.ones(n))
    elif rs.rtype == "B":
        for k in range(1, n + 1):
            g = np.zeros(n)
            g[:k] = 1.0
            gens.append(g)
    else:  # D
        for k in range(1, n - 1):
            g = np.zeros(n)
            g[:k] = 1.0
            gens.append(g)
        gens.append(np.ones(n))
        g = np.ones(n)
        g[-1] = -1.0
        gens.append(g)
    return gens


def is_admissible_detector(rs: RootSystem, face: FaceSignature, u: np.ndarray,
                           tol: float = 1e-12) -> bool:
    """Exact admissibility test via the chamber cone generators."""
    u = np.asarray(u, dtype=float)
    y = face.witness_array()
    if abs(float(u @ y)) > tol * (1.0 + np.abs(y).max()):
        return False
    for g in _chamber_generators(rs):
        if float(u @ g) < -tol:
            return False
    for k in face.roots:
        a = rs.positive_roots[k].vector(rs.n)
        if float(u @ a) < -tol:
            return False
    # u must lie in span(S): check residual after projecting onto the span
    basis = np.array([rs.positive_roots[k].vector(rs.n) for k in face.roots])
    coef, *_ = np.linalg.lstsq(basis.T, u, rcond=None)
    return bool(np.linalg.norm(basis.T @ coef - u) <= 1e-9 * (1.0 + np.linalg.norm(u)))


def _make_detector(rs: RootSystem, face: FaceSignature, u: np.ndarray, label: str) -> Detector:
    crossed = tuple(
        k for k in face.roots
        if float(u @ rs.positive_roots[k].vector(rs.n)) > 1e-12
    )
    return Detector(tuple(float(c) for c in u), face, crossed, label)


def canonical_detector(rs: RootSystem, face: FaceSignature) -> Detector:
    """u_S = sum of the roots of S; crosses every root of the face."""
    if not face.roots:
        raise ValueError("face signature is empty")
    u = np.zeros(rs.n)
    for k in face.roots:
        u += rs.positive_roots[k].vector(rs.n)
    det = _make_detector(rs, face, u, "canonical")
    if det.crossed != face.roots:
        raise AssertionError("canonical detector must cross every face root")
    return det


def cut_detector(rs: RootSystem, face: FaceSignature, block: Sequence[int], r: int) -> Detector:
    """Block-cut detector u = mean(left part) - mean(right part).

    ``block`` is a contiguous run of coordinate indices forming an equality
    block of the face; ``r`` splits off the first r coordinates.
    """
    block = list(block)
    k = len(block)
    if k < 2 or not 1 <= r <= k - 1:
        raise ValueError(f"invalid cut r={r} for block of size {k}")
    if block != list(range(block[0], block[0] + k)):
        raise ValueError("block must be a contiguous index range")
    u = np.zeros(rs.n)
    u[block[:r]] = 1.0 / r
    u[block[r:]] -= 1.0 / (k - r)
    if not is_admissible_detector(rs, face, u):
        raise ValueError("cut does not give an admissible detector for this face")
    return _make_detector(rs, face, u, f"cut[{block[0] + 1}..{block[-1] + 1}|{r}]")


def _witness_blocks(rs: RootSystem, face: FaceSignature, tol: float = 1e-12):
    """Decompose the witness into maximal equality blocks.

    Returns a list of (indices, kind) with kind in {"pos", "zero", "mixed"}.
    "pos" blocks share a common (possibly negative, type A) value, "zero"
    blocks sit at level 0, and the type-D "mixed" block has x_i = z for its
    leading members and x_N = -z.
    """
    y = face.witness_array()
    n = rs.n
    z = np.abs(y) <= tol
    blocks = []
    start = 0
    for i in range(1, n + 1):
        boundary = i == n
        if not boundary:
            same = abs(y[i] - y[start]) <= tol
            mixed_tail = (
                rs.rtype == "D" and i == n - 1
                and abs(y[i] + y[start]) <= tol and abs(y[start]) > tol
            )
            boundary = not (same or mixed_tail)
        if boundary:
            idx = list(range(start, i))
            if all(z[p] for p in idx):
                kind = "zero"
            elif rs.rtype == "D" and idx[-1] == n - 1 and y[n - 1] < -tol:
                kind = "mixed"
            else:
                kind = "pos"
            blocks.append((idx, kind))
            start = i
    return blocks


def detector_family(rs: RootSystem, face: FaceSignature) -> list[Detector]:
    """The concrete admissible detector family D(S) used by the checkers.

    Canonical detector, every admissible block-cut detector of each equality
    block of size >= 2 (mixed type-D blocks get the sign-adjusted cuts), and
    the block-center detector of a zero block.  Only directions passing the
    exact admissibility test are kept.
    """
    out = [canonical_detector(rs, face)]
    for idx, kind in _witness_blocks(rs, face):
        if len(idx) < 2:
            continue
        for r in range(1, len(idx)):
            u = np.zeros(rs.n)
            u[idx[:r]] = 1.0 / r
            u[idx[r:]] -= 1.0 / (len(idx) - r)
            if kind == "mixed":
                u[rs.n - 1] *= -1.0
            if is_admissible_detector(rs, face, u):
                out.append(_make_detector(rs, face, u, f"cut[{idx[0] + 1}..{idx[-1] + 1}|{r}]"))
        if kind == "zero":
            u = np.zeros(rs.n)
            u[idx] = 1.0 / len(idx)
            if is_admissible_detector(rs, face, u):
                out.append(_make_detector(rs, face, u, f"center[{idx[0] + 1}..{idx[-1] + 1}]"))
    return out


def _face_patterns(rs: RootSystem):
    """Block patterns (sizes plus tail kind) describing every face type."""
    n = rs.n

    def compositions(total):
        if total == 0:
            yield ()
            return
        for first in range(1, total + 1):
            for rest in compositions(total - first):
                yield (first,) + rest

    patterns = []
    if rs.rtype == "A":
        for comp in compositions(n):
            if any(s >= 2 for s in comp):
                patterns.append((comp, "pos"))
    elif rs.rtype == "B":
        for comp in compositions(n):
            if any(s >= 2 for s in comp):
                patterns.append((comp, "pos"))
            patterns.append((comp, "zero"))  # last block at level 0
    else:  # D
        for comp in compositions(n):
            if any(s >= 2 for s in comp):
                patterns.append((comp, "pos"))
            if comp[-1] >= 2:
                patterns.append((comp, "zero"))
                patterns.append((comp, "mixed"))
    return patterns


def _pattern_witness(rs: RootSystem, comp: tuple[int, ...], tail: str,
                     levels: np.ndarray | None = None) -> np.ndarray:
    nb = len(comp)
    if levels is None:
        levels = np.arange(nb, 0, -1, dtype=float)
    y = np.concatenate([np.full(s, levels[b]) for b, s in enumerate(comp)])
    if tail == "zero":
        y[-comp[-1]:] = 0.0
    elif tail == "mixed":
        y[-1] = -y[-1]
    return y


def enumerate_faces(rs: RootSystem, max_n: int = 6) -> list[FaceSignature]:
    """Exhaustive face enumeration by block patterns (deterministic, small N)."""
    if rs.n > max_n:
        raise ValueError(f"face enumeration capped at N <= {max_n}")
    faces = []
    seen = set()
    for comp, tail in _face_patterns(rs):
        y = _pattern_witness(rs, comp, tail)
        try:
            f = face_signature(rs, y, tol=1e-12)
        except InteriorPointError:
            continue
        if f.roots not in seen:
            seen.add(f.roots)
            faces.append(f)
    return faces


def sample_face_points(rs: RootSystem, face: FaceSignature, count: int,
                       rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random points on the face: redraw the block levels of the witness."""
    blocks = _witness_blocks(rs, face)
    out = np.empty((count, rs.n))
    for s in range(count):
        nb = len(blocks)
        gaps = scale * (0.2 + rng.random(nb))
        levels = np.cumsum(gaps[::-1])[::-1]
        if rs.rtype == "A":
            levels = levels - scale * rng.random()  # blocks may sit below zero
        y = np.empty(rs.n)
        for b, (idx, kind) in enumerate(blocks):
            if kind == "zero":
                y[idx] = 0.0
            elif kind == "mixed":
                y[idx] = levels[b]
                y[idx[-1]] = -levels[b]
            else:
                y[idx] = levels[b]
        out[s] = y
    return out


def approach_face(rs: RootSystem, face: FaceSignature, y: np.ndarray, gap: float) -> np.ndarray:
    """Move a face point into the chamber so that min_{alpha in S} <x,alpha> = gap."""
    u = canonical_detector(rs, face).direction_array()
    s_gaps = np.array([
        float(u @ rs.positive_roots[k].vector(rs.n)) for k in face.roots
    ])
    step = gap / s_gaps.min()
    return np.asarray(y, dtype=float) + step * u


def minimal_face_for_root(rs: RootSystem, root: Root) -> FaceSignature:
    """The lowest-dimensional block face on whose closure <x,root> = 0 holds.

    Used by the wall-approach samplers: vanishing of a single root in the
    closed chamber forces a whole block pattern (e.g. <x, e_i - e_j> = 0
    forces the block x_i = ... = x_j).
    """
    n = rs.n
    y = np.arange(n, 0, -1, dtype=float)
    if root.kind == PAIR_MINUS:
        y[root.i:root.j + 1] = y[root.i]
    elif root.kind == SHORT:
        y[root.i:] = 0.0
    else:  # pair-plus
        if rs.rtype == "B":
            y[root.i:] = 0.0
        else:  # D: mirror wall x_i = -x_N, or zero block when j < N-1
            if root.j == n - 1:
                y[root.i:] = y[root.i]
                y[n - 1] = -y[root.i]
            else:
                y[root.i:] = 0.0
    return face_signature(rs, y, tol=1e-12)


def sample_chamber_points(rs: RootSystem, count: int, rng: np.random.Generator,
                          scale: float = 1.0, min_gap: float = 0.0) -> np.ndarray:
    """Random interior points of the closed chamber (sorted normal draws)."""
    out = np.empty((count, rs.n))
    got = 0
    while got < count:
        x = rng.standard_normal((count, rs.n)) * scale
        if rs.rtype == "B":
            x = np.sort(np.abs(x), axis=-1)[:, ::-1]
        elif rs.rtype == "D":
            sgn = np.where(np.prod(np.sign(x), axis=-1) < 0, -1.0, 1.0)
            x = np.sort(np.abs(x), axis=-1)[:, ::-1]
            x[:, -1] *= sgn
        else:
            x = np.sort(x, axis=-1)[:, ::-1]
        ok = rs.gaps(x).min(axis=-1) > min_gap if rs.num_roots else np.ones(count, bool)
        x = x[ok]
        take = min(count - got, len(x))
        out[got:got + take] = x[:take]
        got += take
    return out
