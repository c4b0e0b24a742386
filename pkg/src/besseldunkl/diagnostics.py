"""Boundary and collision analytics on recorded trajectories.

Everything here is pure post-processing of immutable trajectories plus the
cluster polynomials used to monitor multiple-collision behavior.  Occupation
integrals are left-endpoint Riemann sums at the recording stride (bias is
O(stride * dt)); the collision scan inspects recorded states only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .integrate import Trajectory
from .model import CoefficientModel, detector_drift, q_S_u
from .roots import (Cluster, Detector, FaceSignature, Root, RootSystem,
                    cluster_closure, enumerate_clusters, root_inner,
                    reflected_positive)


def wall_gaps(rs: RootSystem, x: np.ndarray) -> dict[Root, float]:
    """Map each positive root to its gap <x, alpha>."""
    g = rs.gaps(np.asarray(x, dtype=float))
    return {r: float(g[..., k]) for k, r in enumerate(rs.positive_roots)}


@dataclass
class OccupationReport:
    """Per-root Lebesgue time with gap <= eps, for a ladder of eps values."""

    eps_ladder: tuple[float, ...]
    occupation: np.ndarray  # (len(ladder), num_roots)
    horizon: float

    def fraction(self) -> np.ndarray:
        return self.occupation / self.horizon if self.horizon > 0 else self.occupation

    def worst_fraction(self, eps: float) -> float:
        i = self.eps_ladder.index(eps)
        return float(self.fraction()[i].max())


def occupation_time(traj: Trajectory, eps_ladder=(1e-2, 1e-3, 1e-4, 1e-6)) -> OccupationReport:
    eps_ladder = tuple(sorted(eps_ladder, reverse=True))
    times = traj.times
    if len(times) < 2:
        return OccupationReport(eps_ladder,
                                np.zeros((len(eps_ladder), traj.rs.num_roots)), 0.0)
    g = traj.rs.gaps(traj.states[:-1])          # left endpoints
    dt = np.diff(times)[:, None]
    occ = np.stack([np.sum((g <= eps) * dt, axis=0) for eps in eps_ladder])
    return OccupationReport(eps_ladder, occ, float(times[-1] - times[0]))


# ---------------------------------------------------------------------------
# cluster polynomials


def cluster_S(rs: RootSystem, cluster, x: np.ndarray) -> np.ndarray:
    """S_phi(x) = sum over the generated subsystem of <x,alpha>^2."""
    gen = cluster_closure(rs, cluster)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[:-1])
    for a in gen:
        acc = acc + rs.gap(x, a) ** 2
    return acc


def cluster_h(rs: RootSystem, cluster, x: np.ndarray, k: int) -> np.ndarray:
    """h_{phi,k}(x) = sum alpha_k <x,alpha> over the generated subsystem."""
    gen = cluster_closure(rs, cluster)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[:-1])
    for a in gen:
        av = a.vector(rs.n)[k]
        if av:
            acc = acc + av * rs.gap(x, a)
    return acc


def cluster_h_dir(rs: RootSystem, cluster, x: np.ndarray, delta: Root) -> np.ndarray:
    """h_{phi,delta}(x) = sum <alpha,delta> <x,alpha> over the generated subsystem."""
    gen = cluster_closure(rs, cluster)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape[:-1])
    for a in gen:
        c = root_inner(a, delta)
        if c:
            acc = acc + c * rs.gap(x, a)
    return acc


def q_m(rs: RootSystem, x: np.ndarray, m: int) -> np.ndarray:
    """Product of S_phi over every cluster of length m; zero exactly on the
    boundary strata carrying a length-m (or longer) cluster."""
    out = np.ones(np.asarray(x, dtype=float).shape[:-1])
    for c in enumerate_clusters(rs, m):
        out = out * cluster_S(rs, c, x)
    return out


class _ClusterData:
    """Precomputed closure geometry for the drift decomposition."""

    def __init__(self, rs: RootSystem, cluster: Cluster):
        self.gen = cluster_closure(rs, cluster)
        self.members = cluster.roots
        self.alpha_mat = np.stack([a.vector(rs.n) for a in self.gen])
        self.sq_colsum = (self.alpha_mat ** 2).sum(axis=0)   # sum_alpha alpha_k^2

    def gaps(self, rs, x):
        return np.stack([rs.gap(x, a) for a in self.gen], axis=-1)


def _reflected_cluster(rs: RootSystem, cluster: Cluster, delta: Root) -> Cluster:
    refl = tuple(sorted((reflected_positive(a, delta)[0] for a in cluster.roots),
                        key=rs.root_index))
    pivots = set(refl[0].support)
    for a in refl[1:]:
        pivots &= set(a.support)
    return Cluster(refl, min(pivots))


def qm_drift(model: CoefficientModel, rs: RootSystem, t: float, x: np.ndarray, m: int,
             naive_h3: bool = False):
    """Drift terms (h1, h2, h3) of -log q_m along the flow at an interior point.

    h3 uses the desingularized pairing of each cluster with its reflected
    image, which removes the apparent 1/<x,delta> factors; with
    ``naive_h3=True`` the raw sum is returned instead (the two agree at
    interior points).
    """
    x = np.asarray(x, dtype=float)
    clusters = enumerate_clusters(rs, m)
    data = {c: _ClusterData(rs, c) for c in clusters}
    svals = {c: cluster_S(rs, c, x) for c in clusters}
    if any(not np.all(sv > 0) for sv in svals.values()):
        raise ValueError("q_m drift undefined: some cluster polynomial vanishes")

    sig2 = np.asarray(model.sigma(t, x), dtype=float) ** 2
    b = np.asarray(model.drift_b(t, x), dtype=float)

    h1 = np.zeros(x.shape[:-1])
    h2 = np.zeros(x.shape[:-1])
    hvecs = {}
    for c in clusters:
        d = data[c]
        g = d.gaps(rs, x)
        hvec = g @ d.alpha_mat           # h_{phi,k} over coordinates k
        hvecs[c] = hvec
        s = svals[c]
        h1 = h1 + np.sum((2.0 * hvec ** 2 - s[..., None] * d.sq_colsum) * sig2, axis=-1) / s ** 2
        h2 = h2 - 2.0 * np.sum(hvec * b, axis=-1) / s

    k_val = np.asarray(model.k_alpha(t, x), dtype=float)
    h3 = np.zeros(x.shape[:-1])
    if naive_h3:
        gaps_all = rs.gaps(x)
        for c in clusters:
            s = svals[c]
            for mi, delta in enumerate(rs.positive_roots):
                hd = np.sum(hvecs[c] * delta.vector(rs.n), axis=-1)
                h3 = h3 - 2.0 * k_val[..., mi] * hd / (s * gaps_all[..., mi])
        return h1, h2, h3

    cache = {c.roots: (data[c], svals[c]) for c in clusters}

    def cluster_terms(cl: Cluster):
        if cl.roots not in cache:
            d = _ClusterData(rs, cl)
            cache[cl.roots] = (d, np.sum(d.gaps(rs, x) ** 2, axis=-1))
        return cache[cl.roots]

    for mi, delta in enumerate(rs.positive_roots):
        kd = k_val[..., mi]
        dvec = delta.vector(rs.n)
        for c in clusters:
            if all(root_inner(a, delta) == 0.0 for a in c.roots):
                continue
            d, s = cluster_terms(c)
            d_r, s_r = cluster_terms(_reflected_cluster(rs, c, delta))
            ip2 = sum(root_inner(a, delta) ** 2 for a in d.gen)
            hd = d.gaps(rs, x) @ (d.alpha_mat @ dvec)
            hd_r = d_r.gaps(rs, x) @ (d_r.alpha_mat @ dvec)
            term = (1.0 / s + 1.0 / s_r) * ip2 - (hd - hd_r) ** 2 / (s * s_r)
            h3 = h3 - kd / delta.norm2 * term
    return h1, h2, h3


def multiple_collision_scan(traj: Trajectory, eps: float = 1e-6):
    """Times t > 0 where two coordinate-sharing roots both have gap <= eps.

    Returns a list of (time, root_a, root_b) events from the recorded states;
    the start time is excluded (the theorem concerns positive times only).
    """
    rs = traj.rs
    interacting = [
        (a, b) for a, b in itertools.combinations(range(rs.num_roots), 2)
        if set(rs.positive_roots[a].support) & set(rs.positive_roots[b].support)
    ]
    g = rs.gaps(traj.states)
    events = []
    for w in range(1, len(traj.times)):
        hits = np.flatnonzero(g[w] <= eps)
        if len(hits) < 2:
            continue
        hitset = set(int(h) for h in hits)
        for a, b in interacting:
            if a in hitset and b in hitset:
                events.append((float(traj.times[w]),
                               rs.positive_roots[a], rs.positive_roots[b]))
    return events


@dataclass
class DetectorTrace:
    """Detector quantities along a localized stretch of a path."""

    times: np.ndarray
    tau: np.ndarray          # (T, n_detectors)
    drift: np.ndarray        # regular detector drift B_{S,u}
    qvar: np.ndarray         # detector quadratic variation density
    exited: bool
    exit_time: float | None
    labels: tuple[str, ...] = ()


def detector_trace(model: CoefficientModel, rs: RootSystem, traj: Trajectory,
                   face: FaceSignature, detectors: list[Detector],
                   eta: float = 1e-6, radius: float = 1e6) -> DetectorTrace:
    """Evaluate (tau_u, B_{S,u}, q_{S,u}) while the path stays localized.

    Localization means every root outside S keeps gap >= eta and |x| <= radius;
    the trace stops (and reports the exit) at the first violation.
    """
    outside = np.ones(rs.num_roots, dtype=bool)
    outside[list(face.roots)] = False
    g = rs.gaps(traj.states)
    ok = np.all(g[:, outside] >= eta, axis=-1) & (
        np.max(np.abs(traj.states), axis=-1) <= radius)
    stop = len(ok) if bool(np.all(ok)) else int(np.argmin(ok))
    exited = stop < len(ok)
    times = traj.times[:stop]
    tau = np.empty((stop, len(detectors)))
    drift = np.empty_like(tau)
    qvar = np.empty_like(tau)
    for j, det in enumerate(detectors):
        u = det.direction_array()
        tau[:, j] = traj.states[:stop] @ u
        for w in range(stop):
            drift[w, j] = detector_drift(model, rs, face, u, float(times[w]),
                                         traj.states[w], min_outside_gap=eta / 2)
            qvar[w, j] = q_S_u(model, u, float(times[w]), traj.states[w])
    return DetectorTrace(times, tau, drift, qvar, exited,
                         float(traj.times[stop]) if exited else None,
                         tuple(d.label for d in detectors))
