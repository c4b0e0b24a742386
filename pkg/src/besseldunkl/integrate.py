"""Time stepping for the singular chamber SDE.

Two schemes share one batched Euler engine:

* ``direct`` integrates the particle equation itself.  The singular drift of
  each root is capped so that one step contributes at most ``drift_cap``
  times the current distance to that root's wall (explicit Euler would
  otherwise overshoot walls from close range), and the state is projected
  back onto the closed chamber after every step by the type's sorting map.
  Both devices are discretization artifacts, not part of the model; the
  acceptance suite pins their effect through scheme agreement and
  closed-form moment checks.

* ``invariant`` steps the non-singular invariant-coordinate system and maps
  back through the continuous inverse, so its states lie in the closed
  chamber by construction and no caps are ever applied.

Noise is drawn from counter-based Philox streams keyed by (seed, trajectory
index), so ensembles are reproducible independently of execution order,
chunking, or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import CoefficientModel, u_sde_coeffs
from .roots import RootSystem, chamber_contains
from .sympoly import f_tilde, w_map

_SCHEMES = ("direct", "invariant", "both-shared-noise")
_CHUNK = 4096  # fixed batch width: keeps results independent of thread count


@dataclass
class SimConfig:
    """Discretization parameters shared by both schemes."""

    dt: float
    t_end: float
    seed: int = 0
    scheme: str = "direct"
    wall_eps: float = 0.0
    drift_cap: float = 0.5
    record_stride: int = 1
    explosion_radius: float = 1e8

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        if not 0.0 < self.drift_cap <= 1.0:
            raise ValueError("drift_cap must lie in (0, 1]")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.wall_eps < 0:
            raise ValueError("wall_eps must be nonnegative")

    @property
    def num_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


@dataclass
class EventLog:
    """Per-trajectory integration events."""

    wall_contacts: int = 0
    cap_activations: int = 0
    first_wall_time: float | None = None
    exploded: bool = False
    explosion_time: float | None = None


@dataclass
class Trajectory:
    """Recorded path of one trajectory: states, invariants, drift accumulators.

    ``singular`` holds the accumulated per-root singular drift
    A_alpha(t) = int k_alpha/<X,alpha> 1{<X,alpha> > wall_eps} ds at the
    recorded times (nondecreasing in t).
    """

    times: np.ndarray
    states: np.ndarray
    singular: np.ndarray
    events: EventLog
    scheme: str
    rs: RootSystem
    u_states: np.ndarray | None = None
    traj_id: int = 0

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_singular(self) -> np.ndarray:
        return self.singular[-1]


def _philox(seed: int, traj: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, traj & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _project_chamber(rs: RootSystem, x: np.ndarray) -> np.ndarray:
    """Sort-based projection onto the closed chamber (batched)."""
    if rs.rtype == "A":
        return np.sort(x, axis=-1)[..., ::-1]
    if rs.rtype == "B":
        return np.sort(np.abs(x), axis=-1)[..., ::-1]
    sgn = np.where(np.prod(np.sign(x), axis=-1) < 0, -1.0, 1.0)
    out = np.sort(np.abs(x), axis=-1)[..., ::-1]
    out[..., -1] *= sgn
    return out


def step_direct(model: CoefficientModel, rs: RootSystem, t: float, x: np.ndarray,
                dW: np.ndarray, cfg: SimConfig):
    """One capped Euler step of the singular equation; dW ~ N(0, dt I).

    Returns (x_next, info) where info carries the per-member cap and
    wall-contact indicators and the accumulator increments.
    """
    x = np.asarray(x, dtype=float)
    dW = np.asarray(dW, dtype=float)
    g = rs.gaps(x)
    k = np.asarray(model.k_alpha(t, x), dtype=float)
    act = g > cfg.wall_eps
    safe = np.where(act, g, 1.0)
    c_raw = np.where(act, k * cfg.dt / safe, 0.0)
    c_cap = cfg.drift_cap * g / rs.norm2
    capped = c_raw > c_cap
    c = np.where(capped, np.where(act, c_cap, 0.0), c_raw)
    sig = np.asarray(model.sigma(t, x), dtype=float)
    b = np.asarray(model.drift_b(t, x), dtype=float)
    raw = x + sig * dW + b * cfg.dt + rs.scatter(c)
    out = _project_chamber(rs, raw)
    info = {
        "contact": np.any(out != raw, axis=-1),
        "capped": np.any(capped & act, axis=-1),
        "singular_inc": np.where(act, k / safe, 0.0) * cfg.dt,
    }
    return out, info


def step_invariant(model: CoefficientModel, rs: RootSystem, t: float, u: np.ndarray,
                   dW: np.ndarray, cfg: SimConfig):
    """One Euler step of the invariant-coordinate system (never capped)."""
    u = np.asarray(u, dtype=float)
    x = f_tilde(rs, u)
    a, h, hk = u_sde_coeffs(model, rs, t, x)
    drift = h.sum(axis=-2) + hk
    du = np.einsum("...ik,...i->...k", a, np.asarray(dW, dtype=float))
    u_next = u + du + drift * cfg.dt
    g = rs.gaps(x)
    k = np.asarray(model.k_alpha(t, x), dtype=float)
    act = g > cfg.wall_eps
    info = {"x": x, "singular_inc": np.where(act, k / np.where(act, g, 1.0), 0.0) * cfg.dt}
    return u_next, info


def _record_indices(steps: int, stride: int) -> np.ndarray:
    idx = np.arange(0, steps + 1, stride)
    if idx[-1] != steps:
        idx = np.append(idx, steps)
    return idx


def _run_batch(model: CoefficientModel, rs: RootSystem, x0: np.ndarray,
               cfg: SimConfig, scheme: str, traj_ids: list[int]) -> list[Trajectory]:
    nb = len(traj_ids)
    n = rs.n
    m0 = rs.num_roots
    steps = cfg.num_steps
    rec = _record_indices(steps, cfg.record_stride)
    rec_pos = {int(s): w for w, s in enumerate(rec)}
    sqdt = np.sqrt(cfg.dt)

    x = np.tile(np.asarray(x0, dtype=float), (nb, 1))
    u = None
    if scheme == "invariant":
        u = w_map(rs, x).u.copy()

    states = np.empty((len(rec), nb, n))
    u_states = np.empty((len(rec), nb, n)) if scheme == "invariant" else None
    singular = np.zeros((len(rec), nb, m0))
    acc = np.zeros((nb, m0))
    active = np.ones(nb, dtype=bool)
    dead_at = np.full(nb, -1, dtype=np.int64)
    contacts = np.zeros(nb, dtype=np.int64)
    caps = np.zeros(nb, dtype=np.int64)
    first_wall = np.full(nb, -1, dtype=np.int64)

    gens = [_philox(cfg.seed, m) for m in traj_ids]
    chunk = max(1, min(steps, (1 << 22) // max(1, nb * n)))
    s = 0
    while s <= steps:
        todo = min(chunk, steps - s)
        if todo > 0:
            noise = np.stack([g.standard_normal((todo, n)) for g in gens])
        for local in range(max(todo, 0) + 1):
            step_idx = s + local
            if step_idx in rec_pos:
                w = rec_pos[step_idx]
                states[w] = f_tilde(rs, u) if scheme == "invariant" else x
                if u_states is not None:
                    u_states[w] = u
                singular[w] = acc
            if step_idx == steps or local == todo:
                break
            t = step_idx * cfg.dt
            model.check_time(t)
            dW = sqdt * noise[:, local]
            if scheme == "direct":
                x_new, info = step_direct(model, rs, t, x, dW, cfg)
                acc[active] += info["singular_inc"][active]
                hit = info["contact"] & active
                contacts[hit] += 1
                first_wall[hit & (first_wall < 0)] = step_idx + 1
                caps[info["capped"] & active] += 1
                bad = ~(np.all(np.isfinite(x_new), axis=-1)
                        & (np.max(np.abs(x_new), axis=-1) <= cfg.explosion_radius))
                newly_dead = bad & active
                dead_at[newly_dead] = step_idx + 1
                active &= ~bad
                x = np.where(active[:, None], x_new, x)
            else:
                u_new, info = step_invariant(model, rs, t, u, dW, cfg)
                acc[active] += info["singular_inc"][active]
                bad = ~np.all(np.isfinite(u_new), axis=-1)
                bad |= np.max(np.abs(info["x"]), axis=-1) > cfg.explosion_radius
                newly_dead = bad & active
                dead_at[newly_dead] = step_idx + 1
                active &= ~bad
                u = np.where(active[:, None], u_new, u)
        if todo == 0:
            break
        s += todo

    out = []
    times = rec * cfg.dt
    for bidx, tid in enumerate(traj_ids):
        ev = EventLog(
            wall_contacts=int(contacts[bidx]),
            cap_activations=int(caps[bidx]),
            first_wall_time=(None if first_wall[bidx] < 0 else float(first_wall[bidx] * cfg.dt)),
            exploded=bool(dead_at[bidx] >= 0),
            explosion_time=(None if dead_at[bidx] < 0 else float(dead_at[bidx] * cfg.dt)),
        )
        keep = len(rec) if dead_at[bidx] < 0 else int(np.searchsorted(rec, dead_at[bidx], "left"))
        out.append(Trajectory(
            times=times[:keep].copy(),
            states=states[:keep, bidx].copy(),
            singular=singular[:keep, bidx].copy(),
            events=ev,
            scheme=scheme,
            rs=rs,
            u_states=None if u_states is None else u_states[:keep, bidx].copy(),
            traj_id=tid,
        ))
    return out


def simulate(model: CoefficientModel, rs: RootSystem, x0, cfg: SimConfig,
             traj_id: int = 0) -> Trajectory:
    """Run one trajectory of the configured scheme from a closed-chamber start."""
    x0 = np.asarray(x0, dtype=float)
    if not chamber_contains(rs, x0, closed=True, tol=1e-12):
        raise ValueError("x0 must lie in the closed chamber")
    if cfg.scheme == "both-shared-noise":
        raise ValueError("use shared_noise_compare for the both-shared-noise scheme")
    return _run_batch(model, rs, x0, cfg, cfg.scheme, [traj_id])[0]


def simulate_ensemble(model: CoefficientModel, rs: RootSystem, x0, cfg: SimConfig,
                      count: int, threads: int = 1) -> list[Trajectory]:
    """Independent trajectories m = 0..count-1 with streams keyed by (seed, m).

    Results are bit-identical however the work is scheduled: members are
    processed in fixed-size chunks and each member's noise comes from its own
    counter-based stream.
    """
    x0 = np.asarray(x0, dtype=float)
    if not chamber_contains(rs, x0, closed=True, tol=1e-12):
        raise ValueError("x0 must lie in the closed chamber")
    chunks = [list(range(lo, min(lo + _CHUNK, count))) for lo in range(0, count, _CHUNK)]
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda ids: _run_batch(model, rs, x0, cfg, cfg.scheme, ids), chunks))
    else:
        parts = [_run_batch(model, rs, x0, cfg, cfg.scheme, ids) for ids in chunks]
    return [t for part in parts for t in part]


@dataclass
class SharedNoiseReport:
    """Sup-norm discrepancy between the two schemes on identical noise."""

    dts: list[float]
    discrepancies: list[float]
    ratios: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.ratios = [
            self.discrepancies[i] / self.discrepancies[i + 1]
            if self.discrepancies[i + 1] > 0 else np.inf
            for i in range(len(self.discrepancies) - 1)
        ]


def _run_with_noise(model: CoefficientModel, rs: RootSystem, x0: np.ndarray,
                    cfg: SimConfig, scheme: str, dW: np.ndarray) -> np.ndarray:
    """Single trajectory driven by explicit increments; returns all states."""
    steps = dW.shape[0]
    x = x0[None, :].copy()
    u = w_map(rs, x).u.copy() if scheme == "invariant" else None
    out = np.empty((steps + 1, rs.n))
    for s in range(steps + 1):
        if scheme == "invariant":
            xs = f_tilde(rs, u)
            out[s] = xs[0]
        else:
            out[s] = x[0]
        if s == steps:
            break
        t = s * cfg.dt
        model.check_time(t)
        if scheme == "invariant":
            u, _ = step_invariant(model, rs, t, u, dW[s][None, :], cfg)
        else:
            x, _ = step_direct(model, rs, t, x, dW[s][None, :], cfg)
    return out


def shared_noise_compare(model: CoefficientModel, rs: RootSystem, x0,
                         cfg: SimConfig, levels: int = 3) -> SharedNoiseReport:
    """Run both schemes on identical Brownian increments at dt, dt/2, dt/4, ...

    All levels refine one underlying Brownian path (a coarse increment is the
    sum of its fine sub-increments), and within each level both schemes see
    exactly the same increment array.  The discrepancy at a level is the sup
    over the coarse grid of the max-norm distance between the direct path and
    the inverse-mapped invariant path; the report carries the per-halving
    contraction ratios.
    """
    x0 = np.asarray(x0, dtype=float)
    if not chamber_contains(rs, x0, closed=True, tol=1e-12):
        raise ValueError("x0 must lie in the closed chamber")
    dts = [cfg.dt / 2 ** lvl for lvl in range(levels)]
    fine_cfg = replace(cfg, dt=dts[-1])
    fine_steps = fine_cfg.num_steps
    gen = _philox(cfg.seed, 0)
    fine_dW = np.sqrt(dts[-1]) * gen.standard_normal((fine_steps, rs.n))
    discrepancies = []
    for lvl, dt in enumerate(dts):
        agg = 2 ** (levels - 1 - lvl)
        dW = fine_dW.reshape(fine_steps // agg, agg, rs.n).sum(axis=1)
        level_cfg = replace(cfg, dt=dt)
        direct = _run_with_noise(model, rs, x0, level_cfg, "direct", dW)
        invariant = _run_with_noise(model, rs, x0, level_cfg, "invariant", dW)
        discrepancies.append(float(np.max(np.abs(direct - invariant))))
    return SharedNoiseReport(dts, discrepancies)
