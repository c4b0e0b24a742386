"""Coefficient models for the chamber SDE and numeric assumption validators.

A model bundles the diagonal diffusion sigma_i(t, x), the regular drift
b_i(t, x) and the per-root repulsion coefficients k_alpha(t, x) as opaque
vectorized callables: each takes (t, x) with x of shape (..., N) and returns
(..., N) for sigma/b and (..., M) for k, aligned with the positive-root order
of the bound root system.

The checkers are samplers, not verifiers: they evaluate the assumptions on
deterministic seeded grids (time points x chamber samples x wall-approach
sequences) and report pass / fail / inconclusive with a worst-case witness.
A verdict is inconclusive when the measured margin falls within ten times
the tolerance of the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import roots as rt
from .roots import Detector, FaceSignature, Root, RootSystem
from .sympoly import F_alpha_k, G_alpha_n, e_excl


@dataclass
class CoefficientModel:
    """Evaluators for every coefficient of the singular chamber SDE."""

    name: str
    rs: RootSystem
    sigma: Callable[[float, np.ndarray], np.ndarray]
    drift_b: Callable[[float, np.ndarray], np.ndarray]
    k_alpha: Callable[[float, np.ndarray], np.ndarray]
    meta: dict = field(default_factory=dict)
    valid_until: float | None = None

    def k_root(self, t: float, x: np.ndarray, root: Root) -> np.ndarray:
        """k evaluated for a single positive root."""
        return self.k_alpha(t, x)[..., self.rs.root_index(root)]

    def check_time(self, t: float):
        if self.valid_until is not None and t >= self.valid_until:
            raise ValueError(
                f"model {self.name!r} is only defined for t < {self.valid_until}"
            )


def constant_vector(value: float) -> Callable[[float, np.ndarray], np.ndarray]:
    def f(t, x):
        return np.full_like(np.asarray(x, dtype=float), value)
    return f


def constant_roots(rs: RootSystem, value: float) -> Callable[[float, np.ndarray], np.ndarray]:
    def f(t, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1] + (rs.num_roots,), value)
    return f


@dataclass
class AssumptionReport:
    """Outcome of one sampled assumption check."""

    assumption: str
    verdict: str                      # "pass" | "fail" | "inconclusive"
    margin: float
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == "fail" and self.witness is None:
            raise ValueError("fail verdicts must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def __str__(self):
        w = "" if self.witness is None else f"  witness={self.witness}"
        return f"[{self.assumption}] {self.verdict} (margin={self.margin:.3e}){w}"


# ---------------------------------------------------------------------------
# pointwise derived quantities


def singular_force(model: CoefficientModel, rs: RootSystem, t: float,
                   x: np.ndarray, wall_eps: float = 0.0) -> np.ndarray:
    """G(t,x) = sum_alpha alpha k_alpha / <x,alpha>, zeroed within wall_eps.

    The indicator realizes the interior form of the drift: a root whose gap
    is at or below ``wall_eps`` contributes nothing.
    """
    x = np.asarray(x, dtype=float)
    g = rs.gaps(x)
    k = np.asarray(model.k_alpha(t, x), dtype=float)
    act = g > wall_eps
    coeff = np.where(act, k / np.where(act, g, 1.0), 0.0)
    return rs.scatter(coeff)


def a_alpha(model: CoefficientModel, t: float, x: np.ndarray,
            alpha: Root | None = None) -> np.ndarray:
    """Normal quadratic-variation density sum_j alpha_j^2 sigma_j^2.

    With ``alpha=None`` returns the value for every positive root at once.
    """
    x = np.asarray(x, dtype=float)
    s2 = np.asarray(model.sigma(t, x), dtype=float) ** 2
    if alpha is not None:
        out = s2[..., alpha.i]
        if alpha.kind != rt.SHORT:
            out = out + s2[..., alpha.j]
        return out
    rs = model.rs
    ci, cj = rs.support_coef
    return s2[..., rs.support_i] * ci ** 2 + s2[..., rs.support_j] * cj ** 2


def q_S_u(model: CoefficientModel, u: np.ndarray, t: float, x: np.ndarray) -> np.ndarray:
    """Detector quadratic-variation density sum_j u_j^2 sigma_j^2."""
    u = np.asarray(u, dtype=float)
    s2 = np.asarray(model.sigma(t, np.asarray(x, dtype=float)), dtype=float) ** 2
    return s2 @ (u * u)


def detector_drift(model: CoefficientModel, rs: RootSystem, face: FaceSignature,
                   u: np.ndarray, t: float, x: np.ndarray,
                   min_outside_gap: float = 1e-12) -> np.ndarray:
    """Regular detector drift <u,b> + sum_{beta not in S} k_beta <u,beta> / <x,beta>.

    Valid in a localized neighborhood of the face: every root outside S must
    keep a positive gap, otherwise the localization is violated.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    g = rs.gaps(x)
    outside = np.ones(rs.num_roots, dtype=bool)
    outside[list(face.roots)] = False
    if np.any(g[..., outside] <= min_outside_gap):
        raise ValueError("localization violated: a root outside S has near-zero gap")
    k = np.asarray(model.k_alpha(t, x), dtype=float)
    ua = rs.matrix @ u
    b = np.asarray(model.drift_b(t, x), dtype=float)
    out = b @ u
    quot = np.where(outside, k * ua / np.where(outside, g, 1.0), 0.0)
    return out + quot.sum(axis=-1)


def u_sde_coeffs(model: CoefficientModel, rs: RootSystem, t: float, x: np.ndarray):
    """Coefficients of the non-singular invariant-coordinate system.

    Returns (a, h, hk): the martingale weights a[..., i, k], the regular
    drift terms h[..., i, k] and the assembled singular-free drift
    hk[..., k] = sum_alpha H_{alpha,k} k_alpha.  Type A uses exponents
    (k-1, k-2) and H = F_{alpha,k}; types B and D (k < N) use (2k-1, 2k-2)
    with H = F_{alpha,2k}; the last type-D coordinate uses the elementary
    symmetric weights and H = G_{alpha,N}.
    """
    x = np.asarray(x, dtype=float)
    n = rs.n
    sig = np.asarray(model.sigma(t, x), dtype=float)
    b = np.asarray(model.drift_b(t, x), dtype=float)
    k_val = np.asarray(model.k_alpha(t, x), dtype=float)
    a = np.empty(x.shape + (n,))
    h = np.empty(x.shape + (n,))
    hk = np.empty(x.shape[:-1] + (n,))

    def fill_power(kk: int, deg: int):
        # invariant index kk (1-based) with power-sum degree deg
        xp1 = x ** (deg - 1)
        xp2 = x ** (deg - 2) if deg >= 2 else np.zeros_like(x)
        a[..., :, kk - 1] = xp1 * sig
        h[..., :, kk - 1] = xp1 * b + 0.5 * (deg - 1) * xp2 * sig ** 2
        acc = np.zeros(x.shape[:-1])
        for m, alpha in enumerate(rs.positive_roots):
            if alpha.kind == rt.PAIR_MINUS and deg < 2:
                continue  # F is the empty sum
            acc = acc + F_alpha_k(alpha, deg, x) * k_val[..., m]
        hk[..., kk - 1] = acc

    if rs.rtype == "A":
        for kk in range(1, n + 1):
            fill_power(kk, kk)
    else:
        top = n if rs.rtype == "B" else n - 1
        for kk in range(1, top + 1):
            fill_power(kk, 2 * kk)
        if rs.rtype == "D":
            w = np.stack([e_excl(x, n - 1, (i,)) for i in range(n)], axis=-1)
            a[..., :, n - 1] = w * sig
            h[..., :, n - 1] = w * b
            acc = np.zeros(x.shape[:-1])
            for m, alpha in enumerate(rs.positive_roots):
                acc = acc + G_alpha_n(alpha, n, x) * k_val[..., m]
            hk[..., n - 1] = acc
    return a, h, hk


# ---------------------------------------------------------------------------
# sampled assumption checkers


@dataclass
class CheckGrid:
    """Deterministic sampling plan shared by the checkers."""

    n_time: int = 5
    n_points: int = 64
    seed: int = 20240
    gap_ladder: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    scale: float = 1.0

    def times(self, t_max: float) -> np.ndarray:
        return np.linspace(0.0, t_max, self.n_time)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _long_roots(rs: RootSystem) -> list[Root]:
    return [r for r in rs.positive_roots if r.norm2 == 2.0]


def _wall_ladder(rs: RootSystem, root: Root, grid: CheckGrid, rng):
    """Face samples plus chamber points approaching the wall of ``root``."""
    face = rt.minimal_face_for_root(rs, root)
    base = rt.sample_face_points(rs, face, grid.n_points, rng, grid.scale)
    return face, base


def check_sigma_compat(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                       radius: float = 5.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """C2: sigma_i^2 - sigma_j^2 -> 0 as the long-root gap closes."""
    grid = grid or CheckGrid()
    rng = grid.rng()
    tol = 1e-3 * grid.scale
    worst = 0.0
    witness = None
    trend_ok = True
    for root in _long_roots(rs):
        face, base = _wall_ladder(rs, root, grid, rng)
        i, j = root.i, root.j
        for t in grid.times(t_max):
            if model.valid_until is not None and t >= model.valid_until:
                continue
            per_gap = []
            for g in grid.gap_ladder:
                pts = np.stack([rt.approach_face(rs, face, y, g) for y in base])
                s2 = np.asarray(model.sigma(t, pts), dtype=float) ** 2
                diff = np.abs(s2[:, i] - s2[:, j])
                per_gap.append(float(diff.max()))
            finest = per_gap[-1]
            if finest > worst:
                worst = finest
                witness = {"root": str(root), "t": float(t), "diff": finest}
            if per_gap[-1] > per_gap[0] + tol:
                trend_ok = False
    if worst <= tol and trend_ok:
        verdict = "pass"
    elif worst <= 10 * tol and trend_ok:
        verdict = "inconclusive"
    else:
        verdict = "fail"
    return AssumptionReport("C2", verdict, worst, witness,
                            {"tol": tol, "vanishing_trend": trend_ok})


def check_positivity(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                     radius: float = 5.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """A1: every k_alpha is strictly positive on its own wall."""
    grid = grid or CheckGrid()
    rng = grid.rng()
    tol = 1e-9 * grid.scale
    margin = np.inf
    witness = None
    for root in rs.positive_roots:
        face, base = _wall_ladder(rs, root, grid, rng)
        m = rs.root_index(root)
        for t in grid.times(t_max):
            if model.valid_until is not None and t >= model.valid_until:
                continue
            kv = np.asarray(model.k_alpha(t, base), dtype=float)[:, m]
            kmin = float(kv.min())
            if kmin < margin:
                margin = kmin
                witness = {"root": str(root), "t": float(t),
                           "x": [round(v, 6) for v in base[int(kv.argmin())]]}
    if margin > 10 * tol:
        return AssumptionReport("A1", "pass", margin, None, {"tol": tol})
    if margin > tol:
        return AssumptionReport("A1", "inconclusive", margin, witness, {"tol": tol})
    return AssumptionReport("A1", "fail", margin, witness, {"tol": tol})


def check_dominance(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                    radius: float = 5.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """D1: k_alpha >= gamma * a_alpha near the wall, for some gamma > 0.

    Scans a decreasing band ladder and reports the largest band for which the
    ratio estimate stays positive (the band is existential in the assumption).
    """
    grid = grid or CheckGrid()
    rng = grid.rng()
    a_tol = 1e-12
    best_band = None
    gamma_hat = np.inf
    witness = None
    failed = False
    for band in grid.gap_ladder:
        band_gamma = np.inf
        band_ok = True
        for root in rs.positive_roots:
            face, base = _wall_ladder(rs, root, grid, rng)
            m = rs.root_index(root)
            for t in grid.times(t_max):
                if model.valid_until is not None and t >= model.valid_until:
                    continue
                for g in [band, band / 4.0]:
                    pts = np.stack([rt.approach_face(rs, face, y, g) for y in base])
                    kv = np.asarray(model.k_alpha(t, pts), dtype=float)[:, m]
                    av = a_alpha(model, t, pts)[:, m]
                    live = av > a_tol
                    if not np.any(live):
                        continue
                    ratio = kv[live] / av[live]
                    rmin = float(ratio.min())
                    if rmin < band_gamma:
                        band_gamma = rmin
                        if rmin <= 0.0:
                            band_ok = False
                            witness = {"root": str(root), "t": float(t), "gap": g,
                                       "ratio": rmin}
        if band_ok and np.isfinite(band_gamma):
            best_band = band
            gamma_hat = band_gamma
            break
        if not band_ok:
            failed = True
    if best_band is not None:
        verdict = "pass" if gamma_hat > 1e-9 else "inconclusive"
        return AssumptionReport("D1", verdict, gamma_hat, witness if verdict != "pass" else None,
                                {"band": best_band})
    if failed:
        return AssumptionReport("D1", "fail", 0.0, witness, {})
    return AssumptionReport("D1", "inconclusive", np.inf, None,
                            {"note": "no samples with positive normal variation"})


def _faces_and_detectors(rs: RootSystem, faces: Sequence[FaceSignature] | None):
    if faces is None:
        faces = rt.enumerate_faces(rs)
    return [(f, rt.detector_family(rs, f)) for f in faces]


def check_face_sign(model: CoefficientModel, rs: RootSystem,
                    faces: Sequence[FaceSignature] | None = None,
                    t_max: float = 1.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """D2: the regular detector drift is nonnegative on every face."""
    grid = grid or CheckGrid()
    rng = grid.rng()
    tol = 1e-9 * grid.scale
    margin = np.inf
    witness = None
    for face, dets in _faces_and_detectors(rs, faces):
        pts = rt.sample_face_points(rs, face, grid.n_points, rng, grid.scale)
        for det in dets:
            u = det.direction_array()
            for t in grid.times(t_max):
                if model.valid_until is not None and t >= model.valid_until:
                    continue
                bv = detector_drift(model, rs, face, u, t, pts)
                bmin = float(np.min(bv))
                if bmin < margin:
                    margin = bmin
                    witness = {"face": [str(rs.positive_roots[k]) for k in face.roots],
                               "detector": det.label, "t": float(t), "B": bmin}
    if margin >= -tol:
        return AssumptionReport("D2", "pass", margin, None, {"tol": tol})
    if margin >= -10 * tol:
        return AssumptionReport("D2", "inconclusive", margin, witness, {"tol": tol})
    return AssumptionReport("D2", "fail", margin, witness, {"tol": tol})


def check_nonsticky(model: CoefficientModel, rs: RootSystem,
                    faces: Sequence[FaceSignature] | None = None,
                    t_max: float = 1.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """D3: where all detector variations vanish, some detector drift is positive."""
    grid = grid or CheckGrid()
    rng = grid.rng()
    q_tol = 1e-12
    tol = 1e-9 * grid.scale
    margin = np.inf
    witness = None
    degenerate_seen = False
    for face, dets in _faces_and_detectors(rs, faces):
        pts = rt.sample_face_points(rs, face, grid.n_points, rng, grid.scale)
        for t in grid.times(t_max):
            if model.valid_until is not None and t >= model.valid_until:
                continue
            qs = np.stack([q_S_u(model, d.direction_array(), t, pts) for d in dets])
            bs = np.stack([detector_drift(model, rs, face, d.direction_array(), t, pts)
                           for d in dets])
            fully_degenerate = qs.max(axis=0) <= q_tol
            if not np.any(fully_degenerate):
                continue
            degenerate_seen = True
            best_b = bs.max(axis=0)[fully_degenerate]
            bmin = float(best_b.min())
            if bmin < margin:
                margin = bmin
                witness = {"face": [str(rs.positive_roots[k]) for k in face.roots],
                           "t": float(t), "max_B": bmin}
    if not degenerate_seen:
        return AssumptionReport("D3", "pass", np.inf, None,
                                {"note": "no fully degenerate face points sampled"})
    if margin > 10 * tol:
        return AssumptionReport("D3", "pass", margin, None, {"tol": tol})
    if margin > -tol:
        return AssumptionReport("D3", "inconclusive", margin, witness, {"tol": tol})
    return AssumptionReport("D3", "fail", margin, witness, {"tol": tol})


def check_growth(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                 radius: float = 5.0, grid: CheckGrid | None = None) -> AssumptionReport:
    """G1: radial linear growth of drift, diffusion and total repulsion."""
    grid = grid or CheckGrid()
    rng = grid.rng()
    pts = rt.sample_chamber_points(rs, grid.n_points, rng, grid.scale)
    pts = np.concatenate([pts, radius * pts / (1.0 + np.linalg.norm(pts, axis=-1, keepdims=True))])
    c_hat = 0.0
    witness = None
    for t in grid.times(t_max):
        if model.valid_until is not None and t >= model.valid_until:
            continue
        sig = np.asarray(model.sigma(t, pts), dtype=float)
        b = np.asarray(model.drift_b(t, pts), dtype=float)
        k = np.asarray(model.k_alpha(t, pts), dtype=float)
        num = np.sum(pts * b, axis=-1) + 0.5 * np.sum(sig ** 2, axis=-1) + np.sum(k, axis=-1)
        ratio = num / (1.0 + np.sum(pts ** 2, axis=-1))
        rmax = float(ratio.max())
        if rmax > c_hat:
            c_hat = rmax
            witness = {"t": float(t), "ratio": rmax}
    if np.isfinite(c_hat):
        return AssumptionReport("G1", "pass", c_hat, None, {"C_T": max(c_hat, 0.0)})
    return AssumptionReport("G1", "fail", c_hat, witness, {})


def check_uniqueness_moduli(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                            grid: CheckGrid | None = None,
                            yw_bound: float = 1e3, lip_bound: float = 1e3) -> list[AssumptionReport]:
    """U1-U3 empirical moduli over random chamber pairs (samplers, not proofs).

    U1 reports the worst Yamada-Watanabe ratio |d sigma|^2 / |d x_i| and the
    worst Lipschitz ratio; U2 the one-sided l1 drift modulus; U3 the sign of
    the l1 singular-force pairing (and the Euclidean variant in details).
    """
    grid = grid or CheckGrid()
    rng = grid.rng()
    xs = rt.sample_chamber_points(rs, grid.n_points, rng, grid.scale, min_gap=1e-6)
    ys = rt.sample_chamber_points(rs, grid.n_points, rng, grid.scale, min_gap=1e-6)
    reports = []
    yw = 0.0
    lip = 0.0
    u2 = -np.inf
    u3 = -np.inf
    u3e = -np.inf
    wit_u3 = None
    for t in grid.times(t_max):
        if model.valid_until is not None and t >= model.valid_until:
            continue
        sx = np.asarray(model.sigma(t, xs), dtype=float)
        sy = np.asarray(model.sigma(t, ys), dtype=float)
        bx = np.asarray(model.drift_b(t, xs), dtype=float)
        by = np.asarray(model.drift_b(t, ys), dtype=float)
        gx = singular_force(model, rs, t, xs)
        gy = singular_force(model, rs, t, ys)
        d = xs - ys
        live = np.abs(d) > 1e-9
        r = np.where(live, (sx - sy) ** 2 / np.where(live, np.abs(d), 1.0), 0.0)
        yw = max(yw, float(r.max()))
        nrm = np.linalg.norm(d, axis=-1)
        lr = np.abs(sx - sy).max(axis=-1) / np.maximum(nrm, 1e-12)
        lip = max(lip, float(lr.max()))
        s = np.sign(d)
        m2 = np.sum(s * (bx - by), axis=-1) / np.maximum(np.sum(np.abs(d), axis=-1), 1e-12)
        u2 = max(u2, float(m2.max()))
        m3 = np.sum(s * (gx - gy), axis=-1)
        if m3.max() > u3:
            u3 = float(m3.max())
            wit_u3 = {"t": float(t)}
        u3e = max(u3e, float(np.sum(d * (gx - gy), axis=-1).max()))
    reports.append(AssumptionReport("U1", "pass" if (yw <= yw_bound or lip <= lip_bound) else "inconclusive",
                                    min(yw, lip), None,
                                    {"yw_ratio": yw, "lipschitz_ratio": lip}))
    reports.append(AssumptionReport("U2", "pass" if u2 <= lip_bound else "inconclusive",
                                    u2, None, {"one_sided_l1": u2}))
    tol = 1e-9 * grid.scale
    if u3 <= tol:
        v3 = "pass"
    elif u3 <= 10 * tol:
        v3 = "inconclusive"
    else:
        v3 = "fail"
    reports.append(AssumptionReport("U3", v3, u3, wit_u3 if v3 == "fail" else None,
                                    {"euclidean_pairing_max": u3e}))
    return reports


def run_all_checks(model: CoefficientModel, rs: RootSystem, t_max: float = 1.0,
                   radius: float = 5.0, grid: CheckGrid | None = None,
                   faces: Sequence[FaceSignature] | None = None) -> list[AssumptionReport]:
    """Every checker in spec order (face checkers only when enumerable)."""
    if model.valid_until is not None:
        t_max = min(t_max, 0.9 * model.valid_until)
    out = [
        check_sigma_compat(model, rs, t_max, radius, grid),
        check_positivity(model, rs, t_max, radius, grid),
        check_dominance(model, rs, t_max, radius, grid),
    ]
    if faces is not None or rs.n <= 6:
        out.append(check_face_sign(model, rs, faces, t_max, grid))
        out.append(check_nonsticky(model, rs, faces, t_max, grid))
    out.append(check_growth(model, rs, t_max, radius, grid))
    out.extend(check_uniqueness_moduli(model, rs, t_max, grid))
    return out
