"""Stability experiments for the geometry-to-data map.

Lipschitz lower-bound scans and Jacobian rank scans for ``phi``, projection
residual growth for unknown slips, fixed-rank projector perturbation, a
discrete injectivity witness for the transport equation
``d_tau(f u) + alpha u = 0``, and the algebraic identities used to rule out
degenerate directions.

Scans run their samples through a thread pool (kernels release the GIL);
samples are drawn and indexed before dispatch so results never depend on
scheduling.
"""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fault_model import AdmissibleSet, GeometryError, Rect, SlipField
from .forward_op import (
    ForwardModel,
    jacobian_singular_values,
    min_residual,
    projector_distance,
    range_projector,
)
from .kernels import LameParams

log = logging.getLogger(__name__)

__all__ = [
    "AffineFunction",
    "ScanResult",
    "coefficient_identity_check",
    "divergence_identity_check",
    "lipschitz_scan",
    "normal_jump_equation_residual",
    "projector_lipschitz",
    "rank_scan",
    "remaining_system_residual",
    "residual_growth",
    "transport_operator",
    "transport_triviality",
]

RANK_TOL = 1e-10


@dataclass(frozen=True)
class AffineFunction:
    """f(y1, y2) = g1 y1 + g2 y2 + g3."""

    g1: float
    g2: float
    g3: float

    def __call__(self, y1, y2):
        return self.g1 * np.asarray(y1, dtype=float) + self.g2 * np.asarray(y2, dtype=float) + self.g3

    @property
    def gradient(self):
        return np.array([self.g1, self.g2])

    @property
    def is_zero(self):
        return self.g1 == 0 and self.g2 == 0 and self.g3 == 0

    @classmethod
    def random(cls, rng):
        g = rng.standard_normal(3)
        return cls(*map(float, g))


@dataclass
class ScanResult:
    """Per-sample rows plus summary statistics; metric columns are nonnegative."""

    name: str
    columns: tuple
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def column(self, key):
        i = self.columns.index(key)
        return np.array([r[i] for r in self.rows])


def _pool_map(fn, items, threads):
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_slip(h: SlipField):
    if not np.any(h.coeffs):
        raise ValueError("slip must be nonzero")


def _weighted_jacobian(model: ForwardModel, m, h):
    J = model.jacobian(m, h)
    return np.sqrt(model.grid.data_weights)[:, None] * J.columns


# ---- Lipschitz and rank scans ----------------------------------------------

LIPSCHITZ_COLUMNS = ("pair", "kind", "a", "b", "d", "a2", "b2", "d2", "distance", "ratio", "predicted",
                     "sigma_min")


def lipschitz_scan(model: ForwardModel, box: AdmissibleSet, h: SlipField, n_pairs=200, *, rng,
                   near_fraction=0.5, near_delta=1e-4, directions_per_base=4, threads=None) -> ScanResult:
    """Ratios ||phi(m) - phi(m')|| / |m - m'| over random and near-coincident pairs.

    Far pairs are independent uniform draws in ``box``.  Near pairs come in
    groups sharing a base point ``m``: one along the weakest right singular
    vector of the Jacobian and ``directions_per_base`` random unit directions,
    all at distance ``near_delta``.  Each near pair records the Jacobian's
    prediction ``||d_q phi(m)||`` and the smallest singular value at ``m``.
    """
    _check_slip(h)
    if n_pairs < 2:
        raise ValueError("need at least two pairs")
    group = directions_per_base + 1
    n_groups = max(1, int(round(n_pairs * near_fraction / group)))
    n_far = n_pairs - n_groups * group
    if n_far < 0:
        raise ValueError("near_fraction leaves a negative number of far pairs")

    # draw everything up front: results must not depend on scheduling
    far_a = box.sample(rng, n_far)
    far_b = box.sample(rng, n_far)
    bases = box.sample(rng, n_groups, margin=2 * near_delta)
    dirs = rng.standard_normal((n_groups, directions_per_base, 3))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    for m in np.concatenate([far_a, far_b, bases]):
        if not box.contains(m):
            raise GeometryError(f"sample {m} outside the admissible box")

    def far(i):
        m, m2 = far_a[i], far_b[i]
        dist = float(np.linalg.norm(m - m2))
        if dist == 0.0:
            raise ValueError("coincident pair")
        ratio = model.norm(model.phi(m, h) - model.phi(m2, h)) / dist
        return [("far", m, m2, dist, ratio, np.nan, np.nan)]

    def near(i):
        m = bases[i]
        Jw = _weighted_jacobian(model, m, h)
        _, s, vt = np.linalg.svd(Jw, full_matrices=False)
        weakest = vt[-1] * np.sign(vt[-1][np.argmax(np.abs(vt[-1]))])
        p0 = model.phi(m, h)
        out = []
        for tag, q in [("near-weak", weakest)] + [("near-random", d) for d in dirs[i]]:
            m2 = m + near_delta * q
            if not box.contains(m2):
                raise GeometryError(f"near sample {m2} left the admissible box")
            ratio = model.norm(model.phi(m2, h) - p0) / near_delta
            out.append((tag, m, m2, near_delta, ratio, float(np.linalg.norm(Jw @ q)), float(s[-1])))
        return out

    jobs = [(far, i) for i in range(n_far)] + [(near, i) for i in range(n_groups)]
    blocks = _pool_map(lambda job: job[0](job[1]), jobs, threads)
    res = ScanResult("lipschitz", LIPSCHITZ_COLUMNS)
    for blk in blocks:
        for kind, m, m2, dist, ratio, pred, smin in blk:
            res.rows.append([len(res.rows), kind, *map(float, m), *map(float, m2), dist, float(ratio), pred, smin])

    ratios = res.column("ratio")
    kinds = res.column("kind")
    near_mask = kinds != "far"
    summary = {"pairs": len(res.rows), "min_ratio": float(ratios.min())}
    if np.any(~near_mask):
        summary["min_ratio_far"] = float(ratios[~near_mask].min())
    pred = res.column("predicted")[near_mask]
    summary["max_rel_dev_from_directional"] = float(np.max(np.abs(ratios[near_mask] / pred - 1.0)))
    # per base point: min ratio over its near pairs vs sigma_min there
    devs = []
    for g in range(n_groups):
        rows = res.rows[n_far + g * group: n_far + (g + 1) * group]
        rmin = min(r[9] for r in rows)
        devs.append(abs(rmin / rows[0][11] - 1.0))
    summary["max_rel_dev_min_near_vs_sigma_min"] = float(max(devs))
    summary["min_sigma_min"] = float(np.min(res.column("sigma_min")[near_mask]))
    res.summary = summary
    return res


RANK_COLUMNS = ("sample", "a", "b", "d", "sigma_max", "sigma_min", "ratio", "flagged")


def rank_scan(model: ForwardModel, box: AdmissibleSet | None, h: SlipField, n_samples=20, *, rng=None,
              extra_points=(), threads=None) -> ScanResult:
    """Smallest Jacobian singular value at sampled m; flags sigma_min < 1e-10 sigma_max.

    ``extra_points`` are appended verbatim, e.g. a horizontal fault (0, 0, d).
    """
    pts = []
    if box is not None and n_samples > 0:
        if rng is None:
            raise ValueError("rng required when sampling the box")
        pts.extend(box.sample(rng, n_samples))
    pts.extend(np.asarray(p, dtype=float) for p in extra_points)
    if not pts:
        raise ValueError("no sample points")

    def one(m):
        s = jacobian_singular_values(model.jacobian(m, h), model.grid.data_weights)
        smax, smin = float(s[0]), float(s[-1])
        flagged = bool(smin <= RANK_TOL * smax) or smax == 0.0
        return smax, smin, flagged

    vals = _pool_map(one, pts, threads)
    res = ScanResult("rank", RANK_COLUMNS)
    for i, (m, (smax, smin, fl)) in enumerate(zip(pts, vals)):
        res.rows.append([i, *map(float, m), smax, smin, smin / smax if smax > 0 else 0.0, fl])
    res.summary = {
        "samples": len(pts),
        "flags": int(sum(r[7] for r in res.rows)),
        "min_sigma_min": float(min(r[5] for r in res.rows)),
        "min_ratio": float(min(r[6] for r in res.rows)),
    }
    return res


# ---- residual growth and projector perturbation ----------------------------

GROWTH_COLUMNS = ("direction", "q1", "q2", "q3", "t", "residual", "bound")


def _linear_fit(t, r):
    A = np.column_stack([t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(A, r, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((r - fit) ** 2))
    ss_tot = float(np.sum((r - r.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return float(coef[0]), float(coef[1]), r2


def residual_growth(model: ForwardModel, m0, h0: SlipField, directions, steps, *, rank=None,
                    fit_window=(1e-3, 1e-1), threads=None) -> ScanResult:
    """r(t) = min over trial slips of ||A_{m0+tq} h - A_{m0} h0|| along each direction q.

    The trial space holds the free sine modes; gradient slips add the
    gradient columns so that ``h0`` itself is representable.  ``rank``
    fixes the projector rank (default: relative threshold 1e-6).
    """
    _check_slip(h0)
    if h0.kind == "free":
        warnings.warn("free slip: residual growth is not guaranteed for this slip class", stacklevel=2)
    grads = h0.kind == "gradient"
    m0 = np.asarray(m0, dtype=float)
    dirs = [np.asarray(q, dtype=float) / np.linalg.norm(q) for q in directions]
    steps = np.asarray(sorted(set(float(t) for t in steps)))
    if np.any(steps < 0):
        raise ValueError("steps must be nonnegative")
    op0 = model.operator(m0, include_gradients=grads)
    data = op0.apply(h0)
    dnorm = model.norm(data)
    trunc = {} if rank is None else {"rank": rank}
    r0 = min_residual(op0, data, **trunc)

    jobs = [(k, t) for k in range(len(dirs)) for t in steps]

    def one(job):
        k, t = job
        if t == 0.0:
            return r0, 0.0
        op = model.operator(m0 + t * dirs[k], include_gradients=grads)
        r = min_residual(op, data, **trunc)
        return r, model.norm(op.apply(h0) - data)

    vals = _pool_map(one, jobs, threads)
    res = ScanResult("residual_growth", GROWTH_COLUMNS)
    for (k, t), (r, bound) in zip(jobs, vals):
        res.rows.append([k, *map(float, dirs[k]), float(t), float(r), float(bound)])

    fits = []
    lo, hi = fit_window
    for k in range(len(dirs)):
        rows = [r for r in res.rows if r[0] == k and lo <= r[4] <= hi]
        if len(rows) < 3:
            raise ValueError("fit window needs at least three steps")
        t = np.array([r[4] for r in rows])
        r = np.array([r[5] for r in rows])
        slope, icpt, r2 = _linear_fit(t, r)
        fits.append({"direction": k, "slope": slope, "intercept": icpt, "r2": r2,
                     "ratio_spread": float(np.ptp(r / t) / np.mean(r / t))})
    res.summary = {
        "kind": h0.kind,
        "data_norm": dnorm,
        "r0": r0,
        "r0_relative": r0 / dnorm if dnorm > 0 else 0.0,
        "min_slope": min(f["slope"] for f in fits),
        "min_r2": min(f["r2"] for f in fits),
        "bound_violations": int(sum(r[5] > r[6] * (1 + 1e-9) + 1e-14 * dnorm for r in res.rows if r[4] > 0)),
        "fits": fits,
    }
    return res


PROJECTOR_COLUMNS = ("t", "distance", "ratio")


def projector_lipschitz(model: ForwardModel, m0, q, steps, rank, *, min_gap=10.0, threads=None) -> ScanResult:
    """Spectral distance between fixed-rank projectors at m0 + t q and m0."""
    m0 = np.asarray(m0, dtype=float)
    q = np.asarray(q, dtype=float) / np.linalg.norm(q)
    P0 = range_projector(model.operator(m0), rank=rank)
    if P0.gap < min_gap:
        raise ValueError(f"spectral gap s_k/s_(k+1) = {P0.gap:.3g} at rank {rank} is below {min_gap}")
    steps = sorted(set(float(t) for t in steps))

    def one(t):
        if t == 0.0:
            return 0.0
        return projector_distance(range_projector(model.operator(m0 + t * q), rank=rank), P0)

    dist = _pool_map(one, steps, threads)
    res = ScanResult("projector", PROJECTOR_COLUMNS)
    for t, dd in zip(steps, dist):
        res.rows.append([t, dd, dd / t if t > 0 else 0.0])
    ratios = [r[2] for r in res.rows if r[0] > 0]
    res.summary = {"gap": P0.gap, "rank": rank, "max_ratio": max(ratios), "min_ratio": min(ratios),
                   "max_distance": max(r[1] for r in res.rows)}
    return res


# ---- transport equation --------------------------------------------------------


def transport_operator(f: AffineFunction, tau, alpha, n, rect: Rect | None = None):
    """Central-difference matrix of u -> d_tau(f u) + alpha u on interior nodes.

    Uniform ``n x n`` interior grid with zero Dirichlet values eliminated;
    unknowns are ordered with y2 fastest.  Returns (matrix, cell area).
    """
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (2,) or not np.any(tau):
        raise ValueError("tau must be a nonzero tangential 2-vector")
    if f.is_zero:
        raise ValueError("f must not vanish identically")
    rect = rect or Rect()
    h1 = (rect.y1max - rect.y1min) / (n + 1)
    h2 = (rect.y2max - rect.y2min) / (n + 1)
    y1 = rect.y1min + h1 * np.arange(1, n + 1)
    y2 = rect.y2min + h2 * np.arange(1, n + 1)
    I = sp.identity(n, format="csr")
    # first difference, zero boundary values already eliminated
    D = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="csr") / 2.0
    Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
    F = sp.diags(f(Y1, Y2).ravel())
    Dtau = tau[0] * sp.kron(D / h1, I) + tau[1] * sp.kron(I, D / h2)
    A = (Dtau @ F + alpha * sp.identity(n * n)).tocsc()
    return A, h1 * h2


def transport_triviality(f: AffineFunction, tau, alpha, n=64, rect: Rect | None = None) -> float:
    """Smallest singular value of the discrete transport operator.

    The discrete L2 norm weights every node by the cell area, which cancels
    in the operator norm ratio, so this is the grid-norm singular value.
    """
    A, _ = transport_operator(f, tau, alpha, n, rect)
    try:
        lu = spla.splu(A)
    except RuntimeError:  # exactly singular factor
        return 0.0
    N = A.shape[0]
    # largest eigenvalue of (A^T A)^-1 = A^-1 A^-T is 1 / s_min^2
    inv = spla.LinearOperator((N, N), matvec=lambda v: lu.solve(lu.solve(v, trans="T")), dtype=float)
    lam_max = spla.eigsh(inv, k=1, which="LA", ncv=40, return_eigenvectors=False, tol=1e-9)[0]
    return float(1.0 / np.sqrt(lam_max))


# ---- degeneracy equations and identities ------------------------------------


def normal_jump_equation_residual(params: LameParams, h: SlipField, f: AffineFunction, y1, y2):
    """kappa f div h + grad f . h, the normal component of the degeneracy equation."""
    g = h.evaluate(y1, y2)
    div = h.derivative(y1, y2, 1, 0)[0] + h.derivative(y1, y2, 0, 1)[1]
    return params.kappa * f(y1, y2) * div + f.g1 * g[0] + f.g2 * g[1]


def remaining_system_residual(h: SlipField, f: AffineFunction, beta, sigma, d3f, y1, y2):
    """Residuals of the two tangential degeneracy equations (h2 line, h1 line)."""
    g = h.evaluate(y1, y2)
    dg1 = h.derivative(y1, y2, 1, 0)
    fv = f(y1, y2)
    bs = beta * sigma
    # d1(f h) = f1 h + f d1 h
    d1fh = f.g1 * g + fv * dg1
    r2 = -bs * d1fh[1] - d3f * g[1]
    r1 = -bs * d1fh[0] + bs * (f.g1 * g[0] + f.g2 * g[1]) - d3f * g[0]
    return np.stack([r2, r1])


def _quartic(rng):
    """Random quartic polynomial in two variables with its analytic derivatives."""
    powers = [(i, j) for i in range(5) for j in range(5 - i)]
    c = rng.standard_normal(len(powers))

    def ev(y1, y2, d1=0, d2=0):
        out = np.zeros(np.broadcast(y1, y2).shape)
        for (i, j), cij in zip(powers, c):
            if i < d1 or j < d2:
                continue
            fi = np.prod(np.arange(i - d1 + 1, i + 1)) if d1 else 1
            fj = np.prod(np.arange(j - d2 + 1, j + 1)) if d2 else 1
            out = out + cij * fi * fj * y1 ** (i - d1) * y2 ** (j - d2)
        return out

    return ev


def divergence_identity_check(params: LameParams, f: AffineFunction, *, rng, n_points=200, phi=None):
    """Max relative residual of the weighted divergence identity at random points.

    With p = 1 + 2 mu/lam:
        div(|f|^p grad phi) = p |f|^(2 mu/lam) sgn(f) [lam/(lam+2mu) f lap phi + grad f . grad phi]
    Points on {f = 0} are skipped and counted.  Returns (max residual, skipped).
    """
    lam, mu = params.lam, params.mu
    p = 1.0 + 2.0 * mu / lam
    phi = phi or _quartic(rng)
    y = rng.uniform(-1.0, 1.0, size=(n_points, 2))
    fv = f(y[:, 0], y[:, 1])
    keep = fv != 0.0
    y, fv = y[keep], fv[keep]
    y1, y2 = y[:, 0], y[:, 1]
    p1, p2 = phi(y1, y2, 1, 0), phi(y1, y2, 0, 1)
    lap = phi(y1, y2, 2, 0) + phi(y1, y2, 0, 2)
    af = np.abs(fv)
    sg = np.sign(fv)
    # left side expanded by the product rule: d_i(|f|^p) = p |f|^(p-1) sgn(f) f_i
    lhs = af**p * lap + p * af ** (p - 1) * sg * (f.g1 * p1 + f.g2 * p2)
    rhs = p * af ** (2 * mu / lam) * sg * (lam / (lam + 2 * mu) * fv * lap + f.g1 * p1 + f.g2 * p2)
    scale = np.maximum(np.abs(af**p * lap) + np.abs(p * af ** (p - 1) * (f.g1 * p1 + f.g2 * p2)), 1e-300)
    resid = np.abs(lhs - rhs) / scale
    return float(resid.max()) if resid.size else 0.0, int(np.count_nonzero(~keep))


def coefficient_identity_check(lam, mu):
    """|1 + 4 (mu/lam)(lam+mu)/(lam+2mu) + (3lam+4mu)/(lam+2mu) - (4 + 2 mu/lam)|, relative."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    lhs = 1 + 4 * (mu / lam) * (lam + mu) / (lam + 2 * mu) + (3 * lam + 4 * mu) / (lam + 2 * mu)
    rhs = 4 + 2 * mu / lam
    return np.abs(lhs - rhs) / np.abs(rhs)
