"""Discretised fault-to-surface operator and the geometry-to-data map.

The operator maps sine-basis slip coefficients on ``R`` to surface
displacements at the observation points.  All norms, adjoints and SVDs are
taken in the weighted inner product of the observation grid, so discrete
quantities approximate their L2(V) counterparts.
"""
from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .fault_model import FaultGeometry, ObservationGrid, Rect, SineBasis, SlipField
from .kernels import LameParams, halfspace_tables, traction_contract

log = logging.getLogger(__name__)

__all__ = [
    "CacheError",
    "ForwardModel",
    "ForwardOperator",
    "GeometryJacobian",
    "QuadratureRule",
    "RangeProjector",
    "assemble",
    "default_rank",
    "jacobian_fd_errors",
    "jacobian_min_singular_value",
    "jacobian_singular_values",
    "jacobian_phi",
    "min_residual",
    "phi",
    "projector_distance",
    "range_projector",
    "read_operator_cache",
    "write_operator_cache",
]

# observation points per kernel block; bounds temporaries to ~O(10 MB)
_CHUNK_PAIRS = 40_000


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor Gauss-Legendre rule on a rectangle."""

    nodes: np.ndarray
    weights: np.ndarray
    orders: tuple
    rect: Rect

    @classmethod
    def gauss_legendre(cls, rect: Rect, q1: int, q2: int | None = None):
        q2 = q1 if q2 is None else q2
        if q1 < 1 or q2 < 1:
            raise ValueError("quadrature orders must be positive")
        t1, w1 = np.polynomial.legendre.leggauss(q1)
        t2, w2 = np.polynomial.legendre.leggauss(q2)
        l1, l2 = rect.lengths
        y1 = rect.y1min + 0.5 * l1 * (t1 + 1)
        y2 = rect.y2min + 0.5 * l2 * (t2 + 1)
        g1, g2 = np.meshgrid(y1, y2, indexing="ij")
        w = np.outer(0.5 * l1 * w1, 0.5 * l2 * w2)
        return cls(np.column_stack([g1.ravel(), g2.ravel()]), w.ravel(), (q1, q2), rect)

    @property
    def size(self):
        return self.weights.size


@dataclass(frozen=True, eq=False)
class ForwardOperator:
    """Assembled operator; columns are free sine modes, then optional gradient modes."""

    matrix: np.ndarray
    geometry: FaultGeometry
    grid: ObservationGrid
    quad: QuadratureRule
    basis: SineBasis
    lame: LameParams
    gradient_columns: bool = False

    @property
    def shape(self):
        return self.matrix.shape

    def coefficients(self, slip: SlipField):
        """Column coefficients reproducing ``slip``."""
        nb = self.basis.size
        if slip.kind == "gradient":
            if not self.gradient_columns:
                raise ValueError("operator has no gradient columns; assemble with include_gradients=True")
            return np.concatenate([np.zeros(2 * nb), slip.coeffs.ravel()])
        c = slip.coefficient_vector()
        return np.concatenate([c, np.zeros(nb)]) if self.gradient_columns else c

    def apply(self, slip: SlipField):
        return self.matrix @ self.coefficients(slip)

    def weighted(self):
        return np.sqrt(self.grid.data_weights)[:, None] * self.matrix

    def singular_values(self):
        return np.linalg.svd(self.weighted(), compute_uv=False)


@dataclass(frozen=True, eq=False)
class GeometryJacobian:
    """Columns d(phi)/da, d(phi)/db, d(phi)/dd for a fixed slip."""

    columns: np.ndarray
    slip: SlipField
    m: np.ndarray

    @property
    def da(self):
        return self.columns[:, 0]

    @property
    def db(self):
        return self.columns[:, 1]

    @property
    def dd(self):
        return self.columns[:, 2]

    def directional(self, q):
        """(q1 d/da + q2 d/db + q3 d/dd) phi."""
        return self.columns @ np.asarray(q, dtype=float)


def _check_setup(geom: FaultGeometry, quad: QuadratureRule):
    if geom.rect != quad.rect:
        raise ValueError("quadrature rule and geometry use different rectangles")
    # re-validate; FaultGeometry refuses bad depths at construction, but a
    # geometry may come from an unchecked copy
    FaultGeometry(geom.a, geom.b, geom.d, geom.rect, geom.depth_min)


def _blocks(grid: ObservationGrid, quad: QuadratureRule):
    step = max(1, _CHUNK_PAIRS // max(quad.size, 1))
    for start in range(0, grid.size, step):
        yield slice(start, min(start + step, grid.size))


def _source_points(geom: FaultGeometry, quad: QuadratureRule):
    return geom.embed(quad.nodes[:, 0], quad.nodes[:, 1])


def _lift(geom: FaultGeometry, g):
    """(g1, g2) on R -> g_m = (g1, g2, a g1 + b g2)."""
    return np.stack([g[0], g[1], geom.a * g[0] + geom.b * g[1]])


def assemble(params: LameParams, geom: FaultGeometry, grid: ObservationGrid, quad: QuadratureRule,
             basis: SineBasis, *, include_gradients=False) -> ForwardOperator:
    """Dense matrix of the fault-to-surface operator in the sine basis.

    Columns are ordered (component, p, q); rows (observation point, component).
    With ``include_gradients`` the gradients of the clamped potential modes
    follow as ``basis.size`` extra columns, so gradient slips lie in the range.
    """
    _check_setup(geom, quad)
    if min(quad.orders) < 4:
        raise ValueError("quadrature orders must be at least 4")
    if basis.rect != geom.rect:
        raise ValueError("basis and geometry use different rectangles")
    ys = _source_points(geom, quad)
    nsig = geom.scaled_normal
    # weighted basis values, (Nq, Nb)
    S = basis.values(quad.nodes[:, 0], quad.nodes[:, 1]) * quad.weights[:, None]
    nb = basis.size
    ncol = 3 * nb if include_gradients else 2 * nb
    if include_gradients:
        P1 = basis.potential_values(quad.nodes[:, 0], quad.nodes[:, 1], 1, 0) * quad.weights[:, None]
        P2 = basis.potential_values(quad.nodes[:, 0], quad.nodes[:, 1], 0, 1) * quad.weights[:, None]
    A = np.empty((grid.size, 3, ncol))
    for blk in _blocks(grid, quad):
        x = grid.points[blk][:, None, :]
        d1, _ = halfspace_tables(params, x, ys[None, :, :])
        H = traction_contract(d1, nsig, params.lam, params.mu)  # (No, Nq, 3, 3)
        # column c of g_m: e_c + (a, b)_c e_3
        H1 = H[..., 0] + geom.a * H[..., 2]
        H2 = H[..., 1] + geom.b * H[..., 2]
        A[blk, :, :nb] = np.einsum("oqi,qk->oik", H1, S)
        A[blk, :, nb:2 * nb] = np.einsum("oqi,qk->oik", H2, S)
        if include_gradients:
            A[blk, :, 2 * nb:] = np.einsum("oqi,qk->oik", H1, P1) + np.einsum("oqi,qk->oik", H2, P2)
    return ForwardOperator(A.reshape(3 * grid.size, ncol), geom, grid, quad, basis, params, include_gradients)


def phi(params: LameParams, geom: FaultGeometry, grid: ObservationGrid, quad: QuadratureRule,
        h: SlipField):
    """Surface displacement of the slip ``h`` placed on the fault ``geom``."""
    _check_setup(geom, quad)
    ys = _source_points(geom, quad)
    gm = _lift(geom, h.evaluate(quad.nodes[:, 0], quad.nodes[:, 1])) * quad.weights  # (3, Nq)
    nsig = geom.scaled_normal
    out = np.empty((grid.size, 3))
    for blk in _blocks(grid, quad):
        d1, _ = halfspace_tables(params, grid.points[blk][:, None, :], ys[None, :, :])
        H = traction_contract(d1, nsig, params.lam, params.mu)
        out[blk] = np.einsum("oqil,lq->oi", H, gm)
    return out.ravel()


def jacobian_phi(params: LameParams, geom: FaultGeometry, grid: ObservationGrid, quad: QuadratureRule,
                 h: SlipField) -> GeometryJacobian:
    """Analytic derivatives of ``phi`` with respect to (a, b, d).

    With ``y3 = a y1 + b y2 + d`` and ``n sigma = (-a, -b, 1)``::

        dphi/da = sum w [ y1 dH/dy3(n sigma) h_m - H(e1) h_m + H(n sigma) h1 e3 ]
        dphi/db = sum w [ y2 dH/dy3(n sigma) h_m - H(e2) h_m + H(n sigma) h2 e3 ]
        dphi/dd = sum w dH/dy3(n sigma) h_m

    on the same quadrature nodes as ``phi``, so the result is the exact
    derivative of the discretised map.
    """
    _check_setup(geom, quad)
    ys = _source_points(geom, quad)
    y1 = quad.nodes[:, 0]
    y2 = quad.nodes[:, 1]
    g = h.evaluate(y1, y2)
    w = quad.weights
    gm = _lift(geom, g) * w
    g1e3 = np.zeros_like(gm)
    g1e3[2] = g[0] * w
    g2e3 = np.zeros_like(gm)
    g2e3[2] = g[1] * w
    nsig = geom.scaled_normal
    lam, mu = params.lam, params.mu
    cols = np.empty((grid.size, 3, 3))
    for blk in _blocks(grid, quad):
        d1, d13 = halfspace_tables(params, grid.points[blk][:, None, :], ys[None, :, :], dy3=True)
        Hn = traction_contract(d1, nsig, lam, mu)
        H3 = traction_contract(d13, nsig, lam, mu)
        He1 = traction_contract(d1, np.array([1.0, 0.0, 0.0]), lam, mu)
        He2 = traction_contract(d1, np.array([0.0, 1.0, 0.0]), lam, mu)
        H3g = np.einsum("oqil,lq->oqi", H3, gm)
        cols[blk, :, 0] = (
            np.einsum("oqi,q->oi", H3g, y1)
            - np.einsum("oqil,lq->oi", He1, gm)
            + np.einsum("oqil,lq->oi", Hn, g1e3)
        )
        cols[blk, :, 1] = (
            np.einsum("oqi,q->oi", H3g, y2)
            - np.einsum("oqil,lq->oi", He2, gm)
            + np.einsum("oqil,lq->oi", Hn, g2e3)
        )
        cols[blk, :, 2] = H3g.sum(axis=1)
    return GeometryJacobian(cols.reshape(3 * grid.size, 3), h, geom.m)


def jacobian_fd_errors(model: "ForwardModel", m, h: SlipField, steps):
    """Relative errors of the analytic Jacobian columns against central differences.

    Returns an array of shape (len(steps), 3), columns ordered (a, b, d).
    """
    m = np.asarray(m, dtype=float)
    J = model.jacobian(m, h)
    out = np.empty((len(steps), 3))
    for i, t in enumerate(steps):
        for k in range(3):
            e = np.zeros(3)
            e[k] = t
            fd = (model.phi(m + e, h) - model.phi(m - e, h)) / (2 * t)
            col = J.columns[:, k]
            out[i, k] = model.norm(fd - col) / model.norm(col)
    return out


def jacobian_singular_values(J: GeometryJacobian, data_weights):
    return np.linalg.svd(np.sqrt(data_weights)[:, None] * J.columns, compute_uv=False)


def jacobian_min_singular_value(J: GeometryJacobian, data_weights) -> float:
    return float(jacobian_singular_values(J, data_weights)[-1])


def default_rank(singular_values, rel_tol=1e-6):
    """Largest k with s_k / s_1 >= rel_tol."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s / s[0] >= rel_tol))


@dataclass(frozen=True, eq=False)
class RangeProjector:
    """Orthogonal projector onto the leading left singular subspace.

    ``basis`` holds ``U_k`` in weighted coordinates (columns orthonormal in
    the Euclidean sense after multiplying data by ``sqrt_w``).
    """

    basis: np.ndarray
    sqrt_w: np.ndarray
    singular_values: np.ndarray

    @property
    def rank(self):
        return self.basis.shape[1]

    def apply(self, data):
        z = self.sqrt_w * np.asarray(data, dtype=float)
        return (self.basis @ (self.basis.T @ z)) / self.sqrt_w

    def complement(self, data):
        data = np.asarray(data, dtype=float)
        return data - self.apply(data)

    def matrix(self):
        return (self.basis @ self.basis.T) * (self.sqrt_w[None, :] / self.sqrt_w[:, None])

    @property
    def gap(self):
        """s_k / s_{k+1} (inf when nothing was discarded)."""
        k = self.rank
        s = self.singular_values
        if k >= s.size or s[k] == 0:
            return np.inf
        return float(s[k - 1] / s[k])


def range_projector(op: ForwardOperator, *, rank: int | None = None, rel_tol: float | None = None):
    """Projector onto the span of the leading ``rank`` weighted left singular vectors.

    Give either a fixed ``rank`` or a relative threshold ``rel_tol``
    (default threshold 1e-6).
    """
    sqrt_w = np.sqrt(op.grid.data_weights)
    U, s, _ = np.linalg.svd(sqrt_w[:, None] * op.matrix, full_matrices=False)
    numerical_rank = int(np.count_nonzero(s > s[0] * max(op.matrix.shape) * np.finfo(float).eps)) if s[0] > 0 else 0
    if rank is None:
        rank = default_rank(s, 1e-6 if rel_tol is None else rel_tol)
    elif rel_tol is not None:
        raise ValueError("give either rank or rel_tol, not both")
    if rank < 0 or rank > numerical_rank:
        raise ValueError(f"requested rank {rank} exceeds numerical rank {numerical_rank}")
    return RangeProjector(U[:, :rank].copy(), sqrt_w, s)


def min_residual(op_or_projector, data, grid: ObservationGrid | None = None, **truncation):
    """Weighted norm of (I - P) data, the least-squares misfit over retained slips."""
    if isinstance(op_or_projector, ForwardOperator):
        grid = op_or_projector.grid
        P = range_projector(op_or_projector, **truncation)
    else:
        P = op_or_projector
    data = np.asarray(data, dtype=float)
    if data.shape != P.sqrt_w.shape:
        raise ValueError(f"data has shape {data.shape}, expected {P.sqrt_w.shape}")
    r = P.sqrt_w * P.complement(data)
    return float(np.linalg.norm(r))


def projector_distance(P: RangeProjector, Q: RangeProjector) -> float:
    """Spectral norm of P - Q in the weighted inner product."""
    if P.rank != Q.rank:
        D = P.basis @ P.basis.T - Q.basis @ Q.basis.T
        return float(np.linalg.norm(D, 2))
    if P.rank == 0:
        return 0.0
    c = np.linalg.svd(P.basis.T @ Q.basis, compute_uv=False)
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, c[-1]) ** 2)))


@dataclass(frozen=True, eq=False)
class ForwardModel:
    """Everything except the geometry: medium, observation grid, quadrature and basis."""

    lame: LameParams
    grid: ObservationGrid
    quad: QuadratureRule
    basis: SineBasis
    depth_min: float = 0.5

    @property
    def rect(self):
        return self.quad.rect

    def geometry(self, m) -> FaultGeometry:
        return FaultGeometry.from_m(m, self.rect, self.depth_min)

    def phi(self, m, h):
        return phi(self.lame, self.geometry(m), self.grid, self.quad, h)

    def jacobian(self, m, h):
        return jacobian_phi(self.lame, self.geometry(m), self.grid, self.quad, h)

    def operator(self, m, *, include_gradients=False):
        return assemble(self.lame, self.geometry(m), self.grid, self.quad, self.basis,
                        include_gradients=include_gradients)

    def norm(self, data):
        return self.grid.norm(data)

    def with_quadrature(self, q1, q2=None):
        return ForwardModel(self.lame, self.grid, QuadratureRule.gauss_legendre(self.rect, q1, q2),
                            self.basis, self.depth_min)

    def cache_key(self, m):
        return {
            "m": [float(v) for v in m],
            "rect": [self.rect.y1min, self.rect.y1max, self.rect.y2min, self.rect.y2max],
            "lame": [self.lame.lam, self.lame.mu],
            "quad": list(self.quad.orders),
            "basis": [self.basis.n1, self.basis.n2],
            "grid": self.grid.key(),
        }


# ---- operator cache --------------------------------------------------------

MAGIC = b"FSTB"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class CacheError(ValueError):
    pass


def write_operator_cache(path, matrix, meta: dict):
    """Write ``matrix`` in the FSTB layout plus a JSON sidecar ``<path>.json``."""
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    if matrix.ndim != 2:
        raise ValueError("cache holds 2-D matrices only")
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols))
        fh.write(matrix.tobytes(order="C"))
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def read_operator_cache(path, expect_meta: dict | None = None):
    """Read an FSTB file; raise CacheError on a bad header or sidecar mismatch."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CacheError("truncated header")
        magic, version, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise CacheError(f"bad magic {magic!r}")
        if version != VERSION:
            raise CacheError(f"unsupported cache version {version}")
        payload = fh.read()
    if len(payload) != 8 * rows * cols:
        raise CacheError("payload size does not match header")
    matrix = np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(float)
    try:
        with open(f"{path}.json") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"missing or unreadable sidecar: {exc}") from exc
    if expect_meta is not None and meta != json.loads(json.dumps(expect_meta, sort_keys=True)):
        raise CacheError("sidecar hashes do not match the requested configuration")
    return matrix, meta
