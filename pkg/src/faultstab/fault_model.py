"""Planar fault family over a fixed rectangle, observation grids and slip bases.

A fault is the graph of ``y3 = a*y1 + b*y2 + d`` over the rectangle ``R``.
Slips are expanded in tensor-product sine bases so every represented field
vanishes on the boundary of ``R``.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AdmissibleSet",
    "BumpDensity",
    "FaultGeometry",
    "GeometryError",
    "ObservationGrid",
    "Rect",
    "SineBasis",
    "SlipField",
    "gradient_slip",
    "slip_eval",
]


class GeometryError(ValueError):
    """A fault geometry violates the depth constraint or leaves its rectangle."""


@dataclass(frozen=True)
class Rect:
    y1min: float = -1.0
    y1max: float = 1.0
    y2min: float = -1.0
    y2max: float = 1.0

    def __post_init__(self):
        if not (self.y1max > self.y1min and self.y2max > self.y2min):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def lengths(self):
        return self.y1max - self.y1min, self.y2max - self.y2min

    @property
    def area(self):
        l1, l2 = self.lengths
        return l1 * l2

    @property
    def corners(self):
        return np.array([[u, v] for u in (self.y1min, self.y1max) for v in (self.y2min, self.y2max)])

    def contains(self, y1, y2, tol=1e-12):
        y1 = np.asarray(y1)
        y2 = np.asarray(y2)
        return (
            (y1 >= self.y1min - tol) & (y1 <= self.y1max + tol)
            & (y2 >= self.y2min - tol) & (y2 <= self.y2max + tol)
        )

    def to_unit(self, y1, y2):
        l1, l2 = self.lengths
        return (np.asarray(y1) - self.y1min) / l1, (np.asarray(y2) - self.y2min) / l2


@dataclass(frozen=True)
class FaultGeometry:
    """The plane ``y3 = a y1 + b y2 + d`` restricted to ``rect``."""

    a: float
    b: float
    d: float
    rect: Rect = field(default_factory=Rect)
    depth_min: float = 0.5

    def __post_init__(self):
        if self.depth_min <= 0:
            raise GeometryError("depth_min must be positive")
        top = self.max_height
        if top > -self.depth_min:
            raise GeometryError(
                f"fault (a={self.a}, b={self.b}, d={self.d}) reaches y3={top:.6g}, "
                f"above -depth_min={-self.depth_min}"
            )

    @classmethod
    def from_m(cls, m, rect=None, depth_min=0.5):
        a, b, d = (float(v) for v in m)
        return cls(a, b, d, rect if rect is not None else Rect(), depth_min)

    @property
    def m(self):
        return np.array([self.a, self.b, self.d])

    @property
    def max_height(self):
        c = self.rect.corners
        return float(np.max(self.a * c[:, 0] + self.b * c[:, 1] + self.d))

    def embed(self, y1, y2):
        """Lift parameter-plane points of R onto the fault."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        if not np.all(self.rect.contains(y1, y2)):
            raise GeometryError("point outside the reference rectangle")
        return np.stack(np.broadcast_arrays(y1, y2, self.a * y1 + self.b * y2 + self.d), axis=-1)

    def normal_and_area_element(self):
        sigma = float(np.sqrt(1.0 + self.a**2 + self.b**2))
        return np.array([-self.a, -self.b, 1.0]) / sigma, sigma

    @property
    def scaled_normal(self):
        """n * sigma = (-a, -b, 1), free of square roots."""
        return np.array([-self.a, -self.b, 1.0])

    def key(self):
        return {"m": [float(v) for v in self.m], "rect": list(_rect_tuple(self.rect))}


def _rect_tuple(r):
    return (r.y1min, r.y1max, r.y2min, r.y2max)


@dataclass(frozen=True)
class AdmissibleSet:
    """Axis-aligned box of plane coefficients ``lower <= (a, b, d) <= upper``."""

    lower: tuple
    upper: tuple
    depth_min: float = 0.5
    rect: Rect = field(default_factory=Rect)
    exclude_horizontal: bool = False

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (3,) or hi.shape != (3,) or np.any(hi < lo):
            raise GeometryError(f"bad admissible box {self.lower} .. {self.upper}")
        # a*y1 + b*y2 + d is bilinear in (m, y): its max sits on a vertex pair
        verts = np.array(list(itertools.product(*zip(lo, hi))))
        c = self.rect.corners
        top = np.max(verts[:, :1] * c[:, 0] + verts[:, 1:2] * c[:, 1] + verts[:, 2:3])
        if top > -self.depth_min:
            raise GeometryError(
                f"admissible box reaches y3={top:.6g}, above -depth_min={-self.depth_min}"
            )
        if self.exclude_horizontal and lo[0] <= 0 <= hi[0] and lo[1] <= 0 <= hi[1]:
            raise GeometryError("box contains horizontal profiles (0, 0, d) but exclude_horizontal is set")

    @property
    def bounds(self):
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def contains(self, m, tol=0.0):
        lo, hi = self.bounds
        m = np.asarray(m, dtype=float)
        return bool(np.all(m >= lo - tol) and np.all(m <= hi + tol))

    def geometry(self, m):
        if not self.contains(m, tol=1e-12):
            raise GeometryError(f"m={list(m)} outside the admissible box")
        return FaultGeometry.from_m(m, self.rect, self.depth_min)

    def sample(self, rng, n, margin=0.0):
        """Uniform samples from the box shrunk by ``margin`` on every side."""
        lo, hi = self.bounds
        lo = lo + np.minimum(margin, (hi - lo) / 2)
        hi = hi - np.minimum(margin, (hi - lo) / 2)
        return lo + (hi - lo) * rng.random((n, 3))


@dataclass(frozen=True, eq=False)
class ObservationGrid:
    """Surface points in the window V with trapezoid weights for the L2(V) norm."""

    points: np.ndarray
    weights: np.ndarray
    window: tuple = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or w.shape != (pts.shape[0],):
            raise ValueError("points must be (N, 3) and weights (N,)")
        if np.any(pts[:, 2] != 0.0):
            raise ValueError("observation points must lie on x3 = 0")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")

    @classmethod
    def uniform(cls, x1min, x1max, x2min, x2max, n1, n2):
        if n1 < 2 or n2 < 2:
            raise ValueError("need at least two points per direction")
        t1 = np.linspace(x1min, x1max, n1)
        t2 = np.linspace(x2min, x2max, n2)
        w1 = np.full(n1, (x1max - x1min) / (n1 - 1))
        w1[[0, -1]] *= 0.5
        w2 = np.full(n2, (x2max - x2min) / (n2 - 1))
        w2[[0, -1]] *= 0.5
        g1, g2 = np.meshgrid(t1, t2, indexing="ij")
        pts = np.column_stack([g1.ravel(), g2.ravel(), np.zeros(g1.size)])
        return cls(pts, np.outer(w1, w2).ravel(), (x1min, x1max, x2min, x2max, n1, n2))

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def data_weights(self):
        """Weights for data vectors ordered (point, component)."""
        return np.repeat(self.weights, 3)

    def norm(self, data):
        data = np.asarray(data, dtype=float)
        return float(np.sqrt(np.sum(self.data_weights * data**2)))

    def inner(self, u, v):
        return float(np.sum(self.data_weights * np.asarray(u) * np.asarray(v)))

    def key(self):
        return hashlib.sha256(
            np.ascontiguousarray(self.points).tobytes() + np.ascontiguousarray(self.weights).tobytes()
        ).hexdigest()


# 1-D families on [0, 1].  ``sine`` vanishes at the ends; ``clamped`` also has a
# vanishing derivative there, so gradients of clamped potentials stay in H^1_0.

def _sine(p, t, der=0):
    w = p * np.pi
    return [np.sin(w * t), w * np.cos(w * t), -w * w * np.sin(w * t)][der]


def _clamped(p, t, der=0):
    # sin(pi t) sin(p pi t)
    a, b = np.pi, p * np.pi
    sa, ca, sb, cb = np.sin(a * t), np.cos(a * t), np.sin(b * t), np.cos(b * t)
    if der == 0:
        return sa * sb
    if der == 1:
        return a * ca * sb + b * sa * cb
    if der == 2:
        return -(a * a + b * b) * sa * sb + 2 * a * b * ca * cb
    if der == 3:
        return (
            -(a**3 + 3 * a * b * b) * ca * sb - (b**3 + 3 * a * a * b) * sa * cb
        )
    raise ValueError(der)


@dataclass(frozen=True)
class SineBasis:
    """Tensor sine modes ``sin(p pi u1) sin(q pi u2)`` on ``rect`` (u = unit coords)."""

    n1: int
    n2: int
    rect: Rect = field(default_factory=Rect)

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("basis orders must be positive")

    @property
    def size(self):
        return self.n1 * self.n2

    def values(self, y1, y2, d1=0, d2=0):
        """Mode values (or derivatives) at points, shape (..., n1*n2)."""
        u1, u2 = self.rect.to_unit(y1, y2)
        l1, l2 = self.rect.lengths
        p = np.arange(1, self.n1 + 1)
        q = np.arange(1, self.n2 + 1)
        f1 = _sine(p, np.asarray(u1)[..., None], d1) / l1**d1
        f2 = _sine(q, np.asarray(u2)[..., None], d2) / l2**d2
        return (f1[..., :, None] * f2[..., None, :]).reshape(f1.shape[:-1] + (self.size,))

    def potential_values(self, y1, y2, d1=0, d2=0):
        """Clamped modes ``sin(pi u) sin(p pi u)`` used for gradient slips."""
        u1, u2 = self.rect.to_unit(y1, y2)
        l1, l2 = self.rect.lengths
        p = np.arange(1, self.n1 + 1)
        q = np.arange(1, self.n2 + 1)
        f1 = _clamped(p, np.asarray(u1)[..., None], d1) / l1**d1
        f2 = _clamped(q, np.asarray(u2)[..., None], d2) / l2**d2
        return (f1[..., :, None] * f2[..., None, :]).reshape(f1.shape[:-1] + (self.size,))


KINDS = ("free", "one-directional", "gradient")


@dataclass(frozen=True)
class SlipField:
    """Tangential slip (g1, g2) on R.

    ``kind="free"``: ``coeffs`` has shape (2, n1, n2), one sine expansion per
    component.  ``kind="one-directional"``: ``coeffs`` is (n1, n2) for a
    scalar ``u`` and ``direction`` fixes ``g = u * direction``.
    ``kind="gradient"``: ``coeffs`` (n1, n2) expand a clamped potential and
    ``g`` is its gradient.
    """

    basis: SineBasis
    coeffs: np.ndarray
    kind: str = "free"
    direction: tuple = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", c)
        nb = (self.basis.n1, self.basis.n2)
        if self.kind not in KINDS:
            raise ValueError(f"unknown slip kind {self.kind!r}")
        if self.kind == "free" and c.shape != (2,) + nb:
            raise ValueError(f"free slip needs coeffs of shape {(2,) + nb}, got {c.shape}")
        if self.kind != "free" and c.shape != nb:
            raise ValueError(f"{self.kind} slip needs coeffs of shape {nb}, got {c.shape}")
        if self.kind == "one-directional":
            v = np.asarray(self.direction, dtype=float)
            if v.shape != (2,) or not np.any(v):
                raise ValueError("one-directional slip needs a nonzero 2-vector direction")
            object.__setattr__(self, "direction", tuple(float(t) for t in v))

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros((2, basis.n1, basis.n2)))

    @classmethod
    def mode(cls, basis, component, p, q, amplitude=1.0):
        """Single sine mode (1-based p, q) on component 0 or 1."""
        if not (1 <= p <= basis.n1 and 1 <= q <= basis.n2) or component not in (0, 1):
            raise IndexError(f"mode ({component}, {p}, {q}) outside basis {basis.n1}x{basis.n2}")
        c = np.zeros((2, basis.n1, basis.n2))
        c[component, p - 1, q - 1] = amplitude
        return cls(basis, c)

    @property
    def in_basis(self):
        """True when the slip is a finite combination of the sine basis columns."""
        return self.kind in ("free", "one-directional")

    def scaled(self, factor):
        return SlipField(self.basis, factor * self.coeffs, self.kind, self.direction)

    def coefficient_vector(self):
        """Coefficients in the column order of the forward operator."""
        if self.kind == "free":
            return self.coeffs.reshape(-1).copy()
        if self.kind == "one-directional":
            v = np.asarray(self.direction)
            return np.concatenate([v[0] * self.coeffs.ravel(), v[1] * self.coeffs.ravel()])
        raise ValueError("gradient slips are not represented in the sine basis")

    def evaluate(self, y1, y2):
        """Return (g1, g2) stacked on a leading axis of length 2."""
        return self.derivative(y1, y2, 0, 0)

    def derivative(self, y1, y2, d1, d2):
        """Mixed partial d1 in y1, d2 in y2 of (g1, g2)."""
        B = self.basis
        if self.kind == "free":
            vals = B.values(y1, y2, d1, d2)
            c = self.coeffs.reshape(2, -1)
            return np.stack([vals @ c[0], vals @ c[1]])
        if self.kind == "one-directional":
            u = B.values(y1, y2, d1, d2) @ self.coeffs.ravel()
            v = self.direction
            return np.stack([v[0] * u, v[1] * u])
        c = self.coeffs.ravel()
        return np.stack([B.potential_values(y1, y2, d1 + 1, d2) @ c, B.potential_values(y1, y2, d1, d2 + 1) @ c])

    def potential(self, y1, y2, d1=0, d2=0):
        if self.kind != "gradient":
            raise ValueError("only gradient slips carry a potential")
        return self.basis.potential_values(y1, y2, d1, d2) @ self.coeffs.ravel()


def slip_eval(slip: SlipField, y1, y2):
    rect = slip.basis.rect
    if not np.all(rect.contains(y1, y2)):
        raise GeometryError("slip evaluated outside R")
    g = slip.evaluate(y1, y2)
    return g[0], g[1]


def gradient_slip(basis: SineBasis, potential_coeffs) -> SlipField:
    return SlipField(basis, np.asarray(potential_coeffs, dtype=float), "gradient")


@dataclass(frozen=True)
class BumpDensity:
    """Smooth compactly supported density ``amplitude * psi(y)``.

    ``psi = exp(1 - 1/(1 - s))`` with ``s = sum(((y - center)/radii)**2)``,
    so ``psi(center) = 1`` and psi vanishes with all derivatives on the
    ellipse s = 1.
    """

    center: tuple = (0.0, 0.0)
    radii: tuple = (0.5, 0.5)
    amplitude: tuple = (1.0, 0.0, 0.0)

    def _parts(self, y1, y2):
        c = np.asarray(self.center, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        t1 = (np.asarray(y1, dtype=float) - c[0]) / r[0]
        t2 = (np.asarray(y2, dtype=float) - c[1]) / r[1]
        s = t1 * t1 + t2 * t2
        inside = s < 1.0
        u = np.where(inside, 1.0 / np.where(inside, 1.0 - s, 1.0), 0.0)
        psi = np.where(inside, np.exp(1.0 - u), 0.0)
        ds = np.stack([2 * t1 / r[0], 2 * t2 / r[1]])
        dds = np.array([2 / r[0] ** 2, 2 / r[1] ** 2])
        return psi, u, ds, dds

    def scalar(self, y1, y2):
        return self._parts(y1, y2)[0]

    def scalar_gradient(self, y1, y2):
        psi, u, ds, _ = self._parts(y1, y2)
        return -psi * u * u * ds

    def scalar_hessian(self, y1, y2):
        psi, u, ds, dds = self._parts(y1, y2)
        # d psi = -psi u^2 ds ;  d u = u^2 ds
        out = np.empty((2, 2) + np.shape(psi))
        for k in range(2):
            for l in range(2):
                val = psi * (u**4 - 2 * u**3) * ds[k] * ds[l]
                if k == l:
                    val = val - psi * u * u * dds[k]
                out[k, l] = val
        return out

    def __call__(self, y1, y2):
        """Vector density, shape (..., 3)."""
        return self.scalar(y1, y2)[..., None] * np.asarray(self.amplitude, dtype=float)

    def support_radius(self):
        return float(max(self.radii))

    def key(self):
        return json.dumps([list(self.center), list(self.radii), list(self.amplitude)])
