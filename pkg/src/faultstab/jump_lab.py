"""Numerical jump relations for elastostatic layer potentials on a flat fault.

Potentials are integrals over the plane ``y3 = level`` of a kernel against a
smooth bump density.  They are evaluated on both sides of the plane at
distances ``h``, differenced, and Richardson-extrapolated to ``h -> 0``.

Near-plane integrands peak with width ``h`` under the evaluation point, so
the quadrature is polar around that point: geometrically graded
Gauss-Legendre panels in the radius and the periodic trapezoid rule in the
angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fault_model import BumpDensity
from .kernels import LameParams, free_space_tables, halfspace_tables, traction_contract

__all__ = [
    "DEFAULT_H",
    "DEFAULT_ORDERS",
    "DEFAULT_Z",
    "IDENTITIES",
    "SECOND_ORDER",
    "VARIANTS",
    "JumpReport",
    "PolarRule",
    "analytic_jump",
    "disk_integral",
    "extrapolate_to_zero",
    "halfspace_vs_freespace_jump",
    "integral_identities",
    "jump_estimate",
    "layer_potential",
    "radial_antiderivative_check",
    "richardson",
]

E1 = np.array([1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

# potential tag -> jump formula it is checked against
VARIANTS = {
    "G_e3": "g",
    "dY1_G_e3": "-d1 g",
    "G_e1": "(g3, 0, kappa g1)",
    "dY3_G_e3": "(d1 g3, d2 g3, kappa div g)",
    "dX3_of_G_e3": "-(d1 g3, d2 g3, kappa div g)",
    "dX3_of_dY3_G_e3": "second derivatives of g",
    "dX3_of_G_e1": "first derivatives of g",
}

DEFAULT_H = (0.016, 0.008, 0.004, 0.002, 0.001)
DEFAULT_ORDERS = (1, 2, 3, 4)

# differentiates the density twice; checked at a looser tolerance
SECOND_ORDER = "dX3_of_dY3_G_e3"


@dataclass(frozen=True)
class PolarRule:
    """Polar quadrature centred at a point of the plane.

    Radial panels: [0, h/8], then doubling up to ``rmax``; ``n_radial``
    Gauss nodes per panel and ``n_angle`` trapezoid nodes.
    """

    n_radial: int = 24
    n_angle: int = 256
    first_panel: float = 0.125

    def nodes(self, center, h, rmax):
        edges = [0.0]
        r = self.first_panel * h
        while r < rmax:
            edges.append(r)
            r *= 2.0
        edges.append(rmax)
        t, w = np.polynomial.legendre.leggauss(self.n_radial)
        rho, wr = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            rho.append(lo + 0.5 * (hi - lo) * (t + 1))
            wr.append(0.5 * (hi - lo) * w)
        rho = np.concatenate(rho)
        wr = np.concatenate(wr)
        th = 2 * np.pi * np.arange(self.n_angle) / self.n_angle
        wt = 2 * np.pi / self.n_angle
        y1 = center[0] + rho[:, None] * np.cos(th)[None, :]
        y2 = center[1] + rho[:, None] * np.sin(th)[None, :]
        wts = (wr * rho)[:, None] * wt * np.ones_like(th)[None, :]
        return y1.ravel(), y2.ravel(), wts.ravel()


def _kernel(params: LameParams, variant, x, y):
    """Kernel matrices (N, 3, 3) for a layer-potential variant (free space)."""
    lam, mu = params.lam, params.mu
    if variant == "G_e3":
        return traction_contract(free_space_tables(params, x, y, "kelvin_d1"), E3, lam, mu)
    if variant == "G_e1":
        return traction_contract(free_space_tables(params, x, y, "kelvin_d1"), E1, lam, mu)
    if variant in ("dY1_G_e3", "dY3_G_e3", "dX3_of_G_e3", "dX3_of_G_e1"):
        axis = 0 if variant == "dY1_G_e3" else 2
        v = E1 if variant == "dX3_of_G_e1" else E3
        d2 = free_space_tables(params, x, y, "kelvin_d2")[..., axis, :]
        K = traction_contract(d2, v, lam, mu)
        # translation invariance: d/dx3 = -d/dy3
        return -K if variant.startswith("dX3") else K
    if variant == "dX3_of_dY3_G_e3":
        return -traction_contract(free_space_tables(params, x, y, "kelvin_d3_33"), E3, lam, mu)
    raise ValueError(f"unknown potential variant {variant!r}")


def _halfspace_kernel_e3(params: LameParams, x, y):
    d1, _ = halfspace_tables(params, x, y)
    return traction_contract(d1, E3, params.lam, params.mu)


def _support_reach(g: BumpDensity, p):
    c = np.asarray(g.center, dtype=float)
    return float(np.hypot(*(np.asarray(p[:2]) - c)) + max(g.radii))


def _potential(kernel, g: BumpDensity, x, level, rule: PolarRule, h):
    y1, y2, w = rule.nodes(x[:2], h, _support_reach(g, x))
    dens = g(y1, y2)
    keep = np.any(dens != 0.0, axis=-1)
    y = np.column_stack([y1[keep], y2[keep], np.full(np.count_nonzero(keep), level)])
    K = kernel(np.broadcast_to(x, y.shape), y)
    return np.einsum("nij,nj,n->i", K, dens[keep], w[keep])


def layer_potential(params: LameParams, variant: str, g: BumpDensity, x, *, rule: PolarRule | None = None):
    """Value at ``x`` of the potential ``variant`` with density ``g`` on the plane y3 = 0."""
    x = np.asarray(x, dtype=float)
    if x[2] == 0.0:
        raise ValueError("potential evaluated on the fault plane")
    if variant not in VARIANTS:
        raise ValueError(f"unknown potential variant {variant!r}")
    rule = rule or PolarRule()
    return _potential(lambda xx, yy: _kernel(params, variant, xx, yy), g, x, 0.0, rule, abs(x[2]))


def analytic_jump(params: LameParams, variant: str, g: BumpDensity, p):
    """Right-hand side of the jump formula matching ``variant`` at plane point ``p``."""
    A = np.asarray(g.amplitude, dtype=float)
    psi = g.scalar(p[0], p[1])
    dpsi = g.scalar_gradient(p[0], p[1])
    hpsi = g.scalar_hessian(p[0], p[1])
    kap = params.kappa
    lam, mu = params.lam, params.mu
    c1 = (3 * lam + 4 * mu) / (lam + 2 * mu)
    c2 = (lam + mu) / (lam + 2 * mu)
    g1, g2, g3 = A
    d = lambda comp, k: A[comp] * dpsi[k]  # noqa: E731
    dd = lambda comp, k, l: A[comp] * hpsi[k, l]  # noqa: E731
    if variant == "G_e3":
        return A * psi
    if variant == "dY1_G_e3":
        return -A * dpsi[0]
    if variant == "G_e1":
        return np.array([g3 * psi, 0.0, kap * g1 * psi])
    if variant in ("dY3_G_e3", "dX3_of_G_e3"):
        out = np.array([d(2, 0), d(2, 1), kap * (d(0, 0) + d(1, 1))])
        return out if variant == "dY3_G_e3" else -out
    if variant == "dX3_of_dY3_G_e3":
        return np.array([
            c1 * dd(0, 0, 0) + dd(0, 1, 1) + 2 * c2 * dd(1, 0, 1),
            c1 * dd(1, 1, 1) + dd(1, 0, 0) + 2 * c2 * dd(0, 0, 1),
            -kap * (dd(2, 0, 0) + dd(2, 1, 1)),
        ])
    if variant == "dX3_of_G_e1":
        return np.array([
            c1 * d(0, 0) + d(1, 1),
            kap * d(0, 1) + d(1, 0),
            -kap * d(2, 0),
        ])
    raise ValueError(f"unknown potential variant {variant!r}")


def richardson(hs, values, orders=DEFAULT_ORDERS):
    """Eliminate the listed powers of h from ``values`` sampled at ``hs``.

    ``hs`` must decrease by a constant ratio.  Returns the table as a list
    of levels; the last entry of the last level is the best estimate.
    """
    hs = np.asarray(hs, dtype=float)
    vals = [np.asarray(v, dtype=float) for v in values]
    ratio = hs[0] / hs[1]
    if not np.allclose(hs[:-1] / hs[1:], ratio):
        raise ValueError("Richardson extrapolation needs a geometric step sequence")
    table = [vals]
    for p in orders:
        prev = table[-1]
        if len(prev) < 2:
            break
        f = ratio**p
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1.0) for i in range(len(prev) - 1)])
    return table


@dataclass
class JumpReport:
    """Extrapolated jump at a plane point with its analytic target.

    ``leading_order`` is the convergence order of the raw differences (the
    first uneliminated power, about 1).  ``observed_order`` is measured on
    the deepest Richardson column with at least three entries.
    """

    variant: str
    formula: str
    point: tuple
    computed: np.ndarray
    target: np.ndarray
    abs_error: float
    rel_error: float
    h_sequence: tuple
    raw_differences: list = field(repr=False)
    observed_order: float = float("nan")
    leading_order: float = float("nan")
    error_estimate: float = float("nan")
    converged: bool = True

    def row(self):
        return {
            "variant": self.variant,
            "formula": self.formula,
            "p1": self.point[0],
            "p2": self.point[1],
            **{f"target{i + 1}": float(self.target[i]) for i in range(3)},
            **{f"computed{i + 1}": float(self.computed[i]) for i in range(3)},
            "abs_error": self.abs_error,
            "rel_error": self.rel_error,
            "observed_order": self.observed_order,
            "leading_order": self.leading_order,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
        }


def _order(seq, ratio):
    """Decay order of successive differences in the last three entries of ``seq``."""
    if len(seq) < 3:
        return float("nan")
    a = np.linalg.norm(seq[-3] - seq[-2])
    b = np.linalg.norm(seq[-2] - seq[-1])
    if b == 0.0:
        return float("inf")
    return float(np.log(a / b) / np.log(ratio))


def _report(variant, formula, p, hs, diffs, target, orders):
    table = richardson(hs, diffs, orders)
    ratio = hs[0] / hs[1]
    best = table[-1][-1]
    deep = [lvl for lvl in table if len(lvl) >= 3][-1]
    spread = float(np.linalg.norm(table[-2][-1] - table[-2][-2])) if len(table) > 1 else float("nan")
    scale = float(np.linalg.norm(target))
    err = float(np.linalg.norm(best - target))
    rel = err / scale if scale > 0 else err
    ref = max(scale, float(np.linalg.norm(best)))
    observed = _order(deep, ratio)
    leading = _order(diffs, ratio)
    # tiny differences (symmetric zero jumps) carry no order information
    negligible = max(float(np.linalg.norm(d)) for d in diffs) <= 1e-9
    if negligible:
        observed = float("inf")  # differences at roundoff level: the jump is resolved exactly
    converged = bool(np.all(np.isfinite(best)) and (negligible or (observed >= 1.0 and spread <= 1e-2 * ref)))
    return JumpReport(variant, formula, tuple(float(v) for v in p), best, np.asarray(target, dtype=float), err, rel,
                      tuple(hs), list(diffs), observed, leading, spread, converged)


def _check_h(h_sequence):
    hs = tuple(float(h) for h in h_sequence)
    if len(hs) < 3:
        raise ValueError("need at least three step sizes")
    if any(b >= a for a, b in zip(hs[:-1], hs[1:])):
        raise ValueError("h_sequence must be strictly decreasing")
    if hs[-1] < 1e-3 * (1 - 1e-12):
        raise ValueError("smallest h must be at least 1e-3")
    return hs


def jump_estimate(params: LameParams, variant: str, g: BumpDensity, p, h_sequence=DEFAULT_H, *,
                  orders=DEFAULT_ORDERS, rule: PolarRule | None = None) -> JumpReport:
    """Extrapolated jump v(p + h e3) - v(p - h e3) as h -> 0 compared with its formula."""
    hs = _check_h(h_sequence)
    p = np.array([p[0], p[1], 0.0], dtype=float)
    diffs = []
    for h in hs:
        up = layer_potential(params, variant, g, p + h * E3, rule=rule)
        down = layer_potential(params, variant, g, p - h * E3, rule=rule)
        diffs.append(up - down)
    return _report(variant, VARIANTS[variant], p[:2], hs, diffs, analytic_jump(params, variant, g, p), orders)


def halfspace_vs_freespace_jump(params: LameParams, g: BumpDensity, depth: float, p=(0.0, 0.0),
                                h_sequence=DEFAULT_H, *, orders=DEFAULT_ORDERS,
                                rule: PolarRule | None = None) -> JumpReport:
    """Jump of the H(., ., e3) potential across the flat fault y3 = -depth.

    H - G is smooth there, so the target is the free-space formula g(p).
    """
    if depth <= 0:
        raise ValueError("fault must lie strictly below the surface")
    hs = _check_h(h_sequence)
    if depth - hs[0] <= 0:
        raise ValueError("evaluation points would leave the half-space")
    rule = rule or PolarRule()
    level = -float(depth)
    p3 = np.array([p[0], p[1], level])
    kern = lambda xx, yy: _halfspace_kernel_e3(params, xx, yy)  # noqa: E731
    diffs = []
    for h in hs:
        up = _potential(kern, g, p3 + h * E3, level, rule, h)
        down = _potential(kern, g, p3 - h * E3, level, rule, h)
        diffs.append(up - down)
    target = analytic_jump(params, "G_e3", g, p3)
    return _report("H_e3", "g", p3[:2], hs, diffs, target, orders)


# ---- Near-plane integral limits ---------------------------------------------

_TWO_PI_3 = 2 * math.pi / 3
_EIGHT_PI_15 = 8 * math.pi / 15
_TWO_PI_15 = 2 * math.pi / 15


def _q(num_z, num_r, power):
    return lambda r, z: z**num_z * r**num_r / (z * z + r * r) ** power


# Each row: (name, [(radial integrand in (rho, x3), angular weight), ...], target).
# Rows grouping several integrals report the member farthest from the target.
# "none" means a purely radial integral.
IDENTITIES = (
    ("z3_rho1_p5", [(_q(3, 1, 2.5), "one")], _TWO_PI_3),
    ("z1_rho3_p5_cos2", [(_q(1, 3, 2.5), "cos2")], _TWO_PI_3),
    ("z1_rho3_p5_sin2", [(_q(1, 3, 2.5), "sin2")], _TWO_PI_3),
    ("z1_rho3_p5_sincos", [(_q(1, 3, 2.5), "sincos")], 0.0),
    ("z3_rho2_p5", [(_q(3, 2, 2.5), "one")], 0.0),
    ("z1_rho4_p5", [(_q(1, 4, 2.5), "one")], 0.0),
    ("p7_odd_angles", [
        (_q(1, 4, 3.5), "cos"), (_q(1, 4, 3.5), "sin"),
        (_q(3, 2, 3.5), "cos"), (_q(3, 2, 3.5), "sin"),
        (_q(1, 5, 3.5), "sincos"), (_q(3, 3, 3.5), "sincos"),
    ], 0.0),
    ("z1_rho5_p7_cos2", [(_q(1, 5, 3.5), "cos2")], _EIGHT_PI_15),
    ("z1_rho5_p7_sin2", [(_q(1, 5, 3.5), "sin2")], _EIGHT_PI_15),
    ("z3_rho3_p7_cos2", [(_q(3, 3, 3.5), "cos2")], _TWO_PI_15),
    ("z3_rho3_p7_sin2", [(_q(3, 3, 3.5), "sin2")], _TWO_PI_15),
    ("p7_radial", [(_q(1, 6, 3.5), "none"), (_q(3, 4, 3.5), "none")], 0.0),
)

_ANGULAR = {
    "one": lambda th: np.ones_like(th),
    "cos2": lambda th: np.cos(th) ** 2,
    "sin2": lambda th: np.sin(th) ** 2,
    "sincos": lambda th: np.sin(th) * np.cos(th),
    "cos": np.cos,
    "sin": np.sin,
}


def _radial_nodes(z, R, n=24):
    edges = [0.0]
    r = z / 16
    while r < R:
        edges.append(r)
        r *= 2
    edges.append(R)
    t, w = np.polynomial.legendre.leggauss(n)
    rho = np.concatenate([lo + 0.5 * (hi - lo) * (t + 1) for lo, hi in zip(edges[:-1], edges[1:])])
    wr = np.concatenate([0.5 * (hi - lo) * w for lo, hi in zip(edges[:-1], edges[1:])])
    return rho, wr


def disk_integral(radial, angular, z, R=1.0, n_angle=64):
    """Polar integral over the disk of radius R at height z (angle by trapezoid)."""
    rho, wr = _radial_nodes(z, R)
    radial_part = float(np.sum(radial(rho, z) * wr))
    if angular == "none":
        return radial_part
    th = 2 * np.pi * np.arange(n_angle) / n_angle
    return radial_part * float(np.sum(_ANGULAR[angular](th))) * 2 * np.pi / n_angle


def radial_antiderivative_check(z=0.1, R=1.0):
    """Quadrature of x3^3 rho/(x3^2+rho^2)^(5/2) on [0, R] against its closed form."""
    computed = disk_integral(_q(3, 1, 2.5), "none", z, R)
    exact = (1.0 - z**3 / (R * R + z * z) ** 1.5) / 3.0
    return computed, exact


def extrapolate_to_zero(zs, values, n_terms=7):
    """Least-squares fit of c0 + sum_k (a_k z^k + b_k z^k log z), returning c0."""
    zs = np.asarray(zs, dtype=float)
    cols = [np.ones_like(zs)]
    k = 1
    while len(cols) < n_terms:
        cols.append(zs**k * np.log(zs))
        if len(cols) < n_terms:
            cols.append(zs**k)
        k += 1
    M = np.column_stack(cols)
    scale = np.abs(M).max(axis=0)
    coef, *_ = np.linalg.lstsq(M / scale, np.asarray(values, dtype=float), rcond=None)
    return float(coef[0] / scale[0])


DEFAULT_Z = tuple(0.05 * 0.7**k for k in range(14))


def integral_identities(zs=DEFAULT_Z, R=1.0):
    """The twelve limits as x3 -> 0+, each as (name, computed, target, abs error)."""
    rows = []
    for name, parts, target in IDENTITIES:
        best = None
        for radial, angular in parts:
            lim = extrapolate_to_zero(zs, [disk_integral(radial, angular, z, R) for z in zs])
            if best is None or abs(lim - target) > abs(best - target):
                best = lim
        rows.append((name, best, target, abs(best - target)))
    return rows
