"""Closed-form elastostatic kernels.

Kelvin's free-space tensor, the stress and traction operators, the
free-space dislocation kernel ``G`` and its half-space, traction-free
counterpart ``H`` built from Mindlin's point-force solution.

All kernel functions broadcast over leading axes: ``x`` and ``y`` have
shape ``(..., 3)`` and the result has shape ``(..., 3, 3)`` with row index
the receiver component and column index the source direction.

The derivative tables come from :mod:`._kernels_c` (compiled) when it is
importable and from :mod:`._kernels_py` otherwise.  Set the environment
variable ``FAULTSTAB_BACKEND=numpy`` to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

__all__ = [
    "KernelDomainError",
    "LameParams",
    "available_backends",
    "free_space_kernel",
    "free_space_kernel_dy",
    "free_space_kernel_dy3dy3",
    "get_backend",
    "halfspace_kernel",
    "halfspace_kernel_dy3",
    "kelvin_tensor",
    "mindlin_tensor",
    "set_backend",
    "stress_tensor",
    "traction_contract",
    "traction_vector",
]

_BACKENDS = {"numpy": _kernels_py}
if _kernels_c is not None:
    _BACKENDS["cython"] = _kernels_c

_impl = _kernels_py
_backend_name = "numpy"


def available_backends():
    return sorted(_BACKENDS)


def get_backend():
    return _backend_name


def set_backend(name):
    """Select the implementation of the derivative tables ("cython" or "numpy")."""
    global _impl, _backend_name
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    _impl = _BACKENDS[name]
    _backend_name = name


_requested = os.environ.get("FAULTSTAB_BACKEND", "").strip().lower()
if _requested:
    set_backend(_requested)
elif "cython" in _BACKENDS:
    set_backend("cython")


class KernelDomainError(ValueError):
    """Raised when a kernel is evaluated outside its domain."""


@dataclass(frozen=True)
class LameParams:
    """The two Lamé constants of an isotropic medium."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and np.isfinite(self.mu)) or self.lam <= 0 or self.mu <= 0:
            raise ValueError(f"Lamé constants must be positive, got lam={self.lam}, mu={self.mu}")

    @property
    def poisson(self):
        return self.lam / (2.0 * (self.lam + self.mu))

    @property
    def kappa(self):
        """lam / (lam + 2 mu), the factor appearing in the normal jump formulas."""
        return self.lam / (self.lam + 2.0 * self.mu)


def _points(x, y, *, halfspace=False):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != (3,) or y.shape[-1:] != (3,):
        raise ValueError("points must have a trailing axis of length 3")
    d2 = np.sum((x - y) ** 2, axis=-1)
    if np.any(d2 <= 0.0):
        raise KernelDomainError("kernel evaluated at coincident points x == y")
    if halfspace:
        if np.any(y[..., 2] >= 0.0):
            raise KernelDomainError("source point must lie strictly below the surface (y3 < 0)")
        if np.any(x[..., 2] > 0.0):
            raise KernelDomainError("receiver point must lie in the closed lower half-space (x3 <= 0)")
    return x, y


def stress_tensor(params: LameParams, grad_u):
    """Stress from a displacement gradient ``grad_u[..., i, j] = du_i/dx_j``."""
    grad_u = np.asarray(grad_u, dtype=float)
    tr = np.trace(grad_u, axis1=-2, axis2=-1)
    return params.lam * tr[..., None, None] * np.eye(3) + params.mu * (grad_u + np.swapaxes(grad_u, -1, -2))


def traction_vector(params: LameParams, grad_u, e):
    """Stress vector sigma(u) e."""
    return np.einsum("...ij,...j->...i", stress_tensor(params, grad_u), np.asarray(e, dtype=float))


def traction_contract(dT, v, lam, mu):
    """Apply the source-side traction operator to a derivative table.

    ``dT[..., i, l, k]`` is d/dy_k of the displacement component ``l`` at
    ``y`` of the field labelled by ``i``.  Returns ``out[..., i, l]``, the
    component ``l`` of the stress vector of field ``i`` along ``v``.
    """
    v = np.asarray(v, dtype=float)
    div = np.trace(dT, axis1=-2, axis2=-1)
    out = lam * div[..., :, None] * v[..., None, :]
    out = out + mu * (np.einsum("...ilk,...k->...il", dT, v) + np.einsum("...ikl,...k->...il", dT, v))
    return out


def kelvin_tensor(params: LameParams, x, y):
    x, y = _points(x, y)
    return _impl.kelvin(x, y, params.lam, params.mu)


def mindlin_tensor(params: LameParams, x, y):
    """Half-space point-force tensor: ``U[..., i, j]`` is u_i at x for a unit force e_j at y."""
    x, y = _points(x, y, halfspace=True)
    return _impl.mindlin(x, y, params.lam, params.mu)


def free_space_kernel(params: LameParams, x, y, v):
    """Dislocation kernel G(x, y, v) = (T_v(y) K(x, y))^T."""
    x, y = _points(x, y)
    return traction_contract(_impl.kelvin_d1(x, y, params.lam, params.mu), v, params.lam, params.mu)


def free_space_kernel_dy(params: LameParams, x, y, v, axis):
    """d/dy_axis of G(x, y, v), axis in {0, 1, 2}."""
    x, y = _points(x, y)
    d2 = _impl.kelvin_d2(x, y, params.lam, params.mu)[..., axis, :]
    return traction_contract(d2, v, params.lam, params.mu)


def free_space_kernel_dy3dy3(params: LameParams, x, y, v):
    """Second derivative of G(x, y, v) in y3."""
    x, y = _points(x, y)
    return traction_contract(_impl.kelvin_d3_33(x, y, params.lam, params.mu), v, params.lam, params.mu)


def halfspace_kernel(params: LameParams, x, y, n):
    """Traction-free dislocation kernel H(x, y, n) of the lower half-space."""
    x, y = _points(x, y, halfspace=True)
    return traction_contract(_impl.mindlin_d1(x, y, params.lam, params.mu), n, params.lam, params.mu)


def halfspace_kernel_dy3(params: LameParams, x, y, n):
    """d/dy3 of H(x, y, n), from the analytic second derivatives of Mindlin's tensor."""
    x, y = _points(x, y, halfspace=True)
    return traction_contract(_impl.mindlin_d1_3(x, y, params.lam, params.mu), n, params.lam, params.mu)


def halfspace_tables(params: LameParams, x, y, *, dy3=False):
    """Raw derivative tables for repeated contraction (assembly hot path).

    No domain checks; callers guarantee y3 < 0 and x != y.
    """
    d1 = _impl.mindlin_d1(x, y, params.lam, params.mu)
    if not dy3:
        return d1, None
    return d1, _impl.mindlin_d1_3(x, y, params.lam, params.mu)


def free_space_tables(params: LameParams, x, y, which):
    """Raw Kelvin derivative table by name, without domain checks."""
    return getattr(_impl, which)(x, y, params.lam, params.mu)
