"""Finite-difference oracles shared by the kernel tests and the acceptance suite."""
import numpy as np

from faultstab.kernels import stress_tensor

# fourth-order central stencils
_D1 = (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, np.array([-2, -1, 0, 1, 2]))
_D2 = (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, np.array([-2, -1, 0, 1, 2]))


def grad(field, x, h=1e-3):
    """Jacobian d field_i / dx_j of a vector field R^3 -> R^n."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        w, k = _D1
        cols.append(sum(wi * field(x + ki * e) for wi, ki in zip(w, k)) / h)
    return np.stack(cols, axis=-1)


def hessian(field, x, h=1e-2):
    """Second derivatives H[..., a, b] = d2 field / dx_a dx_b."""
    x = np.asarray(x, dtype=float)
    out = None
    for a in range(3):
        for b in range(a, 3):
            ea = np.zeros(3)
            ea[a] = h
            eb = np.zeros(3)
            eb[b] = h
            if a == b:
                w, k = _D2
                val = sum(wi * field(x + ki * ea) for wi, ki in zip(w, k)) / h**2
            else:
                w, k = _D1
                val = sum(wi * wj * field(x + ki * ea + kj * eb)
                          for wi, ki in zip(w, k) for wj, kj in zip(w, k)) / h**2
            if out is None:
                out = np.zeros(np.shape(val) + (3, 3))
            out[..., a, b] = val
            out[..., b, a] = val
    return out


def navier_residual(field, x, lam, mu, h=1e-2):
    """Relative residual of mu lap u + (lam + mu) grad div u for a field u(x)."""
    Hs = hessian(field, x, h)  # [i, a, b]
    lap = np.trace(Hs, axis1=-2, axis2=-1)
    grad_div = np.einsum("kki->i", Hs)
    a = mu * lap
    b = (lam + mu) * grad_div
    return np.linalg.norm(a + b) / (np.linalg.norm(a) + np.linalg.norm(b))


def surface_traction(params, field, x, h=1e-3):
    """Relative size of sigma(u) e3 at x compared with the full stress."""
    G = grad(field, x, h)
    S = stress_tensor(params, G)
    return np.linalg.norm(S @ np.array([0.0, 0.0, 1.0])) / np.linalg.norm(S)
