"""Generate closed-form kernel derivative tables for faultstab.

Writes two modules with identical call signatures:

    src/faultstab/kernels/_kernels_py.py   numpy, vectorised over points
    src/faultstab/kernels/_kernels_c.pyx   Cython, explicit loop, nogil

Every generated function has the signature ``fn(x, y, lam, mu) -> ndarray``
with ``x`` and ``y`` of shape (N, 3).  Output layouts:

    kelvin          (N, 3, 3)        K_ij
    kelvin_d1       (N, 3, 3, 3)     d/dy_k K_ij
    kelvin_d2       (N, 3, 3, 3, 3)  d/dy_a d/dy_k K_ij      [i, j, a, k]
    kelvin_d3_33    (N, 3, 3, 3)     d2/dy_3^2 d/dy_k K_ij
    mindlin         (N, 3, 3)        U_ij, force at y along j, displacement at x along i
    mindlin_d1      (N, 3, 3, 3)     d/dy_k U_ij
    mindlin_d1_3    (N, 3, 3, 3)     d/dy_3 d/dy_k U_ij

Run from the repository root:  python tools/gen_kernels.py
"""
from __future__ import annotations

import itertools
import pathlib
import sys

import sympy as sp
from sympy.printing.c import C99CodePrinter
from sympy.printing.numpy import NumPyPrinter

ROOT = pathlib.Path(__file__).resolve().parents[1]
OUT_DIR = ROOT / "src" / "faultstab" / "kernels"

x1, x2, x3, y1, y2, y3 = sp.symbols("x1 x2 x3 y1 y2 y3", real=True)
lam, mu = sp.symbols("lam mu", positive=True)
XS = (x1, x2, x3)
YS = (y1, y2, y3)


def kelvin_matrix():
    r = [XS[i] - YS[i] for i in range(3)]
    rr = sp.sqrt(r[0] ** 2 + r[1] ** 2 + r[2] ** 2)
    c = 1 / (8 * sp.pi * mu * (lam + 2 * mu))
    return sp.Matrix(
        3, 3,
        lambda i, j: c * ((lam + mu) * r[i] * r[j] / rr**2 + (lam + 3 * mu) * sp.KroneckerDelta(i, j)) / rr,
    )


def mindlin_matrix():
    # classical form uses depth z = -x3 (positive down) and source depth c = -y3
    nu = lam / (2 * (lam + mu))
    X = x1 - y1
    Y = x2 - y2
    z = -x3
    c = -y3
    R1 = sp.sqrt(X**2 + Y**2 + (z - c) ** 2)
    R2 = sp.sqrt(X**2 + Y**2 + (z + c) ** 2)
    C = 1 / (16 * sp.pi * mu * (1 - nu))
    k = 4 * (1 - nu) * (1 - 2 * nu)

    def horizontal(X, Y):
        ux = C * (
            (3 - 4 * nu) / R1 + 1 / R2 + X**2 / R1**3 + (3 - 4 * nu) * X**2 / R2**3
            + 2 * c * z / R2**3 * (1 - 3 * X**2 / R2**2)
            + k / (R2 + z + c) * (1 - X**2 / (R2 * (R2 + z + c)))
        )
        uy = C * X * Y * (1 / R1**3 + (3 - 4 * nu) / R2**3 - 6 * c * z / R2**5 - k / (R2 * (R2 + z + c) ** 2))
        uz = C * X * (
            (z - c) / R1**3 + (3 - 4 * nu) * (z - c) / R2**3
            - 6 * c * z * (z + c) / R2**5 + k / (R2 * (R2 + z + c))
        )
        return ux, uy, uz

    def radial(X):
        return C * X * (
            (z - c) / R1**3 + (3 - 4 * nu) * (z - c) / R2**3
            + 6 * c * z * (z + c) / R2**5 - k / (R2 * (R2 + z + c))
        )

    fx = horizontal(X, Y)
    swapped = horizontal(Y, X)
    fy = (swapped[1], swapped[0], swapped[2])
    uz_v = C * (
        (3 - 4 * nu) / R1 + (8 * (1 - nu) ** 2 - (3 - 4 * nu)) / R2 + (z - c) ** 2 / R1**3
        + ((3 - 4 * nu) * (z + c) ** 2 - 2 * c * z) / R2**3 + 6 * c * z * (z + c) ** 2 / R2**5
    )
    fz = (radial(X), radial(Y), uz_v)
    depth_frame = sp.Matrix([[fx[i], fy[i], fz[i]] for i in range(3)])
    flip = sp.diag(1, 1, -1)
    return flip * depth_frame * flip


def tables():
    K = kelvin_matrix()
    U = mindlin_matrix()
    out = {}
    out["kelvin"] = ((3, 3), {(i, j): K[i, j] for i in range(3) for j in range(3)})
    dK = {(i, j, k): sp.diff(K[i, j], YS[k]) for i, j, k in itertools.product(range(3), repeat=3)}
    out["kelvin_d1"] = ((3, 3, 3), dK)
    d2 = {}
    for i, j, a, k in itertools.product(range(3), repeat=4):
        if a <= k:
            d2[(i, j, a, k)] = sp.diff(dK[(i, j, k)], YS[a])
    for i, j, a, k in itertools.product(range(3), repeat=4):
        if a > k:
            d2[(i, j, a, k)] = ("alias", (i, j, k, a))
    out["kelvin_d2"] = ((3, 3, 3, 3), d2)
    out["kelvin_d3_33"] = ((3, 3, 3), {key: sp.diff(v, y3, 2) for key, v in dK.items()})
    out["mindlin"] = ((3, 3), {(i, j): U[i, j] for i in range(3) for j in range(3)})
    dU = {(i, j, k): sp.diff(U[i, j], YS[k]) for i, j, k in itertools.product(range(3), repeat=3)}
    out["mindlin_d1"] = ((3, 3, 3), dU)
    out["mindlin_d1_3"] = ((3, 3, 3), {key: sp.diff(v, y3) for key, v in dU.items()})
    return out


def _split(entries):
    keys, exprs, aliases = [], [], {}
    for key, val in entries.items():
        if isinstance(val, tuple) and val and val[0] == "alias":
            aliases[key] = val[1]
            continue
        val = sp.sympify(val)
        if val == 0:
            continue
        keys.append(key)
        exprs.append(val)
    return keys, exprs, aliases


class _Np(NumPyPrinter):
    def __init__(self):
        super().__init__({"fully_qualified_modules": False, "inline": True})


def emit_numpy(name, shape, entries):
    keys, exprs, aliases = _split(entries)
    repl, reduced = sp.cse(exprs, symbols=sp.numbered_symbols("t"), optimizations="basic")
    pr = _Np()
    lines = [
        f"def {name}(x, y, lam, mu):",
        "    x = np.asarray(x, dtype=float)",
        "    y = np.asarray(y, dtype=float)",
        "    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]",
        "    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]",
        f"    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + {shape!r})",
    ]
    for sym, e in repl:
        lines.append(f"    {sym} = {pr.doprint(e)}")
    for key, e in zip(keys, reduced):
        idx = ", ".join(str(k) for k in key)
        lines.append(f"    out[..., {idx}] = {pr.doprint(e)}")
    for key, src in aliases.items():
        lines.append(f"    out[..., {', '.join(map(str, key))}] = out[..., {', '.join(map(str, src))}]")
    lines.append("    return out")
    return "\n".join(lines)


def emit_cython(name, shape, entries):
    keys, exprs, aliases = _split(entries)
    repl, reduced = sp.cse(exprs, symbols=sp.numbered_symbols("t"), optimizations="basic")
    pr = C99CodePrinter()
    ncomp = 1
    for s in shape:
        ncomp *= s

    def flat(key):
        f = 0
        for k, s in zip(key, shape):
            f = f * s + k
        return f

    temps = [str(sym) for sym, _ in repl]
    lines = [
        "@cython.boundscheck(False)",
        "@cython.wraparound(False)",
        f"def {name}(x, y, double lam, double mu):",
        "    cdef const double[:, ::1] xv",
        "    cdef const double[:, ::1] yv",
        "    xv, yv, shape = _prepare(x, y)",
        "    cdef Py_ssize_t n, npts = xv.shape[0]",
        f"    res = np.zeros((npts, {ncomp}))",
        "    cdef double[:, ::1] o = res",
        "    cdef double x1, x2, x3, y1, y2, y3",
    ]
    for chunk in range(0, len(temps), 8):
        lines.append("    cdef double " + ", ".join(temps[chunk:chunk + 8]))
    lines += [
        "    with nogil:",
        "        for n in range(npts):",
        "            x1 = xv[n, 0]; x2 = xv[n, 1]; x3 = xv[n, 2]",
        "            y1 = yv[n, 0]; y2 = yv[n, 1]; y3 = yv[n, 2]",
    ]
    for sym, e in repl:
        lines.append(f"            {sym} = {pr.doprint(e)}")
    for key, e in zip(keys, reduced):
        lines.append(f"            o[n, {flat(key)}] = {pr.doprint(e)}")
    for key, src in aliases.items():
        lines.append(f"            o[n, {flat(key)}] = o[n, {flat(src)}]")
    lines.append(f"    return res.reshape(shape + {shape!r})")
    return "\n".join(lines)


PY_HEADER = '''"""Generated by tools/gen_kernels.py; do not edit by hand."""
import numpy as np
from numpy import pi, sqrt

'''

PYX_HEADER = '''# cython: language_level=3, cdivision=True
# Generated by tools/gen_kernels.py; do not edit by hand.
import numpy as np
cimport cython
from libc.math cimport sqrt, pow, M_PI, M_1_PI, M_2_PI


def _prepare(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    xb = np.ascontiguousarray(np.broadcast_to(x, shape + (3,)).reshape(-1, 3))
    yb = np.ascontiguousarray(np.broadcast_to(y, shape + (3,)).reshape(-1, 3))
    return xb, yb, shape

'''


def main():
    tabs = tables()
    py_parts, pyx_parts = [PY_HEADER], [PYX_HEADER]
    for name, (shape, entries) in tabs.items():
        print("generating", name, file=sys.stderr)
        py_parts.append(emit_numpy(name, shape, entries) + "\n\n")
        pyx_parts.append(emit_cython(name, shape, entries) + "\n\n")
    (OUT_DIR / "_kernels_py.py").write_text("\n".join(py_parts).rstrip() + "\n")
    (OUT_DIR / "_kernels_c.pyx").write_text("\n".join(pyx_parts).rstrip() + "\n")


if __name__ == "__main__":
    main()
