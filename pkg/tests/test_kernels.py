import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _fd import navier_residual, surface_traction
from faultstab import kernels
from faultstab.kernels import (
    KernelDomainError,
    LameParams,
    free_space_kernel,
    free_space_kernel_dy,
    free_space_kernel_dy3dy3,
    halfspace_kernel,
    halfspace_kernel_dy3,
    halfspace_tables,
    kelvin_tensor,
    mindlin_tensor,
    stress_tensor,
    traction_contract,
    traction_vector,
)

P = LameParams(1.0, 1.0)
Y = np.array([0.2, -0.1, -1.0])
N = np.array([0.3, 0.5, 0.8]) / np.linalg.norm([0.3, 0.5, 0.8])

coord = st.floats(-2.0, 2.0, allow_nan=False)
point = st.tuples(coord, coord, coord).map(np.array)
lame = st.tuples(st.floats(0.2, 5.0), st.floats(0.2, 5.0)).map(lambda t: LameParams(*t))


def _apart(x, y, r=0.2):
    return np.linalg.norm(x - y) > r


def _surface_H(params, y, n, dy3=False):
    # raw tables stay analytic slightly above x3 = 0, which the FD stencil needs
    def field(z):
        d1, d3 = halfspace_tables(params, z, y, dy3=True)
        return traction_contract(d3 if dy3 else d1, n, params.lam, params.mu)

    return field


def _slope(f, ts):
    vals = np.array([np.linalg.norm(f(t)) for t in ts])
    return np.polyfit(np.log(ts), np.log(vals), 1)[0]


class TestStress:
    def test_zero_gradient(self):
        assert np.all(stress_tensor(P, np.zeros((3, 3))) == 0)

    def test_identity_gradient(self):
        p = LameParams(2.0, 3.0)
        assert np.allclose(stress_tensor(p, np.eye(3)), (3 * 2 + 2 * 3) * np.eye(3))
        assert np.allclose(traction_vector(p, np.eye(3), [0, 0, 1]), [0, 0, 12])

    def test_rotation_is_stress_free(self):
        A = np.array([[0, 1, -2], [-1, 0, 3], [2, -3, 0.0]])
        assert np.allclose(stress_tensor(P, A), 0)

    @given(st.floats(-3, 3))
    def test_traction_linear_in_direction(self, a):
        G = np.arange(9.0).reshape(3, 3)
        e = np.array([0.1, 0.2, 0.3])
        assert np.allclose(traction_vector(P, G, a * e), a * traction_vector(P, G, e))


class TestKelvin:
    @settings(max_examples=50)
    @given(lame, point, point)
    def test_symmetric_and_swap_symmetric(self, p, x, y):
        if not _apart(x, y):
            return
        K = kelvin_tensor(p, x, y)
        assert np.allclose(K, K.T, rtol=1e-12, atol=1e-14)
        assert np.allclose(K, kelvin_tensor(p, y, x), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("col", range(3))
    def test_navier(self, col):
        x = np.array([0.7, 0.4, -0.3])
        assert navier_residual(lambda z: kelvin_tensor(P, z, Y)[:, col], x, 1.0, 1.0) <= 1e-6

    def test_coincident_points(self):
        with pytest.raises(KernelDomainError):
            kelvin_tensor(P, Y, Y)


class TestFreeSpaceKernel:
    @settings(max_examples=50)
    @given(point, point, st.floats(-2, 2), st.floats(-2, 2))
    def test_linear_in_direction(self, x, y, a, b):
        if not _apart(x, y):
            return
        v, w = np.array([1.0, 0.2, -0.3]), np.array([0.1, -1.0, 0.4])
        lhs = free_space_kernel(P, x, y, a * v + b * w)
        rhs = a * free_space_kernel(P, x, y, v) + b * free_space_kernel(P, x, y, w)
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-13)

    @settings(max_examples=30)
    @given(lame, st.floats(0.5, 4.0))
    def test_homogeneity(self, p, s):
        x, y = np.array([0.3, -0.2, 0.5]), np.array([-0.1, 0.4, -0.2])
        assert np.allclose(free_space_kernel(p, s * x, s * y, N), free_space_kernel(p, x, y, N) / s**2, rtol=1e-10)

    def test_quarter_ratio_far_away(self):
        d = np.array([1.0, 2.0, -0.5]) / np.linalg.norm([1.0, 2.0, -0.5])
        r = 1e3
        g1 = np.linalg.norm(free_space_kernel(P, Y + r * d, Y, N))
        g2 = np.linalg.norm(free_space_kernel(P, Y + 2 * r * d, Y, N))
        assert g2 / g1 == pytest.approx(0.25, rel=1e-12)

    @pytest.mark.parametrize("axis", range(3))
    def test_dy_matches_differences(self, axis):
        x = np.array([0.4, 0.3, 0.2])
        e = np.zeros(3)
        e[axis] = 1e-4
        fd = (free_space_kernel(P, x, Y + e, N) - free_space_kernel(P, x, Y - e, N)) / 2e-4
        assert np.allclose(free_space_kernel_dy(P, x, Y, N, axis), fd, rtol=1e-6, atol=1e-9)

    def test_dy3dy3_matches_differences(self):
        x = np.array([0.4, 0.3, 0.2])
        e = np.array([0, 0, 1e-4])
        fd = (free_space_kernel_dy(P, x, Y + e, N, 2) - free_space_kernel_dy(P, x, Y - e, N, 2)) / 2e-4
        assert np.allclose(free_space_kernel_dy3dy3(P, x, Y, N), fd, rtol=1e-6, atol=1e-9)

    @pytest.mark.parametrize("y1,y2,x3", [(0.3, -0.4, 0.2), (-0.1, 0.05, 0.01), (0.7, 0.2, -0.3)])
    def test_odd_part_on_axis(self, y1, y2, x3):
        lam = mu = 1.0
        A, B = 1 / (6 * np.pi), 1 / (12 * np.pi)
        r2 = y1 * y1 + y2 * y2
        y = np.array([y1, y2, 0.0])
        e1 = [1.0, 0.0, 0.0]
        odd = free_space_kernel(P, [0, 0, x3], y, e1) - free_space_kernel(P, [0, 0, -x3], y, e1)
        c1 = [0, 0, 2 * ((r2 + x3**2) * (A - B) * lam - 2 * B * mu * (x3**2 - 2 * y1**2 + y2**2)) * x3]
        c2 = [0, 0, 12 * mu * B * y1 * y2 * x3]
        c3 = [2 * x3 * ((A - B) * x3**2 + r2 * A + B * (5 * y1**2 - y2**2)) * mu, 12 * mu * B * y1 * y2 * x3, 0]
        expected = np.array([c1, c2, c3]).T * (r2 + x3**2) ** -2.5
        assert np.allclose(odd, expected, rtol=1e-12, atol=1e-14)

    def test_decay_exponent(self):
        d = np.array([0.6, -0.3, 0.74])
        d /= np.linalg.norm(d)
        s = _slope(lambda t: free_space_kernel(P, Y + t * d, Y, N), np.geomspace(10, 1e3, 9))
        assert s == pytest.approx(-2.0, rel=0.05)


class TestHalfspaceKernel:
    @pytest.mark.parametrize("col", range(3))
    @pytest.mark.parametrize("x", [(0.7, 0.4, -0.3), (-1.2, 0.5, -2.0), (0.1, 0.1, -0.6)])
    def test_navier_columns(self, col, x):
        x = np.array(x)
        h = np.linalg.norm(x - Y) / 200
        assert navier_residual(lambda z: halfspace_kernel(P, z, Y, N)[:, col], x, 1.0, 1.0, h) <= 1e-5
        assert navier_residual(lambda z: halfspace_kernel_dy3(P, z, Y, N)[:, col], x, 1.0, 1.0, h) <= 1e-5

    @pytest.mark.parametrize("dy3", [False, True])
    def test_traction_free_surface_grid(self, dy3):
        f = _surface_H(P, Y, N, dy3)
        worst = 0.0
        for x1 in np.linspace(-2, 2, 5):
            for x2 in np.linspace(-2, 2, 5):
                for col in range(3):
                    worst = max(worst, surface_traction(P, lambda z: f(z)[:, col], np.array([x1, x2, 0.0])))
        assert worst <= 1e-6

    @settings(max_examples=10, deadline=None)
    @given(lame, st.floats(0.3, 3.0))
    def test_traction_free_any_material(self, p, depth):
        y = np.array([0.1, 0.2, -depth])
        f = _surface_H(p, y, N)
        assert surface_traction(p, lambda z: f(z)[:, 0], np.array([0.4, -0.9, 0.0])) <= 1e-6

    def test_difference_with_free_space_is_bounded(self):
        y = np.array([0.0, 0.0, -1.0])
        d = np.array([0.3, 0.4, 0.5]) / np.linalg.norm([0.3, 0.4, 0.5])
        diffs = [np.linalg.norm(halfspace_kernel(P, y + r * d, y, N) - free_space_kernel(P, y + r * d, y, N))
                 for r in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert max(diffs) / min(diffs) < 1.1

    def test_dy3_central_difference(self):
        x = np.array([0.5, -0.2, 0.0])
        exact = halfspace_kernel_dy3(P, x, Y, N)
        fds = []
        for h in (2e-3, 1e-3):
            e = np.array([0, 0, h])
            fds.append((halfspace_kernel(P, x, Y + e, N) - halfspace_kernel(P, x, Y - e, N)) / (2 * h))
        errs = [np.linalg.norm(fd - exact) for fd in fds]
        assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.05)
        extrapolated = (4 * fds[1] - fds[0]) / 3
        assert np.linalg.norm(extrapolated - exact) < 1e-8 * np.linalg.norm(exact)

    @settings(max_examples=30)
    @given(st.floats(-2, 2), st.floats(-2, 2))
    def test_linear_in_normal(self, a, b):
        x = np.array([0.5, -0.2, 0.0])
        n2 = np.array([1.0, 0.0, 0.0])
        for f in (halfspace_kernel, halfspace_kernel_dy3):
            lhs = f(P, x, Y, a * N + b * n2)
            assert np.allclose(lhs, a * f(P, x, Y, N) + b * f(P, x, Y, n2), rtol=1e-12, atol=1e-13)

    def test_decay_exponent(self):
        s = _slope(lambda t: halfspace_kernel(P, [t, 0.0, 0.0], Y, N), np.geomspace(10, 1e3, 9))
        assert s == pytest.approx(-2.0, rel=0.05)
        bounded = [np.linalg.norm(halfspace_kernel(P, [t, 0.0, 0.0], Y, N)) * t * t for t in (1e2, 1e3, 1e4)]
        assert max(bounded) / min(bounded) < 1.05

    def test_mindlin_reduces_to_kelvin_near_source(self):
        y = np.array([0.0, 0.0, -5.0])
        x = y + np.array([1e-3, 0, 0])
        U, K = mindlin_tensor(P, x, y), kelvin_tensor(P, x, y)
        assert np.linalg.norm(U - K) < 1e-3 * np.linalg.norm(K)

    @pytest.mark.parametrize("y3", [0.0, 0.5])
    def test_source_above_surface(self, y3):
        with pytest.raises(KernelDomainError):
            halfspace_kernel(P, [0, 0, -1.0], [0, 0, y3], N)

    def test_receiver_above_surface(self):
        with pytest.raises(KernelDomainError):
            halfspace_kernel(P, [0, 0, 0.1], Y, N)

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            halfspace_kernel(P, [0, 0], Y, N)


def test_lame_validation():
    with pytest.raises(ValueError):
        LameParams(1.0, 0.0)
    assert LameParams(1.0, 1.0).kappa == pytest.approx(1 / 3)


@pytest.mark.skipif(len(kernels.available_backends()) < 2, reason="compiled backend not built")
def test_backends_agree():
    rng = np.random.default_rng(1)
    x = rng.uniform(-2, 2, (50, 3))
    x[:, 2] = -np.abs(x[:, 2])
    y = rng.uniform(-2, 2, (50, 3))
    y[:, 2] = -np.abs(y[:, 2]) - 0.1
    old = kernels.get_backend()
    out = {}
    try:
        for name in kernels.available_backends():
            kernels.set_backend(name)
            out[name] = (halfspace_kernel_dy3(P, x, y, N), free_space_kernel_dy3dy3(P, x, y, N), kelvin_tensor(P, x, y))
    finally:
        kernels.set_backend(old)
    a, b = out.values()
    for u, v in zip(a, b):
        assert np.allclose(u, v, rtol=1e-12, atol=1e-14)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, FAULTSTAB_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "from faultstab import kernels; print(kernels.get_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
