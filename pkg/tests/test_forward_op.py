import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultstab.fault_model import FaultGeometry, GeometryError, Rect, SineBasis, SlipField, gradient_slip
from faultstab.forward_op import (
    CacheError,
    QuadratureRule,
    assemble,
    jacobian_fd_errors,
    jacobian_min_singular_value,
    jacobian_singular_values,
    min_residual,
    projector_distance,
    range_projector,
    read_operator_cache,
    write_operator_cache,
)

M0 = np.array([0.2, -0.1, -2.0])


def _smooth_slip(basis, seed=0):
    c = np.random.default_rng(seed).normal(size=(2, basis.n1, basis.n2))
    p = np.arange(1, basis.n1 + 1)[:, None]
    q = np.arange(1, basis.n2 + 1)[None, :]
    return SlipField(basis, c / (p * q))


@pytest.fixture(scope="module")
def op(model):
    return model.operator(M0)


class TestAssemble:
    def test_zero_slip(self, model, op):
        assert np.all(op.apply(SlipField.zeros(model.basis)) == 0)

    def test_doubling(self, model, op):
        h = _smooth_slip(model.basis)
        assert np.allclose(op.apply(h.scaled(2.0)), 2 * op.apply(h), rtol=1e-14, atol=0)

    def test_agrees_with_phi(self, model, op):
        h = _smooth_slip(model.basis, 3)
        a, b = op.apply(h), model.phi(M0, h)
        assert model.norm(a - b) <= 1e-13 * model.norm(b)

    @pytest.mark.parametrize("m", [M0, (0.0, 0.0, -1.5), (-0.3, 0.4, -3.0)])
    def test_quadrature_self_convergence(self, model, m):
        h = _smooth_slip(model.basis, 1)
        a = model.phi(m, h)
        b = model.with_quadrature(48).phi(m, h)
        assert model.norm(a - b) / model.norm(b) <= 1e-8

    def test_depth_violation_before_kernels(self, model):
        with pytest.raises(GeometryError):
            model.operator((0.0, 0.0, -0.2))

    def test_low_quadrature_order(self, model, unit_lame):
        q = QuadratureRule.gauss_legendre(Rect(), 3)
        with pytest.raises(ValueError):
            assemble(unit_lame, FaultGeometry(0, 0, -2), model.grid, q, model.basis)

    def test_rectangle_mismatch(self, model, unit_lame):
        with pytest.raises(ValueError):
            assemble(unit_lame, FaultGeometry(0, 0, -2, Rect(-1, 1, -1, 2)), model.grid, model.quad, model.basis)

    def test_compactness_signature(self, unit_lame, model):
        big = assemble(unit_lame, FaultGeometry(*M0), model.grid, model.quad, SineBasis(5, 5))
        s = big.singular_values()[:20]
        # geometric envelope: s_k <= s_0 * r^k for some r < 1
        rates = (s[1:] / s[0]) ** (1 / np.arange(1, s.size))
        assert np.max(rates[5:]) < 0.95
        k = np.arange(s.size)
        fit = np.polyfit(k, np.log(s), 1)
        resid = np.log(s) - np.polyval(fit, k)
        r2 = 1 - resid.var() / np.log(s).var()
        assert fit[0] < -0.15 and r2 > 0.9

    def test_gradient_columns(self, model):
        op = model.operator(M0, include_gradients=True)
        g = gradient_slip(model.basis, np.random.default_rng(4).normal(size=(3, 3)))
        assert op.shape[1] == 3 * model.basis.size
        a, b = op.apply(g), model.phi(M0, g)
        assert model.norm(a - b) <= 1e-13 * model.norm(b)
        with pytest.raises(ValueError):
            model.operator(M0).apply(g)


class TestJacobian:
    def test_central_differences(self, model):
        h = _smooth_slip(model.basis, 5)
        errs = jacobian_fd_errors(model, M0, h, (1e-2, 1e-3))
        assert np.all(errs[1] <= 1e-5)
        assert np.all(np.log10(errs[0] / errs[1]) >= 1.9)

    def test_horizontal_geometry(self, model):
        h = _smooth_slip(model.basis, 6)
        J = model.jacobian((0.0, 0.0, -2.0), h)
        assert model.norm(J.da) > 0
        assert np.all(jacobian_fd_errors(model, (0.0, 0.0, -2.0), h, (1e-3,)) <= 1e-5)

    @settings(max_examples=5, deadline=None)
    @given(st.floats(0.1, 5.0))
    def test_scaling(self, small_model, c):
        h = _smooth_slip(small_model.basis, 7)
        J1 = small_model.jacobian(M0, h)
        J2 = small_model.jacobian(M0, h.scaled(c))
        w = small_model.grid.data_weights
        assert np.allclose(J2.columns, c * J1.columns, rtol=1e-12, atol=0)
        assert np.allclose(jacobian_singular_values(J2, w), c * jacobian_singular_values(J1, w), rtol=1e-12)

    def test_zero_slip(self, small_model):
        J = small_model.jacobian(M0, SlipField.zeros(small_model.basis))
        assert np.all(jacobian_singular_values(J, small_model.grid.data_weights) == 0)

    def test_one_directional_tilted_full_rank(self, small_model):
        b = small_model.basis
        h = SlipField(b, np.ones((b.n1, b.n2)), "one-directional", (0.6, 0.8))
        J = small_model.jacobian((0.2, 0.1, -2.0), h)
        assert jacobian_min_singular_value(J, small_model.grid.data_weights) > 0

    def test_directional(self, small_model):
        J = small_model.jacobian(M0, _smooth_slip(small_model.basis))
        q = np.array([0.3, -1.0, 2.0])
        assert np.allclose(J.directional(q), 0.3 * J.da - J.db + 2 * J.dd)


class TestProjector:
    def test_idempotent_and_self_adjoint(self, op):
        P = range_projector(op, rank=12)
        Pm = P.matrix()
        W = np.diag(op.grid.data_weights)
        assert np.linalg.norm(Pm @ Pm - Pm, 2) <= 1e-10
        # adjoint in the weighted inner product is W^{-1} P^T W
        assert np.linalg.norm(np.linalg.solve(W, Pm.T @ W) - Pm, 2) <= 1e-10

    def test_fixes_columns_at_full_rank(self, op):
        P = range_projector(op, rank=op.shape[1])
        col = op.matrix[:, 0]
        assert op.grid.norm(P.apply(col) - col) <= 1e-10 * op.grid.norm(col)
        assert np.allclose(P.apply(P.apply(col)), P.apply(col), rtol=0, atol=1e-12 * np.abs(col).max())

    def test_rank_too_large(self, op):
        with pytest.raises(ValueError):
            range_projector(op, rank=op.shape[1] + 1)

    def test_rank_and_threshold_conflict(self, op):
        with pytest.raises(ValueError):
            range_projector(op, rank=3, rel_tol=1e-3)

    def test_residual_in_range(self, model, op):
        d = op.apply(_smooth_slip(model.basis))
        assert min_residual(op, d, rank=op.shape[1]) <= 1e-8 * model.norm(d)

    def test_residual_orthogonal_data(self, op):
        rng = np.random.default_rng(0)
        P = range_projector(op, rank=6)
        d = P.complement(rng.normal(size=op.shape[0]))
        assert min_residual(P, d) == pytest.approx(op.grid.norm(d), rel=1e-10)

    def test_residual_monotone_in_rank(self, op):
        d = np.random.default_rng(1).normal(size=op.shape[0])
        r = [min_residual(op, d, rank=k) for k in range(0, op.shape[1] + 1)]
        assert all(a >= b - 1e-12 for a, b in zip(r, r[1:]))

    def test_residual_decreases_to_zero(self, model, op):
        d = op.apply(_smooth_slip(model.basis, 2))
        r = [min_residual(op, d, rank=k) for k in (2, 6, 12, 18)]
        assert r[-1] <= 1e-8 * model.norm(d) and r[0] > r[-1]

    def test_dimension_mismatch(self, op):
        with pytest.raises(ValueError):
            min_residual(op, np.ones(5), rank=2)

    def test_distance(self, model, op):
        P = range_projector(op, rank=8)
        assert projector_distance(P, P) <= 1e-7
        Q = range_projector(model.operator(M0 + np.array([0, 0, 1e-3])), rank=8)
        R = range_projector(model.operator(M0 + np.array([0, 0, 2e-3])), rank=8)
        d1, d2 = projector_distance(P, Q), projector_distance(P, R)
        assert 0 < d1 < d2 <= 1.0
        assert d2 / d1 == pytest.approx(2.0, rel=0.05)


class TestCache:
    def test_roundtrip(self, tmp_path, op):
        path = tmp_path / "op.fstb"
        meta = {"geometry_hash": "abc", "grid_hash": op.grid.key()}
        write_operator_cache(path, op.matrix, meta)
        A, got = read_operator_cache(path, meta)
        assert A.tobytes() == np.ascontiguousarray(op.matrix).tobytes()
        assert got == meta
        raw = path.read_bytes()
        assert raw[:4] == b"FSTB"
        assert int.from_bytes(raw[8:16], "little") == op.shape[0]
        assert int.from_bytes(raw[16:24], "little") == op.shape[1]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "op.fstb"
        write_operator_cache(path, np.eye(2), {})
        raw = bytearray(path.read_bytes())
        raw[:4] = b"XXXX"
        path.write_bytes(bytes(raw))
        with pytest.raises(CacheError):
            read_operator_cache(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "op.fstb"
        write_operator_cache(path, np.eye(3), {})
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CacheError):
            read_operator_cache(path)

    def test_sidecar_mismatch(self, tmp_path):
        path = tmp_path / "op.fstb"
        write_operator_cache(path, np.eye(2), {"grid_hash": "a"})
        with pytest.raises(CacheError):
            read_operator_cache(path, {"grid_hash": "b"})

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "op.fstb"
        write_operator_cache(path, np.eye(2), {})
        (tmp_path / "op.fstb.json").unlink()
        with pytest.raises(CacheError):
            read_operator_cache(path)
