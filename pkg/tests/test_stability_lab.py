import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultstab.fault_model import AdmissibleSet, SlipField, gradient_slip
from faultstab.kernels import LameParams
from faultstab.stability_lab import (
    AffineFunction,
    coefficient_identity_check,
    divergence_identity_check,
    lipschitz_scan,
    normal_jump_equation_residual,
    projector_lipschitz,
    rank_scan,
    remaining_system_residual,
    residual_growth,
    transport_operator,
    transport_triviality,
)

BOX = AdmissibleSet((0.1, -0.3, -3.0), (0.3, 0.3, -1.5), exclude_horizontal=True)
M0 = np.array([0.2, -0.1, -2.0])
STEPS = (0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1)


def _slip(basis, kind="free", seed=0):
    rng = np.random.default_rng(seed)
    shape = (2, basis.n1, basis.n2) if kind == "free" else (basis.n1, basis.n2)
    c = rng.normal(size=shape) / np.outer(np.arange(1, basis.n1 + 1), np.arange(1, basis.n2 + 1))
    if kind == "gradient":
        return gradient_slip(basis, c)
    return SlipField(basis, c, kind, (0.6, 0.8) if kind == "one-directional" else None)


def _rng(seed=7):
    return np.random.Generator(np.random.Philox(seed))


@pytest.fixture(scope="module")
def scan(small_model):
    return lipschitz_scan(small_model, BOX, _slip(small_model.basis), 20, rng=_rng(), directions_per_base=4)


class TestLipschitz:
    def test_positive(self, scan):
        assert scan.summary["min_ratio"] > 0
        assert np.all(scan.column("distance") > 0)

    def test_near_pairs_follow_jacobian(self, scan):
        assert scan.summary["max_rel_dev_from_directional"] <= 0.1
        assert scan.summary["max_rel_dev_min_near_vs_sigma_min"] <= 0.15

    def test_scaling(self, small_model, scan):
        h = _slip(small_model.basis).scaled(3.0)
        scaled = lipschitz_scan(small_model, BOX, h, 20, rng=_rng(), directions_per_base=4)
        assert np.allclose(scaled.column("ratio"), 3 * scan.column("ratio"), rtol=1e-10)

    def test_deterministic_under_threads(self, small_model, scan):
        again = lipschitz_scan(small_model, BOX, _slip(small_model.basis), 20, rng=_rng(), threads=4)
        assert again.rows == scan.rows

    def test_one_directional_tilted(self, small_model):
        res = lipschitz_scan(small_model, BOX, _slip(small_model.basis, "one-directional"), 10, rng=_rng(3))
        assert res.summary["min_ratio"] > 0

    def test_zero_slip(self, small_model):
        with pytest.raises(ValueError):
            lipschitz_scan(small_model, BOX, SlipField.zeros(small_model.basis), 10, rng=_rng())


class TestRank:
    def test_zero_slip_flags_everything(self, small_model):
        h = SlipField.zeros(small_model.basis)
        res = rank_scan(small_model, BOX, h, 3, rng=_rng())
        assert res.summary["flags"] == 3

    def test_condition_i(self, small_model):
        res = rank_scan(small_model, BOX, _slip(small_model.basis), 5, rng=_rng())
        assert res.summary["flags"] == 0

    def test_horizontal_smooth_slip(self, small_model):
        res = rank_scan(small_model, None, _slip(small_model.basis), extra_points=[(0, 0, -1.5), (0, 0, -3)])
        assert res.summary["flags"] == 0 and res.summary["samples"] == 2

    def test_needs_points(self, small_model):
        with pytest.raises(ValueError):
            rank_scan(small_model, None, _slip(small_model.basis))


class TestResidualGrowth:
    DIRS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0.3, -0.5, 0.8)]

    @pytest.mark.parametrize("kind", ["one-directional", "gradient"])
    def test_growth(self, model, kind):
        res = residual_growth(model, M0, _slip(model.basis, kind), self.DIRS, STEPS, rank=None)
        s = res.summary
        assert s["r0"] <= 1e-8 * s["data_norm"]
        assert s["min_slope"] > 0 and s["min_r2"] >= 0.99
        assert s["bound_violations"] == 0

    def test_bound(self, small_model):
        res = residual_growth(small_model, M0, _slip(small_model.basis, "one-directional"), [(0, 0, 1)], STEPS)
        assert np.all(res.column("residual") <= res.column("bound") * (1 + 1e-9) + 1e-15)

    def test_free_slip_warns(self, small_model):
        with pytest.warns(UserWarning):
            residual_growth(small_model, M0, _slip(small_model.basis), [(0, 0, 1)], STEPS)

    def test_negative_step(self, small_model):
        with pytest.raises(ValueError):
            residual_growth(small_model, M0, _slip(small_model.basis, "one-directional"), [(0, 0, 1)], (-1e-3, 0))


class TestProjector:
    def test_full_rank(self, small_model):
        rank = 2 * small_model.basis.size
        res = projector_lipschitz(small_model, M0, (1, 0, 0), (0.0, 1e-3, 1e-2, 1e-1), rank)
        assert res.rows[0][1] == 0.0
        assert res.summary["max_distance"] <= 1.0
        ratios = res.column("ratio")[1:]
        assert np.all(np.isfinite(ratios)) and ratios.max() / ratios.min() < 5

    def test_gap_violation_named(self, small_model):
        with pytest.raises(ValueError, match="gap"):
            projector_lipschitz(small_model, M0, (1, 0, 0), (1e-3,), 3, min_gap=1e6)


class TestTransport:
    def test_zero_vector(self):
        A, _ = transport_operator(AffineFunction(1, 0, 0), (1, 0), 0.0, 8)
        assert np.all(A @ np.zeros(64) == 0)

    def test_alpha_nonzero(self):
        f = AffineFunction(0, 0, 1)
        s64 = transport_triviality(f, (1, 0), 1.0, 64)
        s128 = transport_triviality(f, (1, 0), 1.0, 128)
        assert s64 > 0.1 and abs(s128 / s64 - 1) <= 0.2

    def test_alpha_zero(self):
        assert transport_triviality(AffineFunction(1, 0, 0), (1, 0), 0.0, 32) > 0

    def test_matches_dense_svd(self):
        f = AffineFunction(0.5, -0.2, 1.0)
        A, _ = transport_operator(f, (0.6, 0.8), 0.3, 12)
        s = np.linalg.svd(A.toarray(), compute_uv=False)[-1]
        assert transport_triviality(f, (0.6, 0.8), 0.3, 12) == pytest.approx(s, rel=1e-7)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            transport_operator(AffineFunction(1, 0, 0), (0, 0), 1.0, 8)
        with pytest.raises(ValueError):
            transport_operator(AffineFunction(0, 0, 0), (1, 0), 1.0, 8)


class TestIdentities:
    @settings(max_examples=100)
    @given(st.floats(0.05, 50), st.floats(0.05, 50))
    def test_coefficient_identity(self, lam, mu):
        assert coefficient_identity_check(lam, mu) <= 1e-12

    def test_divergence_constant_phi(self):
        zero = lambda y1, y2, d1=0, d2=0: np.zeros(np.broadcast(y1, y2).shape) + (d1 + d2 == 0)  # noqa: E731
        r, _ = divergence_identity_check(LameParams(1, 1), AffineFunction(1, 0.5, 0.2), rng=_rng(), phi=zero)
        assert r == 0.0

    def test_divergence_random(self):
        rng = _rng(11)
        for _ in range(20):
            r, skipped = divergence_identity_check(LameParams(1, 1), AffineFunction.random(rng), rng=rng)
            assert r <= 1e-8 and skipped == 0

    def test_skips_zero_set(self):
        r, skipped = divergence_identity_check(LameParams(1, 1), AffineFunction(0, 0, 0), rng=_rng())
        assert skipped == 200

    def test_lam_equals_two_mu_by_hand(self):
        # p = 2: div(f^2 grad phi) = f^2 lap phi + 2 f grad f . grad phi, with
        # f = y1 + 2, phi = y1^2 y2 at (0.5, 0.3): f = 2.5, grad phi = (0.3, 0.25), lap phi = 0.6
        f, lap, fx = 2.5, 0.6, 1.0
        lhs = f * f * lap + 2 * f * fx * 0.3
        # right side with kappa = 1/2 and p = 2
        rhs = 2 * f * (0.5 * f * lap + fx * 0.3)
        assert lhs == pytest.approx(rhs, rel=1e-15)
        phi = lambda y1, y2, d1=0, d2=0: {  # noqa: E731
            (0, 0): y1**2 * y2, (1, 0): 2 * y1 * y2, (0, 1): y1**2, (2, 0): 2 * y2, (0, 2): 0 * y2,
        }[(d1, d2)]
        r, _ = divergence_identity_check(LameParams(2, 1), AffineFunction(1, 0, 2), rng=_rng(), phi=phi)
        assert r <= 1e-14

    def test_divergence_against_differences(self):
        # left side by central differences of the flux |f|^p grad phi
        lam, mu = 1.0, 1.0
        p = 1 + 2 * mu / lam
        f = AffineFunction(0.7, -0.4, 0.3)
        phi1 = lambda y1, y2: np.cos(y1) * y2  # noqa: E731
        phi2 = lambda y1, y2: -np.sin(y1)  # noqa: E731
        flux1 = lambda y1, y2: np.abs(f(y1, y2)) ** p * phi1(y1, y2)  # noqa: E731
        flux2 = lambda y1, y2: np.abs(f(y1, y2)) ** p * phi2(y1, y2)  # noqa: E731
        y1, y2, h = 0.4, 0.2, 1e-5
        lhs = (flux1(y1 + h, y2) - flux1(y1 - h, y2) + flux2(y1, y2 + h) - flux2(y1, y2 - h)) / (2 * h)
        fv = f(y1, y2)
        lap = -np.sin(y1) * y2
        rhs = p * abs(fv) ** (2 * mu / lam) * np.sign(fv) * (
            lam / (lam + 2 * mu) * fv * lap + f.g1 * phi1(y1, y2) + f.g2 * phi2(y1, y2))
        assert lhs == pytest.approx(rhs, rel=1e-8)


class TestDegeneracyEquations:
    def test_zero_slip(self, small_model):
        h = SlipField.zeros(small_model.basis)
        y = np.linspace(-0.9, 0.9, 7)
        assert np.all(normal_jump_equation_residual(LameParams(1, 1), h, AffineFunction(1, 0, 0), y, y) == 0)
        assert np.all(remaining_system_residual(h, AffineFunction(1, 0, 0), 0.5, 1.2, 0.3, y, y) == 0)

    def test_one_mode_not_a_solution(self, small_model):
        h = SlipField.mode(small_model.basis, 0, 1, 1)
        g1, g2 = np.meshgrid(np.linspace(-0.95, 0.95, 21), np.linspace(-0.95, 0.95, 21))
        r = normal_jump_equation_residual(LameParams(1, 1), h, AffineFunction(1, 0, 0), g1, g2)
        assert np.abs(r).max() > 1e-2 * np.abs(h.evaluate(g1, g2)).max()

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-3, 3))
    def test_linear_in_slip(self, s):
        from faultstab.fault_model import SineBasis

        b = SineBasis(2, 2)
        h = _slip(b)
        f = AffineFunction(0.3, -1.0, 0.5)
        y1, y2 = np.array([0.1, -0.4]), np.array([0.7, 0.2])
        P = LameParams(1, 1)
        a = normal_jump_equation_residual(P, h.scaled(s), f, y1, y2)
        assert np.allclose(a, s * normal_jump_equation_residual(P, h, f, y1, y2), atol=1e-12)
