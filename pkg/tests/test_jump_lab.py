import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultstab.fault_model import BumpDensity
from faultstab.jump_lab import (
    IDENTITIES,
    SECOND_ORDER,
    VARIANTS,
    PolarRule,
    analytic_jump,
    disk_integral,
    extrapolate_to_zero,
    halfspace_vs_freespace_jump,
    integral_identities,
    jump_estimate,
    layer_potential,
    radial_antiderivative_check,
    richardson,
)
from faultstab.kernels import LameParams

P = LameParams(1.0, 1.0)
BUMP = BumpDensity((0.0, 0.0), (1.0, 0.8), (0.3, -0.7, 0.5))
E1_BUMP = BumpDensity((0.0, 0.0), (1.0, 1.0), (1.0, 0.0, 0.0))
POINTS = [(0.0, 0.0), (0.35, -0.2), (0.7, 0.3)]


class SineDensity:
    """sin(pi u1) sin(pi u2) on [-1, 1]^2: continuous, but with kinks at the edge."""

    center = (0.0, 0.0)
    radii = (math.sqrt(2), math.sqrt(2))

    def __init__(self, amplitude):
        self.amplitude = amplitude

    def scalar(self, y1, y2):
        y1, y2 = np.asarray(y1), np.asarray(y2)
        inside = (abs(y1) <= 1) & (abs(y2) <= 1)
        return np.where(inside, np.sin(np.pi * (y1 + 1) / 2) * np.sin(np.pi * (y2 + 1) / 2), 0.0)

    def scalar_gradient(self, y1, y2):
        # targets are formed in the tests; derivatives are never compared
        return np.zeros(2)

    def scalar_hessian(self, y1, y2):
        return np.zeros((2, 2))

    def __call__(self, y1, y2):
        return self.scalar(y1, y2)[..., None] * np.asarray(self.amplitude)


@pytest.mark.parametrize("variant", sorted(VARIANTS))
@pytest.mark.parametrize("p", POINTS)
def test_jump_matches_formula(variant, p):
    r = jump_estimate(P, variant, BUMP, p)
    tol = 1e-2 if variant == SECOND_ORDER else 1e-3
    assert r.rel_error <= tol
    assert r.converged


def test_density_reproduced_at_center():
    r = jump_estimate(P, "G_e3", E1_BUMP, (0.0, 0.0))
    assert np.allclose(r.computed, [1.0, 0.0, 0.0], atol=1e-3)


def test_kappa_resolved():
    r = jump_estimate(P, "G_e1", E1_BUMP, (0.0, 0.0))
    assert f"{r.computed[2]:.3g}" == "0.333"
    assert abs(r.computed[0]) < 1e-8 and abs(r.computed[1]) < 1e-8


def test_off_center_divergence():
    p = (0.4, 0.1)
    r = jump_estimate(P, "dY3_G_e3", E1_BUMP, p)
    d1 = E1_BUMP.scalar_gradient(*p)[0]
    assert abs(d1) > 0.1
    assert r.computed[2] == pytest.approx(d1 / 3, rel=1e-3)


@pytest.mark.parametrize("variant", ["G_e3", "dY1_G_e3"])
def test_tangential_density_has_no_normal_jump(variant):
    g = BumpDensity((0.0, 0.0), (1.0, 0.8), (0.3, -0.7, 0.0))
    r = jump_estimate(P, variant, g, (0.35, -0.2))
    assert abs(r.computed[2]) <= 1e-8 and r.target[2] == 0


@pytest.mark.parametrize("variant,p", [("G_e3", (0.3, 0.2)), ("G_e1", (-0.6, 0.5))])
def test_low_regularity_density(variant, p):
    g = SineDensity((1.0, 0.0, 0.0))
    r = jump_estimate(P, variant, g, p, rule=PolarRule(16, 128))
    psi = g.scalar(*p)
    target = [psi, 0, 0] if variant == "G_e3" else [0, 0, psi / 3]
    assert np.linalg.norm(r.computed - target) <= 1e-2 * np.linalg.norm(target)


def test_zero_density():
    g = BumpDensity(amplitude=(0.0, 0.0, 0.0))
    assert np.all(layer_potential(P, "G_e3", g, (0.1, 0.1, 0.2)) == 0)
    r = halfspace_vs_freespace_jump(P, g, 1.0, h_sequence=(0.04, 0.02, 0.01))
    assert np.all(r.computed == 0) and r.converged


def test_far_field_decay():
    vals = [np.linalg.norm(layer_potential(P, "G_e3", BUMP, (0.0, 0.0, d))) for d in (50.0, 100.0)]
    assert vals[0] / vals[1] == pytest.approx(4.0, rel=0.05)


@settings(max_examples=5, deadline=None)
@given(st.floats(-3, 3))
def test_linear_in_amplitude(s):
    x = (0.2, -0.1, 0.05)
    rule = PolarRule(8, 64)
    g2 = BumpDensity(BUMP.center, BUMP.radii, tuple(s * a for a in BUMP.amplitude))
    assert np.allclose(layer_potential(P, "G_e1", g2, x, rule=rule),
                       s * layer_potential(P, "G_e1", BUMP, x, rule=rule), rtol=1e-12, atol=1e-14)


def test_on_plane_rejected():
    with pytest.raises(ValueError):
        layer_potential(P, "G_e3", BUMP, (0.1, 0.1, 0.0))


def test_unknown_variant():
    with pytest.raises(ValueError):
        layer_potential(P, "G_e2", BUMP, (0.1, 0.1, 0.1))
    with pytest.raises(ValueError):
        analytic_jump(P, "G_e2", BUMP, (0.0, 0.0))


@pytest.mark.parametrize("hs", [(0.1, 0.05), (0.01, 0.02, 0.005), (0.004, 0.002, 0.0005)])
def test_bad_h_sequence(hs):
    with pytest.raises(ValueError):
        jump_estimate(P, "G_e3", BUMP, (0, 0), hs)


@pytest.mark.parametrize("depth", [1.0, 2.0])
def test_halfspace_jump(depth):
    r = halfspace_vs_freespace_jump(P, BUMP, depth, (0.35, -0.2))
    assert r.rel_error <= 1e-3
    assert np.allclose(r.target, analytic_jump(P, "G_e3", BUMP, (0.35, -0.2)))


def test_halfspace_rejects_surface():
    with pytest.raises(ValueError):
        halfspace_vs_freespace_jump(P, BUMP, 0.0)


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=5, max_size=5))
def test_richardson_exact_on_polynomials(c):
    hs = 0.1 / 2.0 ** np.arange(5)
    vals = [c[0] + sum(ck * h**k for k, ck in enumerate(c[1:], 1)) for h in hs]
    assert richardson(hs, vals, (1, 2, 3, 4))[-1][-1] == pytest.approx(c[0], abs=1e-9)


def test_richardson_needs_geometric_steps():
    with pytest.raises(ValueError):
        richardson([0.1, 0.05, 0.01], [1, 2, 3])


def test_integral_identities():
    rows = integral_identities()
    assert len(rows) == 12
    targets = [t for _, _, t, _ in rows]
    q = math.pi / 15
    assert np.allclose(targets, [10 * q, 10 * q, 10 * q, 0, 0, 0, 0, 8 * q, 8 * q, 2 * q, 2 * q, 0])
    for name, value, target, err in rows:
        assert err <= 1e-6, name


def test_antiderivative():
    computed, exact = radial_antiderivative_check(0.1)
    assert abs(computed - exact) <= 1e-10


@settings(max_examples=20)
@given(st.floats(1e-3, 0.5))
def test_first_limit_closed_form_any_height(z):
    got = disk_integral(IDENTITIES[0][1][0][0], "one", z)
    assert got == pytest.approx(2 * math.pi * (1 - z**3 / (1 + z * z) ** 1.5) / 3, rel=1e-11)


def test_extrapolation_recovers_log_model():
    zs = 0.05 * 0.7 ** np.arange(14)
    vals = 1.5 + 0.3 * zs * np.log(zs) - 2 * zs + 0.1 * zs**2
    assert extrapolate_to_zero(zs, vals) == pytest.approx(1.5, abs=1e-10)
