"""Kinematics of the mid-surface, layers, and their xi-derivatives.

Analytic charts (cylinder, sphere, bent plate) pin the curvature sign
conventions; finite differences validate every closed-form derivative.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igashell import kinematics
from igashell.errors import DegenerateElement, DegenerateLayer
from igashell.tensors import inverse_metric_sensitivity

from oracles import SYM_DIRS, random_pair, rebuilt, rel_err


def cylinder_chart(radius, v):
    """Axial-first chart of a cylinder; normal points toward the axis."""
    tangents = np.array([
        [0.0, 0.0, 1.0],
        [-radius * np.sin(v), radius * np.cos(v), 0.0],
    ])
    second = np.array([
        [0.0, 0.0, 0.0],
        [-radius * np.cos(v), -radius * np.sin(v), 0.0],
        [0.0, 0.0, 0.0],
    ])
    return tangents, second


class TestSurfaceCharts:
    def test_cylinder_principal_curvature(self):
        r = 5.0
        tangents, second = cylinder_chart(r, 0.7)
        s = kinematics.surface_point(tangents, second)
        assert s.b_cov[1, 1] / s.a_cov[1, 1] == pytest.approx(1.0 / r, rel=1e-12)
        assert s.h_mean == pytest.approx(0.1, rel=1e-12)

    def test_sphere_mean_curvature(self):
        r, th, ph = 3.0, 1.1, 0.4
        # azimuth-first chart makes the normal point inward -> H = +1/R
        tangents = np.array([
            [-r * np.sin(th) * np.sin(ph), r * np.sin(th) * np.cos(ph), 0.0],
            [r * np.cos(th) * np.cos(ph), r * np.cos(th) * np.sin(ph), -r * np.sin(th)],
        ])
        second = np.array([
            [-r * np.sin(th) * np.cos(ph), -r * np.sin(th) * np.sin(ph), 0.0],
            [-r * np.sin(th) * np.cos(ph), -r * np.sin(th) * np.sin(ph), -r * np.cos(th)],
            [-r * np.cos(th) * np.sin(ph), r * np.cos(th) * np.cos(ph), 0.0],
        ])
        s = kinematics.surface_point(tangents, second)
        assert s.h_mean == pytest.approx(1.0 / r, rel=1e-10)

    def test_area_stretch_against_reference(self):
        lam = 1.3
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            lam ** 2 * np.eye(2), np.zeros((2, 2)), ref=ref
        )
        assert s.jac_area == pytest.approx(lam ** 2, rel=1e-14)

    def test_metric_inverse_consistency(self, rng):
        state, _ = random_pair(rng)
        assert np.allclose(state.a_cov @ state.a_con, np.eye(2), atol=1e-13)

    def test_degenerate_tangents_raise(self):
        tangents = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        with pytest.raises(DegenerateElement):
            kinematics.surface_point(tangents, np.zeros((3, 3)))


class TestLayerMetric:
    def test_bent_plate_layer_metric(self):
        # unit-metric plate bent to curvature kappa along the first direction
        kappa = 0.9
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            np.eye(2), np.diag([kappa, 0.0]), ref=ref
        )
        for xi in (-0.2, 0.05, 0.3):
            layer = kinematics.layer_state(s, ref, xi)
            assert layer.g_cov[0, 0] == pytest.approx(1.0 - 2.0 * xi * kappa, abs=1e-15)
            assert layer.g_cov[1, 1] == pytest.approx(1.0, abs=1e-15)

    def test_layer_positivity_guard(self):
        kappa = 0.9
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            np.eye(2), np.diag([kappa, 0.0]), ref=ref
        )
        with pytest.raises(DegenerateLayer):
            kinematics.layer_state(s, ref, 0.6)  # 2*xi*kappa > 1

    def test_layer_metric_slope_is_minus_twice_curvature(self, rng):
        state, ref = random_pair(rng)
        h = 1e-5
        lp = kinematics.layer_state(state, ref, h)
        lm = kinematics.layer_state(state, ref, -h)
        slope = (lp.g_cov - lm.g_cov) / (2 * h)
        assert np.allclose(slope, -2.0 * state.b_cov, atol=1e-12)


class TestXiDerivatives:
    """Closed forms vs central differences of the layer quantities."""

    @pytest.fixture
    def pair(self, rng):
        dirs = np.array([[0.6, 1.0, 0.1], [-0.8, 0.9, -0.2]])
        return random_pair(rng, thickness=0.3, fiber_dirs=dirs)

    def fd(self, state, ref, attr, h):
        lp = kinematics.layer_state(state, ref, h)
        lm = kinematics.layer_state(state, ref, -h)
        return (np.asarray(getattr(lp, attr)) - np.asarray(getattr(lm, attr))) / (2 * h)

    def test_all_fields(self, pair):
        state, ref = pair
        xd = kinematics.xi_derivatives(state, ref)
        h = 1e-5 * 0.3
        assert rel_err(xd.jstar, self.fd(state, ref, "jstar", h)) < 1e-6
        assert rel_err(xd.i1star, self.fd(state, ref, "i1star", h)) < 1e-6
        assert rel_err(xd.g_con, self.fd(state, ref, "g_con", h)) < 1e-6
        assert rel_err(xd.i4star, self.fd(state, ref, "i4star", h)) < 1e-6
        assert rel_err(xd.fiber_outer, self.fd(state, ref, "fiber_outer_con", h)) < 1e-6

    def test_bent_plate_fiber_stretch_slope(self):
        # flat reference, fiber along the first direction, cylinder bending:
        # dI4*/dxi = -2 kappa
        kappa = 0.35
        ref = kinematics.reference_point_from_components(
            np.eye(2), np.zeros((2, 2)), fiber_dirs=[[1.0, 0.0, 0.0]]
        )
        s = kinematics.surface_point_from_components(
            np.eye(2), np.diag([kappa, 0.0]), ref=ref
        )
        xd = kinematics.xi_derivatives(s, ref)
        assert xd.i4star[0] == pytest.approx(-2.0 * kappa, rel=1e-12)


class TestVariationTensors:
    def test_inverse_metric_sensitivity_at_identity(self):
        a4 = inverse_metric_sensitivity(np.eye(2))
        assert a4[0, 0, 0, 0] == pytest.approx(-1.0)
        assert a4[0, 1, 0, 1] == pytest.approx(-0.5)
        assert a4[0, 0, 1, 1] == pytest.approx(0.0)

    def test_metric_sensitivity_fd(self, rng):
        state, ref = random_pair(rng)
        vt = kinematics.variation_tensors(state)
        h = 1e-6
        for e in SYM_DIRS:
            fd = (rebuilt(state, ref, da=h * e).a_con
                  - rebuilt(state, ref, da=-h * e).a_con) / (2 * h)
            pred = np.einsum("abgd,gd->ab", vt.metric, e)
            assert rel_err(pred, fd) < 1e-7

    def test_curvature_sensitivity_fd(self, rng):
        # raised curvature depends on the metric at fixed covariant curvature
        state, ref = random_pair(rng)
        vt = kinematics.variation_tensors(state)
        h = 1e-6
        for e in SYM_DIRS:
            fd = (rebuilt(state, ref, da=h * e).b_con
                  - rebuilt(state, ref, da=-h * e).b_con) / (2 * h)
            pred = np.einsum("abgd,gd->ab", vt.curvature, e)
            assert rel_err(pred, fd) < 1e-7


class TestFiberProjection:
    def test_unit_reference_stretch(self, rng):
        dirs = rng.normal(size=(3, 3))
        dirs[:, :2] += 1.0
        _, ref = random_pair(rng, fiber_dirs=dirs)
        for i in range(3):
            i4_ref = np.einsum("ab,ab->", ref.a_cov, ref.fiber_outer_con[i])
            assert i4_ref == pytest.approx(1.0, rel=1e-12)

    def test_out_of_plane_component_is_dropped(self):
        ref_flat = kinematics.reference_point_from_components(
            np.eye(2), np.zeros((2, 2)), fiber_dirs=[[1.0, 0.0, 0.0]]
        )
        ref_tilt = kinematics.reference_point_from_components(
            np.eye(2), np.zeros((2, 2)), fiber_dirs=[[1.0, 0.0, 5.0]]
        )
        assert np.allclose(ref_flat.fiber_cov, ref_tilt.fiber_cov, atol=1e-14)

    def test_normal_fiber_raises(self):
        with pytest.raises(DegenerateElement):
            kinematics.reference_point_from_components(
                np.eye(2), np.zeros((2, 2)), fiber_dirs=[[0.0, 0.0, 1.0]]
            )


@settings(max_examples=40, deadline=None)
@given(
    a00=st.floats(0.5, 2.0), a11=st.floats(0.5, 2.0), a01=st.floats(-0.4, 0.4),
    lam=st.floats(0.7, 1.5),
)
def test_area_stretch_scaling_property(a00, a11, a01, lam):
    """J scales with the metric determinant ratio for any admissible metric."""
    a = np.array([[a00, a01], [a01, a11]])
    if np.linalg.det(a) < 0.1:
        return
    ref = kinematics.reference_point_from_components(a, np.zeros((2, 2)))
    s = kinematics.surface_point_from_components(lam * a, np.zeros((2, 2)), ref=ref)
    assert s.jac_area == pytest.approx(lam, rel=1e-10)
