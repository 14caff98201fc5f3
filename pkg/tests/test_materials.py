"""Material kernels: closed-form stresses/tangents vs independent oracles.

The layering of evidence:
- stresses against finite differences of the condensed scalar energies,
- tangents against finite differences of the stresses,
- projected (hat) quantities against the layer kernel evaluated through the
  thickness,
- a handful of hand-computed states with exact expected values.
"""

import numpy as np
import pytest

from igashell import kinematics, materials
from igashell.errors import ConstitutiveOverflow

from oracles import (
    SYM_DIRS,
    condensed_energy,
    fd_layer_stress_from_energy,
    fd_tensor_response,
    random_fiber_dirs,
    random_pair,
    rebuilt,
    rel_err,
    tangent_prediction,
)

THICKNESS = 0.3

FIBER_DIRS = np.array([[0.7, 1.0, 0.0], [-0.6, 1.0, 0.0]])


def all_materials(switch=False):
    mats = [
        materials.make_material("nh", THICKNESS),
        materials.make_material("mr", THICKNESS),
        materials.make_material("fung", THICKNESS),
        materials.make_material("amr", THICKNESS),
    ]
    for kappa in (0.0, 0.226, 1.0 / 3.0):
        mats.append(materials.make_material("goh", THICKNESS, kappa=kappa, switch=switch))
    return mats


def pair_for(mat, rng, **kw):
    dirs = FIBER_DIRS if mat.anisotropic else ()
    kw.setdefault("thickness", mat.thickness)
    return random_pair(rng, fiber_dirs=dirs, **kw)


class TestHandComputedStates:
    def test_nh_equibiaxial_layer_stress(self):
        lam = 1.2
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            lam ** 2 * np.eye(2), np.zeros((2, 2)), ref=ref
        )
        mat = materials.make_material("nh", THICKNESS)
        layer = kinematics.layer_state(s, ref, 0.0)
        tau = materials.layer_kernel(mat, layer).tau
        expected = mat.c1 * (1.0 - lam ** -6) * np.eye(2)
        assert np.allclose(tau, expected, rtol=1e-13)

    def test_nh_bent_plate_stress_slope(self):
        # flat unit reference bent to curvature kappa: the 11-component of
        # the projected stress slope is -4 c1 kappa
        kappa = 0.4
        mat = materials.make_material("nh", THICKNESS)
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            np.eye(2), np.diag([kappa, 0.0]), ref=ref
        )
        xd = kinematics.xi_derivatives(s, ref)
        h = materials.hat_kernel(mat, s, ref, xd)
        assert h.tau_d3[0, 0] == pytest.approx(-4.0 * mat.c1 * kappa, rel=1e-12)
        assert np.allclose(h.tau, 0.0, atol=1e-14)

    def test_condensed_plane_stress_vanishes(self, rng):
        state, ref = random_pair(rng)
        layer = kinematics.layer_state(state, ref, 0.11)
        assert abs(materials.condensed_stress_check(layer)) < 1e-12

    def test_uniaxial_transverse_contraction(self):
        # plane-stress NH: tau^22 = 0 at lam2^2 = 1/lam (solved by hand)
        lam = 1.4
        mat = materials.make_material("nh", THICKNESS)
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            np.diag([lam ** 2, 1.0 / lam]), np.zeros((2, 2)), ref=ref
        )
        layer = kinematics.layer_state(s, ref, 0.0)
        tau = materials.layer_kernel(mat, layer).tau
        assert abs(tau[1, 1]) < 1e-12 * mat.c1
        assert tau[0, 0] == pytest.approx(mat.c1 * (1.0 - lam ** -3), rel=1e-12)


class TestStressFromEnergy:
    """tau = 2 dW/dg for every variant, including active/inactive switch."""

    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_layer_stress(self, mat, rng):
        for _ in range(5):
            state, ref = pair_for(mat, rng)
            for xi in (-0.1, 0.0, 0.12):
                tau, tau_fd = fd_layer_stress_from_energy(mat, state, ref, xi)
                assert rel_err(tau, tau_fd) < 1e-6

    def test_switch_states_both_signs(self, rng):
        mat = materials.make_material("goh", THICKNESS, kappa=0.226, switch=True)
        seen = set()
        for _ in range(40):
            state, ref = pair_for(mat, rng)
            layer = kinematics.layer_state(state, ref, 0.1)
            # stay away from the switch kink where the energy is not smooth
            if np.abs(layer.i4star - 1.0).min() < 0.02:
                continue
            seen.update(np.sign(layer.i4star - 1.0).astype(int))
            tau, tau_fd = fd_layer_stress_from_energy(mat, state, ref, 0.1)
            assert rel_err(tau, tau_fd) < 1e-6
        assert seen == {-1, 1}, "random states missed one switch branch"


class TestLayerTangentFD:
    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_modulus(self, mat, rng):
        xi = 0.08
        for _ in range(3):
            state, ref = pair_for(mat, rng)
            out = materials.layer_kernel(mat, kinematics.layer_state(state, ref, xi))

            def tau_of(s):
                return materials.layer_kernel(mat, kinematics.layer_state(s, ref, xi)).tau

            da, _ = fd_tensor_response(tau_of, state, ref)
            pred, _ = tangent_prediction(out.tangent, np.zeros((2, 2, 2, 2)))
            assert rel_err(pred, da) < 1e-5


class TestHatMatchesLayer:
    """The projected quantities are the xi-Taylor data of the layer kernel."""

    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_value_and_slope(self, mat, rng):
        state, ref = pair_for(mat, rng)
        xd = kinematics.xi_derivatives(state, ref)
        hat = materials.hat_kernel(mat, state, ref, xd)
        mid = materials.layer_kernel(mat, kinematics.layer_state(state, ref, 0.0))
        assert rel_err(hat.tau, mid.tau) < 1e-12
        assert rel_err(hat.c, mid.tangent) < 1e-12
        h = 1e-6
        lp = materials.layer_kernel(mat, kinematics.layer_state(state, ref, h))
        lm = materials.layer_kernel(mat, kinematics.layer_state(state, ref, -h))
        assert rel_err(hat.tau_d3, (lp.tau - lm.tau) / (2 * h)) < 1e-5
        assert rel_err(hat.c_d3, (lp.tangent - lm.tangent) / (2 * h)) < 1e-5


class TestHatSensitivitiesFD:
    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_stress_blocks(self, mat, rng):
        state, ref = pair_for(mat, rng)

        def hat_of(s):
            return materials.hat_kernel(mat, s, ref, kinematics.xi_derivatives(s, ref))

        out = hat_of(state)
        da, db = fd_tensor_response(lambda s: hat_of(s).tau, state, ref)
        pa, pb = tangent_prediction(out.c, out.d)
        assert rel_err(pa, da) < 1e-5
        assert rel_err(pb, db) < 1e-10  # d = 0 for all variants

        da3, db3 = fd_tensor_response(lambda s: hat_of(s).tau_d3, state, ref)
        pa3, pb3 = tangent_prediction(out.c_d3, out.d_d3)
        assert rel_err(pa3, da3) < 1e-5
        assert rel_err(pb3, db3) < 1e-5

    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_curvature_slope_identity(self, mat, rng):
        # d(tau_d3)/db = -c holds for every layer-metric material; a cheap
        # transcription check of the printed closed forms
        state, ref = pair_for(mat, rng)
        xd = kinematics.xi_derivatives(state, ref)
        hat = materials.hat_kernel(mat, state, ref, xd)
        assert rel_err(hat.d_d3, -hat.c) < 1e-12


class TestMembraneKernel:
    @pytest.mark.parametrize("mat", all_materials(), ids=lambda m: m.variant + str(m.kappa[:1]))
    def test_tangent_fd_and_curvature_independence(self, mat, rng):
        state, ref = pair_for(mat, rng)
        out = materials.membrane_kernel(mat, state, ref)

        def tau_of(s):
            return materials.membrane_kernel(mat, s, ref).tau

        da, db = fd_tensor_response(tau_of, state, ref)
        pred, _ = tangent_prediction(out.tangent, np.zeros((2, 2, 2, 2)))
        assert rel_err(pred, da) < 1e-5
        assert np.abs(db).max() < 1e-10

    def test_goh_reference_modulus_fiber_term(self, rng):
        # with the switch the reference modulus drops the fibers entirely
        dirs = FIBER_DIRS
        _, ref = random_pair(rng, fiber_dirs=dirs)
        m_plain = materials.make_material("goh", THICKNESS, kappa=0.1)
        m_switch = materials.make_material("goh", THICKNESS, kappa=0.1, switch=True)
        c_plain = materials.reference_modulus(m_plain, ref)
        c_switch = materials.reference_modulus(m_switch, ref)
        diff = c_plain - c_switch
        w = 1.0 - 3.0 * 0.1
        expected = np.zeros((2, 2, 2, 2))
        for i in range(2):
            ll = ref.fiber_outer_con[i]
            expected += 4.0 * THICKNESS * m_plain.k1[i] * w ** 2 * np.einsum(
                "ab,gd->abgd", ll, ll
            )
        assert rel_err(diff, expected) < 1e-12


class TestChartSwapObjectivity:
    """Swapping the two surface parameters permutes all components."""

    def swap_state(self, state, ref):
        perm = np.ix_([1, 0], [1, 0])
        return state.a_cov[perm], state.b_cov[perm], ref.a_cov[perm], ref.b_cov[perm]

    def test_layer_stress_permutes(self, rng):
        mat = materials.make_material("mr", THICKNESS)
        state, ref = random_pair(rng)
        a_sw, b_sw, ar_sw, br_sw = self.swap_state(state, ref)
        ref_sw = kinematics.reference_point_from_components(ar_sw, br_sw)
        state_sw = kinematics.surface_point_from_components(a_sw, b_sw, ref=ref_sw)
        xi = 0.07
        tau = materials.layer_kernel(mat, kinematics.layer_state(state, ref, xi)).tau
        tau_sw = materials.layer_kernel(
            mat, kinematics.layer_state(state_sw, ref_sw, xi)
        ).tau
        perm = [1, 0]
        assert np.allclose(tau_sw, tau[np.ix_(perm, perm)], rtol=1e-12, atol=1e-14)


class TestGuardsAndPresets:
    def test_overflow_guard(self):
        mat = materials.make_material("fung", THICKNESS)
        ref = kinematics.reference_point_from_components(np.eye(2), np.zeros((2, 2)))
        s = kinematics.surface_point_from_components(
            100.0 * np.eye(2), np.zeros((2, 2)), ref=ref
        )
        with pytest.raises(ConstitutiveOverflow):
            materials.layer_kernel(mat, kinematics.layer_state(s, ref, 0.0))

    def test_preset_constants(self):
        goh = materials.make_material("goh", 0.5, kappa=0.226, switch=True)
        assert goh.mu == 10.0 and goh.k1 == (1000.0, 1000.0)
        assert goh.k2 == (500.0, 500.0) and goh.kappa == (0.226, 0.226)
        assert goh.young_equivalent == 30.0
        mr = materials.make_material("mr", 0.5)
        assert (mr.c1, mr.c2) == (10.0, 20.0)
        amr = materials.make_material("amr", 0.5)
        assert amr.c3 == (1000.0, 1000.0)
        fung = materials.make_material("fung", 0.5)
        assert (fung.c1, fung.c2) == (10.0, 10.0)

    def test_switch_requires_goh(self):
        with pytest.raises(ValueError):
            materials.MaterialSpec("nh", 0.3, c1=10.0, switch_enabled=True)

    def test_positive_thickness(self):
        with pytest.raises(ValueError):
            materials.MaterialSpec("nh", 0.0, c1=10.0)
