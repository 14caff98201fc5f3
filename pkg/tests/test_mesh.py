"""Spline basis, mesh constructors, grading: independent oracles.

The nonrational basis is cross-checked against scipy's BSpline, derivatives
against finite differences, and the constructed geometries against their
closed-form maps (affine rectangle, exact circular arc).
"""

import numpy as np
import pytest
from scipy.interpolate import BSpline

from igashell import mesh, nurbs
from igashell.errors import InvalidDimensions, OutOfDomain


def scipy_basis_row(knots, degree, u, der=0):
    """All basis functions (or derivatives) at u via scipy, one per column."""
    n = nurbs.n_basis(knots, degree)
    out = np.empty(n)
    for i in range(n):
        c = np.zeros(n)
        c[i] = 1.0
        spl = BSpline(knots, c, degree, extrapolate=False)
        if der:
            spl = spl.derivative(der)
        out[i] = spl(u)
    return np.nan_to_num(out)


class TestBasis1D:
    KNOTS = nurbs.open_uniform_knots(5, 2)

    def test_matches_scipy(self, rng):
        for u in rng.uniform(0.0, 1.0, size=8):
            span = nurbs.find_span(self.KNOTS, 2, u)
            ders = nurbs.ders_basis(self.KNOTS, 2, span, u, 2)
            cols = np.arange(span - 2, span + 1)
            for der in range(3):
                want = scipy_basis_row(self.KNOTS, 2, u, der)
                got = np.zeros_like(want)
                got[cols] = ders[der]
                assert np.allclose(got, want, atol=1e-10)

    def test_find_span_edges(self):
        assert nurbs.find_span(self.KNOTS, 2, 0.0) == 2
        assert nurbs.find_span(self.KNOTS, 2, 1.0) == nurbs.n_basis(self.KNOTS, 2) - 1
        assert nurbs.find_span(self.KNOTS, 2, 0.2) == 3
        with pytest.raises(OutOfDomain):
            nurbs.find_span(self.KNOTS, 2, 1.0 + 1e-9)
        with pytest.raises(OutOfDomain):
            nurbs.find_span(self.KNOTS, 2, -1e-9)

    def test_greville_linear_precision(self):
        g = nurbs.greville(self.KNOTS, 2)
        for u in np.linspace(0, 1, 17):
            span = nurbs.find_span(self.KNOTS, 2, u)
            vals = nurbs.ders_basis(self.KNOTS, 2, span, u, 0)[0]
            assert vals @ g[span - 2 : span + 1] == pytest.approx(u, abs=1e-14)


class TestRationalSurfaceBasis:
    def patch(self, rng, rational=True):
        ku = nurbs.open_uniform_knots(3, 2)
        kv = nurbs.open_uniform_knots(4, 2)
        nu, nv = nurbs.n_basis(ku, 2), nurbs.n_basis(kv, 2)
        pts = rng.normal(size=(nu, nv, 3))
        w = 1.0 + rng.uniform(0.0, 1.5, size=(nu, nv)) if rational else np.ones((nu, nv))
        return mesh.NurbsPatch((2, 2), ku, kv, pts, w)

    def test_partition_of_unity_and_derivative_sums(self, rng):
        p = self.patch(rng)
        for _ in range(10):
            u, v = rng.uniform(0, 1, 2)
            _, val, d1, d2 = p.basis_eval(u, v)
            assert val.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(d1.sum(axis=1), 0.0, atol=1e-10)
            assert np.allclose(d2.sum(axis=1), 0.0, atol=1e-9)

    def test_derivatives_match_fd(self, rng):
        p = self.patch(rng)
        h = 1e-6
        for _ in range(5):
            u, v = rng.uniform(2 * h, 1 - 2 * h, 2)

            def value(uu, vv):
                idx, val, _, _ = p.basis_eval(uu, vv)
                full = np.zeros(p.n_u * p.n_v)
                full[idx] = val
                return full

            idx, _, d1, d2 = p.basis_eval(u, v)
            fd_u = (value(u + h, v) - value(u - h, v)) / (2 * h)
            fd_v = (value(u, v + h) - value(u, v - h)) / (2 * h)
            assert np.allclose(d1[0], fd_u[idx], atol=2e-7)
            assert np.allclose(d1[1], fd_v[idx], atol=2e-7)
            fd_uu = (value(u + h, v) - 2 * value(u, v) + value(u - h, v)) / h**2
            fd_vv = (value(u, v + h) - 2 * value(u, v) + value(u, v - h)) / h**2
            fd_uv = (
                value(u + h, v + h) - value(u + h, v - h)
                - value(u - h, v + h) + value(u - h, v - h)
            ) / (4 * h**2)
            assert np.allclose(d2[0], fd_uu[idx], atol=5e-4)
            assert np.allclose(d2[1], fd_vv[idx], atol=5e-4)
            assert np.allclose(d2[2], fd_uv[idx], atol=5e-4)

    def test_unit_weights_reduce_to_bsplines(self, rng):
        p = self.patch(rng, rational=False)
        for u in rng.uniform(0, 1, 4):
            for v in rng.uniform(0, 1, 4):
                idx, val, _, _ = p.basis_eval(u, v)
                nu_row = scipy_basis_row(p.knots_u, 2, u)
                nv_row = scipy_basis_row(p.knots_v, 2, v)
                want = np.outer(nu_row, nv_row).ravel()[idx]
                assert np.allclose(val, want, atol=1e-12)

    def test_corner_is_interpolatory(self, rng):
        p = self.patch(rng)
        idx, val, _, _ = p.basis_eval(0.0, 0.0)
        assert val.max() == pytest.approx(1.0, abs=1e-14)
        assert np.sort(val)[:-1].max() < 1e-14
        assert idx[np.argmax(val)] == 0


class TestConstructors:
    def test_strip_control_count_and_area(self):
        m = mesh.make_strip(0.3, 3.0, 9.0, 6, 18)
        assert (m.patch.n_u, m.patch.n_v) == (8, 20)
        assert m.reference_area == pytest.approx(27.0, rel=1e-12)
        assert m.n_dofs == 3 * 8 * 20

    def test_strip_map_is_exact(self, rng):
        m = mesh.make_strip(0.3, 3.0, 9.0, 6, 18)
        for _ in range(20):
            u, v = rng.uniform(0, 1, 2)
            assert np.allclose(
                m.patch.point(u, v), [3.0 * u, 9.0 * v, 0.0], atol=1e-13
            )

    def test_flat_meshes_have_zero_reference_curvature(self):
        m = mesh.make_plate(0.25, 5.0, 6)
        for el in m.elements:
            for qp in el.quad_points:
                assert np.abs(qp.ref.b_cov).max() < 1e-12
        assert m.reference_area == pytest.approx(25.0, rel=1e-12)

    def test_invalid_dimensions(self):
        with pytest.raises(InvalidDimensions):
            mesh.make_strip(0.3, -1.0, 9.0, 6, 18)
        with pytest.raises(InvalidDimensions):
            mesh.make_strip(0.3, 3.0, 9.0, 0, 18)
        with pytest.raises(InvalidDimensions):
            mesh.make_plate(0.0, 5.0, 6)

    def test_hemitube_is_exact_arc(self, rng):
        m = mesh.make_hemitube(0.1, 2.0, 5.0, 4, 3)
        for _ in range(30):
            u, v = rng.uniform(0, 1, 2)
            x = m.patch.point(u, v)
            assert np.hypot(x[0], x[2]) == pytest.approx(2.0, abs=1e-12)
            assert 0.0 <= x[1] <= 5.0
        # refinement by knot insertion must not move the map
        coarse = mesh.make_hemitube(0.1, 2.0, 5.0, 1, 3)
        for _ in range(20):
            u, v = rng.uniform(0, 1, 2)
            assert np.allclose(m.patch.point(u, v), coarse.patch.point(u, v),
                               atol=1e-12)

    def test_hemitube_normal_is_radial(self, rng):
        m = mesh.make_hemitube(0.1, 2.0, 5.0, 4, 3)
        for _ in range(10):
            u, v = rng.uniform(0, 1, 2)
            x = m.patch.point(u, v)
            n = m.patch.normal(u, v)
            radial = np.array([x[0], 0.0, x[2]]) / 2.0
            assert min(np.linalg.norm(n - radial), np.linalg.norm(n + radial)) < 1e-12

    def test_reference_cache_matches_fresh_evaluation(self):
        m = mesh.make_hemitube(0.1, 2.0, 5.0, 3, 2)
        flat = m.patch.points.reshape(-1, 3)
        for el in m.elements:
            for qp in el.quad_points:
                from igashell.kinematics import reference_point

                fresh = reference_point(qp.d1 @ flat[qp.indices],
                                        qp.d2 @ flat[qp.indices])
                assert np.all(fresh.a_cov == qp.ref.a_cov)
                assert np.all(fresh.b_cov == qp.ref.b_cov)
                assert fresh.sqrt_det_a == qp.ref.sqrt_det_a

    def test_patch_validation(self):
        ku = nurbs.open_uniform_knots(2, 2)
        pts = np.zeros((4, 4, 3))
        w = np.ones((4, 4))
        with pytest.raises(InvalidDimensions):  # non-open
            mesh.NurbsPatch((2, 2), np.array([0, 0, 0.1, 0.5, 1, 1, 1.0]), ku, pts, w)
        with pytest.raises(InvalidDimensions):  # decreasing
            mesh.NurbsPatch((2, 2), np.array([0, 0, 0, 0.6, 0.4, 1, 1, 1.0]),
                            ku, np.zeros((5, 4, 3))[:4], w)
        with pytest.raises(InvalidDimensions):  # C1-breaking multiplicity
            mesh.NurbsPatch((2, 2), np.array([0, 0, 0, 0.5, 0.5, 1, 1, 1.0]),
                            ku, np.zeros((5, 4, 3)), np.ones((5, 4)))
        with pytest.raises(InvalidDimensions):  # degree too low
            mesh.NurbsPatch((1, 2), ku, ku, pts, w)
        with pytest.raises(InvalidDimensions):  # nonpositive weight
            mesh.NurbsPatch((2, 2), ku, ku, pts, 0.0 * w)

    def test_edge_rule_lengths(self):
        m = mesh.make_strip(0.3, 3.0, 9.0, 6, 18)
        for side, want in (("v-min", 3.0), ("v-max", 3.0),
                           ("u-min", 9.0), ("u-max", 9.0)):
            total = sum(ep.weight * ep.arc_rate for ep in m.edge_rule(side))
            assert total == pytest.approx(want, rel=1e-12)
        tube = mesh.make_hemitube(0.1, 2.0, 5.0, 4, 3)
        arc = sum(ep.weight * ep.arc_rate for ep in tube.edge_rule("v-min"))
        assert arc == pytest.approx(np.pi, rel=1e-6)

    def test_boundary_rows_and_corners(self):
        m = mesh.make_strip(0.3, 3.0, 9.0, 2, 3)  # 4 x 5 net
        assert list(m.boundary_rows("v-min")) == [0, 5, 10, 15]
        assert list(m.boundary_rows("v-max")) == [4, 9, 14, 19]
        assert list(m.boundary_rows("u-min")) == [0, 1, 2, 3, 4]
        assert list(m.boundary_rows("u-min", offset=1)) == [5, 6, 7, 8, 9]
        assert m.corner_index("u-max", "v-max") == 19
        assert m.corner_index("u-min", "v-min") == 0


class TestCContinuity:
    @pytest.mark.parametrize(
        "m",
        [
            mesh.make_strip(0.3, 3.0, 9.0, 6, 18),
            mesh.make_plate(0.25, 5.0, 6),
            mesh.make_hemitube(0.1, 2.0, 5.0, 4, 3),
            mesh.graded_refinement(mesh.make_plate(0.25, 5.0, 6), "min-corner", 4.0),
        ],
        ids=["strip", "plate", "hemitube", "graded-plate"],
    )
    def test_normal_continuity(self, m):
        assert mesh.normal_jump(m) < 1e-10


class TestGradedRefinement:
    def test_ratio_one_is_identity(self):
        m = mesh.make_plate(0.25, 5.0, 6)
        assert mesh.graded_refinement(m, "center", 1.0) is m

    def test_invalid_ratio(self):
        m = mesh.make_plate(0.25, 5.0, 6)
        with pytest.raises(InvalidDimensions):
            mesh.graded_refinement(m, "center", 0.5)

    def test_geometry_invariance(self, rng):
        for base in (mesh.make_plate(0.25, 5.0, 6),
                     mesh.make_hemitube(0.1, 2.0, 5.0, 4, 3)):
            graded = mesh.graded_refinement(base, "min-corner", 4.0)
            for _ in range(100):
                u, v = rng.uniform(0, 1, 2)
                assert np.allclose(base.patch.point(u, v),
                                   graded.patch.point(u, v), atol=1e-12)

    def test_corner_grading_is_geometric(self):
        m = mesh.graded_refinement(mesh.make_plate(0.25, 5.0, 6), "min-corner", 4.0)
        widths = np.diff(m.patch.breakpoints_u)
        assert widths.size == 6
        assert np.all(np.diff(widths) > 0)  # finest at the corner
        assert widths[-1] / widths[0] == pytest.approx(4.0, rel=1e-12)
        ratios = widths[1:] / widths[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-12)

    def test_center_grading_monotone_halves(self):
        m = mesh.graded_refinement(mesh.make_plate(0.25, 10.0, 6), "center", 4.0)
        widths = np.diff(m.patch.breakpoints_v)
        assert np.all(np.diff(widths[:3]) < 0) and np.all(np.diff(widths[3:]) > 0)
        assert widths.max() / widths.min() == pytest.approx(4.0, rel=1e-12)
        assert np.allclose(widths, widths[::-1], rtol=1e-12)
        assert m.reference_area == pytest.approx(100.0, rel=1e-12)

    def test_unknown_region(self):
        m = mesh.make_plate(0.25, 5.0, 6)
        with pytest.raises(ValueError):
            mesh.graded_refinement(m, "everywhere", 2.0)


class TestDump:
    def test_documented_format(self):
        m = mesh.make_strip(0.3, 3.0, 9.0, 2, 3)
        text = mesh.dump_text(m)
        lines = text.strip().split("\n")
        assert lines[0] == "igashell-mesh 1"
        assert lines[1] == "thickness 0.3"
        assert lines[2] == "degrees 2 2"
        assert lines[3].startswith("knots_u ") and lines[4].startswith("knots_v ")
        assert lines[5] == "net 4 5"
        assert len(lines) == 6 + 20
        i, j, x, y, z, w = lines[6].split()
        assert (int(i), int(j)) == (0, 0)
        assert (float(x), float(y), float(z), float(w)) == (0.0, 0.0, 0.0, 1.0)
        # round-trip the numbers through repr
        last = lines[-1].split()
        assert float(last[2]) == m.patch.points[3, 4, 0]
