"""Quadratic NURBS shell meshes: patches, constructors, quadrature caches.

A :class:`NurbsPatch` holds the spline data; a :class:`ShellMesh` adds the
shell thickness, per-element connectivity, the element Gauss rule, and a
cached reference state at every quadrature point.  All constructed meshes
are single-patch, degree 2, with single interior knots (C1-continuous
across elements).  Meshes are immutable.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import nurbs
from .errors import InvalidDimensions, UnsupportedGeometry
from .kinematics import reference_point

GAUSS_1D = {
    n: np.polynomial.legendre.leggauss(n) for n in (1, 2, 3, 4, 5)
}

EDGE_SIDES = ("u-min", "u-max", "v-min", "v-max")


@dataclass(frozen=True)
class NurbsPatch:
    """Tensor-product rational B-spline surface (weighted control net)."""

    degrees: tuple
    knots_u: np.ndarray
    knots_v: np.ndarray
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pu, pv = self.degrees
        if pu < 2 or pv < 2:
            raise InvalidDimensions("shell patches need degree >= 2")
        for knots, p, axis in ((self.knots_u, pu, 0), (self.knots_v, pv, 1)):
            k = np.asarray(knots, dtype=float)
            if np.any(np.diff(k) < 0.0):
                raise InvalidDimensions("knot vector must be non-decreasing")
            if k[0] != k[p] or k[-1] != k[-p - 1]:
                raise InvalidDimensions("knot vectors must be open")
            interior = k[p + 1 : -p - 1]
            _, counts = np.unique(interior, return_counts=True)
            if counts.size and counts.max() > p - 1:
                raise InvalidDimensions(
                    "interior knot multiplicity breaks C1 continuity"
                )
            if self.points.shape[axis] != nurbs.n_basis(k, p):
                raise InvalidDimensions("control net size mismatches knots")
        if self.points.ndim != 3 or self.points.shape[2] != 3:
            raise InvalidDimensions("control points must be 3D")
        if self.weights.shape != self.points.shape[:2]:
            raise InvalidDimensions("weight net shape mismatches control net")
        if np.any(self.weights <= 0.0):
            raise InvalidDimensions("control weights must be positive")

    @property
    def n_u(self):
        return self.points.shape[0]

    @property
    def n_v(self):
        return self.points.shape[1]

    @property
    def domain_u(self):
        return nurbs.domain(self.knots_u, self.degrees[0])

    @property
    def domain_v(self):
        return nurbs.domain(self.knots_v, self.degrees[1])

    @property
    def breakpoints_u(self):
        pu = self.degrees[0]
        return np.unique(self.knots_u[pu:-pu])

    @property
    def breakpoints_v(self):
        pv = self.degrees[1]
        return np.unique(self.knots_v[pv:-pv])

    def global_index(self, iu, iv):
        """Flat control-point index of net position (iu, iv), row-major."""
        return np.asarray(iu) * self.n_v + np.asarray(iv)

    def basis_eval(self, u, v):
        """Nonzero rational basis at (u, v).

        Returns (indices, values, d1, d2) with flat global indices of shape
        (k,), values (k,), first derivatives (2, k) ordered (u, v) and
        second derivatives (3, k) ordered (uu, vv, uv).
        """
        iu, iv, val, d1, d2 = nurbs.rational_surface_basis(
            self.knots_u, self.knots_v, self.degrees, self.weights, u, v
        )
        idx = (iu[:, None] * self.n_v + iv[None, :]).ravel()
        return idx, val.ravel(), d1.reshape(2, -1), d2.reshape(3, -1)

    def point(self, u, v):
        """Surface point x(u, v)."""
        idx, val, _, _ = self.basis_eval(u, v)
        return val @ self.points.reshape(-1, 3)[idx]

    def derivatives(self, u, v):
        """(point, tangents (2,3), second derivatives (3,3)) at (u, v)."""
        idx, val, d1, d2 = self.basis_eval(u, v)
        flat = self.points.reshape(-1, 3)[idx]
        return val @ flat, d1 @ flat, d2 @ flat

    def normal(self, u, v):
        _, tang, _ = self.derivatives(u, v)
        n = np.cross(tang[0], tang[1])
        return n / np.linalg.norm(n)


@dataclass(frozen=True)
class QuadPoint:
    """Cached surface quadrature point (parameter, weight, basis, geometry)."""

    u: float
    v: float
    weight: float
    indices: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    ref: object


@dataclass(frozen=True)
class Element:
    """One knot-span element: parameter box, connectivity, quadrature."""

    u_range: tuple
    v_range: tuple
    indices: np.ndarray
    quad_points: tuple


@dataclass(frozen=True)
class EdgePoint:
    """Cached edge quadrature point for boundary integrals.

    ``weight`` already includes the 1D Gauss weight and the parametric
    interval scaling; ``arc_rate`` is |dx/dt| of the reference edge curve, so
    reference line integrals are sums of weight * arc_rate * integrand.
    """

    u: float
    v: float
    weight: float
    indices: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    ref: object
    arc_rate: float


@dataclass(frozen=True)
class ShellMesh:
    """Immutable single-patch shell mesh with cached element quadrature."""

    patch: NurbsPatch
    thickness: float
    elements: tuple

    @property
    def n_ctrl(self):
        return self.patch.n_u * self.patch.n_v

    @property
    def n_dofs(self):
        return 3 * self.n_ctrl

    @cached_property
    def reference_area(self):
        return sum(
            qp.weight * qp.ref.sqrt_det_a
            for el in self.elements
            for qp in el.quad_points
        )

    def boundary_rows(self, side, offset=0):
        """Global control indices of a boundary row (offset rows inward)."""
        p = self.patch
        if side == "u-min":
            return p.global_index(offset, np.arange(p.n_v))
        if side == "u-max":
            return p.global_index(p.n_u - 1 - offset, np.arange(p.n_v))
        if side == "v-min":
            return p.global_index(np.arange(p.n_u), offset)
        if side == "v-max":
            return p.global_index(np.arange(p.n_u), p.n_v - 1 - offset)
        raise ValueError(f"unknown side {side!r}; expected one of {EDGE_SIDES}")

    def corner_index(self, side_u, side_v):
        iu = 0 if side_u == "u-min" else self.patch.n_u - 1
        iv = 0 if side_v == "v-min" else self.patch.n_v - 1
        return int(self.patch.global_index(iu, iv))

    def edge_rule(self, side, n_gp=3):
        """Edge quadrature cache for boundary (line) integrals."""
        return _build_edge_rule(self, side, n_gp)


def build_mesh(patch, thickness, n_gp=None):
    """Assemble the element/quadrature cache of a patch."""
    if thickness <= 0.0:
        raise InvalidDimensions("thickness must be positive")
    pu, pv = patch.degrees
    if n_gp is None:
        n_gp = max(pu, pv) + 1
    pts, wts = GAUSS_1D[n_gp]
    bu = patch.breakpoints_u
    bv = patch.breakpoints_v
    elements = []
    for u0, u1 in zip(bu[:-1], bu[1:]):
        for v0, v1 in zip(bv[:-1], bv[1:]):
            qps = []
            indices = None
            for gu, wu in zip(pts, wts):
                for gv, wv in zip(pts, wts):
                    u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gu
                    v = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * gv
                    idx, val, d1, d2 = patch.basis_eval(u, v)
                    w = wu * wv * 0.25 * (u1 - u0) * (v1 - v0)
                    ref = reference_point(d1 @ patch.points.reshape(-1, 3)[idx],
                                          d2 @ patch.points.reshape(-1, 3)[idx])
                    qps.append(QuadPoint(u, v, w, idx, val, d1, d2, ref))
                    indices = idx if indices is None else indices
            elements.append(
                Element((float(u0), float(u1)), (float(v0), float(v1)),
                        indices, tuple(qps))
            )
    return ShellMesh(patch, float(thickness), tuple(elements))


def _build_edge_rule(mesh, side, n_gp):
    patch = mesh.patch
    if side not in EDGE_SIDES:
        raise ValueError(f"unknown side {side!r}; expected one of {EDGE_SIDES}")
    along_v = side.startswith("u-")
    breaks = patch.breakpoints_v if along_v else patch.breakpoints_u
    if side == "u-min":
        fixed = patch.domain_u[0]
    elif side == "u-max":
        fixed = patch.domain_u[1]
    elif side == "v-min":
        fixed = patch.domain_v[0]
    else:
        fixed = patch.domain_v[1]
    pts, wts = GAUSS_1D[n_gp]
    # row index of d1 giving the derivative along the running edge parameter
    run_axis = 1 if along_v else 0
    out = []
    for t0, t1 in zip(breaks[:-1], breaks[1:]):
        for g, wg in zip(pts, wts):
            t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * g
            u, v = (fixed, t) if along_v else (t, fixed)
            idx, val, d1, d2 = patch.basis_eval(u, v)
            flat = patch.points.reshape(-1, 3)[idx]
            ref = reference_point(d1 @ flat, d2 @ flat)
            arc = float(np.linalg.norm(d1[run_axis] @ flat))
            w = wg * 0.5 * (t1 - t0)
            out.append(EdgePoint(u, v, w, idx, val, d1, d2, ref, arc))
    return tuple(out)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _check_positive(**named):
    for name, value in named.items():
        if value <= 0:
            raise InvalidDimensions(f"{name} must be positive, got {value!r}")


def _affine_patch(knots_u, knots_v, degree, mapper):
    """Patch whose control points sample an (at most bilinear) map at the
    Greville grid, reproducing the map exactly."""
    gu = nurbs.greville(knots_u, degree)
    gv = nurbs.greville(knots_v, degree)
    points = np.empty((gu.size, gv.size, 3))
    for i, x in enumerate(gu):
        for j, y in enumerate(gv):
            points[i, j] = mapper(x, y)
    return NurbsPatch(
        (degree, degree), np.asarray(knots_u, float), np.asarray(knots_v, float),
        points, np.ones((gu.size, gv.size)),
    )


def make_strip(thickness, width, length, nel_w, nel_l, degree=2):
    """Flat rectangular strip: width along e1, length along e2, normal e3."""
    _check_positive(thickness=thickness, width=width, length=length,
                    nel_w=nel_w, nel_l=nel_l)
    patch = _affine_patch(
        nurbs.open_uniform_knots(nel_w, degree),
        nurbs.open_uniform_knots(nel_l, degree),
        degree,
        lambda x, y: (width * x, length * y, 0.0),
    )
    return build_mesh(patch, thickness)


def make_plate(thickness, side, nel, degree=2):
    """Flat square plate of edge length ``side`` (one symmetry quarter of a
    larger plate when used with tied symmetry edges)."""
    return make_strip(thickness, side, side, nel, nel, degree=degree)


def make_hemitube(thickness, radius, length, nel_c, nel_l, degree=2):
    """Quarter-circle tube segment: exact 90-degree arc swept along e2.

    The arc runs from (radius, y, 0) to (0, y, radius) in the e1-e3 plane;
    with the two symmetry planes e1 = 0 and e3 = 0 it models half a tube.
    """
    _check_positive(thickness=thickness, radius=radius, length=length,
                    nel_c=nel_c, nel_l=nel_l)
    if degree != 2:
        raise UnsupportedGeometry("the exact arc construction is quadratic")
    arc = np.array([[radius, 0.0], [radius, radius], [0.0, radius]])
    w = np.array([1.0, np.sqrt(0.5), 1.0])
    knots = nurbs.open_uniform_knots(1, degree)
    hom = np.column_stack([arc * w[:, None], w])
    for k in range(1, nel_c):
        knots, hom = nurbs.insert_knot(knots, degree, hom, k / nel_c)
    w = hom[:, 2]
    arc = hom[:, :2] / w[:, None]

    knots_v = nurbs.open_uniform_knots(nel_l, degree)
    gv = nurbs.greville(knots_v, degree)
    points = np.empty((arc.shape[0], gv.size, 3))
    weights = np.empty((arc.shape[0], gv.size))
    for i in range(arc.shape[0]):
        for j, y in enumerate(gv):
            points[i, j] = (arc[i, 0], length * y, arc[i, 1])
            weights[i, j] = w[i]
    patch = NurbsPatch((degree, degree), knots, np.asarray(knots_v, float),
                       points, weights)
    return build_mesh(patch, thickness)


# ---------------------------------------------------------------------------
# graded refinement
# ---------------------------------------------------------------------------

GRADING_REGIONS = ("u-min", "u-max", "v-min", "v-max", "min-corner", "center")


def graded_breakpoints(n, ratio, mode, lo=0.0, hi=1.0):
    """Breakpoints of n elements whose widths grow geometrically away from
    the refined region; coarsest/finest width equals ``ratio``."""
    if mode is None or ratio == 1.0 or n == 1:
        return np.linspace(lo, hi, n + 1)
    i = np.arange(n, dtype=float)
    if mode == "min":
        d = i
    elif mode == "max":
        d = n - 1 - i
    else:  # center
        d = np.abs(i - (n - 1) / 2.0)
    if d.max() == d.min():
        return np.linspace(lo, hi, n + 1)
    t = (d - d.min()) / (d.max() - d.min())
    widths = ratio ** t
    edges = np.concatenate([[0.0], np.cumsum(widths)]) / widths.sum()
    return lo + (hi - lo) * edges


def _grading_modes(region):
    if region not in GRADING_REGIONS:
        raise ValueError(
            f"unknown grading region {region!r}; expected one of {GRADING_REGIONS}"
        )
    return {
        "u-min": ("min", None),
        "u-max": ("max", None),
        "v-min": (None, "min"),
        "v-max": (None, "max"),
        "min-corner": ("min", "min"),
        "center": ("center", "center"),
    }[region]


def graded_refinement(mesh, region, ratio):
    """Regrade element widths geometrically toward a region.

    The surface map is preserved exactly: affine patches (all weights one)
    are re-knotted and re-fit on the Greville grid of the graded knots;
    rational patches receive the graded breakpoints by knot insertion
    (which adds elements instead of moving them).  ``ratio`` is the
    coarsest-to-finest element width ratio.
    """
    if ratio < 1.0:
        raise InvalidDimensions("grading ratio must be >= 1")
    if ratio == 1.0:
        return mesh
    patch = mesh.patch
    mode_u, mode_v = _grading_modes(region)
    degree = patch.degrees[0]

    new_u = graded_breakpoints(len(patch.breakpoints_u) - 1, ratio, mode_u,
                               *patch.domain_u)
    new_v = graded_breakpoints(len(patch.breakpoints_v) - 1, ratio, mode_v,
                               *patch.domain_v)

    if np.all(patch.weights == 1.0):
        candidate = _affine_patch(
            nurbs.open_uniform_knots(len(new_u) - 1, degree, new_u),
            nurbs.open_uniform_knots(len(new_v) - 1, degree, new_v),
            degree,
            lambda x, y: patch.point(x, y),
        )
        if _same_map(patch, candidate):
            return build_mesh(candidate, mesh.thickness)

    knots_u, knots_v = patch.knots_u, patch.knots_v
    hom = np.concatenate(
        [patch.points * patch.weights[..., None], patch.weights[..., None]],
        axis=2,
    )
    for t in new_u:
        if np.min(np.abs(patch.breakpoints_u - t)) > 1e-12:
            knots_u, hom = nurbs.insert_knot(knots_u, degree, hom, t)
    hom = np.swapaxes(hom, 0, 1)
    for t in new_v:
        if np.min(np.abs(patch.breakpoints_v - t)) > 1e-12:
            knots_v, hom = nurbs.insert_knot(knots_v, degree, hom, t)
    hom = np.swapaxes(hom, 0, 1)
    weights = hom[..., 3]
    points = hom[..., :3] / weights[..., None]
    refined = NurbsPatch((degree, degree), knots_u, knots_v, points, weights)
    return build_mesh(refined, mesh.thickness)


def _same_map(old, new, n_sample=5, tol=1e-12):
    us = np.linspace(*old.domain_u, n_sample)
    vs = np.linspace(*old.domain_v, n_sample)
    scale = max(1.0, np.abs(old.points).max())
    for u in us:
        for v in vs:
            if np.linalg.norm(old.point(u, v) - new.point(u, v)) > tol * scale:
                return False
    return True


# ---------------------------------------------------------------------------
# plain-text dump
# ---------------------------------------------------------------------------


def dump_text(mesh):
    """Serialize a mesh to the documented plain-text format.

    Line oriented:
        igashell-mesh 1
        thickness <T>
        degrees <pu> <pv>
        knots_u <k_0> <k_1> ...
        knots_v <k_0> <k_1> ...
        net <n_u> <n_v>
        <i_u> <i_v> <x> <y> <z> <weight>     (one line per control point)
    """
    p = mesh.patch
    lines = [
        "igashell-mesh 1",
        f"thickness {mesh.thickness!r}",
        f"degrees {p.degrees[0]} {p.degrees[1]}",
        "knots_u " + " ".join(repr(float(k)) for k in p.knots_u),
        "knots_v " + " ".join(repr(float(k)) for k in p.knots_v),
        f"net {p.n_u} {p.n_v}",
    ]
    for i in range(p.n_u):
        for j in range(p.n_v):
            x, y, z = (float(c) for c in p.points[i, j])
            lines.append(f"{i} {j} {x!r} {y!r} {z!r} {float(p.weights[i, j])!r}")
    return "\n".join(lines) + "\n"


def normal_jump(mesh, eps=1e-11, n_sample=4):
    """Largest surface-normal jump across interior element boundaries."""
    patch = mesh.patch
    worst = 0.0
    vs = np.linspace(*patch.domain_v, n_sample + 2)[1:-1]
    for u_star in patch.breakpoints_u[1:-1]:
        for v in vs:
            jump = np.linalg.norm(
                patch.normal(u_star - eps, v) - patch.normal(u_star + eps, v)
            )
            worst = max(worst, jump)
    us = np.linspace(*patch.domain_u, n_sample + 2)[1:-1]
    for v_star in patch.breakpoints_v[1:-1]:
        for u in us:
            jump = np.linalg.norm(
                patch.normal(u, v_star - eps) - patch.normal(u, v_star + eps)
            )
            worst = max(worst, jump)
    return worst
