"""Discrete shell operators: loads, constraints, forces and tangents.

A :class:`ShellProblem` binds a mesh, a material, and one constitutive
pipeline, and exposes the assembled operators of the rotation-free
displacement formulation (3 unknowns per control point):

- ``internal_force_and_tangent``: stress-resultant virtual work, including
  the rotation penalties of clamped edges (they derive from a stored
  energy and do not depend on the load factor);
- ``external_force_and_tangent``: follower pressure (with its non-symmetric
  load stiffness), dead edge tractions per unit reference length, dead
  point forces, and the prescribed edge-normal penalty;
- ``contact_force_and_tangent``: frictionless penalty contact against a
  rigid sphere driven along a straight path.

The residual is ``internal + contact - external``; all three blocks are
consistently linearized so the assembled tangent matches finite differences
of the residual.  Constraints (fixed components, ties, symmetry edges) are
applied by null-space condensation, see :class:`Condensation`.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.spatial.transform import Rotation

from .constitution import default_gauss_points, evaluate, gauss_rule
from .errors import InvalidDimensions
from .kinematics import layer_state, reference_point, surface_point
from .materials import condensed_energy_density, reference_modulus
from .tensors import LEVI_CIVITA, TRIPLE_WEIGHTS, rank4_to_triple, sym_to_triple

# Penalty scales relative to the ground Young modulus E and thickness T:
# rotation penalties (clamped or driven edge normals) use E T^3, contact
# uses E T, each with the customary large prefactor.
ROTATION_PENALTY_SCALE = 1.0e3
CONTACT_PENALTY_SCALE = 1.0e8


# ---------------------------------------------------------------------------
# load and constraint descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FollowerPressure:
    """Live pressure along the current surface normal [kPa]."""

    magnitude: float


@dataclass(frozen=True)
class DeadEdgeTraction:
    """Constant force per unit reference edge length [kPa mm] on one side."""

    side: str
    traction: tuple


@dataclass(frozen=True)
class PointForce:
    """Dead force [kPa mm^2] on a single control point.

    ``target`` is either a flat control-point index or a pair of sides
    naming a patch corner, e.g. ``("u-max", "v-max")``.
    """

    target: object
    force: tuple


@dataclass(frozen=True)
class PrescribedNormal:
    """Drive the surface normal along one edge by a rotation penalty.

    The target normal at load factor t is the reference edge normal rotated
    by ``t * angle`` about ``axis``.  ``penalty`` defaults to the rotation
    penalty scale times E T^3.
    """

    side: str
    axis: tuple
    angle: float
    penalty: float = None


@dataclass(frozen=True)
class ContactSphere:
    """Rigid frictionless sphere driven from ``center_start`` to ``center_end``.

    Penetration g < 0 of the mid-surface adds the penalty traction
    -penalty * g along the sphere's outward radial direction.  ``penalty``
    defaults to the contact penalty scale times E T.
    """

    radius: float
    center_start: tuple
    center_end: tuple
    penalty: float = None

    def center(self, load_factor):
        a = np.asarray(self.center_start, dtype=float)
        b = np.asarray(self.center_end, dtype=float)
        return a + load_factor * (b - a)


@dataclass(frozen=True)
class LoadCase:
    """All loads of one analysis; every part scales with the load factor."""

    pressure: FollowerPressure = None
    edge_tractions: tuple = ()
    point_forces: tuple = ()
    prescribed_normals: tuple = ()


@dataclass(frozen=True)
class ConstraintSet:
    """Kinematic constraints of one analysis.

    - ``fixed``: dofs pinned to zero, each a flat dof id or (point, component);
    - ``ties``: equal-value pairs (slave, master) in the same format;
    - ``clamped_edges``: sides whose control row is fixed and whose normal
      is tied to the reference normal by the rotation penalty;
    - ``symmetry``: (side, component) pairs declaring a mirror plane with
      that normal component; the edge row loses its out-of-plane component
      and the next row's in-plane components are tied across, which
      reproduces the symmetric subspace of the matched full model exactly;
    - ``rotation_penalty``: override for the clamped-edge penalty.
    """

    fixed: tuple = ()
    ties: tuple = ()
    clamped_edges: tuple = ()
    symmetry: tuple = ()
    rotation_penalty: float = None


def _dof_id(item):
    if isinstance(item, (int, np.integer)):
        return int(item)
    point, comp = item
    return 3 * int(point) + int(comp)


class Condensation:
    """Null-space map u = C q for fixed and tied degrees of freedom.

    Ties are resolved transitively (chains and trees of masters are
    allowed); a tie into a fixed dof fixes the whole group.
    """

    def __init__(self, n_dofs, fixed=(), ties=()):
        parent = np.arange(n_dofs)

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for slave, master in ties:
            rs, rm = find(_dof_id(slave)), find(_dof_id(master))
            if rs != rm:
                parent[rs] = rm
        is_fixed = np.zeros(n_dofs, dtype=bool)
        for item in fixed:
            is_fixed[find(_dof_id(item))] = True
        roots = np.fromiter((find(i) for i in range(n_dofs)), dtype=int)
        free_roots = np.unique(roots[~is_fixed[roots]])
        col_of_root = {r: k for k, r in enumerate(free_roots)}
        rows, cols = [], []
        for i in range(n_dofs):
            r = roots[i]
            if not is_fixed[r]:
                rows.append(i)
                cols.append(col_of_root[r])
        self.n_dofs = n_dofs
        self.n_reduced = len(free_roots)
        self.matrix = sparse.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(n_dofs, self.n_reduced)
        )

    def reduce_vector(self, r):
        return self.matrix.T @ r

    def reduce_matrix(self, k):
        return (self.matrix.T @ k @ self.matrix).tocsc()

    def expand(self, q):
        return self.matrix @ q


# ---------------------------------------------------------------------------
# small geometric helpers
# ---------------------------------------------------------------------------


def _cross_matrix(v):
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        raise InvalidDimensions("rotation axis must be nonzero")
    return Rotation.from_rotvec(axis / norm * angle).as_matrix()


def _normal_variation_rows(state, d1):
    """Per-dof data of the normal variation delta n = P delta m / j.

    Returns (D, P, j) with D[a] the 3x3 matrix mapping the displacement of
    control point a to the variation of the unnormalized normal m = a1 x a2.
    """
    a1, a2 = state.tangents
    n1, n2 = d1
    d_rows = (
        -n1[:, None, None] * _cross_matrix(a2)[None]
        + n2[:, None, None] * _cross_matrix(a1)[None]
    )
    p = np.eye(3) - np.outer(state.normal, state.normal)
    return d_rows, p, np.sqrt(state.det_a)


def _normal_second_variation(r_vec, state, d1, d_rows, p, j):
    """Contraction r . (second variation of the unit normal) as a matrix.

    Returns the (3k, 3k) block over the local dofs for a fixed vector r;
    the caller multiplies by its own weights.
    """
    k = d_rows.shape[0]
    n1, n2 = d1
    pr = p @ r_vec
    q_rows = np.einsum("p,apq->aq", state.normal, d_rows)
    s_rows = np.einsum("p,apq->aq", pr, d_rows)
    dtpd = np.einsum("api,pq,bqj->aibj", d_rows, p, d_rows)
    rn = float(r_vec @ state.normal)
    block = -(
        np.einsum("ai,bj->aibj", q_rows, s_rows)
        + np.einsum("ai,bj->aibj", s_rows, q_rows)
        + rn * dtpd
    ) / j ** 2
    skew = np.einsum("ijk,k->ij", LEVI_CIVITA, pr)
    cr = np.outer(n1, n2) - np.outer(n2, n1)
    block += np.einsum("ab,ij->aibj", cr, skew) / j
    return block.reshape(3 * k, 3 * k)


def _strain_matrices(state, second, d1, d2, d_rows, p, j):
    """First-variation matrices of the covariant metric and curvature.

    Rows follow the component order (11, 22, 12); columns are the 3k local
    displacement dofs.  ``second`` holds the current second-derivative
    vectors of the surface map in the same row order.
    """
    a1, a2 = state.tangents
    n1, n2 = d1
    k = n1.size
    ba = np.empty((3, k, 3))
    ba[0] = 2.0 * n1[:, None] * a1[None, :]
    ba[1] = 2.0 * n2[:, None] * a2[None, :]
    ba[2] = n1[:, None] * a2[None, :] + n2[:, None] * a1[None, :]
    pt = second @ p.T
    bb = d2[:, :, None] * state.normal[None, None, :]
    bb = bb + np.einsum("kp,apq->kaq", pt, d_rows) / j
    return ba.reshape(3, 3 * k), bb.reshape(3, 3 * k)


# ---------------------------------------------------------------------------
# the assembled problem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DofVector:
    """Displacements of all control points plus the current load factor."""

    displacements: np.ndarray
    load_factor: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "displacements", np.asarray(self.displacements, dtype=float)
        )
        if self.displacements.ndim != 1 or self.displacements.size % 3:
            raise InvalidDimensions("displacement vector must hold 3 dofs per point")


def _as_displacements(dofs):
    if isinstance(dofs, DofVector):
        return dofs.displacements
    return np.asarray(dofs, dtype=float)


class ShellProblem:
    """One discretized shell analysis: mesh + material + pipeline + loads."""

    def __init__(self, mesh, material, pipeline, fiber_directions=(),
                 loads=None, constraints=None, contact=None, n_gp_thickness=None):
        self.mesh = mesh
        self.material = material
        self.pipeline = pipeline
        self.loads = loads if loads is not None else LoadCase()
        self.constraints = constraints if constraints is not None else ConstraintSet()
        self.contact = contact
        self.n_gp_thickness = (
            n_gp_thickness if n_gp_thickness is not None
            else default_gauss_points(material)
        )
        fiber_directions = tuple(np.asarray(d, dtype=float) for d in fiber_directions)
        if fiber_directions and len(fiber_directions) != material.n_fibers:
            raise InvalidDimensions(
                f"material expects {material.n_fibers} fiber directions, "
                f"got {len(fiber_directions)}"
            )
        self.fiber_directions = fiber_directions

        pts = mesh.patch.points.reshape(-1, 3)
        self.reference_positions = pts
        self.n_dofs = mesh.n_dofs
        self._dof_maps = []
        self._refs = []
        self._moduli = []
        for el in mesh.elements:
            dmap = (3 * el.indices[:, None] + np.arange(3)).ravel()
            self._dof_maps.append(dmap)
            refs = []
            moduli = []
            for qp in el.quad_points:
                if fiber_directions:
                    x_loc = pts[el.indices]
                    ref = reference_point(
                        qp.d1 @ x_loc, qp.d2 @ x_loc, fiber_directions
                    )
                else:
                    ref = qp.ref
                refs.append(ref)
                moduli.append(
                    reference_modulus(material, ref) if pipeline == "dd" else None
                )
            self._refs.append(refs)
            self._moduli.append(moduli)
        self._condensation = None
        self._edge_cache = {}

    # -- constraint handling -------------------------------------------------

    @property
    def condensation(self):
        if self._condensation is None:
            fixed, ties = self._expand_constraints()
            self._condensation = Condensation(self.n_dofs, fixed, ties)
        return self._condensation

    def _expand_constraints(self):
        cs = self.constraints
        fixed = [_dof_id(item) for item in cs.fixed]
        ties = [(_dof_id(s), _dof_id(m)) for s, m in cs.ties]
        for side in cs.clamped_edges:
            for point in self.mesh.boundary_rows(side):
                fixed.extend(3 * point + c for c in range(3))
        for side, comp in cs.symmetry:
            edge = self.mesh.boundary_rows(side)
            inner = self.mesh.boundary_rows(side, offset=1)
            fixed.extend(3 * point + comp for point in edge)
            for pe, pi in zip(edge, inner):
                ties.extend(
                    (3 * pi + c, 3 * pe + c) for c in range(3) if c != comp
                )
        return fixed, ties

    # -- per-load penalties ---------------------------------------------------

    def _rotation_penalty(self, override=None):
        if override is not None:
            return override
        e = self.material.young_equivalent
        return ROTATION_PENALTY_SCALE * e * self.material.thickness ** 3

    def _contact_penalty(self):
        if self.contact.penalty is not None:
            return self.contact.penalty
        e = self.material.young_equivalent
        return CONTACT_PENALTY_SCALE * e * self.material.thickness

    def _edge_points(self, side):
        if side not in self._edge_cache:
            self._edge_cache[side] = self.mesh.edge_rule(side)
        return self._edge_cache[side]

    # -- assembled operators --------------------------------------------------

    def positions(self, dofs):
        u = _as_displacements(dofs)
        return self.reference_positions + u.reshape(-1, 3)

    def internal_force_and_tangent(self, dofs):
        """Material virtual work plus clamped-edge rotation penalties."""
        if self.material.anisotropic and not self.fiber_directions:
            raise InvalidDimensions(
                "anisotropic material requires fiber directions"
            )
        x = self.positions(dofs)
        force = np.zeros(self.n_dofs)
        rows, cols, vals = [], [], []
        weights = TRIPLE_WEIGHTS
        wmat = np.outer(weights, weights)
        for el, dmap, refs, moduli in zip(
            self.mesh.elements, self._dof_maps, self._refs, self._moduli
        ):
            x_loc = x[el.indices]
            k_el = np.zeros((dmap.size, dmap.size))
            f_el = np.zeros(dmap.size)
            for qp, ref, modulus in zip(el.quad_points, refs, moduli):
                second = qp.d2 @ x_loc
                state = surface_point(qp.d1 @ x_loc, second, ref)
                res, tan = evaluate(
                    self.material, self.pipeline, state, ref,
                    n_gp=self.n_gp_thickness, ref_modulus=modulus,
                )
                w = qp.weight * ref.sqrt_det_a
                d_rows, p, j = _normal_variation_rows(state, qp.d1)
                ba, bb = _strain_matrices(state, second, qp.d1, qp.d2, d_rows, p, j)
                tau3 = sym_to_triple(res.tau) * weights
                mom3 = sym_to_triple(res.moment) * weights
                f_el += w * (0.5 * ba.T @ tau3 + bb.T @ mom3)

                k_qp = (
                    0.25 * ba.T @ (rank4_to_triple(tan.c) * wmat) @ ba
                    + 0.5 * ba.T @ (rank4_to_triple(tan.d) * wmat) @ bb
                    + 0.5 * bb.T @ (rank4_to_triple(tan.e) * wmat) @ ba
                    + bb.T @ (rank4_to_triple(tan.f) * wmat) @ bb
                )
                # geometric part: tau against the metric's second variation
                grads = qp.d1.T
                kab = grads @ res.tau @ grads.T
                kq4 = k_qp.reshape(kab.shape[0], 3, kab.shape[0], 3)
                for i in range(3):
                    kq4[:, i, :, i] += kab
                # geometric part: moment against the curvature's second
                # variation; the second-derivative vectors collapse into one
                # contraction direction, the basis-Hessian terms couple
                # through the projected normal map
                r_m = mom3 @ second
                k_qp += _normal_second_variation(r_m, state, qp.d1, d_rows, p, j)
                w2m = mom3 @ qp.d2
                pd = np.einsum("pq,aqi->api", p, d_rows)
                k_hess = (
                    np.einsum("a,bij->aibj", w2m, pd)
                    + np.einsum("b,aji->aibj", w2m, pd)
                ) / j
                k_qp += k_hess.reshape(dmap.size, dmap.size)
                k_el += w * k_qp
            force[dmap] += f_el
            rows.append(np.repeat(dmap, dmap.size))
            cols.append(np.tile(dmap, dmap.size))
            vals.append(k_el.ravel())

        for side in self.constraints.clamped_edges:
            f_pen, triplets = self._normal_penalty(
                x, side, self._rotation_penalty(self.constraints.rotation_penalty),
                target=None,
            )
            force += f_pen
            rows.append(triplets[0])
            cols.append(triplets[1])
            vals.append(triplets[2])

        tangent = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_dofs, self.n_dofs),
        ).tocsr()
        return force, tangent

    def _normal_penalty(self, x, side, penalty, target):
        """Force/tangent of the edge-normal penalty, shared by clamps and
        driven normals.  ``target`` maps an edge point's reference normal to
        the prescribed normal (identity for clamps)."""
        force = np.zeros(self.n_dofs)
        rows, cols, vals = [], [], []
        for ep in self._edge_points(side):
            x_loc = x[ep.indices]
            state = surface_point(ep.d1 @ x_loc, ep.d2 @ x_loc, ep.ref)
            dmap = (3 * ep.indices[:, None] + np.arange(3)).ravel()
            if target is None:
                n_bar = ep.ref.normal
            else:
                n_bar = target(ep.ref.normal)
            d_rows, p, j = _normal_variation_rows(state, ep.d1)
            w = penalty * ep.weight * ep.arc_rate
            diff = state.normal - n_bar
            delta_n = np.einsum("p,pq,aqi->ai", diff, p, d_rows).ravel() / j
            force[dmap] += w * delta_n
            pd = np.einsum("pq,aqi->api", p, d_rows) / j
            k_ep = np.einsum("api,bpj->aibj", pd, pd).reshape(dmap.size, dmap.size)
            k_ep += _normal_second_variation(diff, state, ep.d1, d_rows, p, j)
            rows.append(np.repeat(dmap, dmap.size))
            cols.append(np.tile(dmap, dmap.size))
            vals.append(w * k_ep.ravel())
        triplets = (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
        return force, triplets

    def external_force_and_tangent(self, dofs, load_factor=None):
        """Pressure, dead loads, and driven edge normals at one load factor.

        Returns (force, tangent) entering the residual as ``-force`` and the
        system matrix as ``-tangent`` (the penalty parts carry opposite sign
        inside, so the caller never distinguishes them).
        """
        t = self._factor(dofs, load_factor)
        x = self.positions(dofs)
        force = np.zeros(self.n_dofs)
        rows = [np.zeros(0, dtype=int)]
        cols = [np.zeros(0, dtype=int)]
        vals = [np.zeros(0)]
        loads = self.loads

        if loads.pressure is not None and t != 0.0:
            p_mag = t * loads.pressure.magnitude
            for el, dmap in zip(self.mesh.elements, self._dof_maps):
                x_loc = x[el.indices]
                f_el = np.zeros(dmap.size)
                k_el = np.zeros((dmap.size, dmap.size))
                for qp in el.quad_points:
                    state = surface_point(qp.d1 @ x_loc, qp.d2 @ x_loc, qp.ref)
                    m_vec = np.cross(state.tangents[0], state.tangents[1])
                    d_rows, _, _ = _normal_variation_rows(state, qp.d1)
                    w = qp.weight * p_mag
                    f_el += w * np.einsum(
                        "a,i->ai", qp.values, m_vec
                    ).ravel()
                    k_el += w * np.einsum(
                        "a,bij->aibj", qp.values, d_rows
                    ).reshape(dmap.size, dmap.size)
                force[dmap] += f_el
                rows.append(np.repeat(dmap, dmap.size))
                cols.append(np.tile(dmap, dmap.size))
                vals.append(k_el.ravel())

        for tr in loads.edge_tractions:
            vec = t * np.asarray(tr.traction, dtype=float)
            for ep in self._edge_points(tr.side):
                dmap = (3 * ep.indices[:, None] + np.arange(3)).ravel()
                force[dmap] += ep.weight * ep.arc_rate * np.outer(
                    ep.values, vec
                ).ravel()

        for pf in loads.point_forces:
            idx = self._point_index(pf.target)
            force[3 * idx: 3 * idx + 3] += t * np.asarray(pf.force, dtype=float)

        for pn in loads.prescribed_normals:
            rot = _rotation(pn.axis, t * pn.angle)
            f_pen, triplets = self._normal_penalty(
                x, pn.side, self._rotation_penalty(pn.penalty),
                target=lambda n0, rot=rot: rot @ n0,
            )
            force -= f_pen
            rows.append(triplets[0])
            cols.append(triplets[1])
            vals.append(-triplets[2])

        tangent = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_dofs, self.n_dofs),
        ).tocsr()
        return force, tangent

    def contact_active_set(self, dofs, load_factor=None):
        """Quadrature points penetrating the sphere, as (element, point) ids."""
        t = self._factor(dofs, load_factor)
        if self.contact is None:
            return frozenset()
        center = self.contact.center(t)
        radius = self.contact.radius
        x = self.positions(dofs)
        active = set()
        for i_el, el in enumerate(self.mesh.elements):
            x_loc = x[el.indices]
            for i_qp, qp in enumerate(el.quad_points):
                pos = qp.values @ x_loc
                if float(np.linalg.norm(pos - center)) < radius:
                    active.add((i_el, i_qp))
        return frozenset(active)

    def contact_force_and_tangent(self, dofs, load_factor=None, active=None,
                                  scale=1.0):
        """Penalty forces against the rigid sphere at one load factor.

        With ``active=None`` the penalty acts unilaterally wherever the
        surface penetrates the sphere.  Passing an explicit set of
        ``(element, point)`` ids instead pins bilateral springs on exactly
        those quadrature points, which removes the activation kink; the
        solver iterates on that set until it matches the penetrating set.
        ``scale`` multiplies the penalty parameter so the solver can
        continue from a softened spring toward the nominal one.
        """
        t = self._factor(dofs, load_factor)
        force = np.zeros(self.n_dofs)
        rows = [np.zeros(0, dtype=int)]
        cols = [np.zeros(0, dtype=int)]
        vals = [np.zeros(0)]
        if self.contact is None:
            tangent = sparse.coo_matrix((self.n_dofs, self.n_dofs)).tocsr()
            return force, tangent
        sphere = self.contact
        center = sphere.center(t)
        eps = scale * self._contact_penalty()
        x = self.positions(dofs)
        for i_el, (el, dmap, refs) in enumerate(
            zip(self.mesh.elements, self._dof_maps, self._refs)
        ):
            x_loc = x[el.indices]
            f_el = np.zeros(dmap.size)
            k_el = np.zeros((dmap.size, dmap.size))
            touched = False
            for i_qp, (qp, ref) in enumerate(zip(el.quad_points, refs)):
                pos = qp.values @ x_loc
                radial = pos - center
                dist = float(np.linalg.norm(radial))
                gap = dist - sphere.radius
                if active is None:
                    if gap >= 0.0:
                        continue
                elif (i_el, i_qp) not in active:
                    continue
                touched = True
                e_r = radial / dist
                w = eps * qp.weight * ref.sqrt_det_a
                f_el += w * gap * np.outer(qp.values, e_r).ravel()
                shape = np.outer(qp.values, qp.values)
                dir_block = np.outer(e_r, e_r) + (gap / dist) * (
                    np.eye(3) - np.outer(e_r, e_r)
                )
                k_el += w * np.einsum("ab,ij->aibj", shape, dir_block).reshape(
                    dmap.size, dmap.size
                )
            if touched:
                force[dmap] += f_el
                rows.append(np.repeat(dmap, dmap.size))
                cols.append(np.tile(dmap, dmap.size))
                vals.append(k_el.ravel())
        tangent = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_dofs, self.n_dofs),
        ).tocsr()
        return force, tangent

    def residual_and_tangent(self, dofs, load_factor=None, contact_active=None,
                             contact_scale=1.0):
        """R = internal + contact - external, with its consistent tangent."""
        t = self._factor(dofs, load_factor)
        f_int, k_int = self.internal_force_and_tangent(dofs)
        f_ext, k_ext = self.external_force_and_tangent(dofs, t)
        residual = f_int - f_ext
        tangent = k_int - k_ext
        if self.contact is not None:
            f_c, k_c = self.contact_force_and_tangent(
                dofs, t, contact_active, contact_scale
            )
            residual += f_c
            tangent = tangent + k_c
        return residual, tangent

    # -- scalar outputs --------------------------------------------------------

    def internal_energy(self, dofs):
        """Stored energy of the shell [kPa mm^3].

        Defined for the quadrature ('np') and decoupled ('dd') pipelines,
        whose resultants are exact gradients of a thickness-integrated
        energy; the partially-stressed closed form is not integrable and is
        rejected.
        """
        if self.pipeline not in ("np", "dd"):
            raise ValueError(
                "internal energy is defined for the 'np' and 'dd' pipelines"
            )
        x = self.positions(dofs)
        mat = self.material
        half = 0.5 * mat.thickness
        pts, wts = gauss_rule(self.n_gp_thickness)
        energy = 0.0
        for el, refs, moduli in zip(self.mesh.elements, self._refs, self._moduli):
            x_loc = x[el.indices]
            for qp, ref, modulus in zip(el.quad_points, refs, moduli):
                state = surface_point(qp.d1 @ x_loc, qp.d2 @ x_loc, ref)
                w = qp.weight * ref.sqrt_det_a
                if self.pipeline == "np":
                    dens = sum(
                        half * wx * condensed_energy_density(
                            mat, layer_state(state, ref, half * px)
                        )
                        for px, wx in zip(pts, wts)
                    )
                else:
                    dens = mat.thickness * condensed_energy_density(
                        mat, layer_state(state, ref, 0.0)
                    )
                    db = sym_to_triple(state.b_cov - ref.b_cov) * TRIPLE_WEIGHTS
                    fmod = mat.thickness ** 2 / 12.0 * rank4_to_triple(modulus)
                    dens += 0.5 * float(db @ fmod @ db)
                energy += w * dens
        for side in self.constraints.clamped_edges:
            pen = self._rotation_penalty(self.constraints.rotation_penalty)
            for ep in self._edge_points(side):
                x_loc = x[ep.indices]
                state = surface_point(ep.d1 @ x_loc, ep.d2 @ x_loc, ep.ref)
                diff = state.normal - ep.ref.normal
                energy += 0.5 * pen * ep.weight * ep.arc_rate * float(diff @ diff)
        return energy

    def enclosed_volume(self, dofs):
        """Volume (1/3) integral of x . m over the current surface [mm^3]."""
        x = self.positions(dofs)
        vol = 0.0
        for el in self.mesh.elements:
            x_loc = x[el.indices]
            for qp in el.quad_points:
                tangents = qp.d1 @ x_loc
                pos = qp.values @ x_loc
                vol += qp.weight * float(
                    pos @ np.cross(tangents[0], tangents[1])
                ) / 3.0
        return vol

    def reaction_moment(self, dofs, load_factor=None):
        """Work-conjugate moment of the driven edge normals [kPa mm^3].

        The moment an external agent must apply to hold the edge rotation
        angle: d(penalty energy)/d(angle).  Prescribed normals with a zero
        angle act as plain rotation restraints and are excluded (their
        reaction balances the driven moment, so summing everything would
        always return zero).
        """
        t = self._factor(dofs, load_factor)
        x = self.positions(dofs)
        total = 0.0
        driven = [pn for pn in self.loads.prescribed_normals if pn.angle != 0.0]
        for pn in driven:
            rot = _rotation(pn.axis, t * pn.angle)
            axis = np.asarray(pn.axis, dtype=float)
            axis = axis / np.linalg.norm(axis)
            pen = self._rotation_penalty(pn.penalty)
            for ep in self._edge_points(pn.side):
                x_loc = x[ep.indices]
                state = surface_point(ep.d1 @ x_loc, ep.d2 @ x_loc, ep.ref)
                n_bar = rot @ ep.ref.normal
                dn_bar = np.cross(axis, n_bar)
                diff = state.normal - n_bar
                total -= pen * ep.weight * ep.arc_rate * float(diff @ dn_bar)
        return total

    # -- misc -------------------------------------------------------------------

    def _factor(self, dofs, load_factor):
        if load_factor is not None:
            return float(load_factor)
        if isinstance(dofs, DofVector):
            return dofs.load_factor
        return 1.0

    def _point_index(self, target):
        if isinstance(target, (int, np.integer)):
            return int(target)
        side_u, side_v = target
        return self.mesh.corner_index(side_u, side_v)


# ---------------------------------------------------------------------------
# module-level entry points mirroring the problem methods
# ---------------------------------------------------------------------------


def internal_force_and_tangent(mesh, dofs, material, pipeline,
                               fiber_directions=(), n_gp_thickness=None):
    problem = ShellProblem(
        mesh, material, pipeline, fiber_directions=fiber_directions,
        n_gp_thickness=n_gp_thickness,
    )
    return problem.internal_force_and_tangent(dofs)


def external_force_and_tangent(mesh, dofs, material, loads, load_factor=None):
    problem = ShellProblem(mesh, material, "np", loads=loads)
    return problem.external_force_and_tangent(dofs, load_factor)


def contact_force_and_tangent(mesh, dofs, material, sphere, load_factor=None):
    problem = ShellProblem(mesh, material, "np", contact=sphere)
    return problem.contact_force_and_tangent(dofs, load_factor)
