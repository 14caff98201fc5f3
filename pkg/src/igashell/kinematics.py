"""Mid-surface and through-thickness kinematics of a thin shell.

Conventions used throughout the library:

- Greek indices run over the two surface parameters; component arrays are
  plain (2, 2) / (2,) numpy arrays.
- ``*_cov`` holds covariant components, ``*_con`` contravariant ones.
- The shell director is the unit normal; a material layer at signed offset
  ``xi`` from the mid-surface uses the first-order layer metric
  ``g(xi) = a - 2 xi b`` (and ``G(xi) = A - 2 xi B`` on the reference),
  which is the thin-shell truncation the projected pipelines linearize.
- Fiber directions are stored by their covariant surface components after
  projection onto the reference tangent plane and normalization to unit
  reference length (``A^{ab} L_a L_b = 1``).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateElement, DegenerateLayer, NonPositiveLayerJacobian
from .tensors import (
    curvature_inverse_sensitivity,
    inverse_metric_sensitivity,
    sym2,
)

_DEGENERACY_TOL = 1.0e-14


@dataclass(frozen=True)
class SurfacePointState:
    """Deformed mid-surface quantities at one material point.

    Attributes:
        tangents: (2, 3) rows are the covariant tangent vectors.
        normal: (3,) unit surface normal.
        a_cov / a_con: covariant / contravariant metric, (2, 2).
        b_cov / b_con: covariant / fully raised curvature tensor, (2, 2).
        det_a: determinant of the covariant metric.
        jac_area: surface area stretch J = sqrt(det a / det A); 1 for a
            state built without a reference.
        h_mean: mean curvature H = a^{ab} b_{ab} / 2.
    """

    tangents: np.ndarray
    normal: np.ndarray
    a_cov: np.ndarray
    a_con: np.ndarray
    b_cov: np.ndarray
    b_con: np.ndarray
    det_a: float
    jac_area: float
    h_mean: float


@dataclass(frozen=True)
class ReferencePointState:
    """Reference mid-surface quantities plus projected fiber data.

    The fiber arrays are empty (shape (0, ...)) for isotropic materials.
    ``fiber_con_deriv`` holds the xi-derivative of the normalized layer fiber
    components, (B L)^a = B^{ab} L_b, and ``fiber_outer_deriv`` the
    symmetrized derivative of the structural dyad L^a L^b.
    """

    tangents: np.ndarray
    normal: np.ndarray
    a_cov: np.ndarray
    a_con: np.ndarray
    b_cov: np.ndarray
    b_con: np.ndarray
    b_mixed: np.ndarray
    det_a: float
    sqrt_det_a: float
    h_mean: float
    fiber_cov: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    fiber_con: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    fiber_outer_con: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))
    fiber_con_deriv: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    fiber_outer_deriv: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))

    @property
    def n_fibers(self):
        return self.fiber_cov.shape[0]


@dataclass(frozen=True)
class LayerState:
    """In-plane state of one material layer at signed offset xi.

    ``jstar`` is the in-plane layer area ratio sqrt(det g / det G); ``i1star``
    the first layer invariant G^{ab} g_{ab}; ``i4star`` the squared layer
    fiber stretch per family.
    """

    xi: float
    g_cov: np.ndarray
    g_con: np.ndarray
    det_g: float
    g_ref_cov: np.ndarray
    g_ref_con: np.ndarray
    det_g_ref: float
    jstar: float
    i1star: float
    fiber_con: np.ndarray
    fiber_outer_con: np.ndarray
    i4star: np.ndarray


@dataclass(frozen=True)
class XiDerivatives:
    """Xi-derivatives at the mid-surface used by the projected pipelines.

    Attributes:
        jstar: d(J*)/dxi = 2 J (H0 - H).
        i1star: d(I1*)/dxi = 2 (a_{ab} B^{ab} - b_{ab} A^{ab}).
        g_con: d(g^{ab})/dxi = 2 b^{ab}.
        i4star: d(I4*)/dxi per fiber family.
        fiber_outer: derivative of the layer fiber dyad per family.
    """

    jstar: float
    i1star: float
    g_con: np.ndarray
    i4star: np.ndarray
    fiber_outer: np.ndarray


@dataclass(frozen=True)
class VariationTensors:
    """Sensitivities of raised surface tensors to the covariant metric.

    ``metric``: d a^{ab} / d a_{gd};  ``curvature``: d b^{ab} / d a_{gd}
    at fixed covariant curvature.  Both are (2, 2, 2, 2), symmetric in each
    index pair.
    """

    metric: np.ndarray
    curvature: np.ndarray


def _metric_pieces(tangents, second_derivs):
    a_cov = tangents @ tangents.T
    det_a = a_cov[0, 0] * a_cov[1, 1] - a_cov[0, 1] * a_cov[1, 0]
    if det_a <= _DEGENERACY_TOL:
        raise DegenerateElement(
            f"surface tangents are linearly dependent (det a = {det_a:.3e})"
        )
    cross = np.cross(tangents[0], tangents[1])
    normal = cross / np.linalg.norm(cross)
    a_con = np.array(
        [[a_cov[1, 1], -a_cov[0, 1]], [-a_cov[1, 0], a_cov[0, 0]]]
    ) / det_a
    # curvature components b_ab = n . x_,ab ; second_derivs rows are
    # x_,11, x_,22, x_,12
    b11, b22, b12 = second_derivs @ normal
    b_cov = np.array([[b11, b12], [b12, b22]])
    b_con = a_con @ b_cov @ a_con
    h_mean = 0.5 * float(np.tensordot(a_con, b_cov))
    return a_cov, a_con, b_cov, b_con, det_a, normal, h_mean


def surface_point(tangents, second_derivs, ref=None):
    """Build the deformed-surface state from first and second derivatives.

    Args:
        tangents: (2, 3) covariant tangent vectors.
        second_derivs: (3, 3) rows are the second parametric derivatives
            of the surface map, ordered (11, 22, 12).
        ref: optional ReferencePointState supplying det A for the area
            stretch; J = 1 when omitted.
    """
    a_cov, a_con, b_cov, b_con, det_a, normal, h_mean = _metric_pieces(
        np.asarray(tangents, dtype=float), np.asarray(second_derivs, dtype=float)
    )
    jac = 1.0 if ref is None else float(np.sqrt(det_a / ref.det_a))
    return SurfacePointState(
        tangents=np.asarray(tangents, dtype=float),
        normal=normal,
        a_cov=a_cov,
        a_con=a_con,
        b_cov=b_cov,
        b_con=b_con,
        det_a=float(det_a),
        jac_area=jac,
        h_mean=h_mean,
    )


def reference_point(tangents, second_derivs, fiber_dirs=()):
    """Build the reference state, projecting ambient fiber directions.

    Each entry of ``fiber_dirs`` is an ambient 3-vector; its tangential part
    is normalized to unit length in the reference metric.  Fibers (nearly)
    parallel to the normal are rejected.
    """
    a_cov, a_con, b_cov, b_con, det_a, normal, h_mean = _metric_pieces(
        np.asarray(tangents, dtype=float), np.asarray(second_derivs, dtype=float)
    )
    b_mixed = a_con @ b_cov  # B^g_a = A^{gb} B_{ba}
    fiber_dirs = np.atleast_2d(np.asarray(fiber_dirs, dtype=float).reshape(-1, 3))
    nf = fiber_dirs.shape[0]
    fiber_cov = np.zeros((nf, 2))
    fiber_con = np.zeros((nf, 2))
    fiber_outer = np.zeros((nf, 2, 2))
    fiber_con_deriv = np.zeros((nf, 2))
    fiber_outer_deriv = np.zeros((nf, 2, 2))
    for i in range(nf):
        l_cov = np.asarray(tangents, dtype=float) @ fiber_dirs[i]
        s2 = float(l_cov @ a_con @ l_cov)
        if s2 <= 1.0e-12:
            raise DegenerateElement(
                "fiber direction has no tangential component at a reference point"
            )
        l_cov = l_cov / np.sqrt(s2)
        l_con = a_con @ l_cov
        fiber_cov[i] = l_cov
        fiber_con[i] = l_con
        fiber_outer[i] = np.outer(l_con, l_con)
        # (B L)^a = B^{ab} L_b drives the layer fiber rotation
        bl_con = b_con @ l_cov
        fiber_con_deriv[i] = bl_con
        fiber_outer_deriv[i] = np.outer(l_con, bl_con) + np.outer(bl_con, l_con)
    return ReferencePointState(
        tangents=np.asarray(tangents, dtype=float),
        normal=normal,
        a_cov=a_cov,
        a_con=a_con,
        b_cov=b_cov,
        b_con=b_con,
        b_mixed=b_mixed,
        det_a=float(det_a),
        sqrt_det_a=float(np.sqrt(det_a)),
        h_mean=h_mean,
        fiber_cov=fiber_cov,
        fiber_con=fiber_con,
        fiber_outer_con=fiber_outer,
        fiber_con_deriv=fiber_con_deriv,
        fiber_outer_deriv=fiber_outer_deriv,
    )


def _embedding_from_metric(a_cov):
    """Tangent vectors in the e1-e2 plane realizing a given SPD metric."""
    chol = np.linalg.cholesky(a_cov)
    tangents = np.zeros((2, 3))
    tangents[:, :2] = chol
    return tangents


def surface_point_from_components(a_cov, b_cov, ref=None):
    """Synthesize a surface state from raw metric/curvature components.

    Used for state-level verification: any SPD metric with any symmetric
    curvature is realizable locally, so random component pairs form valid
    test states.  The embedding places the tangent plane on e1-e2.
    """
    a_cov = sym2(np.asarray(a_cov, dtype=float))
    b_cov = sym2(np.asarray(b_cov, dtype=float))
    tangents = _embedding_from_metric(a_cov)
    # second derivatives with normal component b_ab and no tangential part
    second = np.array(
        [b_cov[0, 0] * np.array([0.0, 0.0, 1.0]),
         b_cov[1, 1] * np.array([0.0, 0.0, 1.0]),
         b_cov[0, 1] * np.array([0.0, 0.0, 1.0])]
    )
    return surface_point(tangents, second, ref=ref)


def reference_point_from_components(a_cov, b_cov, fiber_dirs=()):
    """Synthesize a reference state from raw components (see above)."""
    a_cov = sym2(np.asarray(a_cov, dtype=float))
    b_cov = sym2(np.asarray(b_cov, dtype=float))
    tangents = _embedding_from_metric(a_cov)
    second = np.array(
        [b_cov[0, 0] * np.array([0.0, 0.0, 1.0]),
         b_cov[1, 1] * np.array([0.0, 0.0, 1.0]),
         b_cov[0, 1] * np.array([0.0, 0.0, 1.0])]
    )
    return reference_point(tangents, second, fiber_dirs=fiber_dirs)


def _inv2(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
    return inv, det


def layer_state(state, ref, xi):
    """Evaluate the first-order layer metrics and invariants at offset xi.

    Raises DegenerateLayer when either truncated layer metric loses positive
    definiteness (the offset exceeds the local curvature radius).
    """
    g_cov = state.a_cov - 2.0 * xi * state.b_cov
    g_ref_cov = ref.a_cov - 2.0 * xi * ref.b_cov
    det_g = g_cov[0, 0] * g_cov[1, 1] - g_cov[0, 1] * g_cov[1, 0]
    det_g_ref = g_ref_cov[0, 0] * g_ref_cov[1, 1] - g_ref_cov[0, 1] * g_ref_cov[1, 0]
    if det_g <= 0.0 or g_cov[0, 0] <= 0.0 or det_g_ref <= 0.0 or g_ref_cov[0, 0] <= 0.0:
        raise DegenerateLayer(
            f"layer metric at xi={xi:.4g} is not positive definite"
        )
    g_con, _ = _inv2(g_cov)
    g_ref_con, _ = _inv2(g_ref_cov)
    jstar = float(np.sqrt(det_g / det_g_ref))
    if jstar <= 0.0 or not np.isfinite(jstar):
        raise NonPositiveLayerJacobian(f"layer area ratio J* = {jstar:.3e}")
    i1star = float(np.tensordot(g_ref_con, g_cov))
    nf = ref.n_fibers
    fiber_con = np.zeros((nf, 2))
    fiber_outer = np.zeros((nf, 2, 2))
    i4star = np.zeros(nf)
    for i in range(nf):
        # layer fiber: transport of the mid-surface direction, renormalized
        # in the layer reference metric; exact xi-derivative at 0 equals
        # fiber_con_deriv of the reference state
        l_cov = ref.fiber_cov[i] - xi * (ref.b_mixed.T @ ref.fiber_cov[i])
        s2 = float(l_cov @ g_ref_con @ l_cov)
        if s2 <= 0.0:
            raise DegenerateLayer("layer fiber direction degenerated")
        l_con = (g_ref_con @ l_cov) / np.sqrt(s2)
        fiber_con[i] = l_con
        fiber_outer[i] = np.outer(l_con, l_con)
        i4star[i] = float(np.einsum("ab,ab->", g_cov, fiber_outer[i]))
    return LayerState(
        xi=float(xi),
        g_cov=g_cov,
        g_con=g_con,
        det_g=float(det_g),
        g_ref_cov=g_ref_cov,
        g_ref_con=g_ref_con,
        det_g_ref=float(det_g_ref),
        jstar=jstar,
        i1star=i1star,
        fiber_con=fiber_con,
        fiber_outer_con=fiber_outer,
        i4star=i4star,
    )


def xi_derivatives(state, ref):
    """Mid-surface xi-derivatives of the layer quantities (closed forms)."""
    jstar = 2.0 * state.jac_area * (ref.h_mean - state.h_mean)
    i1star = 2.0 * (
        float(np.tensordot(state.a_cov, ref.b_con))
        - float(np.tensordot(state.b_cov, ref.a_con))
    )
    g_con = 2.0 * state.b_con
    nf = ref.n_fibers
    i4star = np.zeros(nf)
    for i in range(nf):
        i4star[i] = -2.0 * float(
            np.tensordot(state.b_cov, ref.fiber_outer_con[i])
        ) + float(np.tensordot(state.a_cov, ref.fiber_outer_deriv[i]))
    return XiDerivatives(
        jstar=float(jstar),
        i1star=float(i1star),
        g_con=g_con,
        i4star=i4star,
        fiber_outer=ref.fiber_outer_deriv.copy(),
    )


def variation_tensors(state):
    """Raised-tensor sensitivities of a surface state (see VariationTensors)."""
    return VariationTensors(
        metric=inverse_metric_sensitivity(state.a_con),
        curvature=curvature_inverse_sensitivity(
            state.a_con, state.b_con, state.h_mean
        ),
    )
