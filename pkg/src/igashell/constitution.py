"""Shell constitution: stress resultants and consistent tangents.

Three interchangeable pipelines turn a material law into mid-surface stress
resultants (membrane stress tau and bending moment M0) plus the four tangent
blocks of the linearized internal virtual work:

    c = 2 d tau / d a,   d = d tau / d b,
    e = 2 d M0  / d a,   f = d M0  / d b,

so that d tau = c : da / 2 + d : db and d M0 = e : da / 2 + f : db for
symmetric increments of the covariant metric a and curvature b.

- 'np': numeric through-thickness Gauss quadrature of the layer kernel.
- 'ap': closed-form thickness projection of the linearized layer stress
        (fully stressed, or per-family partially stressed thickness
        intervals when the dispersed-fiber switch is active).
- 'dd': decoupled membrane + quadratic bending about the reference modulus.

The 'ap' tangents are generally non-symmetric (d != transpose(e)); assembly
must not symmetrize.
"""

from dataclasses import dataclass

import numpy as np

from . import materials
from .kinematics import layer_state, xi_derivatives
from .tensors import contract44, outer22


@dataclass(frozen=True)
class StressResultants:
    """Membrane stress resultant [kPa mm] and bending moment [kPa mm^2]."""

    tau: np.ndarray
    moment: np.ndarray


@dataclass(frozen=True)
class TangentSet:
    """The four tangent blocks (c, d, e, f) of the resultant linearization."""

    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray


@dataclass(frozen=True)
class SwitchInterval:
    """Thickness interval over which one fiber family carries tension.

    ``lower``/``upper`` bound the tensile sub-interval of [-T/2, T/2];
    ``empty`` marks a fully compressed family.  The sensitivity tensors are
    the derivatives of the moving bounds with respect to the covariant
    mid-surface metric (``lower_dmetric``/``upper_dmetric``) and curvature
    (``lower_dcurv``/``upper_dcurv``); they vanish for bounds pinned at the
    outer surfaces.
    """

    lower: float
    upper: float
    empty: bool
    full: bool
    lower_dmetric: np.ndarray
    upper_dmetric: np.ndarray
    lower_dcurv: np.ndarray
    upper_dcurv: np.ndarray


_Z22 = np.zeros((2, 2))


def switch_interval(i4, i4_deriv, thickness, fiber_outer=None, fiber_outer_deriv=None):
    """Locate the tensile thickness interval of one fiber family.

    The layer stretch is linearized through the thickness,
    I4*(xi) ~ I4 + xi dI4/dxi, and the interval is the intersection of
    {I4*(xi) > 1} with [-T/2, T/2].  When the family direction tensors are
    supplied, the metric/curvature sensitivities of any interior bound
    xi0 = (1 - I4) / (dI4/dxi) are returned as well.
    """
    half = 0.5 * thickness
    zeros = (_Z22, _Z22, _Z22, _Z22)

    def interval(lo, hi, empty=False, full=False, moving_lower=None, moving_upper=None):
        u1 = v1 = u2 = v2 = _Z22
        if moving_lower is not None:
            u1, v1 = moving_lower
        if moving_upper is not None:
            u2, v2 = moving_upper
        return SwitchInterval(
            lower=lo, upper=hi, empty=empty, full=full,
            lower_dmetric=u1, upper_dmetric=u2,
            lower_dcurv=v1, upper_dcurv=v2,
        )

    if i4_deriv == 0.0:
        if i4 > 1.0:
            return interval(-half, half, full=True)
        return interval(0.0, 0.0, empty=True)

    xi0 = (1.0 - i4) / i4_deriv
    if fiber_outer is not None:
        # xi0 depends on the state through I4 = a : LL and
        # dI4/dxi = -2 b : LL + a : dLL/dxi
        y = -(i4_deriv * fiber_outer + (1.0 - i4) * fiber_outer_deriv) / i4_deriv ** 2
        z = 2.0 * (1.0 - i4) * fiber_outer / i4_deriv ** 2
    else:
        y = z = _Z22

    if i4_deriv > 0.0:
        if xi0 < -half:
            return interval(-half, half, full=True)
        if xi0 <= half:
            return interval(xi0, half, moving_lower=(y, z))
        return interval(0.0, 0.0, empty=True)
    if xi0 < -half:
        return interval(0.0, 0.0, empty=True)
    if xi0 <= half:
        return interval(-half, xi0, moving_upper=(y, z))
    return interval(-half, half, full=True)


def default_gauss_points(mat):
    """Default through-thickness rule: 2 points, 5 when the switch is on."""
    return 5 if mat.switch_enabled else 2


_GAUSS_CACHE = {}


def gauss_rule(n_gp):
    """Cached Gauss-Legendre points and weights on [-1, 1]."""
    if n_gp not in _GAUSS_CACHE:
        _GAUSS_CACHE[n_gp] = np.polynomial.legendre.leggauss(n_gp)
    return _GAUSS_CACHE[n_gp]


def np_resultants(mat, state, ref, n_gp=None):
    """Numerically projected resultants by through-thickness quadrature."""
    if n_gp is None:
        n_gp = default_gauss_points(mat)
    pts, wts = gauss_rule(n_gp)
    half = 0.5 * mat.thickness
    tau = np.zeros((2, 2))
    moment = np.zeros((2, 2))
    c = np.zeros((2, 2, 2, 2))
    de = np.zeros((2, 2, 2, 2))
    f = np.zeros((2, 2, 2, 2))
    for p, w in zip(pts, wts):
        xi = half * p
        wxi = half * w
        layer = layer_state(state, ref, xi)
        ls = materials.layer_kernel(mat, layer)
        tau += wxi * ls.tau
        moment -= wxi * xi * ls.tau
        c += wxi * ls.tangent
        de -= wxi * xi * ls.tangent
        f += wxi * xi * xi * ls.tangent
    return StressResultants(tau, moment), TangentSet(c, de, de.copy(), f)


def ap_full_resultants(mat, state, ref, xderivs=None):
    """Fully stressed closed-form projection (all families active)."""
    if xderivs is None:
        xderivs = xi_derivatives(state, ref)
    h = materials.hat_kernel(mat, state, ref, xderivs)
    t = mat.thickness
    t3 = t ** 3 / 12.0
    return (
        StressResultants(t * h.tau, -t3 * h.tau_d3),
        TangentSet(t * h.c, t * h.d, -t3 * h.c_d3, -t3 * h.d_d3),
    )


def ap_partial_resultants(mat, state, ref, xderivs=None):
    """Closed-form projection with per-family tensile thickness intervals.

    Only meaningful for the dispersed-fiber material with the switch
    enabled: the isotropic part integrates over the full thickness, each
    fiber family over its own tensile interval, and the moving interval
    bounds contribute boundary terms to all four tangent blocks.
    """
    if not (mat.variant == "goh" and mat.switch_enabled):
        raise ValueError("partial projection requires the fiber switch")
    if xderivs is None:
        xderivs = xi_derivatives(state, ref)
    h = materials.hat_kernel(mat, state, ref, xderivs)
    t = mat.thickness
    t3 = t ** 3 / 12.0
    iso = h.iso
    tau = t * iso.tau
    moment = -t3 * iso.tau_d3
    c = t * iso.c
    d = np.zeros((2, 2, 2, 2))
    e = -t3 * iso.c_d3
    f = -t3 * iso.d_d3
    for i, fb in enumerate(h.fibers):
        ll = ref.fiber_outer_con[i]
        i4 = float(np.tensordot(state.a_cov, ll))
        si = switch_interval(
            i4, xderivs.i4star[i], t,
            fiber_outer=ll, fiber_outer_deriv=xderivs.fiber_outer[i],
        )
        if si.empty:
            continue
        t1, t2 = si.lower, si.upper
        w0 = t2 - t1
        w1 = 0.5 * (t2 * t2 - t1 * t1)
        m1 = (t1 ** 3 - t2 ** 3) / 3.0
        tau = tau + w0 * fb.tau + w1 * fb.tau_d3
        moment = moment - w1 * fb.tau + m1 * fb.tau_d3
        c = c + w0 * fb.c + w1 * fb.c_d3
        d = d + w1 * fb.d_d3
        e = e - w1 * fb.c + m1 * fb.c_d3
        f = f + m1 * fb.d_d3
        if not si.full:
            # Leibniz terms from the moving bounds: the integrand evaluated
            # at a bound times the bound's state sensitivity
            tau1 = fb.tau + t1 * fb.tau_d3
            tau2 = fb.tau + t2 * fb.tau_d3
            c = c + 2.0 * (outer22(tau2, si.upper_dmetric) - outer22(tau1, si.lower_dmetric))
            d = d + outer22(tau2, si.upper_dcurv) - outer22(tau1, si.lower_dcurv)
            e = e + 2.0 * (t1 * outer22(tau1, si.lower_dmetric) - t2 * outer22(tau2, si.upper_dmetric))
            f = f + t1 * outer22(tau1, si.lower_dcurv) - t2 * outer22(tau2, si.upper_dcurv)
    return StressResultants(tau, moment), TangentSet(c, d, e, f)


def dd_resultants(mat, state, ref, ref_modulus=None):
    """Decoupled split: nonlinear membrane + quadratic reference bending."""
    if ref_modulus is None:
        ref_modulus = materials.reference_modulus(mat, ref)
    mem = materials.membrane_kernel(mat, state, ref)
    t2 = mat.thickness ** 2 / 12.0
    curv_change = state.b_cov - ref.b_cov
    moment = t2 * contract44(ref_modulus, curv_change)
    zeros = np.zeros((2, 2, 2, 2))
    return (
        StressResultants(mem.tau, moment),
        TangentSet(mem.tangent, zeros, zeros.copy(), t2 * ref_modulus),
    )


PIPELINES = ("np", "ap", "dd")


def evaluate(mat, pipeline, state, ref, n_gp=None, ref_modulus=None):
    """Dispatch to the requested pipeline at one material point."""
    if pipeline == "np":
        return np_resultants(mat, state, ref, n_gp=n_gp)
    if pipeline == "ap":
        if mat.variant == "goh" and mat.switch_enabled:
            return ap_partial_resultants(mat, state, ref)
        return ap_full_resultants(mat, state, ref)
    if pipeline == "dd":
        return dd_resultants(mat, state, ref, ref_modulus=ref_modulus)
    raise ValueError(f"unknown pipeline {pipeline!r}")
