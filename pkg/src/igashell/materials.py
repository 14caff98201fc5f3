"""Incompressible hyperelastic membrane kernels for thin shells.

Each material exposes the same three entry points, one per projection level
of the constitutive pipelines:

- ``layer_kernel``:    in-plane Kirchhoff stress and modulus of a single
  material layer (used by through-thickness quadrature).
- ``hat_kernel``:      mid-surface stress, its xi-derivative, and the four
  sensitivities of both w.r.t. metric and curvature (used by the
  analytically projected closed forms).
- ``membrane_kernel``: mid-surface membrane stress resultant and modulus
  (used by the decoupled membrane/bending split).

Plane stress holds in the condensed sense: the transverse normal stretch is
eliminated by incompressibility (lambda3 = 1/J in-plane), the transverse
normal stress vanishes identically, and no pressure variable is stored.

Supported variants: incompressible neo-Hooke ('nh'), Mooney-Rivlin ('mr'),
Fung ('fung'), Mooney-Rivlin with quadratic fiber reinforcement ('amr') and
the dispersed-fiber exponential model ('goh'), the latter optionally with a
tension/compression switch that removes fibers under compressive stretch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConstitutiveOverflow, NonPositiveLayerJacobian
from .tensors import (
    contract44,
    curvature_inverse_sensitivity,
    inverse_metric_sensitivity,
    outer22,
)

_EXP_GUARD = 700.0

VARIANTS = ("nh", "mr", "fung", "amr", "goh")


def _exp_guard(x):
    if x > _EXP_GUARD:
        raise ConstitutiveOverflow(
            f"material exponent {x:.3g} exceeds the overflow guard {_EXP_GUARD:g}"
        )
    return float(np.exp(x))


@dataclass(frozen=True)
class MaterialSpec:
    """Constants of one shell material.

    Stress-like constants (c1, c2 of 'mr'/'amr', c3, mu, k1) are per unit
    volume [kPa]; the Fung exponent c2 and the GOH constants k2, kappa are
    dimensionless.  ``thickness`` is the shell thickness [mm].  Fiber
    directions are geometry and live on the reference states, but their
    count must match ``n_fibers``.
    """

    variant: str
    thickness: float
    c1: float = 0.0
    c2: float = 0.0
    c3: tuple = ()
    mu: float = 0.0
    k1: tuple = ()
    k2: tuple = ()
    kappa: tuple = ()
    n_fibers: int = 0
    switch_enabled: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown material variant {self.variant!r}")
        if self.thickness <= 0.0:
            raise ValueError("thickness must be positive")
        if self.switch_enabled and self.variant != "goh":
            raise ValueError("the fiber switch applies to the 'goh' variant only")
        if self.variant in ("amr", "goh") and self.n_fibers < 1:
            raise ValueError(f"variant {self.variant!r} needs at least one fiber family")

    @property
    def anisotropic(self):
        return self.variant in ("amr", "goh")

    @property
    def young_equivalent(self):
        """Small-strain Young modulus of the isotropic ground matrix.

        3 mu for the dispersed-fiber model, 3 c1 otherwise (exact for the
        incompressible neo-Hookean matrix; used only for normalization).
        """
        return 3.0 * (self.mu if self.variant == "goh" else self.c1)


# Table of soft-tissue test constants shared by the benchmark scenarios:
# ground stiffness 10 kPa, and the customary ratios for the other constants.
_PRESET_BASE = 10.0


def make_material(name, thickness, kappa=0.0, switch=False, n_fibers=2):
    """Build one of the named preset materials.

    kappa (dispersion, 'goh' only) and the fiber switch are configurable;
    all stress-like constants are fixed ratios of the 10 kPa base stiffness.
    """
    c1 = _PRESET_BASE
    if name == "nh":
        return MaterialSpec("nh", thickness, c1=c1)
    if name == "mr":
        return MaterialSpec("mr", thickness, c1=c1, c2=2.0 * c1)
    if name == "fung":
        return MaterialSpec("fung", thickness, c1=c1, c2=10.0)
    if name == "amr":
        return MaterialSpec(
            "amr", thickness, c1=c1, c2=2.0 * c1,
            c3=(100.0 * c1,) * n_fibers, n_fibers=n_fibers,
        )
    if name == "goh":
        return MaterialSpec(
            "goh", thickness, mu=c1,
            k1=(100.0 * c1,) * n_fibers, k2=(500.0,) * n_fibers,
            kappa=(float(kappa),) * n_fibers,
            n_fibers=n_fibers, switch_enabled=switch,
        )
    raise ValueError(f"unknown material preset {name!r}")


@dataclass(frozen=True)
class LayerStress:
    """In-plane layer Kirchhoff stress [kPa] and modulus."""

    tau: np.ndarray
    tangent: np.ndarray


@dataclass(frozen=True)
class HatBlock:
    """One additive contribution to the mid-surface projected stress.

    Fields: stress, its xi-derivative, and the sensitivities of both to the
    covariant metric (c, c_d3; defined with a factor 2) and curvature
    (d = 0 for every material here, d_d3).
    """

    tau: np.ndarray
    tau_d3: np.ndarray
    c: np.ndarray
    c_d3: np.ndarray
    d_d3: np.ndarray


@dataclass(frozen=True)
class HatStress:
    """Mid-surface projected stress data for the closed-form pipelines.

    The total fields sum matrix and all fiber families without any switch;
    ``iso``/``fibers`` expose the additive split that the partially-stressed
    pipeline integrates over per-family thickness intervals.
    """

    tau: np.ndarray
    tau_d3: np.ndarray
    c: np.ndarray
    d: np.ndarray
    c_d3: np.ndarray
    d_d3: np.ndarray
    iso: HatBlock = None
    fibers: tuple = ()


@dataclass(frozen=True)
class MembraneStress:
    """Thickness-integrated membrane stress [kPa mm] and modulus."""

    tau: np.ndarray
    tangent: np.ndarray


# ---------------------------------------------------------------------------
# normalized neo-Hookean building blocks (unit stiffness constant)
# ---------------------------------------------------------------------------


def _nh_layer_blocks(layer):
    """tau/modulus of the unit-stiffness incompressible NH layer law."""
    jsq = layer.jstar ** 2
    tau = layer.g_ref_con - layer.g_con / jsq
    g4 = inverse_metric_sensitivity(layer.g_con)
    c = (2.0 / jsq) * (outer22(layer.g_con, layer.g_con) - g4)
    return tau, c


def _nh_mid_blocks(state, ref):
    """Mid-surface NH blocks: tau, c, tau_d3, c_d3 (d_d3 = -c)."""
    jsq = state.jac_area ** 2
    dh = state.h_mean - ref.h_mean
    tau = ref.a_con - state.a_con / jsq
    a4 = inverse_metric_sensitivity(state.a_con)
    c = (2.0 / jsq) * (outer22(state.a_con, state.a_con) - a4)
    tau_d3 = 2.0 * (
        ref.b_con - (state.b_con + 2.0 * dh * state.a_con) / jsq
    )
    b4 = curvature_inverse_sensitivity(state.a_con, state.b_con, state.h_mean)
    c_d3 = (4.0 / jsq) * (
        outer22(state.b_con, state.a_con) + outer22(state.a_con, state.b_con) - b4
    ) + 4.0 * dh * c
    return tau, c, tau_d3, c_d3


def _check_layer(layer):
    if layer.jstar <= 0.0:
        raise NonPositiveLayerJacobian(f"layer area ratio J* = {layer.jstar:.3e}")


def _mid_invariants(state, ref):
    i1 = float(np.tensordot(ref.a_con, state.a_cov))
    return i1, state.jac_area ** 2, state.h_mean - ref.h_mean


# ---------------------------------------------------------------------------
# layer kernels
# ---------------------------------------------------------------------------


def layer_kernel(mat, layer):
    """Evaluate the condensed plane-stress law of one layer."""
    _check_layer(layer)
    tau_nh, c_nh = _nh_layer_blocks(layer)
    v = mat.variant
    if v == "nh":
        return LayerStress(mat.c1 * tau_nh, mat.c1 * c_nh)
    if v in ("mr", "amr"):
        tau, c = _mr_layer(mat, layer, tau_nh, c_nh)
        if v == "amr":
            for i in range(mat.n_fibers):
                ll = layer.fiber_outer_con[i]
                tau = tau + 2.0 * mat.c3[i] * (layer.i4star[i] - 1.0) * ll
                c = c + 4.0 * mat.c3[i] * outer22(ll, ll)
        return LayerStress(tau, c)
    if v == "fung":
        i1_3d = layer.i1star + 1.0 / layer.jstar ** 2
        d1 = mat.c1 * _exp_guard(mat.c2 * (i1_3d - 3.0))
        tau = d1 * tau_nh
        c = d1 * (c_nh + 2.0 * mat.c2 * outer22(tau_nh, tau_nh))
        return LayerStress(tau, c)
    # dispersed-fiber model
    tau = mat.mu * tau_nh
    c_iso_scale = mat.mu
    c = np.zeros((2, 2, 2, 2))
    i1_3d = layer.i1star + 1.0 / layer.jstar ** 2
    for i in range(mat.n_fibers):
        if mat.switch_enabled and layer.i4star[i] <= 1.0:
            continue
        kap = mat.kappa[i]
        j4 = kap * i1_3d + (1.0 - 3.0 * kap) * layer.i4star[i]
        r_i = kap * tau_nh + (1.0 - 3.0 * kap) * layer.fiber_outer_con[i]
        e_i, d_i, _ = _goh_scalars(mat.k1[i], mat.k2[i], j4)
        tau = tau + 2.0 * e_i * r_i
        c_iso_scale += 2.0 * kap * e_i
        c = c + 4.0 * d_i * outer22(r_i, r_i)
    return LayerStress(tau, c_iso_scale * c_nh + c)


def _mr_layer(mat, layer, tau_nh, c_nh):
    jsq = layer.jstar ** 2
    g = layer.g_con
    gr = layer.g_ref_con
    i1 = layer.i1star
    tau = mat.c1 * tau_nh + (mat.c2 / jsq) * (gr - i1 * g) + mat.c2 * jsq * g
    g4 = inverse_metric_sensitivity(g)
    c = (
        (mat.c1 + mat.c2 * i1) * c_nh
        - (2.0 * mat.c2 / jsq) * (outer22(gr, g) + outer22(g, gr))
        + 2.0 * mat.c2 * jsq * (g4 + outer22(g, g))
    )
    return tau, c


def _goh_scalars(k1, k2, j4):
    """Fiber stress/stiffness scalars of the exponential dispersed law."""
    e = j4 - 1.0
    ex = _exp_guard(k2 * e * e)
    stress = k1 * e * ex
    stiff = k1 * (1.0 + 2.0 * k2 * e * e) * ex
    stiff_d = 2.0 * k1 * k2 * e * (3.0 + 2.0 * k2 * e * e) * ex
    return stress, stiff, stiff_d


# ---------------------------------------------------------------------------
# hat kernels (mid-surface projections and their xi-derivatives)
# ---------------------------------------------------------------------------


def hat_kernel(mat, state, ref, xderivs):
    """Evaluate the projected stress, its xi-derivative and sensitivities.

    Returns totals without any switch applied; for the dispersed-fiber model
    the additive isotropic/per-family split is attached so the
    partially-stressed pipeline can integrate each family over its own
    thickness interval.
    """
    tau_nh, c_nh, tau_nh3, c_nh3 = _nh_mid_blocks(state, ref)
    v = mat.variant
    if v == "nh":
        return HatStress(
            tau=mat.c1 * tau_nh, tau_d3=mat.c1 * tau_nh3,
            c=mat.c1 * c_nh, d=np.zeros((2, 2, 2, 2)),
            c_d3=mat.c1 * c_nh3, d_d3=-mat.c1 * c_nh,
        )
    if v in ("mr", "amr"):
        parts = _mr_hat(mat, state, ref, xderivs, tau_nh, c_nh, tau_nh3, c_nh3)
        if v == "amr":
            parts = _add_quadratic_fibers(mat, state, ref, xderivs, parts)
        tau, tau_d3, c, c_d3, d_d3 = parts
        return HatStress(
            tau=tau, tau_d3=tau_d3, c=c, d=np.zeros((2, 2, 2, 2)),
            c_d3=c_d3, d_d3=d_d3,
        )
    if v == "fung":
        return _fung_hat(mat, state, ref, xderivs, tau_nh, c_nh, tau_nh3, c_nh3)
    return _goh_hat(mat, state, ref, xderivs, tau_nh, c_nh, tau_nh3, c_nh3)


def _mr_hat(mat, state, ref, xd, tau_nh, c_nh, tau_nh3, c_nh3):
    i1, jsq, dh = _mid_invariants(state, ref)
    a, b = state.a_con, state.b_con
    ar, br = ref.a_con, ref.b_con
    a4 = inverse_metric_sensitivity(a)
    b4 = curvature_inverse_sensitivity(a, b, state.h_mean)
    i1_3 = xd.i1star
    c1, c2 = mat.c1, mat.c2
    tau = c1 * tau_nh + (c2 / jsq) * (ar - i1 * a) + c2 * jsq * a
    tau_i = (1.0 / jsq) * (
        4.0 * dh * (ar - i1 * a) + 2.0 * (br - i1 * b) - i1_3 * a
    )
    tau_ii = 2.0 * jsq * (b - 2.0 * dh * a)
    tau_d3 = c1 * tau_nh3 + c2 * (tau_i + tau_ii)
    c = (
        (c1 + c2 * i1) * c_nh
        - (2.0 * c2 / jsq) * (outer22(ar, a) + outer22(a, ar))
        + 2.0 * c2 * jsq * (outer22(a, a) + a4)
    )
    c_d3 = (
        c1 * c_nh3
        + 2.0 * c2 * outer22(tau_ii - tau_i, a)
        + 4.0 * c2 * jsq * (b4 + outer22(a, b) - 2.0 * dh * a4)
        + (4.0 * c2 / jsq) * (
            i1 * outer22(a, b) - outer22(ar, b) - outer22(a, br)
            - outer22(2.0 * dh * a + b, ar)
        )
        - (4.0 * c2 / jsq) * i1 * b4
        - (2.0 * c2 / jsq) * (4.0 * dh * i1 + i1_3) * a4
    )
    d_d3 = (
        -c1 * c_nh
        - c2 * i1 * c_nh
        + (2.0 * c2 / jsq) * (outer22(ar, a) + outer22(a, ar))
        - 2.0 * c2 * jsq * (outer22(a, a) + a4)
    )
    return tau, tau_d3, c, c_d3, d_d3


def _add_quadratic_fibers(mat, state, ref, xd, parts):
    tau, tau_d3, c, c_d3, d_d3 = parts
    for i in range(mat.n_fibers):
        ll = ref.fiber_outer_con[i]
        ll3 = xd.fiber_outer[i]
        i4 = float(np.tensordot(state.a_cov, ll))
        c3 = mat.c3[i]
        tau = tau + 2.0 * c3 * (i4 - 1.0) * ll
        tau_d3 = tau_d3 + 2.0 * c3 * (xd.i4star[i] * ll + (i4 - 1.0) * ll3)
        c = c + 4.0 * c3 * outer22(ll, ll)
        c_d3 = c_d3 + 4.0 * c3 * (outer22(ll, ll3) + outer22(ll3, ll))
        d_d3 = d_d3 - 4.0 * c3 * outer22(ll, ll)
    return tau, tau_d3, c, c_d3, d_d3


def _fung_hat(mat, state, ref, xd, tau_nh, c_nh, tau_nh3, c_nh3):
    i1, jsq, dh = _mid_invariants(state, ref)
    d1 = mat.c1 * _exp_guard(mat.c2 * (i1 + 1.0 / jsq - 3.0))
    s = xd.i1star + 4.0 * dh / jsq
    c2 = mat.c2
    tau = d1 * tau_nh
    tau_d3 = d1 * (tau_nh3 + c2 * s * tau_nh)
    c = d1 * (c_nh + 2.0 * c2 * outer22(tau_nh, tau_nh))
    c_d3 = (
        d1 * (c_nh3 + c2 * s * c_nh)
        + 2.0 * c2 * outer22(tau_d3, tau_nh)
        + 2.0 * c2 * d1 * outer22(tau_nh, tau_nh3)
    )
    d_d3 = -d1 * c_nh - 2.0 * c2 * d1 * outer22(tau_nh, tau_nh)
    return HatStress(
        tau=tau, tau_d3=tau_d3, c=c, d=np.zeros((2, 2, 2, 2)),
        c_d3=c_d3, d_d3=d_d3,
    )


def _goh_hat(mat, state, ref, xd, tau_nh, c_nh, tau_nh3, c_nh3):
    i1, jsq, dh = _mid_invariants(state, ref)
    iso = HatBlock(
        tau=mat.mu * tau_nh, tau_d3=mat.mu * tau_nh3,
        c=mat.mu * c_nh, c_d3=mat.mu * c_nh3, d_d3=-mat.mu * c_nh,
    )
    i1_3d = i1 + 1.0 / jsq
    i1_3d_deriv = xd.i1star + 4.0 * dh / jsq
    fibers = []
    for i in range(mat.n_fibers):
        kap = mat.kappa[i]
        w = 1.0 - 3.0 * kap
        ll = ref.fiber_outer_con[i]
        ll3 = xd.fiber_outer[i]
        i4 = float(np.tensordot(state.a_cov, ll))
        j4 = kap * i1_3d + w * i4
        j4_3 = kap * i1_3d_deriv + w * xd.i4star[i]
        r = kap * tau_nh + w * ll
        r3 = kap * tau_nh3 + w * ll3
        e_i, d_i, f_i = _goh_scalars(mat.k1[i], mat.k2[i], j4)
        rr = outer22(r, r)
        fibers.append(HatBlock(
            tau=2.0 * e_i * r,
            tau_d3=2.0 * (e_i * r3 + d_i * j4_3 * r),
            c=2.0 * kap * e_i * c_nh + 4.0 * d_i * rr,
            c_d3=(
                4.0 * (d_i * outer22(r3, r) + f_i * j4_3 * rr + d_i * outer22(r, r3))
                + 2.0 * kap * (e_i * c_nh3 + d_i * j4_3 * c_nh)
            ),
            d_d3=-4.0 * d_i * rr - 2.0 * kap * e_i * c_nh,
        ))
    tau = iso.tau + sum(f.tau for f in fibers)
    tau_d3 = iso.tau_d3 + sum(f.tau_d3 for f in fibers)
    c = iso.c + sum(f.c for f in fibers)
    c_d3 = iso.c_d3 + sum(f.c_d3 for f in fibers)
    d_d3 = iso.d_d3 + sum(f.d_d3 for f in fibers)
    return HatStress(
        tau=tau, tau_d3=tau_d3, c=c, d=np.zeros((2, 2, 2, 2)),
        c_d3=c_d3, d_d3=d_d3, iso=iso, fibers=tuple(fibers),
    )


# ---------------------------------------------------------------------------
# membrane kernels (thickness-integrated, mid-surface state only)
# ---------------------------------------------------------------------------


def membrane_kernel(mat, state, ref):
    """Membrane stress resultant and modulus of the decoupled split.

    Identical functional forms to the hat kernel at the mid-surface, scaled
    by the thickness; the transverse stretch uses the mid-surface area
    stretch (lambda3^2 = 1/J^2).  The fiber switch, when enabled, drops
    whole fiber families by the sign of the mid-surface stretch I4 - 1.
    """
    t = mat.thickness
    tau_nh, c_nh, _, _ = _nh_mid_blocks(state, ref)
    i1, jsq, _ = _mid_invariants(state, ref)
    v = mat.variant
    if v == "nh":
        return MembraneStress(t * mat.c1 * tau_nh, t * mat.c1 * c_nh)
    if v in ("mr", "amr"):
        a, ar = state.a_con, ref.a_con
        a4 = inverse_metric_sensitivity(a)
        c1, c2 = t * mat.c1, t * mat.c2
        tau = c1 * tau_nh + (c2 / jsq) * (ar - i1 * a) + c2 * jsq * a
        c = (
            (c1 + c2 * i1) * c_nh
            - (2.0 * c2 / jsq) * (outer22(ar, a) + outer22(a, ar))
            + 2.0 * c2 * jsq * (outer22(a, a) + a4)
        )
        if v == "amr":
            for i in range(mat.n_fibers):
                ll = ref.fiber_outer_con[i]
                i4 = float(np.tensordot(state.a_cov, ll))
                c3 = t * mat.c3[i]
                tau = tau + 2.0 * c3 * (i4 - 1.0) * ll
                c = c + 4.0 * c3 * outer22(ll, ll)
        return MembraneStress(tau, c)
    if v == "fung":
        d1 = t * mat.c1 * _exp_guard(mat.c2 * (i1 + 1.0 / jsq - 3.0))
        tau = d1 * tau_nh
        c = d1 * (c_nh + 2.0 * mat.c2 * outer22(tau_nh, tau_nh))
        return MembraneStress(tau, c)
    mu = t * mat.mu
    tau = mu * tau_nh
    c_iso_scale = mu
    c = np.zeros((2, 2, 2, 2))
    i1_3d = i1 + 1.0 / jsq
    for i in range(mat.n_fibers):
        ll = ref.fiber_outer_con[i]
        i4 = float(np.tensordot(state.a_cov, ll))
        if mat.switch_enabled and i4 <= 1.0:
            continue
        kap = mat.kappa[i]
        w = 1.0 - 3.0 * kap
        j4 = kap * i1_3d + w * i4
        r = kap * tau_nh + w * ll
        e_i, d_i, _ = _goh_scalars(t * mat.k1[i], mat.k2[i], j4)
        tau = tau + 2.0 * e_i * r
        c_iso_scale += 2.0 * kap * e_i
        c = c + 4.0 * d_i * outer22(r, r)
    return MembraneStress(tau, c_iso_scale * c_nh + c)


def condensed_energy_density(mat, layer):
    """Strain energy per unit reference volume of the condensed law [kPa].

    The transverse stretch is eliminated by incompressibility before
    differentiation, so the in-plane layer stress is exactly
    tau = 2 dW/dg of this density.
    """
    _check_layer(layer)
    i1_3d = layer.i1star + 1.0 / layer.jstar ** 2
    v = mat.variant
    if v == "fung":
        return mat.c1 / (2.0 * mat.c2) * (_exp_guard(mat.c2 * (i1_3d - 3.0)) - 1.0)
    if v == "goh":
        w = 0.5 * mat.mu * (i1_3d - 3.0)
        for i in range(mat.n_fibers):
            if mat.switch_enabled and layer.i4star[i] <= 1.0:
                continue
            kap = mat.kappa[i]
            j4 = kap * i1_3d + (1.0 - 3.0 * kap) * layer.i4star[i]
            w += mat.k1[i] / (2.0 * mat.k2[i]) * (
                _exp_guard(mat.k2[i] * (j4 - 1.0) ** 2) - 1.0
            )
        return w
    w = 0.5 * mat.c1 * (i1_3d - 3.0)
    if v in ("mr", "amr"):
        i2_3d = layer.i1star / layer.jstar ** 2 + layer.jstar ** 2
        w += 0.5 * mat.c2 * (i2_3d - 3.0)
    if v == "amr":
        for i in range(mat.n_fibers):
            w += 0.5 * mat.c3[i] * (layer.i4star[i] - 1.0) ** 2
    return w


def reference_modulus(mat, ref):
    """Membrane modulus evaluated at the reference state (bending modulus
    of the decoupled split, up to the thickness-squared factor)."""
    from .kinematics import SurfacePointState

    ref_as_state = SurfacePointState(
        tangents=ref.tangents, normal=ref.normal,
        a_cov=ref.a_cov, a_con=ref.a_con,
        b_cov=ref.b_cov, b_con=ref.b_con,
        det_a=ref.det_a, jac_area=1.0, h_mean=ref.h_mean,
    )
    return membrane_kernel(mat, ref_as_state, ref).tangent


def condensed_stress_check(layer):
    """Transverse normal stress of the condensed NH law (unit stiffness).

    Reconstructs tau^33 = 2 dW/dg33 + 2 p dJconstraint/dg33 from the
    condensed pressure at g33 = 1/J*^2; exact plane stress returns zero.
    Exposed for verification.
    """
    jstar = layer.jstar
    g33 = 1.0 / jstar ** 2
    # dW/dg33 of the unit NH energy W = (I1* + g33 - 3)/2
    dw = 0.5
    pressure = 2.0 * dw / jstar ** 2 * 1.0  # p = 2 J*^-2 dW/dg33
    # constraint J3d = J* sqrt(g33): d(1 - J3d)/dg33 = -J*/(2 sqrt(g33))
    dcon = -jstar / (2.0 * np.sqrt(g33))
    return 2.0 * dw + 2.0 * pressure * dcon
