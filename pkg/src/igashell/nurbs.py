"""Rational B-spline curves/surfaces with exact first and second derivatives.

Implements the classical Cox–de Boor recursion with the standard
derivative table, Greville abscissae, and single-knot Boehm insertion on
homogeneous coordinates.  Everything here is plain spline arithmetic; the
shell-specific surface containers live in :mod:`igashell.mesh`.
"""

import numpy as np

from .errors import OutOfDomain


def domain(knots, degree):
    """Parametric domain [lo, hi] spanned by an open knot vector."""
    return float(knots[degree]), float(knots[-degree - 1])


def n_basis(knots, degree):
    """Number of basis functions of the knot vector."""
    return len(knots) - degree - 1


def find_span(knots, degree, u):
    """Index s with knots[s] <= u < knots[s+1], clamped to the last span."""
    lo, hi = domain(knots, degree)
    if not lo <= u <= hi:
        raise OutOfDomain(f"parameter {u!r} outside [{lo}, {hi}]")
    last = n_basis(knots, degree) - 1
    if u >= knots[last + 1]:
        return last
    return int(np.searchsorted(knots, u, side="right")) - 1


def ders_basis(knots, degree, span, u, n_ders):
    """Nonzero B-spline basis functions and derivatives at one parameter.

    Returns a (n_ders + 1, degree + 1) array whose row k holds the k-th
    derivative of the degree + 1 functions supported on the span.
    """
    p = degree
    ndu = np.empty((p + 1, p + 1))
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = u - knots[span + 1 - j]
        right[j] = knots[span + j] - u
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((n_ders + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.empty((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, n_ders + 1):
            d = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1
    fact = p
    for k in range(1, n_ders + 1):
        ders[k] *= fact
        fact *= p - k
    return ders


def greville(knots, degree):
    """Greville abscissae (knot averages); control values placed there
    reproduce any linear function of the parameter exactly."""
    n = n_basis(knots, degree)
    return np.array(
        [knots[i + 1 : i + degree + 1].mean() for i in range(n)]
    )


def open_uniform_knots(n_elements, degree, breakpoints=None):
    """Open knot vector with single interior knots.

    With ``breakpoints`` (length n_elements + 1, normalized or not) the
    interior knots are placed there; otherwise uniformly on [0, 1].
    """
    if breakpoints is None:
        breakpoints = np.linspace(0.0, 1.0, n_elements + 1)
    b = np.asarray(breakpoints, dtype=float)
    return np.concatenate([np.full(degree, b[0]), b, np.full(degree, b[-1])])


def insert_knot(knots, degree, ctrl_hom, u):
    """Boehm single-knot insertion along axis 0 of homogeneous points."""
    p = degree
    k = find_span(knots, p, u)
    n = ctrl_hom.shape[0]
    out = np.empty((n + 1,) + ctrl_hom.shape[1:])
    out[: k - p + 1] = ctrl_hom[: k - p + 1]
    out[k + 1 :] = ctrl_hom[k:]
    for i in range(k - p + 1, k + 1):
        alpha = (u - knots[i]) / (knots[i + p] - knots[i])
        out[i] = alpha * ctrl_hom[i] + (1.0 - alpha) * ctrl_hom[i - 1]
    return np.insert(knots, k + 1, u), out


def rational_surface_basis(knots_u, knots_v, degrees, weights, u, v):
    """Nonzero rational surface basis functions with two derivative levels.

    ``weights`` is the full (n_u, n_v) weight net.  Returns
    ``(iu, iv, val, d1, d2)`` where ``iu``/``iv`` are the index ranges of
    the nonzero functions, ``val`` has shape (pu+1, pv+1), ``d1`` stacks
    (d/du, d/dv) and ``d2`` stacks (uu, vv, uv) in its leading axis.
    """
    pu, pv = degrees
    su = find_span(knots_u, pu, u)
    sv = find_span(knots_v, pv, v)
    du = ders_basis(knots_u, pu, su, u, 2)
    dv = ders_basis(knots_v, pv, sv, v, 2)
    iu = np.arange(su - pu, su + 1)
    iv = np.arange(sv - pv, sv + 1)
    w = weights[np.ix_(iu, iv)]

    # homogeneous (weighted, nonrational) tensor-product blocks
    phi = w * np.outer(du[0], dv[0])
    phi_u = w * np.outer(du[1], dv[0])
    phi_v = w * np.outer(du[0], dv[1])
    phi_uu = w * np.outer(du[2], dv[0])
    phi_vv = w * np.outer(du[0], dv[2])
    phi_uv = w * np.outer(du[1], dv[1])

    tot = phi.sum()
    tot_u = phi_u.sum()
    tot_v = phi_v.sum()
    val = phi / tot
    r_u = (phi_u - val * tot_u) / tot
    r_v = (phi_v - val * tot_v) / tot
    r_uu = (phi_uu - 2.0 * r_u * tot_u - val * phi_uu.sum()) / tot
    r_vv = (phi_vv - 2.0 * r_v * tot_v - val * phi_vv.sum()) / tot
    r_uv = (phi_uv - r_u * tot_v - r_v * tot_u - val * phi_uv.sum()) / tot
    return iu, iv, val, np.stack([r_u, r_v]), np.stack([r_uu, r_vv, r_uv])
