"""Index bookkeeping for symmetric surface tensors.

All constitutive objects live in the 2x2 curvilinear index space of the
mid-surface.  Rank-2 objects are stored as dense symmetric (2, 2) arrays and
rank-4 moduli as dense (2, 2, 2, 2) arrays with minor symmetry in each index
pair but no major symmetry in general (the bending/membrane coupling blocks of
the projected pipelines are not transposes of each other).

This module is the single place where the reduced "triple" ordering and its
double-counting weights are defined.  The triple ordering is

    0 -> (0, 0),   1 -> (1, 1),   2 -> (0, 1)

and off-diagonal entries carry weight 2 in contractions, so for symmetric x:

    (c : x)_I  =  sum_J  C[I, J] * w[J] * x[J]

with C the (3, 3) reduction of c and w = (1, 1, 2).
"""

import numpy as np

# triple index -> (alpha, beta) component of a symmetric surface tensor
TRIPLE_PAIRS = ((0, 0), (1, 1), (0, 1))

# contraction weights for the off-diagonal double count
TRIPLE_WEIGHTS = np.array([1.0, 1.0, 2.0])

# Levi-Civita symbol, used by the curvature second-variation kernels
LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0


def sym_to_triple(t):
    """Reduce a symmetric (2, 2) tensor to the (3,) triple vector."""
    return np.array([t[0, 0], t[1, 1], t[0, 1]])


def triple_to_sym(v):
    """Expand a (3,) triple vector to the full symmetric (2, 2) tensor."""
    return np.array([[v[0], v[2]], [v[2], v[1]]])


def rank4_to_triple(c):
    """Reduce a minor-symmetric (2, 2, 2, 2) modulus to its (3, 3) matrix."""
    m = np.empty((3, 3))
    for i, (a, b) in enumerate(TRIPLE_PAIRS):
        for j, (g, d) in enumerate(TRIPLE_PAIRS):
            m[i, j] = c[a, b, g, d]
    return m


def contract44(c, x):
    """Full double contraction c^{ab gd} x_{gd} of a rank-4 with a rank-2."""
    return np.einsum("abgd,gd->ab", c, x)


def outer22(p, q):
    """Dyadic product p^{ab} q^{gd} of two rank-2 tensors."""
    return np.einsum("ab,gd->abgd", p, q)


def inverse_metric_sensitivity(t_con):
    """Derivative of an inverse metric with respect to its covariant metric.

    For t^{ab} the inverse of t_{ab}, returns d t^{ab} / d t_{gd} =
    -(t^{ag} t^{bd} + t^{ad} t^{bg}) / 2, symmetrized for use against
    symmetric perturbations.
    """
    return -0.5 * (
        np.einsum("ag,bd->abgd", t_con, t_con)
        + np.einsum("ad,bg->abgd", t_con, t_con)
    )


def curvature_inverse_sensitivity(a_con, b_con, h_mean):
    """Derivative of the contravariant curvature w.r.t. the covariant metric.

    Returns d b^{ab} / d a_{gd} = 2H (a^{ab} a^{gd} + da^{ab}/da_{gd})
    - (a^{ab} b^{gd} + b^{ab} a^{gd}) where H is the mean curvature.
    """
    a4 = inverse_metric_sensitivity(a_con)
    return 2.0 * h_mean * (outer22(a_con, a_con) + a4) - (
        outer22(a_con, b_con) + outer22(b_con, a_con)
    )


def sym2(t):
    """Symmetrize a (2, 2) tensor."""
    return 0.5 * (t + t.T)
