# -*- coding: utf-8 -*-
"""
Small matrix helpers shared by the manifold classes: symmetric and skew parts,
the so(3) hat map, eigendecomposition-based functions of symmetric matrices
and rotation exponentials and logarithms.

Created on Sat Oct 17 09:40:03 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import numpy as np
from scipy.spatial.transform import Rotation


def sym(A):
    return 0.5 * (A + A.T)


def skew(A):
    return 0.5 * (A - A.T)


def hat(w):
    """Map a 3-vector to the skew-symmetric matrix with hat(w) x = w × x.

    :param w: Rotation vector.
    :type w: array of length 3.

    :returns: :class:`numpy.ndarray` of shape (3, 3).
    """
    return np.array([[0.0, -w[2], w[1]],
                     [w[2], 0.0, -w[0]],
                     [-w[1], w[0], 0.0]])


def vee(W):
    """Inverse of :func:`hat`; only the skew part of W is read."""
    return np.array([W[2, 1] - W[1, 2],
                     W[0, 2] - W[2, 0],
                     W[1, 0] - W[0, 1]]) / 2.0


def sym_funcm(P, func):
    """Apply a scalar function to a symmetric matrix through its
    eigendecomposition. The input is symmetrized first so that round-off
    asymmetry does not leak into the eigenvectors.

    :param P: Symmetric matrix.
    :type P: :class:`numpy.ndarray`.
    :param func: Vectorized scalar function applied to the eigenvalues.
    :type func: function.

    :returns: :class:`numpy.ndarray` with func(P).
    """
    eigval, eigvec = np.linalg.eigh(sym(P))
    return (eigvec * func(eigval)).dot(eigvec.T)


def spd_sqrtm(P):
    return sym_funcm(P, np.sqrt)


def spd_invsqrtm(P):
    return sym_funcm(P, lambda x: 1.0 / np.sqrt(x))


def spd_logm(P):
    return sym_funcm(P, np.log)


def sym_expm(S):
    return sym_funcm(S, np.exp)


def spd_clip(P, floor=1e-12):
    """Nearest symmetric matrix with eigenvalues at least `floor`."""
    return sym_funcm(P, lambda x: np.maximum(x, floor))


def polar(A):
    """Orthogonal polar factor of a 3x3 matrix, forced into SO(3)."""
    U, _, Vt = np.linalg.svd(A)
    D = np.eye(3)
    D[2, 2] = np.sign(np.linalg.det(U.dot(Vt)))
    return U.dot(D).dot(Vt)


def so3_exp(W):
    """Rotation matrix exp(W) of a skew-symmetric W."""
    return Rotation.from_rotvec(vee(W)).as_matrix()


def so3_log_vector(R):
    """Rotation vector w with exp(hat(w)) = R and |w| in [0, pi]."""
    return Rotation.from_matrix(R).as_rotvec()


def rotation_angle(R):
    """Rotation angle in [0, pi] of a rotation matrix."""
    s = np.linalg.norm(vee(R - R.T)) / 2.0
    c = (np.trace(R) - 1.0) / 2.0
    return np.arctan2(s, c)


def rotation_matrix(axis, angle):
    """Rotation by `angle` about `axis` (normalized internally)."""
    axis = np.asarray(axis, dtype=float)
    return Rotation.from_rotvec(angle * axis / np.linalg.norm(axis)).as_matrix()
