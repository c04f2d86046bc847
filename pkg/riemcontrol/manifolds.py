# -*- coding: utf-8 -*-
"""
Closed-form Riemannian geometry of the four manifolds used by the package:
Euclidean(n), Sphere(n, r), SO(3) with the bi-invariant trace metric and
SPD(n) with the affine-invariant metric. Points and tangent vectors are stored
in ambient coordinates; no charts are used.

The manifold classes work on raw numpy arrays so that integrators can call them
in tight loops. The module-level functions (:func:`inner`, :func:`exp_map`,
:func:`log_map`, ...) take :class:`ManifoldPoint` and :class:`TangentVector`
objects and validate base points.

The curvature tensor follows R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z, which
makes sectional curvatures of spheres positive.

Created on Sat Oct 17 10:02:51 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import numpy as np
from scipy.linalg import eigh, null_space
from scipy.spatial.transform import Rotation
from .exceptions import AtCutLocus, BasepointMismatch, ConstraintViolation, \
    InjectivityRadiusExceeded
from .matrix_utils import hat, polar, rotation_angle, skew, so3_exp, \
    so3_log_vector, spd_clip, spd_invsqrtm, spd_sqrtm, sym, sym_expm, \
    spd_logm, vee


def _comparison_eigenvalue(kappa, d):
    """Eigenvalue of the Hessian of half the squared distance along an
    eigendirection of the Jacobi operator with eigenvalue kappa, at distance d
    on a locally symmetric space."""
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    x = np.sqrt(np.abs(kappa)) * d
    result = np.ones_like(x)
    pos = (kappa > 0) & (x > 1e-8)
    neg = (kappa < 0) & (x > 1e-8)
    result[pos] = x[pos] / np.tan(x[pos])
    result[neg] = x[neg] / np.tanh(x[neg])
    return result


class Manifold(object):
    """Base class of the manifolds. Subclasses implement the raw-array
    operations; all arrays are ambient coordinates.
    """

    kind = None
    injectivity_radius = np.inf
    curvature_bounds = (0.0, 0.0)

    def __eq__(self, other):
        return isinstance(other, Manifold) and self._key() == other._key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.kind, self.n)

    def norm(self, x, u):
        return np.sqrt(max(self.inner(x, u, u), 0.0))

    def transp(self, x, y, v):
        """Parallel transport of v from x to y along the minimizing geodesic."""
        return self.transp_exp(x, self.log(x, y), v)

    def transp_back(self, x, w, v):
        """Transport v from exp(x, w) back to x along the same geodesic."""
        y = self.exp(x, w)
        return self.transp_exp(y, -self.transp_exp(x, w, w), v)

    def covariant_derivative(self, x, u, v, dv):
        """Covariant derivative of a field with value v at x, given the
        ambient derivative dv of the field in the direction u."""
        return self.project_tangent(x, dv)

    def max_step(self):
        """Largest tangent length an integration step may use."""
        return 0.5 * self.injectivity_radius

    def point_residual(self, x):
        raise NotImplementedError

    def check_point(self, x, tol=1e-9):
        if np.shape(x) != self.ambient_shape:
            raise ConstraintViolation("Expected coordinates of shape " +
                                      str(self.ambient_shape) + " on " +
                                      repr(self) + ", got " +
                                      str(np.shape(x)))
        if not np.all(np.isfinite(x)):
            raise ConstraintViolation("Non-finite coordinates on " +
                                      repr(self))
        residual = self.point_residual(x)
        if residual > tol:
            raise ConstraintViolation("Point is off " + repr(self) +
                                      " by %.3g" % residual)

    def check_tangent(self, x, v, tol=1e-9):
        if np.shape(v) != self.ambient_shape:
            raise ConstraintViolation("Tangent coordinates must have shape " +
                                      str(self.ambient_shape))
        residual = np.linalg.norm(v - self.project_tangent(x, v))
        if residual > tol * (1.0 + np.linalg.norm(v)):
            raise ConstraintViolation("Vector is not tangent to " +
                                      repr(self) + " (residual %.3g)" %
                                      residual)

    def random_tangent(self, x, rng, unit=True):
        v = self.project_tangent(x, rng.standard_normal(self.ambient_shape))
        if unit:
            v = v / self.norm(x, v)
        return v

    def tangent_coordinates(self, x, v, basis=None):
        if basis is None:
            basis = self.orthonormal_basis(x)
        return np.array([self.inner(x, b, v) for b in basis])

    def hessian_operator(self, x, p):
        """Matrix of Hess F, F = d(., p)^2 / 2, in the orthonormal basis at x.

        Uses the Jacobi operator v -> R(v, e)e along the unit direction e of
        the geodesic from x to p; exact on the locally symmetric spaces
        implemented here.

        :returns: tuple (matrix, basis, distance).
        """
        basis = self.orthonormal_basis(x)
        u = self.log(x, p)
        d = self.norm(x, u)
        k = len(basis)
        if d < 1e-14:
            return np.eye(k), basis, d
        e = u / d
        J = np.empty((k, k))
        for j, b in enumerate(basis):
            Rb = self.curvature(x, b, e, e)
            for i, c in enumerate(basis):
                J[i, j] = self.inner(x, Rb, c)
        kappa, V = np.linalg.eigh(sym(J))
        H = (V * _comparison_eigenvalue(kappa, d)).dot(V.T)
        return H, basis, d


class Euclidean(Manifold):
    """Flat space R^n."""

    kind = "euclidean"

    def __init__(self, n):
        if int(n) != n or n < 1:
            raise ValueError("Euclidean dimension must be a positive integer")
        self.n = int(n)
        self.dim = self.n
        self.ambient_shape = (self.n,)

    def __repr__(self):
        return "Euclidean(%d)" % self.n

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def exp(self, x, u):
        return x + u

    def log(self, x, y):
        return y - x

    def dist(self, x, y):
        return float(np.linalg.norm(y - x))

    def transp_exp(self, x, w, v):
        return v

    def curvature(self, x, u, v, w):
        return np.zeros_like(w)

    def project_point(self, a):
        return np.array(a, dtype=float)

    def project_tangent(self, x, a):
        return np.array(a, dtype=float)

    def covariant_derivative(self, x, u, v, dv):
        return dv

    def point_residual(self, x):
        return 0.0

    def orthonormal_basis(self, x):
        return list(np.eye(self.n))

    def random_point(self, rng):
        return rng.standard_normal(self.n)

    def hessian_operator(self, x, p):
        return np.eye(self.n), self.orthonormal_basis(x), self.dist(x, p)


class Sphere(Manifold):
    """Sphere of radius r in R^(n+1) with the induced metric."""

    kind = "sphere"

    def __init__(self, n, radius=1.0):
        if int(n) != n or n < 1:
            raise ValueError("Sphere dimension must be a positive integer")
        if not radius > 0:
            raise ValueError("Sphere radius must be positive")
        self.n = int(n)
        self.radius = float(radius)
        self.dim = self.n
        self.ambient_shape = (self.n + 1,)
        self.injectivity_radius = np.pi * self.radius
        A = 1.0 / self.radius ** 2
        self.curvature_bounds = (A, A)

    def __repr__(self):
        return "Sphere(%d, radius=%g)" % (self.n, self.radius)

    def _key(self):
        return (self.kind, self.n, self.radius)

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def exp(self, x, u):
        r = self.radius
        nu = np.linalg.norm(u)
        if nu >= np.pi * r:
            raise InjectivityRadiusExceeded("Tangent length %.6g reaches the "
                                            "injectivity radius %.6g" %
                                            (nu, np.pi * r))
        if nu < 1e-300:
            return x + u
        return np.cos(nu / r) * x + r * np.sin(nu / r) * u / nu

    def _angle(self, x, y):
        r2 = self.radius ** 2
        c = np.dot(x, y) / r2
        u = y - c * x
        nu = np.linalg.norm(u)
        return np.arctan2(nu / self.radius, c), c, u, nu

    def log(self, x, y):
        if np.array_equal(x, y):
            return np.zeros_like(x)
        theta, c, u, nu = self._angle(x, y)
        if c <= -1.0 + 1e-10:
            raise AtCutLocus("Points are antipodal on " + repr(self))
        if nu < 1e-300:
            return np.zeros_like(x)
        return (self.radius * theta / nu) * u

    def dist(self, x, y):
        return float(self.radius * self._angle(x, y)[0])

    def transp_exp(self, x, w, v):
        nw = np.linalg.norm(w)
        if nw < 1e-300:
            return np.array(v, dtype=float)
        e = w / nw
        theta = nw / self.radius
        return v + ((np.cos(theta) - 1.0) * e -
                    np.sin(theta) * x / self.radius) * np.dot(e, v)

    def curvature(self, x, u, v, w):
        return (np.dot(v, w) * u - np.dot(u, w) * v) / self.radius ** 2

    def project_point(self, a):
        a = np.asarray(a, dtype=float)
        na = np.linalg.norm(a)
        if na < 1e-300:
            raise ConstraintViolation("Cannot project the origin onto " +
                                      repr(self))
        return self.radius * a / na

    def project_tangent(self, x, a):
        return a - np.dot(x, a) * x / self.radius ** 2

    def point_residual(self, x):
        return abs(np.linalg.norm(x) - self.radius)

    def orthonormal_basis(self, x):
        return list(null_space(np.reshape(x, (1, -1))).T)

    def random_point(self, rng):
        return self.project_point(rng.standard_normal(self.n + 1))


class SO3(Manifold):
    """Rotation group with the bi-invariant metric <X, Y> = tr(X^T Y).

    Tangent vectors at R are ambient matrices R.A with A skew-symmetric.
    Sectional curvatures lie in [0, 1/8] for this normalization.
    """

    kind = "so3"
    injectivity_radius = np.sqrt(2.0) * np.pi
    curvature_bounds = (0.0, 0.125)

    def __init__(self, n=3):
        if n != 3:
            raise ValueError("SO3 is only defined for n = 3")
        self.n = 3
        self.dim = 3
        self.ambient_shape = (3, 3)

    def __repr__(self):
        return "SO3()"

    def inner(self, x, u, v):
        return float(np.sum(u * v))

    def exp(self, x, u):
        omega = x.T.dot(u)
        if np.linalg.norm(vee(omega)) >= np.pi:
            raise InjectivityRadiusExceeded("Rotation angle of the tangent "
                                            "vector reaches pi")
        return x.dot(so3_exp(omega))

    def log(self, x, y):
        if np.array_equal(x, y):
            return np.zeros_like(x)
        M = x.T.dot(y)
        if rotation_angle(M) >= np.pi - 1e-8:
            raise AtCutLocus("Relative rotation angle is pi")
        return x.dot(hat(so3_log_vector(M)))

    def dist(self, x, y):
        return float(np.sqrt(2.0) * rotation_angle(x.T.dot(y)))

    def transp_exp(self, x, w, v):
        if not np.any(w):
            return np.array(v, dtype=float)
        E = so3_exp(0.5 * x.T.dot(w))
        return x.dot(E).dot(x.T.dot(v)).dot(E)

    def curvature(self, x, u, v, w):
        A, B, C = x.T.dot(u), x.T.dot(v), x.T.dot(w)
        AB = A.dot(B) - B.dot(A)
        return -0.25 * x.dot(AB.dot(C) - C.dot(AB))

    def project_point(self, a):
        return polar(np.asarray(a, dtype=float))

    def project_tangent(self, x, a):
        return x.dot(skew(x.T.dot(a)))

    def point_residual(self, x):
        return max(np.abs(x.T.dot(x) - np.eye(3)).max(),
                   abs(np.linalg.det(x) - 1.0))

    def orthonormal_basis(self, x):
        return [x.dot(hat(e)) / np.sqrt(2.0) for e in np.eye(3)]

    def random_point(self, rng):
        return Rotation.random(random_state=rng).as_matrix()


class SPD(Manifold):
    """Symmetric positive definite n x n matrices with the affine-invariant
    metric <X, Y>_P = tr(P^-1 X P^-1 Y). Complete, simply connected and of
    nonpositive curvature, with sectional curvatures in [-1/2, 0].
    """

    kind = "spd"
    curvature_bounds = (-0.5, 0.0)

    def __init__(self, n):
        if int(n) != n or n < 1:
            raise ValueError("SPD dimension must be a positive integer")
        self.n = int(n)
        self.dim = self.n * (self.n + 1) // 2
        self.ambient_shape = (self.n, self.n)

    def __repr__(self):
        return "SPD(%d)" % self.n

    def inner(self, x, u, v):
        return float(np.trace(np.linalg.solve(x, u).dot(np.linalg.solve(x, v))))

    def exp(self, x, u):
        s, si = spd_sqrtm(x), spd_invsqrtm(x)
        return sym(s.dot(sym_expm(si.dot(u).dot(si))).dot(s))

    def log(self, x, y):
        if np.array_equal(x, y):
            return np.zeros_like(x)
        s, si = spd_sqrtm(x), spd_invsqrtm(x)
        return sym(s.dot(spd_logm(si.dot(y).dot(si))).dot(s))

    def dist(self, x, y):
        w = eigh(sym(y), sym(x), eigvals_only=True)
        return float(np.sqrt(np.sum(np.log(w) ** 2)))

    def transp_exp(self, x, w, v):
        if not np.any(w):
            return np.array(v, dtype=float)
        s, si = spd_sqrtm(x), spd_invsqrtm(x)
        E = s.dot(sym_expm(0.5 * si.dot(w).dot(si))).dot(si)
        return sym(E.dot(v).dot(E.T))

    def curvature(self, x, u, v, w):
        s, si = spd_sqrtm(x), spd_invsqrtm(x)
        A, B, C = si.dot(u).dot(si), si.dot(v).dot(si), si.dot(w).dot(si)
        AB = A.dot(B) - B.dot(A)
        return sym(-0.25 * s.dot(AB.dot(C) - C.dot(AB)).dot(s))

    def covariant_derivative(self, x, u, v, dv):
        return sym(dv) - sym(u.dot(np.linalg.solve(x, v)))

    def project_point(self, a):
        return spd_clip(np.asarray(a, dtype=float))

    def project_tangent(self, x, a):
        return sym(np.asarray(a, dtype=float))

    def max_step(self):
        return 0.5

    def point_residual(self, x):
        return np.abs(x - x.T).max()

    def check_point(self, x, tol=1e-9):
        Manifold.check_point(self, x,
                             min(tol, 1e-12 * max(1.0, np.abs(x).max())))
        if np.linalg.eigvalsh(sym(x)).min() <= 0:
            raise ConstraintViolation("Matrix is not positive definite")

    def check_tangent(self, x, v, tol=1e-9):
        if np.shape(v) != self.ambient_shape:
            raise ConstraintViolation("Tangent coordinates must have shape " +
                                      str(self.ambient_shape))
        if np.abs(v - v.T).max() > 1e-12 * max(1.0, np.abs(v).max()):
            raise ConstraintViolation("Tangent vector of SPD must be "
                                      "symmetric")

    def orthonormal_basis(self, x):
        s = spd_sqrtm(x)
        basis = []
        for i in range(self.n):
            for j in range(i, self.n):
                S = np.zeros((self.n, self.n))
                if i == j:
                    S[i, i] = 1.0
                else:
                    S[i, j] = S[j, i] = 1.0 / np.sqrt(2.0)
                basis.append(s.dot(S).dot(s))
        return basis

    def random_point(self, rng):
        return sym_expm(0.5 * sym(rng.standard_normal((self.n, self.n))))


def make_manifold(kind, n=None, radius=1.0):
    """Build a manifold from its kind string.

    :param kind: One of "euclidean", "sphere", "so3", "spd".
    :type kind: str.
    :param n: Dimension parameter (ignored for "so3").
    :type n: int.
    :param radius: Sphere radius.
    :type radius: float.

    :returns: :class:`Manifold`.
    """
    kind = kind.lower()
    if kind == "euclidean":
        return Euclidean(n)
    elif kind == "sphere":
        return Sphere(n, radius)
    elif kind == "so3":
        return SO3()
    elif kind == "spd":
        return SPD(n)
    raise ValueError("Unknown manifold kind " + kind)


class ManifoldPoint(object):
    """A point of a manifold stored in ambient coordinates.

    :param manifold: The manifold the point lives on.
    :type manifold: :class:`Manifold`.
    :param coords: Ambient coordinates; copied and frozen.
    :type coords: array-like.
    :param check: Validate the manifold constraints.
    :type check: bool.
    :param tol: Tolerance of the constraint check.
    :type tol: float.
    """

    __slots__ = ("manifold", "coords")

    def __init__(self, manifold, coords, check=True, tol=1e-9):
        coords = np.array(coords, dtype=float)
        if check:
            manifold.check_point(coords, tol)
        coords.setflags(write=False)
        self.manifold = manifold
        self.coords = coords

    def __repr__(self):
        return "ManifoldPoint(%r, %s)" % (self.manifold,
                                          np.array2string(self.coords))

    def same_as(self, other, tol=1e-9):
        if other is self:
            return True
        return self.manifold == other.manifold and \
            np.abs(self.coords - other.coords).max() <= tol


class TangentVector(object):
    """A tangent vector: a base point and ambient coordinates that satisfy
    the tangency constraint at that point. Supports addition, subtraction
    and scalar multiplication with vectors at the same base point.
    """

    __slots__ = ("base", "coords")

    def __init__(self, base, coords, check=True, tol=1e-9):
        coords = np.array(coords, dtype=float)
        if check:
            base.manifold.check_tangent(base.coords, coords, tol)
        coords.setflags(write=False)
        self.base = base
        self.coords = coords

    @property
    def manifold(self):
        return self.base.manifold

    @property
    def norm(self):
        return self.manifold.norm(self.base.coords, self.coords)

    def __repr__(self):
        return "TangentVector(at %s, %s)" % (
            np.array2string(self.base.coords),
            np.array2string(self.coords))

    def _same(self, coords):
        return TangentVector(self.base, coords, check=False)

    def __add__(self, other):
        _check_bases(self, other)
        return self._same(self.coords + other.coords)

    def __sub__(self, other):
        _check_bases(self, other)
        return self._same(self.coords - other.coords)

    def __neg__(self):
        return self._same(-self.coords)

    def __mul__(self, scalar):
        return self._same(scalar * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._same(self.coords / scalar)

    __div__ = __truediv__


class BilinearReport(object):
    """Value of a symmetric bilinear form with optional comparison bounds."""

    def __init__(self, value, lower_bound=None, upper_bound=None,
                 tolerance=1e-9):
        self.value = value
        self.lower_bound = lower_bound
        self.upper_bound = upper_bound
        self.tolerance = tolerance

    def __repr__(self):
        return "BilinearReport(value=%r, lower_bound=%r, upper_bound=%r)" % \
            (self.value, self.lower_bound, self.upper_bound)

    def is_consistent(self):
        if self.lower_bound is not None and \
                self.value < self.lower_bound - self.tolerance:
            return False
        if self.upper_bound is not None and \
                self.value > self.upper_bound + self.tolerance:
            return False
        return True


def _check_bases(*vectors, **kwargs):
    tol = kwargs.get("tol", 1e-9)
    first = vectors[0].base
    for v in vectors[1:]:
        if not first.same_as(v.base, tol):
            raise BasepointMismatch("Tangent vectors live at different "
                                    "points")


def _check_at(p, *vectors, **kwargs):
    tol = kwargs.get("tol", 1e-9)
    for v in vectors:
        if not p.same_as(v.base, tol):
            raise BasepointMismatch("Tangent vector is not based at the "
                                    "given point")


def zero_vector(p):
    return TangentVector(p, np.zeros(p.manifold.ambient_shape), check=False)


def inner(v, w, tol=1e-9):
    """Riemannian inner product of two tangent vectors at the same point.

    :param v: First tangent vector.
    :type v: :class:`TangentVector`.
    :param w: Second tangent vector.
    :type w: :class:`TangentVector`.
    :param tol: Tolerance of the base point comparison.
    :type tol: float.

    :returns: float.
    """
    _check_bases(v, w, tol=tol)
    return v.manifold.inner(v.base.coords, v.coords, w.coords)


def norm(v):
    return v.norm


def exp_map(p, v, tol=1e-9):
    """Endpoint of the geodesic leaving p with velocity v at time 1.

    :raises InjectivityRadiusExceeded: if v is longer than the injectivity
                                       guard of the manifold.
    """
    _check_at(p, v, tol=tol)
    M = p.manifold
    return ManifoldPoint(M, M.project_point(M.exp(p.coords, v.coords)),
                         check=False)


def log_map(p, q):
    """Inverse of :func:`exp_map`: the initial velocity of the minimizing
    geodesic from p to q reaching q at time 1.

    :raises AtCutLocus: if q is at the cut locus of p.
    """
    return TangentVector(p, p.manifold.log(p.coords, q.coords), check=False)


def dist(p, q):
    """Riemannian distance; defined for every pair of points."""
    return p.manifold.dist(p.coords, q.coords)


def parallel_transport(v, q):
    """Transport v to q along the minimizing geodesic from v.base.

    :param v: Tangent vector to transport.
    :type v: :class:`TangentVector`.
    :param q: Target point.
    :type q: :class:`ManifoldPoint`.

    :returns: :class:`TangentVector` based at q.
    """
    M = v.manifold
    p = v.base
    if p.same_as(q, 0.0):
        return TangentVector(q, v.coords, check=False)
    w = M.log(p.coords, q.coords)
    return TangentVector(q, M.project_tangent(q.coords,
                                              M.transp_exp(p.coords, w,
                                                           v.coords)),
                         check=False)


def curvature(p, x, y, z, tol=1e-9):
    """Riemann curvature R(x, y)z at p."""
    _check_at(p, x, y, z, tol=tol)
    return TangentVector(p, p.manifold.curvature(p.coords, x.coords, y.coords,
                                                 z.coords), check=False)


def sectional_curvature(x, y):
    """Sectional curvature of the plane spanned by x and y."""
    _check_bases(x, y)
    M, p = x.manifold, x.base.coords
    num = M.inner(p, M.curvature(p, x.coords, y.coords, y.coords), x.coords)
    den = M.inner(p, x.coords, x.coords) * M.inner(p, y.coords, y.coords) - \
        M.inner(p, x.coords, y.coords) ** 2
    if den <= 0:
        raise ValueError("Vectors do not span a plane")
    return num / den


def grad_half_sq_dist(q, P):
    """Gradient at q of F = d(., P)^2 / 2, that is -log_q P."""
    return TangentVector(q, -q.manifold.log(q.coords, P.coords), check=False)


def hess_half_sq_dist(q, P, v, w, tol=1e-9):
    """Hessian of F = d(., P)^2 / 2 at q evaluated on (v, w).

    The value is exact on the implemented manifolds. When v and w coincide the
    report also carries comparison bounds: the lower bound uses the upper
    sectional curvature bound A (sqrt(A) d cot(sqrt(A) d), valid while
    sqrt(A) d < pi) and the upper bound uses the lower curvature bound.

    :param q: Evaluation point.
    :type q: :class:`ManifoldPoint`.
    :param P: Center of the distance function.
    :type P: :class:`ManifoldPoint`.
    :param v: First argument.
    :type v: :class:`TangentVector`.
    :param w: Second argument.
    :type w: :class:`TangentVector`.

    :returns: :class:`BilinearReport`.
    """
    _check_at(q, v, w, tol=tol)
    M = q.manifold
    H, basis, d = M.hessian_operator(q.coords, P.coords)
    cv = M.tangent_coordinates(q.coords, v.coords, basis)
    cw = M.tangent_coordinates(q.coords, w.coords, basis)
    value = float(cv.dot(H).dot(cw))
    lower = upper = None
    if np.abs(v.coords - w.coords).max() <= tol:
        low, high = M.curvature_bounds
        vv = float(cv.dot(cv))
        if np.sqrt(max(high, 0.0)) * d < np.pi:
            lower = min(1.0, _comparison_eigenvalue(high, d)[0]) * vv
        upper = max(1.0, _comparison_eigenvalue(low, d)[0]) * vv
    return BilinearReport(value, lower, upper, tolerance=1e-6)


def laplacian_half_sq_dist(q, P):
    """Laplacian of F = d(., P)^2 / 2 at q (trace of the Hessian)."""
    H, _, _ = q.manifold.hessian_operator(q.coords, P.coords)
    return float(np.trace(H))
