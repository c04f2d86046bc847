# -*- coding: utf-8 -*-
"""
Controllers, observers and filters as vector-field constructors, together
with contraction certificates for gradient flows.

Laws act on ambient coordinates internally; the public functions named after
each law take :class:`riemcontrol.manifolds.ManifoldPoint` and
:class:`riemcontrol.manifolds.TangentVector` objects, and the constructors
(:func:`tracking_system`, :func:`observer_system`, :func:`so3_filter`, ...)
return fields that the integrators accept.

Created on Sun Oct 18 17:48:09 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import numpy as np
from .exceptions import BeyondValidityRange, DegenerateInput, \
    GainOutOfRange, NotKilling
from .integrators import BundleSystem, FirstOrderField, SecondOrderField
from .manifolds import Euclidean, ManifoldPoint, SO3, Sphere, \
    TangentVector, laplacian_half_sq_dist
from .matrix_utils import hat
from .oracles import check_killing, directional_derivative, \
    fd_covariant_derivative


class Gains(object):
    """Gains of the control laws. Every gain used by a law must be positive.

    :param k1: Damping of the tracking controller.
    :param k2: Stiffness of the tracking controller.
    :param alpha: Position injection of the speed observer.
    :param beta: Velocity injection of the speed observer.
    :param k: Gain of the SO(3) laws and the Killing filters.
    :param lam_flow: Time scale of the gradient flow.
    """

    _names = ("k1", "k2", "alpha", "beta", "k", "lam_flow")

    def __init__(self, **kwargs):
        for name in self._names:
            setattr(self, name, None)
        for name, value in kwargs.items():
            if name not in self._names:
                raise ValueError("Unknown parameter " + name)
            setattr(self, name, None if value is None else float(value))

    def __repr__(self):
        given = ["%s=%g" % (n, getattr(self, n)) for n in self._names
                 if getattr(self, n) is not None]
        return "Gains(" + ", ".join(given) + ")"

    def require(self, *names):
        for name in names:
            value = getattr(self, name)
            if value is None or not value > 0:
                raise GainOutOfRange("Gain " + name + " must be given and "
                                     "positive")
        return [getattr(self, name) for name in names]


###########################################################################
# POTENTIALS AND REFERENCES                                               #
###########################################################################

class Potential(object):
    """Potential energy V with its Riemannian gradient and, optionally, the
    Hessian map u -> ∇_u ∇V. Without a closed-form Hessian a central
    difference of the gradient is used.

    :param manifold: The manifold.
    :param value: Function ambient coordinates -> float.
    :param gradient: Function ambient coordinates -> tangent coordinates.
    :param hessian: Function (coordinates, tangent) -> tangent coordinates.
    """

    def __init__(self, manifold, value, gradient, hessian=None, name=None):
        self.manifold = manifold
        self.value = value
        self.gradient = gradient
        self._hessian = hessian
        self.name = name

    def hessian(self, x, u):
        if self._hessian is not None:
            return self._hessian(x, u)
        M = self.manifold
        grad = lambda y: M.project_tangent(y, self.gradient(y))
        dg = directional_derivative(M, grad, x, u)
        return M.covariant_derivative(x, u, grad(x), dg)

    def gradient_at(self, point):
        return TangentVector(point, self.gradient(point.coords), check=False)


def zero_potential(manifold):
    zero = np.zeros(manifold.ambient_shape)
    return Potential(manifold, lambda x: 0.0, lambda x: zero.copy(),
                     lambda x, u: np.zeros_like(u), "zero")


def gravity_potential(manifold, g=1.0, axis=None):
    """V(q) = g <q, e> for a fixed ambient direction e (the last ambient axis
    by default): the spherical pendulum on a sphere, a uniform field on
    Euclidean space.
    """
    if not isinstance(manifold, (Sphere, Euclidean)):
        raise ValueError("Gravity potential needs a sphere or Euclidean space")
    e = np.zeros(manifold.ambient_shape)
    e[-1 if axis is None else axis] = 1.0
    if isinstance(manifold, Euclidean):
        return Potential(manifold, lambda x: g * np.dot(x, e),
                         lambda x: g * e, lambda x, u: np.zeros_like(u),
                         "gravity")
    r2 = manifold.radius ** 2
    return Potential(manifold, lambda x: g * np.dot(x, e),
                     lambda x: g * (e - np.dot(x, e) * x / r2),
                     lambda x, u: -g * np.dot(x, e) * u / r2, "gravity")


class ReferenceSignal(object):
    """Time-parameterized state t -> (q*(t), q*'(t)).

    :param manifold: The manifold.
    :param func: Function t -> (point coordinates, velocity coordinates).
    :param bounded: Whether the reference stays in a bounded set.
    """

    def __init__(self, manifold, func, bounded=True):
        self.manifold = manifold
        self.func = func
        self.bounded = bounded

    def __call__(self, t):
        x, v = self.func(t)
        p = ManifoldPoint(self.manifold, x, check=False)
        return p, TangentVector(p, v, check=False)

    @classmethod
    def from_trajectory(cls, trajectory, field=None):
        """Reference read from a sampled trajectory. Times on the sample grid
        are exact; other times follow the geodesic through the nearest
        earlier sample. Velocities come from the trajectory, from `field`
        for first-order trajectories, or are zero."""
        M = trajectory.manifold
        X, V = trajectory.points, trajectory.velocities

        def velocity(i):
            if V is not None:
                return V[i]
            if field is not None:
                return M.project_tangent(X[i], field.rate(trajectory.times[i],
                                                          X[i]))
            return np.zeros(M.ambient_shape)

        def func(t):
            i = trajectory.index(t)
            if i is not None:
                return X[i], velocity(i)
            i = int(np.clip(np.floor((t - trajectory.times[0]) /
                                     trajectory.h), 0, len(X) - 1))
            w = (t - trajectory.times[i]) * velocity(i)
            return M.exp(X[i], w), M.transp_exp(X[i], w, velocity(i))
        return cls(M, func)

    @classmethod
    def great_circle(cls, sphere, q0, v0):
        """Unit-free great circle through q0 with constant velocity v0.

        :raises DegenerateInput: if v0 vanishes.
        """
        q0 = np.asarray(q0, dtype=float)
        v0 = np.asarray(v0, dtype=float)
        r = sphere.radius
        speed = np.linalg.norm(v0)
        if not speed > 0:
            raise DegenerateInput("A great circle needs a nonzero velocity")
        e = v0 / speed

        def func(t):
            a = speed * t / r
            return (np.cos(a) * q0 + r * np.sin(a) * e,
                    speed * (-np.sin(a) * q0 / r + np.cos(a) * e))
        return cls(sphere, func)

    def feasibility_residual(self, potential, times):
        """Largest |∇_q*' q*' + ∇V(q*)| over a uniform time grid."""
        times = np.asarray(times, dtype=float)
        M = self.manifold
        X, V = zip(*[self.func(t) for t in times])
        X, V = np.array(X), np.array(V)
        acc = fd_covariant_derivative(M, X, V, times[1] - times[0])
        return max(M.norm(x, a + potential.gradient(x))
                   for x, a in zip(X[2:-2], acc[2:-2]))


###########################################################################
# TRACKING AND OBSERVER                                                   #
###########################################################################

def _tracking_force(M, x, v, xs, vs, k1, k2, sign=1.0):
    gradF = -M.log(x, xs)
    u = -k2 * gradF - k1 * (v - M.transp(xs, x, vs))
    return u + sign * M.curvature(x, gradF, v, v)


def tracking_force(q, qdot, ref_point, ref_velocity, gains):
    """Tracking control u = u_P + u_D + u_R with u_P = -k2 ∇F,
    u_D = -k1 (q' - P q*') and the curvature compensation u_R = R(∇F, q')q',
    where F = d(., q*)^2 / 2.

    :param q: Current configuration.
    :type q: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param qdot: Current velocity.
    :type qdot: :class:`riemcontrol.manifolds.TangentVector`.
    :param ref_point: Reference configuration q*(t).
    :param ref_velocity: Reference velocity q*'(t).
    :param gains: Gains with k1 and k2.
    :type gains: :class:`Gains`.

    :returns: :class:`riemcontrol.manifolds.TangentVector` at q.
    :raises AtCutLocus: if q is at the cut locus of q*.
    """
    k1, k2 = gains.require("k1", "k2")
    return TangentVector(q, _tracking_force(q.manifold, q.coords, qdot.coords,
                                            ref_point.coords,
                                            ref_velocity.coords, k1, k2),
                         check=False)


def tracking_field(potential, ref, gains, curvature_sign=1.0):
    """Closed loop ∇_q' q' = -∇V + u for a reference known in closed
    form. curvature_sign = -1 flips the compensation term u_R."""
    k1, k2 = gains.require("k1", "k2")
    M = potential.manifold

    def force(t, x, v):
        xs, vs = ref.func(t)
        return -potential.gradient(x) + _tracking_force(M, x, v, xs, vs,
                                                        k1, k2, curvature_sign)
    return SecondOrderField(M, force, "tracking")


def tracking_system(potential, gains):
    """Closed loop integrated together with the reference; component 0 is
    the plant, component 1 the free reference motion ∇ q*' = -∇V(q*)."""
    k1, k2 = gains.require("k1", "k2")
    M = potential.manifold

    def rates(t, xs, vs):
        x, xr = xs
        v, vr = vs
        return [v, vr], [-potential.gradient(x) +
                         _tracking_force(M, x, v, xr, vr, k1, k2),
                         -potential.gradient(xr)]
    return BundleSystem([M, M], rates, "tracking")


def _observer_rates(M, xh, vh, x, potential, alpha, beta):
    gradF = -M.log(xh, x)
    a = vh - alpha * gradF
    b = -beta * gradF + M.curvature(xh, gradF, vh, vh) - \
        M.transp(x, xh, potential.gradient(x))
    return a, b


def speed_observer_field(qhat, vhat, q, potential, gains):
    """Speed observer driven by position measurements:
    q^' = v^ - alpha ∇F and D v^/dt = -beta ∇F + R(∇F, v^)v^ - P ∇V(q),
    with F = d(., q)^2 / 2 evaluated at q^.

    :returns: tuple of :class:`riemcontrol.manifolds.TangentVector` at q^.
    """
    alpha, beta = gains.require("alpha", "beta")
    a, b = _observer_rates(qhat.manifold, qhat.coords, vhat.coords, q.coords,
                           potential, alpha, beta)
    return TangentVector(qhat, a, check=False), \
        TangentVector(qhat, b, check=False)


def observer_system(potential, gains):
    """Plant ∇_q' q' = -∇V (component 0) with the speed observer
    (component 1) fed by the plant position."""
    alpha, beta = gains.require("alpha", "beta")
    M = potential.manifold

    def rates(t, xs, vs):
        x, xh = xs
        v, vh = vs
        a, b = _observer_rates(M, xh, vh, x, potential, alpha, beta)
        return [v, a], [-potential.gradient(x), b]
    return BundleSystem([M, M], rates, "observer")


###########################################################################
# SO(3) LAWS                                                              #
###########################################################################

def _skew_input(omega):
    omega = np.asarray(omega, dtype=float)
    return hat(omega) if omega.shape == (3,) else omega


def _so3_tracking_rate(R, Rs, Omega, k):
    return R.dot(-0.5 * k * (Rs.T.dot(R) - R.T.dot(Rs)) + Omega)


def so3_tracking_field(R, R_ref, omega, k):
    """Attitude tracking R' = R u with u = -(k/2)(R*^T R - R^T R*) + Omega.

    :param R: Current attitude.
    :type R: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param R_ref: Reference attitude R*(t).
    :type R_ref: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param omega: Body rate as a 3-vector or skew matrix.
    :param k: Gain.

    :returns: :class:`riemcontrol.manifolds.TangentVector` at R.
    """
    return TangentVector(R, _so3_tracking_rate(R.coords, R_ref.coords,
                                               _skew_input(omega), k),
                         check=False)


def so3_reference_field(omega, manifold=None):
    """Left-invariant kinematics R' = R hat(omega(t))."""
    return FirstOrderField(manifold or SO3(),
                           lambda t, R: R.dot(_skew_input(omega(t))),
                           "so3_reference")


def so3_tracking(ref, omega, k):
    """Closed-loop attitude tracking of `ref` as a first-order field."""
    def rate(t, R):
        Rs, _ = ref.func(t)
        return _so3_tracking_rate(R, Rs, _skew_input(omega(t)), k)
    return FirstOrderField(ref.manifold, rate, "so3_tracking")


def _so3_filter_rate(M, Rh, R, Omega, k, variant):
    if variant == "gradient":
        return Rh.dot(-0.5 * k * (R.T.dot(Rh) - Rh.T.dot(R)) + Omega)
    elif variant == "log":
        return Rh.dot(Omega) + k * M.log(Rh, R)
    raise ValueError("Unknown filter variant " + str(variant))


def so3_filter_field(Rhat, R, omega, k, variant="gradient"):
    """Attitude filter from measured attitudes.

    Variant "gradient": R^' = -(k/2) R^(R^T R^ - R^^T R) + R^ Omega.
    Variant "log": R^' = R^ Omega + k R^ log(R^^T R).

    :raises AtCutLocus: for the log variant at relative angle pi.
    """
    return TangentVector(Rhat, _so3_filter_rate(Rhat.manifold, Rhat.coords,
                                                R.coords, _skew_input(omega),
                                                k, variant), check=False)


def so3_filter(measured, omega, k, variant="gradient"):
    """Filter driven by a measured attitude signal, as a first-order field."""
    M = measured.manifold

    def rate(t, Rh):
        R, _ = measured.func(t)
        return _so3_filter_rate(M, Rh, R, _skew_input(omega(t)), k, variant)
    return FirstOrderField(M, rate, "so3_filter_" + variant)


###########################################################################
# KILLING FILTERS                                                         #
###########################################################################

class KillingField(FirstOrderField):
    """A first-order field with a recorded Killing certificate."""

    def __init__(self, field, residual, tol):
        super(KillingField, self).__init__(field.manifold, field.rate,
                                           field.name)
        self.residual = residual
        self.tol = tol
        self.certified = residual <= tol


def certify_killing(field, times=(0.0,), n_samples=20, rng=None, tol=1e-6,
                    cfg=None):
    """Run :func:`riemcontrol.oracles.check_killing` at the given times and
    wrap the field with the outcome.

    :returns: :class:`KillingField`.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    M = field.manifold
    worst = 0.0
    for t in times:
        f = lambda x, t=t: M.project_tangent(x, field.rate(t, x))
        worst = max(worst, check_killing(M, f, n_samples=n_samples, rng=rng,
                                         cfg=cfg))
    return KillingField(field, worst, tol)


def _require_killing(field):
    if not isinstance(field, KillingField) or not field.certified:
        raise NotKilling("The drift field is not certified as Killing")


def killing_filter_field(qhat, q, field, k, t=0.0):
    """Filter q^' = f(t, q^) + k log(q^, q) for a certified Killing drift f.

    :raises NotKilling: if `field` carries no Killing certificate.
    :raises AtCutLocus: if q is at the cut locus of q^.
    """
    _require_killing(field)
    M = qhat.manifold
    return TangentVector(qhat, M.project_tangent(qhat.coords,
                                                 field.rate(t, qhat.coords)) +
                         k * M.log(qhat.coords, q.coords), check=False)


def killing_filter(field, measured, k):
    """Continuous Killing filter driven by a measured signal."""
    _require_killing(field)
    M = field.manifold

    def rate(t, xh):
        x, _ = measured.func(t)
        return M.project_tangent(xh, field.rate(t, xh)) + k * M.log(xh, x)
    return FirstOrderField(M, rate, "killing_filter")


class Isometry(object):
    """An isometry tau with its differential.

    :param manifold: The manifold.
    :param apply: Function x -> tau(x).
    :param differential: Function (x, v) -> D tau(x)[v].
    """

    def __init__(self, manifold, apply, differential, name=None):
        self.manifold = manifold
        self.apply = apply
        self.differential = differential
        self.name = name


def congruence_isometry(manifold, G):
    """P -> G P G^T on SPD."""
    G = np.asarray(G, dtype=float)
    return Isometry(manifold, lambda x: G.dot(x).dot(G.T),
                    lambda x, v: G.dot(v).dot(G.T), "congruence")


def rotation_isometry(manifold, Q):
    """x -> Q x on a sphere, R -> Q R on SO(3)."""
    Q = np.asarray(Q, dtype=float)
    return Isometry(manifold, lambda x: Q.dot(x), lambda x, v: Q.dot(v),
                    "rotation")


def translation_isometry(manifold, c):
    c = np.asarray(c, dtype=float)
    return Isometry(manifold, lambda x: x + c, lambda x, v: v, "translation")


def killing_filter_discrete_step(qhat, q, tau, k, dt):
    """Sampled Killing filter: the correction k dt log(q^_k, q_k) is mapped
    by D tau to tau(q^_k) and applied there with the exponential map.

    :param qhat: Current estimate.
    :type qhat: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param q: Current measurement.
    :type q: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param tau: One-step isometry of the plant.
    :type tau: :class:`Isometry`.
    :param k: Gain.
    :param dt: Sampling time; k dt must lie in (0, 1).

    :returns: :class:`riemcontrol.manifolds.ManifoldPoint`.
    """
    if not 0 < k * dt < 1:
        raise GainOutOfRange("k*dt must lie in (0, 1), got %g" % (k * dt))
    M = qhat.manifold
    correction = k * dt * M.log(qhat.coords, q.coords)
    moved = tau.apply(qhat.coords)
    step = M.project_tangent(moved, tau.differential(qhat.coords, correction))
    return ManifoldPoint(M, M.project_point(M.exp(moved, step)), check=False)


###########################################################################
# GRADIENT FLOW AND CONTRACTION                                           #
###########################################################################

def gradient_flow_field(q, P, lam_flow):
    """q' = -(1/lam) grad d(q, P)^2 / 2 = log(q, P) / lam."""
    return TangentVector(q, q.manifold.log(q.coords, P.coords) / lam_flow,
                         check=False)


def gradient_flow(manifold, P, lam_flow):
    P = P.coords if hasattr(P, "coords") else np.asarray(P, dtype=float)
    return FirstOrderField(manifold, lambda t, x: manifold.log(x, P) /
                           lam_flow, "gradient_flow")


def contraction_rate_bound(q, P, lam_flow, A):
    """Contraction rate 2 sqrt(A) d / (lam tan(sqrt(A) d)) of <dq, dq> for
    the gradient flow, d = d(q, P); 2/lam at q = P or A = 0.

    :raises BeyondValidityRange: if sqrt(A) d >= pi/2.
    """
    if A < 0:
        raise ValueError("Curvature bound A must be nonnegative")
    x = np.sqrt(A) * q.manifold.dist(q.coords, P.coords)
    if x >= np.pi / 2:
        raise BeyondValidityRange("sqrt(A) d = %.6g is not below pi/2" % x)
    if x < 1e-8:
        return 2.0 / lam_flow
    return 2.0 * x / (lam_flow * np.tan(x))


def contraction_margin(field, t, x, cfg=None):
    """min over unit v of -<∇_v f, v> at x, from the symmetric part of the
    finite-difference covariant Jacobian in an orthonormal basis."""
    M = field.manifold
    f = lambda y: M.project_tangent(y, field.rate(t, y))
    fx = f(x)
    basis = M.orthonormal_basis(x)
    J = np.array([M.tangent_coordinates(
        x, M.covariant_derivative(x, e, fx, directional_derivative(M, f, x, e,
                                                                     cfg)),
        basis) for e in basis]).T
    return float(np.linalg.eigvalsh(-0.5 * (J + J.T)).min())


def contraction_certificate(field, base, n_samples=10, cfg=None):
    """Smallest contraction margin over n_samples evenly spaced samples of
    `base`. A positive value certifies that nearby solutions converge."""
    idx = np.unique(np.linspace(0, len(base) - 1, n_samples).astype(int))
    return min(contraction_margin(field, base.times[i], base.points[i], cfg)
               for i in idx)


def volume_rate(q, P, lam_flow):
    """Log-volume rate -Laplacian(F)/lam of a frame under the gradient flow."""
    return -laplacian_half_sq_dist(q, P) / lam_flow
