# -*- coding: utf-8 -*-
"""
Integration of first-order dynamics x' = f(t, x) and of second-order
dynamics ∇_q' q' = F(t, q, q') on the manifolds of
:mod:`riemcontrol.manifolds`.

Created on Sun Oct 18 11:05:44 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import sys
import numpy as np
from .exceptions import ConstraintDrift, StepTooLarge
from .manifolds import ManifoldPoint, TangentVector


def _coords(obj):
    return obj.coords if hasattr(obj, "coords") else np.asarray(obj, float)


class FirstOrderField(object):
    """Vector field x' = f(t, x).

    :param manifold: The manifold.
    :type manifold: :class:`riemcontrol.manifolds.Manifold`.
    :param rate: Function (t, ambient coordinates) -> ambient tangent
                 coordinates at that point.
    :type rate: function.
    :param name: Optional label used in messages.
    :type name: str.
    """

    def __init__(self, manifold, rate, name=None):
        self.manifold = manifold
        self.rate = rate
        self.name = name

    def __call__(self, t, point):
        M = self.manifold
        return TangentVector(point, M.project_tangent(
            point.coords, self.rate(t, point.coords)), check=False)


class SecondOrderField(object):
    """Force F of the second-order system ∇_q' q' = F(t, q, q').

    :param manifold: The manifold.
    :type manifold: :class:`riemcontrol.manifolds.Manifold`.
    :param force: Function (t, q, qdot) -> ambient tangent coordinates at q.
    :type force: function.
    """

    def __init__(self, manifold, force, name=None):
        self.manifold = manifold
        self.force = force
        self.name = name

    def __call__(self, t, point, velocity):
        M = self.manifold
        return TangentVector(point, M.project_tangent(
            point.coords, self.force(t, point.coords, velocity.coords)),
            check=False)


class BundleSystem(object):
    """Coupled dynamics on a product of tangent bundles. Component i has
    state (x_i, v_i) with x_i' = a_i and D v_i / dt = b_i.

    :param manifolds: One manifold per component.
    :type manifolds: list of :class:`riemcontrol.manifolds.Manifold`.
    :param rates: Function (t, xs, vs) -> (list of a_i, list of b_i), all as
                  ambient tangent coordinates at x_i.
    :type rates: function.
    """

    def __init__(self, manifolds, rates, name=None):
        self.manifolds = list(manifolds)
        self.rates = rates
        self.name = name


class Trajectory(object):
    """Time-stamped samples produced by an integrator.

    :param manifold: The manifold.
    :param times: Uniform increasing times.
    :param points: Point samples, shape (N,) + ambient shape.
    :param velocities: Velocity samples for second-order systems.
    :param scheme: Name of the integration scheme.
    """

    def __init__(self, manifold, times, points, velocities=None,
                 scheme=None, drift_tol=1e-8):
        times = np.asarray(times, dtype=float)
        if len(times) < 2:
            raise ValueError("A trajectory needs at least two samples")
        steps = np.diff(times)
        if steps.min() <= 0 or \
                np.abs(steps - steps[0]).max() > 1e-9 * max(1.0, times[-1]):
            raise ValueError("Trajectory times must be uniform and increasing")
        self.manifold = manifold
        self.times = times
        self.h = float(steps[0])
        self.points = np.asarray(points, dtype=float)
        self.velocities = None if velocities is None else \
            np.asarray(velocities, dtype=float)
        self.scheme = scheme
        drift = max(manifold.point_residual(x) for x in self.points)
        if drift > drift_tol:
            raise ConstraintDrift("Trajectory drifts %.3g off %r" %
                                  (drift, manifold))

    def __len__(self):
        return len(self.times)

    @property
    def t_span(self):
        return (self.times[0], self.times[-1])

    def point(self, i):
        return ManifoldPoint(self.manifold, self.points[i], check=False)

    def velocity(self, i):
        if self.velocities is None:
            raise ValueError("First-order trajectories carry no velocities")
        return TangentVector(self.point(i), self.velocities[i], check=False)

    def index(self, t, tol=1e-9):
        """Index of the sample at time t, or None when t is off the grid."""
        i = int(round((t - self.times[0]) / self.h))
        if 0 <= i < len(self.times) and abs(self.times[i] - t) <= tol * \
                max(1.0, abs(t)):
            return i
        return None


def _time_grid(t_span, h):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not h > 0:
        raise ValueError("Step h must be positive")
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    n = int(round((t1 - t0) / h))
    if n < 1 or abs(n * h - (t1 - t0)) > 1e-9 * max(1.0, t1 - t0):
        raise ValueError("t_span length must be a multiple of h")
    return t0 + h * np.arange(n + 1)


def _progress(verbose, i, n, label):
    if verbose > 0 and (i == n or i % max(n // 100, 1) == 0):
        sys.stdout.write("\r\x1b[K%s: %d/%d steps (%.0f%%)" %
                         (label, i, n, 100.0 * i / n))
        sys.stdout.flush()
        if i == n:
            sys.stdout.write("\n")


def _settle(manifold, x):
    """Project onto the manifold and check the remaining drift."""
    if not np.all(np.isfinite(x)):
        raise ConstraintDrift("Integration produced non-finite coordinates")
    y = manifold.project_point(x)
    drift = manifold.point_residual(y)
    if drift > 1e-8:
        raise ConstraintDrift("Constraint drift %.3g after projection" % drift)
    return y


def _guard_step(manifold, x, w):
    if manifold.norm(x, w) >= manifold.max_step():
        raise StepTooLarge("Step of length %.3g exceeds the guard %.3g of %r;"
                           " reduce h" % (manifold.norm(x, w),
                                          manifold.max_step(), manifold))


def _rk4_projected_step(M, rate, t, x, h):
    k1 = M.project_tangent(x, rate(t, x))
    _guard_step(M, x, h * k1)
    k2 = rate(t + h / 2, M.project_point(x + h / 2 * k1))
    k3 = rate(t + h / 2, M.project_point(x + h / 2 * k2))
    k4 = rate(t + h, M.project_point(x + h * k3))
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _geodesic_euler_step(M, rate, t, x, h):
    w = h * M.project_tangent(x, rate(t, x))
    _guard_step(M, x, w)
    return M.exp(x, w)


_FIRST_ORDER_SCHEMES = {"rk4": _rk4_projected_step,
                        "geodesic_euler": _geodesic_euler_step}


def integrate_first_order(field, x0, t_span, h, scheme="rk4", verbose=0):
    """Integrate x' = f(t, x).

    :param field: The vector field.
    :type field: :class:`FirstOrderField`.
    :param x0: Initial point.
    :type x0: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param t_span: Initial and final time; the length must be a multiple of h.
    :type t_span: tuple of float.
    :param h: Step size.
    :type h: float.
    :param scheme: "rk4" (classical four-stage step in ambient coordinates
                   with projected stage points, fourth order) or
                   "geodesic_euler" (x <- exp(x, h f), first order).
    :type scheme: str.
    :param verbose: Level of verbosity: 0 quiet, 1 progress.
    :type verbose: int.

    :returns: :class:`Trajectory`.
    :raises StepTooLarge: if h |f| reaches the step guard of the manifold.
    :raises ConstraintDrift: if a step cannot be projected back.
    """
    if scheme not in _FIRST_ORDER_SCHEMES:
        raise ValueError("Unknown integration scheme " + str(scheme))
    step = _FIRST_ORDER_SCHEMES[scheme]
    M = field.manifold
    times = _time_grid(t_span, h)
    n = len(times) - 1
    points = np.empty((n + 1,) + M.ambient_shape)
    points[0] = _coords(x0)
    for i in range(n):
        points[i + 1] = _settle(M, step(M, field.rate, times[i], points[i], h))
        _progress(verbose, i + 1, n, "Integrating")
    return Trajectory(M, times, points, scheme=scheme)


def _bundle_step(system, t, xs, vs, h):
    """One four-stage step on a product of tangent bundles. Stage states are
    reached from the base state by exp along combined position increments,
    velocities are transported along the same geodesics, and stage rates are
    transported back before they are combined."""
    Ms = system.manifolds
    m = len(Ms)

    def evaluate(tt, ys, us, ws):
        a, b = system.rates(tt, ys, us)
        if ws is None:
            return [Ms[i].project_tangent(ys[i], a[i]) for i in range(m)], \
                [Ms[i].project_tangent(ys[i], b[i]) for i in range(m)]
        pa, pb = [], []
        for i in range(m):
            back = -Ms[i].transp_exp(xs[i], ws[i], ws[i])
            pa.append(Ms[i].transp_exp(ys[i], back, a[i]))
            pb.append(Ms[i].transp_exp(ys[i], back, b[i]))
        return pa, pb

    def advance(a, b, frac):
        ws = [frac * h * a[i] for i in range(m)]
        for i in range(m):
            _guard_step(Ms[i], xs[i], ws[i])
        ys = [Ms[i].exp(xs[i], ws[i]) for i in range(m)]
        us = [Ms[i].transp_exp(xs[i], ws[i], vs[i] + frac * h * b[i])
              for i in range(m)]
        return ws, ys, us

    a1, b1 = evaluate(t, xs, vs, None)
    ws, ys, us = advance(a1, b1, 0.5)
    a2, b2 = evaluate(t + h / 2, ys, us, ws)
    ws, ys, us = advance(a2, b2, 0.5)
    a3, b3 = evaluate(t + h / 2, ys, us, ws)
    ws, ys, us = advance(a3, b3, 1.0)
    a4, b4 = evaluate(t + h, ys, us, ws)
    A = [(a1[i] + 2 * a2[i] + 2 * a3[i] + a4[i]) / 6 for i in range(m)]
    B = [(b1[i] + 2 * b2[i] + 2 * b3[i] + b4[i]) / 6 for i in range(m)]
    _, ys, us = advance(A, B, 1.0)
    ys = [_settle(Ms[i], ys[i]) for i in range(m)]
    us = [Ms[i].project_tangent(ys[i], us[i]) for i in range(m)]
    return ys, us


def integrate_bundle(system, xs0, vs0, t_span, h, verbose=0):
    """Integrate a :class:`BundleSystem`.

    :param system: The coupled system.
    :type system: :class:`BundleSystem`.
    :param xs0: Initial points, one per component.
    :type xs0: list of :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param vs0: Initial tangent vectors, one per component.
    :type vs0: list of :class:`riemcontrol.manifolds.TangentVector`.
    :param t_span: Initial and final time.
    :param h: Step size.
    :param verbose: Level of verbosity.

    :returns: list of :class:`Trajectory`, one per component.
    """
    Ms = system.manifolds
    times = _time_grid(t_span, h)
    n = len(times) - 1
    X = [np.empty((n + 1,) + M.ambient_shape) for M in Ms]
    V = [np.empty((n + 1,) + M.ambient_shape) for M in Ms]
    for i in range(len(Ms)):
        X[i][0] = _coords(xs0[i])
        V[i][0] = _coords(vs0[i])
    for k in range(n):
        ys, us = _bundle_step(system, times[k], [x[k] for x in X],
                              [v[k] for v in V], h)
        for i in range(len(Ms)):
            X[i][k + 1] = ys[i]
            V[i][k + 1] = us[i]
        _progress(verbose, k + 1, n, "Integrating")
    return [Trajectory(Ms[i], times, X[i], V[i], scheme="bundle_rk4")
            for i in range(len(Ms))]


def integrate_second_order(F, q0, v0, t_span, h, verbose=0):
    """Integrate ∇_q' q' = F(t, q, q').

    Each stage advances q by the exponential map and transports the velocity
    along the step geodesic before adding the force, so F == 0 reproduces
    geodesics exactly up to round-off.

    :param F: The force field.
    :type F: :class:`SecondOrderField`.
    :param q0: Initial point.
    :type q0: :class:`riemcontrol.manifolds.ManifoldPoint`.
    :param v0: Initial velocity, tangent at q0.
    :type v0: :class:`riemcontrol.manifolds.TangentVector`.

    :returns: :class:`Trajectory` with velocities.
    """
    def rates(t, xs, vs):
        return [vs[0]], [F.force(t, xs[0], vs[0])]
    system = BundleSystem([F.manifold], rates, F.name)
    return integrate_bundle(system, [q0], [v0], t_span, h, verbose)[0]
