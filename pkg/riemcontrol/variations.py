# -*- coding: utf-8 -*-
"""
Variations q' along trajectories: finite differences of neighboring flows,
Jacobi fields, the linearized closed-loop Euler-Lagrange equation, complete
lift frame analysis, the Sasaki distance proxy and exponential decay fits.

Created on Sun Oct 18 14:30:12 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import sys
import numpy as np
from .exceptions import NeighborLeftInjectivityGuard, NonPositiveSample, \
    NotAGeodesic, NotOnTrajectory, WindowTooSmall
from .integrators import FirstOrderField, SecondOrderField, \
    integrate_first_order, integrate_second_order
from .manifolds import ManifoldPoint, TangentVector
from .oracles import directional_derivative, fd_covariant_derivative


class VariationTrack(object):
    """Variation q'(t) along a base trajectory, stored as ambient tangent
    coordinates at the base samples, with the covariant velocity Dq'/dt for
    second-order systems.
    """

    def __init__(self, base, qprime, dqprime=None):
        self.base = base
        self.times = base.times
        self.qprime = np.asarray(qprime, dtype=float)
        self.dqprime = None if dqprime is None else \
            np.asarray(dqprime, dtype=float)

    def __len__(self):
        return len(self.times)

    def vector(self, i):
        return TangentVector(self.base.point(i), self.qprime[i], check=False)

    def norms(self):
        M, X = self.base.manifold, self.base.points
        return np.array([M.norm(x, v) for x, v in zip(X, self.qprime)])

    def velocity_norms(self):
        M, X = self.base.manifold, self.base.points
        return np.array([M.norm(x, v) for x, v in zip(X, self.dqprime)])

    def sasaki_norms(self):
        """|(q', Dq'/dt)| in the Sasaki metric."""
        return np.sqrt(self.norms() ** 2 + self.velocity_norms() ** 2)


###########################################################################
# PARALLEL FRAMES                                                         #
###########################################################################

def _parallel_frames(base):
    """Orthonormal frames transported from sample to sample along the step
    geodesics, plus points, frames and velocities at the step midpoints."""
    M, X = base.manifold, base.points
    frames = [np.array(M.orthonormal_basis(X[0]))]
    mids, mid_frames, mid_vel = [], [], []
    for k in range(len(X) - 1):
        w = M.log(X[k], X[k + 1])
        half = 0.5 * w
        mids.append(M.exp(X[k], half))
        mid_frames.append(np.array([M.transp_exp(X[k], half, e)
                                    for e in frames[-1]]))
        if base.velocities is not None:
            mid_vel.append(M.transp_exp(X[k], half, base.velocities[k]))
        frames.append(np.array([M.project_tangent(X[k + 1],
                                                  M.transp_exp(X[k], w, e))
                                for e in frames[-1]]))
    return frames, mids, mid_frames, mid_vel


def _operator_matrix(M, x, frame, operator):
    """Matrix of a linear operator on T_x M in an orthonormal frame."""
    k = len(frame)
    A = np.empty((k, k))
    for j in range(k):
        image = operator(frame[j])
        for i in range(k):
            A[i, j] = M.inner(x, image, frame[i])
    return A


def _solve_frame_system(times, A_grid, A_mid, damping, c0, cd0):
    """Classical RK4 for c'' = -damping c' - A(t) c in frame coordinates."""
    n = len(times) - 1
    h = times[1] - times[0]
    c = np.empty((n + 1, len(c0)))
    cd = np.empty_like(c)
    c[0], cd[0] = c0, cd0

    def rhs(A, y, yd):
        return yd, -damping * yd - A.dot(y)

    for k in range(n):
        y, yd = c[k], cd[k]
        k1 = rhs(A_grid[k], y, yd)
        k2 = rhs(A_mid[k], y + h / 2 * k1[0], yd + h / 2 * k1[1])
        k3 = rhs(A_mid[k], y + h / 2 * k2[0], yd + h / 2 * k2[1])
        k4 = rhs(A_grid[k + 1], y + h * k3[0], yd + h * k3[1])
        c[k + 1] = y + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        cd[k + 1] = yd + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return c, cd


def _from_frame(frames, c):
    return np.array([np.tensordot(ck, Ek, axes=1) for ck, Ek in zip(c, frames)])


###########################################################################
# VARIATIONS                                                              #
###########################################################################

def propagate_variation_fd(field, base, v0, eps=1e-5, w0=None, central=True,
                           verbose=0):
    """Variation along `base` obtained from neighboring solutions.

    The neighbor starts at exp(q0, eps v0); for second-order systems its
    velocity is the base velocity plus eps w0, transported to the neighbor.
    The variation is log(q(t), q_eps(t)) / eps, or the central version from
    the neighbors at +eps and -eps.

    :param field: The dynamics that produced `base`.
    :type field: :class:`FirstOrderField` or :class:`SecondOrderField`.
    :param base: Base trajectory.
    :type base: :class:`riemcontrol.integrators.Trajectory`.
    :param v0: Initial variation, tangent at the first base point.
    :type v0: :class:`riemcontrol.manifolds.TangentVector`.
    :param eps: Perturbation size in [1e-6, 1e-3].
    :type eps: float.
    :param w0: Initial covariant velocity of the variation.
    :type w0: :class:`riemcontrol.manifolds.TangentVector`.
    :param central: Use neighbors at +eps and -eps.
    :type central: bool.

    :returns: :class:`VariationTrack`.
    :raises NeighborLeftInjectivityGuard: if a neighbor drifts too far.
    """
    if not 1e-6 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-6, 1e-3]")
    M, X = base.manifold, base.points
    x0 = X[0]
    second = isinstance(field, SecondOrderField)
    if second and base.velocities is None:
        raise ValueError("Second-order variations need a base with "
                         "velocities")
    w0c = np.zeros(M.ambient_shape) if w0 is None else w0.coords
    signs = (1.0, -1.0) if central else (1.0,)
    neighbors = []
    for sign in signs:
        start = M.exp(x0, sign * eps * v0.coords)
        p0 = ManifoldPoint(M, M.project_point(start), check=False)
        if second:
            v = M.transp_exp(x0, sign * eps * v0.coords,
                             base.velocities[0] + sign * eps * w0c)
            traj = integrate_second_order(field, p0, v, base.t_span, base.h,
                                          verbose)
        else:
            traj = integrate_first_order(field, p0, base.t_span, base.h,
                                         scheme=base.scheme or "rk4",
                                         verbose=verbose)
        neighbors.append(traj)
    guard = 0.5 * M.injectivity_radius
    qprime = np.empty_like(X)
    dqprime = np.empty_like(X) if second else None
    for k in range(len(X)):
        logs, vels = [], []
        for traj in neighbors:
            y = traj.points[k]
            if M.dist(X[k], y) > guard:
                raise NeighborLeftInjectivityGuard(
                    "Neighboring solution left the injectivity guard at t = "
                    "%g" % base.times[k])
            logs.append(M.log(X[k], y))
            if second:
                vels.append(M.transp(y, X[k], traj.velocities[k]))
        if central:
            qprime[k] = (logs[0] - logs[1]) / (2 * eps)
            if second:
                dqprime[k] = (vels[0] - vels[1]) / (2 * eps)
        else:
            qprime[k] = logs[0] / eps
            if second:
                dqprime[k] = (vels[0] - base.velocities[k]) / eps
    return VariationTrack(base, qprime, dqprime)


def _require_velocities(base, error):
    if base.velocities is None:
        raise error("Base trajectory carries no velocities")


def _require_start(base, *vectors):
    x0 = base.point(0)
    for v in vectors:
        if v is not None and not x0.same_as(v.base, 1e-9):
            raise NotOnTrajectory("Initial variation is not based at the "
                                  "start of the base trajectory")


def geodesic_residual(base, cfg=None):
    """Largest |∇_q' q'| along a sampled trajectory (interior samples)."""
    _require_velocities(base, NotAGeodesic)
    acc = fd_covariant_derivative(base.manifold, base.points, base.velocities,
                                  base.h, cfg)
    M = base.manifold
    return max(M.norm(x, a) for x, a in zip(base.points[2:-2], acc[2:-2]))


def propagate_jacobi(base, v0, w0, tol=1e-6):
    """Jacobi field along a geodesic: D²q'/dt² = -R(q', dq/dt) dq/dt with
    q'(0) = v0 and Dq'/dt(0) = w0, solved in a parallel orthonormal frame.

    :param base: Geodesic trajectory with velocities.
    :type base: :class:`riemcontrol.integrators.Trajectory`.
    :param v0: Initial value.
    :type v0: :class:`riemcontrol.manifolds.TangentVector`.
    :param w0: Initial covariant derivative.
    :type w0: :class:`riemcontrol.manifolds.TangentVector`.
    :param tol: Accepted geodesic residual relative to 1 + |q'|^2.
    :type tol: float.

    :returns: :class:`VariationTrack`.
    :raises NotAGeodesic: if the base is not a geodesic.
    """
    _require_velocities(base, NotAGeodesic)
    M, X, V = base.manifold, base.points, base.velocities
    speed = max(M.norm(x, v) for x, v in zip(X, V))
    if geodesic_residual(base) > tol * (1.0 + speed ** 2):
        raise NotAGeodesic("Base trajectory is not a geodesic")
    _require_start(base, v0, w0)
    frames, mids, mid_frames, mid_vel = _parallel_frames(base)

    def jacobi_operator(x, qdot):
        return lambda e: M.curvature(x, e, qdot, qdot)

    A_grid = [_operator_matrix(M, X[k], frames[k], jacobi_operator(X[k], V[k]))
              for k in range(len(X))]
    A_mid = [_operator_matrix(M, mids[k], mid_frames[k],
                              jacobi_operator(mids[k], mid_vel[k]))
             for k in range(len(mids))]
    c0 = M.tangent_coordinates(X[0], v0.coords, frames[0])
    cd0 = M.tangent_coordinates(X[0], w0.coords, frames[0])
    c, cd = _solve_frame_system(base.times, A_grid, A_mid, 0.0, c0, cd0)
    return VariationTrack(base, _from_frame(frames, c), _from_frame(frames, cd))


def propagate_linearized_EL(base, k1, k2, potential, v0, w0):
    """Linearized closed-loop tracking dynamics along the reference:
    D²q'/dt² = -k1 Dq'/dt - k2 q' - ∇_q' ∇V, solved in a parallel frame.

    :param base: Reference trajectory with velocities.
    :param k1: Damping gain.
    :param k2: Stiffness gain.
    :param potential: Potential with Hessian access.
    :type potential: :class:`riemcontrol.control_laws.Potential`.
    :param v0: Initial variation.
    :param w0: Initial covariant velocity of the variation.

    :returns: :class:`VariationTrack`.
    :raises NotOnTrajectory: if the initial data are not at the base start.
    """
    _require_velocities(base, NotOnTrajectory)
    _require_start(base, v0, w0)
    M, X = base.manifold, base.points
    frames, mids, mid_frames, _ = _parallel_frames(base)

    def stiffness(x):
        return lambda e: k2 * e + potential.hessian(x, e)

    A_grid = [_operator_matrix(M, X[k], frames[k], stiffness(X[k]))
              for k in range(len(X))]
    A_mid = [_operator_matrix(M, mids[k], mid_frames[k], stiffness(mids[k]))
             for k in range(len(mids))]
    c0 = M.tangent_coordinates(X[0], v0.coords, frames[0])
    cd0 = M.tangent_coordinates(X[0], w0.coords, frames[0])
    c, cd = _solve_frame_system(base.times, A_grid, A_mid, k1, c0, cd0)
    return VariationTrack(base, _from_frame(frames, c), _from_frame(frames, cd))


def frame_coordinates(track):
    """Coordinates of q' (and Dq'/dt) in frames transported along the base;
    useful to compare two tracks on the same base."""
    M, X = track.base.manifold, track.base.points
    frames = _parallel_frames(track.base)[0]
    c = np.array([M.tangent_coordinates(x, q, E)
                  for x, q, E in zip(X, track.qprime, frames)])
    if track.dqprime is None:
        return c, None
    cd = np.array([M.tangent_coordinates(x, q, E)
                   for x, q, E in zip(X, track.dqprime, frames)])
    return c, cd


def jacobi_energy(track, K):
    """V = |Dq'/dt|^2 + K |q'|^2, conserved by Jacobi fields normal to a unit
    speed geodesic on a space of constant curvature K."""
    return track.velocity_norms() ** 2 + K * track.norms() ** 2


def commutation_residual(field, track, cfg=None):
    """Largest |∇_q̇ q' - ∇_q' f| over interior samples: a variation of a
    flow commutes with its velocity field."""
    base = track.base
    M, X = base.manifold, base.points
    lhs = fd_covariant_derivative(M, X, track.qprime, base.h, cfg)
    worst = 0.0
    for k in range(2, len(X) - 2):
        t = base.times[k]

        def f(y):
            return M.project_tangent(y, field.rate(t, y))
        df = directional_derivative(M, f, X[k], track.qprime[k], cfg)
        rhs = M.covariant_derivative(X[k], track.qprime[k], f(X[k]), df)
        worst = max(worst, M.norm(X[k], lhs[k] - rhs))
    return worst


###########################################################################
# DECAY FITS                                                              #
###########################################################################

class DecayFit(object):
    """Result of fitting values ~ K * values[0] * exp(-lam (t - t0))."""

    def __init__(self, K, lam, residual, window):
        self.K = K
        self.lam = lam
        self.residual = residual
        self.window = window

    def __repr__(self):
        return "DecayFit(K=%.6g, lam=%.6g, residual=%.3g, window=[%g, %g])" % \
            (self.K, self.lam, self.residual, self.window[0], self.window[1])

    def to_dict(self):
        return {"K": self.K, "lambda": self.lam, "residual": self.residual,
                "window": list(self.window)}


def fit_decay(times, values, window_frac=0.2, verbose=0):
    """Least-squares fit of log(values) against time over the trailing
    (1 - window_frac) of the series.

    The series is truncated at the first sample below 1e-12, where the
    distance has reached numerical zero.

    :param times: Sample times.
    :type times: array.
    :param values: Positive samples (distances, norms).
    :type values: array.
    :param window_frac: Leading fraction discarded as transient.
    :type window_frac: float.

    :returns: :class:`DecayFit`.
    :raises NonPositiveSample: on negative or non-finite samples or a
                               non-positive first sample.
    :raises WindowTooSmall: if fewer than 10 samples remain.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(t) != len(y):
        raise ValueError("times and values differ in length")
    if not 0 <= window_frac < 1:
        raise ValueError("window_frac must lie in [0, 1)")
    if len(y) == 0 or not np.all(np.isfinite(y)) or np.any(y < 0) or \
            y[0] <= 0:
        raise NonPositiveSample("Decay fits need positive finite samples")
    lo = int(np.ceil(window_frac * (len(y) - 1)))
    hi = len(y)
    tiny = np.nonzero(y < 1e-12)[0]
    if tiny.size:
        hi = tiny[0]
        if verbose > 0:
            print("Decay series reaches numerical zero at t = %g; window "
                  "truncated" % t[hi], file=sys.stderr)
    if hi - lo < 10:
        raise WindowTooSmall("Only %d samples in the fit window" %
                             max(hi - lo, 0))
    tw = t[lo:hi] - t[0]
    ly = np.log(y[lo:hi])
    slope, intercept = np.polyfit(tw, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * tw + intercept)) ** 2)))
    return DecayFit(float(np.exp(intercept) / y[0]), float(-slope), residual,
                    (float(t[lo]), float(t[hi - 1])))


###########################################################################
# LIFT ANALYSIS AND SASAKI PROXY                                          #
###########################################################################

class LiftAnalysis(object):
    """Largest singular value of the propagated frame per sample, its
    per-interval growth factors, the log-volume of the frame and a decay fit
    of the singular value."""

    def __init__(self, times, growth, log_volume, fit):
        self.times = times
        self.growth = growth
        self.interval_factors = growth[1:] / growth[:-1]
        self.log_volume = log_volume
        self.fit = fit


def lift_frame_analysis(field, base, eps=1e-5, window_frac=0.2, verbose=0):
    """Propagate an orthonormal frame at the start of `base` with
    :func:`propagate_variation_fd` and track its largest singular value.

    :param field: The first-order dynamics of `base`.
    :type field: :class:`riemcontrol.integrators.FirstOrderField`.
    :param base: Base trajectory.
    :type base: :class:`riemcontrol.integrators.Trajectory`.
    :param eps: Perturbation size.
    :param window_frac: Transient fraction discarded by the fit.

    :returns: :class:`LiftAnalysis`.
    """
    if not isinstance(field, FirstOrderField):
        raise ValueError("Lift analysis needs a first-order field")
    M, X = base.manifold, base.points
    p0 = base.point(0)
    tracks = [propagate_variation_fd(field, base,
                                     TangentVector(p0, e, check=False), eps,
                                     verbose=verbose)
              for e in M.orthonormal_basis(X[0])]
    growth = np.empty(len(X))
    log_volume = np.empty(len(X))
    for k in range(len(X)):
        basis = M.orthonormal_basis(X[k])
        C = np.array([M.tangent_coordinates(X[k], tr.qprime[k], basis)
                      for tr in tracks]).T
        growth[k] = np.linalg.svd(C, compute_uv=False).max()
        log_volume[k] = np.log(abs(np.linalg.det(C)))
    return LiftAnalysis(base.times, growth, log_volume,
                        fit_decay(base.times, growth, window_frac, verbose))


def sasaki_distance(a, b):
    """Transport-based bound on the Sasaki distance between two elements of
    the tangent bundle: sqrt(d(p, q)^2 + |P_p^q v - w|^2).

    :param a: Tangent vector v at p.
    :type a: :class:`riemcontrol.manifolds.TangentVector`.
    :param b: Tangent vector w at q.
    :type b: :class:`riemcontrol.manifolds.TangentVector`.

    :returns: float.
    :raises AtCutLocus: if q is at the cut locus of p.
    """
    M = a.manifold
    p, q = a.base.coords, b.base.coords
    return _sasaki(M, p, a.coords, q, b.coords)


def _sasaki(M, p, v, q, w):
    moved = M.transp(p, q, v)
    return float(np.sqrt(M.dist(p, q) ** 2 + M.norm(q, moved - w) ** 2))
