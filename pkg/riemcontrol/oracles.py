# -*- coding: utf-8 -*-
"""
Finite-difference ground truth for the closed-form geometry: covariant
derivatives along sampled curves, metric compatibility, torsion, curvature of
sampled surfaces, separation order of curves and the Killing property.

Every derivative is a central difference in ambient coordinates followed by
the covariant correction of the manifold (tangential projection on embedded
manifolds, the affine-invariant connection term on SPD).

Created on Sun Oct 18 08:21:17 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import numpy as np
from .exceptions import DegenerateInput, GridTooCoarse


class OracleConfig(object):
    """Parameters of the finite-difference oracles.

    :param fd_step: Step of central differences of callables.
    :type fd_step: float.
    :param richardson: Combine steps h and 2h (or h and h/2) to cancel the
                       leading truncation error.
    :type richardson: bool.
    :param tol: Default acceptance tolerance of the checks.
    :type tol: float.
    """

    def __init__(self, fd_step=1e-5, richardson=True, tol=1e-5):
        if not 0 < fd_step < 1e-2:
            raise ValueError("fd_step must lie in (0, 1e-2)")
        if not tol > 0:
            raise ValueError("tol must be positive")
        self.fd_step = fd_step
        self.richardson = richardson
        self.tol = tol


_DEFAULT = OracleConfig()


def _derivative_along(samples, step, axis=0, richardson=True):
    """Central-difference derivative of sampled arrays along one axis, second
    order at the ends, fourth order in the interior when Richardson
    extrapolation is on."""
    samples = np.asarray(samples, dtype=float)
    D = np.gradient(samples, step, axis=axis, edge_order=2)
    N = samples.shape[axis]
    if richardson and N >= 5:
        s = np.moveaxis(samples, axis, 0)
        Dm = np.moveaxis(D, axis, 0)
        d1 = (s[3:-1] - s[1:-3]) / (2 * step)
        d2 = (s[4:] - s[:-4]) / (4 * step)
        Dm[2:-2] = (4 * d1 - d2) / 3
    return D


def _check_spacing(manifold, points, axis=0):
    guard = 0.1 * manifold.injectivity_radius
    if not np.isfinite(guard):
        return
    pts = np.moveaxis(np.asarray(points), axis, 0)
    for a, b in zip(pts[:-1].reshape((-1,) + manifold.ambient_shape),
                    pts[1:].reshape((-1,) + manifold.ambient_shape)):
        if manifold.dist(a, b) > guard:
            raise GridTooCoarse("Consecutive samples are farther apart than "
                                "%.3g" % guard)


def _covariant(manifold, points, velocities, field, dfield):
    shape = manifold.ambient_shape
    P = points.reshape((-1,) + shape)
    U = velocities.reshape((-1,) + shape)
    V = field.reshape((-1,) + shape)
    dV = dfield.reshape((-1,) + shape)
    out = np.array([manifold.covariant_derivative(p, u, v, dv)
                    for p, u, v, dv in zip(P, U, V, dV)])
    return out.reshape(field.shape)


def fd_covariant_derivative(manifold, points, field, h, cfg=None):
    """Covariant derivative D v / dt of a sampled tangent field along a
    sampled curve.

    :param manifold: The manifold.
    :type manifold: :class:`riemcontrol.manifolds.Manifold`.
    :param points: Curve samples on a uniform time grid, shape
                   (N,) + ambient shape.
    :type points: :class:`numpy.ndarray`.
    :param field: Tangent field samples, same shape as `points`.
    :type field: :class:`numpy.ndarray`.
    :param h: Time step of the grid.
    :type h: float.
    :param cfg: Oracle parameters.
    :type cfg: :class:`OracleConfig`.

    :returns: :class:`numpy.ndarray` of the covariant derivative samples.
    """
    cfg = cfg or _DEFAULT
    points = np.asarray(points, dtype=float)
    field = np.asarray(field, dtype=float)
    _check_spacing(manifold, points)
    velocities = _derivative_along(points, h, 0, cfg.richardson)
    dfield = _derivative_along(field, h, 0, cfg.richardson)
    return _covariant(manifold, points, velocities, field, dfield)


def check_metric_compatibility(manifold, points, V, W, h, cfg=None):
    """Maximum over the grid interior of
    |d/dt <V, W> - <DV/dt, W> - <V, DW/dt>|."""
    cfg = cfg or _DEFAULT
    points = np.asarray(points, dtype=float)
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    DV = fd_covariant_derivative(manifold, points, V, h, cfg)
    DW = fd_covariant_derivative(manifold, points, W, h, cfg)
    g = np.array([manifold.inner(p, v, w) for p, v, w in zip(points, V, W)])
    dg = _derivative_along(g, h, 0, cfg.richardson)
    res = [dg[i] - manifold.inner(points[i], DV[i], W[i]) -
           manifold.inner(points[i], V[i], DW[i])
           for i in range(2, len(points) - 2)]
    return float(np.max(np.abs(res)))


def directional_derivative(manifold, func, x, u, cfg=None):
    """Ambient derivative of func (evaluated at projected points) at x in the
    direction u."""
    cfg = cfg or _DEFAULT

    def central(eps):
        a = func(manifold.project_point(x + eps * u))
        b = func(manifold.project_point(x - eps * u))
        return (np.asarray(a) - np.asarray(b)) / (2 * eps)

    D = central(cfg.fd_step)
    if cfg.richardson:
        D = (4 * central(cfg.fd_step / 2) - D) / 3
    return D


def check_torsion_free(manifold, x, X, Y, cfg=None):
    """Norm of ∇_X Y - ∇_Y X - [X, Y] at x for two fields given as maps of
    ambient coordinates."""
    u, v = X(x), Y(x)
    dY = directional_derivative(manifold, Y, x, u, cfg)
    dX = directional_derivative(manifold, X, x, v, cfg)
    bracket = dY - dX
    residual = manifold.covariant_derivative(x, u, v, dY) - \
        manifold.covariant_derivative(x, v, u, dX) - bracket
    return float(np.linalg.norm(residual))


class SurfacePatch(object):
    """A map (s, t) -> point sampled on a uniform rectangular grid.

    :param manifold: The manifold.
    :type manifold: :class:`riemcontrol.manifolds.Manifold`.
    :param func: Map from (s, t) to ambient coordinates; the result is
                 projected onto the manifold.
    :type func: function.
    :param s_grid: Uniform grid of the s parameter.
    :type s_grid: array.
    :param t_grid: Uniform grid of the t parameter.
    :type t_grid: array.
    """

    def __init__(self, manifold, func, s_grid, t_grid):
        s_grid = np.asarray(s_grid, dtype=float)
        t_grid = np.asarray(t_grid, dtype=float)
        for grid in (s_grid, t_grid):
            if len(grid) < 5:
                raise ValueError("A patch needs at least 5 samples per "
                                 "direction")
            steps = np.diff(grid)
            if np.abs(steps - steps[0]).max() > 1e-9 * abs(steps[0]):
                raise ValueError("Patch grid must be uniform")
        self.manifold = manifold
        self.s = s_grid
        self.t = t_grid
        self.hs = s_grid[1] - s_grid[0]
        self.ht = t_grid[1] - t_grid[0]
        self.points = np.array([[manifold.project_point(func(s, t))
                                 for t in t_grid] for s in s_grid])
        for p in self.points.reshape((-1,) + manifold.ambient_shape):
            manifold.check_point(p, 1e-8)
        _check_spacing(manifold, self.points, 0)
        _check_spacing(manifold, self.points, 1)

    def partials(self, cfg=None):
        """Sampled ∂q/∂s and ∂q/∂t."""
        cfg = cfg or _DEFAULT
        return (_derivative_along(self.points, self.hs, 0, cfg.richardson),
                _derivative_along(self.points, self.ht, 1, cfg.richardson))

    def sample_field(self, field):
        """Sample a tangent field given as a callable (s, t, point) or pass an
        already sampled array through."""
        if callable(field):
            M = self.manifold
            return np.array([[M.project_tangent(self.points[i, j],
                                                field(s, t, self.points[i, j]))
                              for j, t in enumerate(self.t)]
                             for i, s in enumerate(self.s)])
        return np.asarray(field, dtype=float)

    def covariant(self, field, axis, cfg=None):
        """Covariant derivative of a sampled field along s (axis 0) or t
        (axis 1)."""
        cfg = cfg or _DEFAULT
        step = self.hs if axis == 0 else self.ht
        velocity = self.partials(cfg)[axis]
        dfield = _derivative_along(field, step, axis, cfg.richardson)
        return _covariant(self.manifold, self.points, velocity, field, dfield)

    def interior(self, values):
        return values[2:-2, 2:-2]


def fd_curvature(patch, field, cfg=None):
    """Mixed second covariant differences D_s D_t X - D_t D_s X of a field on
    a surface patch. With the curvature convention of
    :func:`riemcontrol.manifolds.curvature` this equals R(∂_s q, ∂_t q) X.

    :param patch: The sampled surface.
    :type patch: :class:`SurfacePatch`.
    :param field: Tangent field on the patch, callable (s, t, point) or
                  sampled array.

    :returns: :class:`numpy.ndarray` with samples on the grid interior.
    """
    X = patch.sample_field(field)
    DsDtX = patch.covariant(patch.covariant(X, 1, cfg), 0, cfg)
    DtDsX = patch.covariant(patch.covariant(X, 0, cfg), 1, cfg)
    return patch.interior(DsDtX - DtDsX)


def check_swap_cov(patch, cfg=None):
    """Maximum over the grid interior of |D_s ∂_t q - D_t ∂_s q|."""
    qs, qt = patch.partials(cfg)
    res = patch.covariant(qt, 0, cfg) - patch.covariant(qs, 1, cfg)
    res = patch.interior(res).reshape((-1,) + patch.manifold.ambient_shape)
    return float(max(np.linalg.norm(r) for r in res))


def check_separation_order(manifold, gamma1, gamma2, cfg=None,
                           s_range=(1e-4, 1e-2), n_samples=20):
    """Fitted order of d(gamma1(s), gamma2(s)) as s -> 0 for two curves with
    the same initial point and velocity.

    :param gamma1: Curve s -> ambient coordinates.
    :type gamma1: function.
    :param gamma2: Curve s -> ambient coordinates.
    :type gamma2: function.

    :returns: float, slope of log d against log s.
    :raises DegenerateInput: if the curves coincide or their 1-jets differ.
    """
    cfg = cfg or _DEFAULT
    x0 = manifold.project_point(gamma1(0.0))
    if manifold.dist(x0, manifold.project_point(gamma2(0.0))) > 1e-9:
        raise DegenerateInput("Curves do not start at the same point")
    delta = cfg.fd_step
    v1 = manifold.log(x0, manifold.project_point(gamma1(delta))) / delta
    v2 = manifold.log(x0, manifold.project_point(gamma2(delta))) / delta
    if np.linalg.norm(v1 - v2) > 1e-3 * (1 + np.linalg.norm(v1)):
        raise DegenerateInput("Curves have different initial velocities")
    s = np.logspace(np.log10(s_range[0]), np.log10(s_range[1]), n_samples)
    d = np.array([manifold.dist(manifold.project_point(gamma1(si)),
                                manifold.project_point(gamma2(si)))
                  for si in s])
    keep = d > 1e-15
    if keep.sum() < 3:
        raise DegenerateInput("Curves coincide")
    return float(np.polyfit(np.log(s[keep]), np.log(d[keep]), 1)[0])


def check_killing(manifold, field, points=None, n_samples=20, rng=None,
                  cfg=None, directions=3):
    """Maximum of |<∇_Y f, Y>| over sampled points and unit vectors Y.

    :param field: Vector field as a map of ambient coordinates.
    :type field: function.
    :param points: Sample points; drawn at random when omitted.
    :type points: list of arrays.
    :param n_samples: Number of random points.
    :type n_samples: int.
    :param rng: Random generator.
    :type rng: :class:`numpy.random.Generator`.
    :param directions: Random unit directions per point.
    :type directions: int.

    :returns: float.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if points is None:
        points = [manifold.random_point(rng) for _ in range(n_samples)]
    worst = 0.0
    for p in points:
        fp = field(p)
        for _ in range(directions):
            Y = manifold.random_tangent(p, rng)
            dF = directional_derivative(manifold, field, p, Y, cfg)
            cov = manifold.covariant_derivative(p, Y, fp, dF)
            worst = max(worst, abs(manifold.inner(p, cov, Y)))
    return worst


def fd_hessian_half_sq_dist(manifold, q, P, v, step=1e-4):
    """Second difference of F = d(., P)^2 / 2 along the geodesic through q
    with velocity v; approximates Hess F(v, v)."""
    def F(x):
        return 0.5 * manifold.dist(x, P) ** 2
    a = F(manifold.exp(q, step * v))
    b = F(manifold.exp(q, -step * v))
    return (a - 2 * F(q) + b) / step ** 2


def richardson_slope(residual, steps):
    """Convergence order of residual(step) measured over decreasing steps."""
    steps = np.asarray(steps, dtype=float)
    values = np.array([residual(h) for h in steps])
    return float(np.polyfit(np.log(steps), np.log(values), 1)[0])
