import unittest
import numpy as np
from riemcontrol import DegenerateInput, GridTooCoarse, OracleConfig, SO3, \
    SPD, Sphere, SurfacePatch, check_killing, check_metric_compatibility, \
    check_separation_order, check_swap_cov, check_torsion_free, \
    fd_covariant_derivative, fd_curvature, fd_hessian_half_sq_dist, \
    richardson_slope
from riemcontrol.matrix_utils import hat, rotation_matrix, so3_exp


def great_circle(times):
    X = np.array([[np.cos(t), np.sin(t), 0.0] for t in times])
    V = np.array([[-np.sin(t), np.cos(t), 0.0] for t in times])
    return X, V


class CovariantDerivative(unittest.TestCase):

    def setUp(self):
        self.S = Sphere(2)
        self.h = 0.01
        self.times = self.h * np.arange(201)

    def test_geodesic_acceleration_vanishes(self):
        X, V = great_circle(self.times)
        acc = fd_covariant_derivative(self.S, X, V, self.h)
        self.assertTrue(np.abs(acc[2:-2]).max() < 1e-7)

    def test_latitude_circle(self):
        # Circle of latitude at height z0: |∇_q' q'| = rho z0.
        z0 = 0.6
        rho = np.sqrt(1 - z0 ** 2)
        X = np.array([[rho * np.cos(t), rho * np.sin(t), z0]
                      for t in self.times])
        V = np.array([[-rho * np.sin(t), rho * np.cos(t), 0.0]
                      for t in self.times])
        acc = fd_covariant_derivative(self.S, X, V, self.h)
        norms = np.linalg.norm(acc[2:-2], axis=1)
        self.assertTrue(np.abs(norms - rho * z0).max() < 1e-7)

    def test_metric_compatibility(self):
        X, V = great_circle(self.times)
        W = np.array([self.S.project_tangent(x, [0.3, -0.2, 1.0]) for x in X])
        residual = check_metric_compatibility(self.S, X, V, W, self.h)
        self.assertTrue(residual < 1e-7)

    def test_grid_too_coarse(self):
        times = 0.5 * np.arange(10)
        X, V = great_circle(times)
        self.assertRaises(GridTooCoarse, fd_covariant_derivative, self.S, X,
                          V, 0.5)


class Connection(unittest.TestCase):

    def test_torsion_free_sphere(self):
        S = Sphere(2)
        x = S.project_point([0.3, 0.4, 0.8])
        X = lambda y: S.project_tangent(y, np.array([1.0, 0.0, 0.5]))
        Y = lambda y: S.project_tangent(y, np.array([0.0, 2.0, -0.1]) *
                                        (1 + y[2]))
        self.assertTrue(check_torsion_free(S, x, X, Y) < 1e-8)

    def test_torsion_free_spd(self):
        M = SPD(2)
        x = np.array([[2.0, 0.3], [0.3, 1.0]])
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        X = lambda P: A.dot(P) + P.dot(A.T)
        Y = lambda P: P.dot(P)
        self.assertTrue(check_torsion_free(M, x, X, Y) < 1e-7)


class Curvature(unittest.TestCase):

    def setUp(self):
        self.S = Sphere(2)
        x0 = np.array([0.0, 0.0, 1.0])
        grid = 0.01 * np.arange(-5, 6)
        self.patch = SurfacePatch(
            self.S, lambda s, t: self.S.exp(x0, np.array([s, t, 0.0]) +
                                            np.array([0.1, 0.0, 0.0]) * s * t),
            grid, grid)

    def test_swap_cov(self):
        self.assertTrue(check_swap_cov(self.patch) < 1e-7)

    def test_curvature_closed_form(self):
        a = np.array([0.2, -1.0, 0.4])
        diff = fd_curvature(self.patch, lambda s, t, p: a)
        qs, qt = self.patch.partials()
        X = self.patch.sample_field(lambda s, t, p: a)
        closed = np.array([[self.S.curvature(p, u, v, w)
                            for p, u, v, w in zip(*row)]
                           for row in zip(self.patch.points, qs, qt, X)])
        closed = self.patch.interior(closed)
        self.assertTrue(np.abs(diff - closed).max() < 1e-5)

    def test_patch_needs_five_samples(self):
        self.assertRaises(ValueError, SurfacePatch, self.S,
                          lambda s, t: np.array([s, t, 1.0]),
                          [0.0, 0.01, 0.02], [0.0, 0.01, 0.02])


class CurvatureSign(unittest.TestCase):

    def compare(self, patch, field):
        M = patch.manifold
        diff = fd_curvature(patch, field)
        qs, qt = patch.partials()
        X = patch.sample_field(field)
        closed = np.array([[M.curvature(p, u, v, w)
                            for p, u, v, w in zip(*row)]
                           for row in zip(patch.points, qs, qt, X)])
        closed = patch.interior(closed)
        self.assertTrue(np.abs(closed).max() > 1e-3)
        return np.abs(diff - closed).max()

    def test_rotations(self):
        M = SO3()
        x0 = rotation_matrix(np.array([1.0, 2.0, 0.5]), 0.7)
        a, b, c = (np.array([1.0, 0.0, 0.2]), np.array([0.0, 1.0, -0.3]),
                   np.array([0.5, 0.5, 1.0]))
        grid = 0.01 * np.arange(-5, 6)
        patch = SurfacePatch(
            M, lambda s, t: x0.dot(so3_exp(hat(s * a + t * b +
                                               0.1 * s * t * c))),
            grid, grid)
        W = hat([0.2, -1.0, 0.4])
        self.assertTrue(self.compare(patch, lambda s, t, p: p.dot(W)) < 1e-5)

    def test_spd(self):
        M = SPD(2)
        P0 = np.array([[2.0, 0.3], [0.3, 1.0]])
        U = np.array([[1.0, 0.0], [0.0, -0.5]])
        V = np.array([[0.0, 1.0], [1.0, 0.2]])
        grid = 0.01 * np.arange(-5, 6)
        patch = SurfacePatch(M, lambda s, t: P0 + s * U + t * V, grid, grid)
        C = np.array([[0.4, -0.7], [-0.7, 1.0]])
        self.assertTrue(self.compare(patch, lambda s, t, p: C) < 1e-5)


class ObservedOrder(unittest.TestCase):

    def compatibility_residual(self, M, x0, u, A, B, C, cfg):
        def residual(h):
            t = h * np.arange(int(round(0.8 / h)) + 1)
            X = np.array([M.exp(x0, ti * u) for ti in t])
            V = np.array([M.project_tangent(x, A + ti * B)
                          for x, ti in zip(X, t)])
            W = np.array([M.project_tangent(x, C) for x in X])
            return check_metric_compatibility(M, X, V, W, h, cfg)
        return residual

    def test_covariant_derivative_orders(self):
        rng = np.random.default_rng(21)
        steps = [0.08, 0.04, 0.02, 0.01]
        for M in (Sphere(2), SO3(), SPD(2)):
            x0 = M.random_point(rng)
            u = M.random_tangent(x0, rng)
            A, B, C = [rng.standard_normal(M.ambient_shape)
                       for _ in range(3)]
            plain = richardson_slope(
                self.compatibility_residual(M, x0, u, A, B, C,
                                            OracleConfig(richardson=False)),
                steps)
            extrapolated = richardson_slope(
                self.compatibility_residual(M, x0, u, A, B, C,
                                            OracleConfig()), steps)
            self.assertTrue(plain >= 1.9, repr(M))
            self.assertTrue(extrapolated >= 3.5, repr(M))

    def test_hessian_order(self):
        S = Sphere(2)
        P = np.array([0.0, 0.0, 1.0])
        q = np.array([np.sin(1.0), 0.0, np.cos(1.0)])
        normal = np.array([0.0, 1.0, 0.0])
        exact = 1.0 / np.tan(1.0)

        def residual(step):
            return abs(fd_hessian_half_sq_dist(S, q, P, normal, step) -
                       exact)
        self.assertTrue(richardson_slope(residual, [0.1, 0.05, 0.025]) >=
                        1.9)


class Separation(unittest.TestCase):

    def test_geodesic_against_projected_line(self):
        S = Sphere(2)
        x0 = np.array([1.0, 0.0, 0.0])
        v = np.array([0.0, 1.0, 0.0])
        order = check_separation_order(S, lambda s: S.exp(x0, s * v),
                                       lambda s: x0 + s * v,
                                       s_range=(1e-3, 1e-1))
        self.assertTrue(abs(order - 3.0) < 0.1)

    def test_different_velocities(self):
        S = Sphere(2)
        x0 = np.array([1.0, 0.0, 0.0])
        self.assertRaises(DegenerateInput, check_separation_order, S,
                          lambda s: x0 + s * np.array([0.0, 1.0, 0.0]),
                          lambda s: x0 + s * np.array([0.0, 0.0, 1.0]))

    def test_identical_curves(self):
        S = Sphere(2)
        x0 = np.array([1.0, 0.0, 0.0])
        curve = lambda s: x0 + s * np.array([0.0, 1.0, 0.0])
        self.assertRaises(DegenerateInput, check_separation_order, S, curve,
                          curve)


class Killing(unittest.TestCase):

    def test_rotation_is_killing(self):
        S = Sphere(2)
        W = hat([0.3, -1.0, 0.5])
        residual = check_killing(S, lambda x: W.dot(x),
                                 rng=np.random.default_rng(1))
        self.assertTrue(residual < 1e-8)

    def test_congruence_is_killing(self):
        M = SPD(3)
        A = hat([1.0, 0.2, -0.4])
        residual = check_killing(M, lambda P: A.dot(P) + P.dot(A.T),
                                 rng=np.random.default_rng(2))
        self.assertTrue(residual < 1e-8)

    def test_invariant_fields_on_rotations(self):
        M = SO3()
        W = hat([0.7, 0.1, -0.4])
        rng = np.random.default_rng(4)
        self.assertTrue(check_killing(M, lambda R: R.dot(W), rng=rng) < 1e-8)
        self.assertTrue(check_killing(M, lambda R: W.dot(R), rng=rng) < 1e-8)

    def test_gradient_field_is_not_killing(self):
        S = Sphere(2)
        P = np.array([0.0, 0.0, 1.0])
        points = [S.project_point([0.5, 0.1, 0.8]),
                  S.project_point([0.2, -0.6, 0.7])]
        residual = check_killing(S, lambda x: S.log(x, P), points=points,
                                 rng=np.random.default_rng(3))
        self.assertTrue(residual > 0.1)


class Misc(unittest.TestCase):

    def test_fd_hessian(self):
        S = Sphere(2)
        P = np.array([0.0, 0.0, 1.0])
        q = np.array([np.sin(1.0), 0.0, np.cos(1.0)])
        normal = np.array([0.0, 1.0, 0.0])
        value = fd_hessian_half_sq_dist(S, q, P, normal)
        self.assertTrue(abs(value - 1.0 / np.tan(1.0)) < 1e-5)

    def test_richardson_slope(self):
        slope = richardson_slope(lambda h: 3.0 * h ** 2,
                                 [0.1, 0.05, 0.025, 0.0125])
        self.assertTrue(abs(slope - 2.0) < 1e-10)

    def test_config(self):
        self.assertRaises(ValueError, OracleConfig, fd_step=0.1)
        self.assertRaises(ValueError, OracleConfig, tol=0.0)


if __name__ == '__main__':
    unittest.main()
