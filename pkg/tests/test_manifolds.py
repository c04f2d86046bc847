import unittest
import numpy as np
from riemcontrol import AtCutLocus, BasepointMismatch, ConstraintViolation, \
    Euclidean, InjectivityRadiusExceeded, ManifoldPoint, SO3, SPD, Sphere, \
    SurfacePatch, TangentVector, curvature, dist, exp_map, fd_curvature, \
    fd_hessian_half_sq_dist, grad_half_sq_dist, hess_half_sq_dist, inner, \
    laplacian_half_sq_dist, log_map, make_manifold, parallel_transport, \
    sectional_curvature
from riemcontrol.matrix_utils import rotation_matrix


class SphereGeometry(unittest.TestCase):

    def setUp(self):
        self.S = Sphere(2)
        self.p = ManifoldPoint(self.S, [1.0, 0.0, 0.0])
        self.q = ManifoldPoint(self.S, [np.cos(1.0), np.sin(1.0), 0.0])

    def test_exp_log(self):
        v = log_map(self.p, self.q)
        self.assertTrue(abs(v.norm - 1.0) < 1e-12)
        self.assertTrue(self.q.same_as(exp_map(self.p, v), 1e-12))
        self.assertTrue(abs(dist(self.p, self.q) - 1.0) < 1e-12)

    def test_antipodal_log(self):
        antipode = ManifoldPoint(self.S, [-1.0, 0.0, 0.0])
        self.assertRaises(AtCutLocus, log_map, self.p, antipode)

    def test_exp_beyond_injectivity_radius(self):
        v = TangentVector(self.p, [0.0, 3.5, 0.0])
        self.assertRaises(InjectivityRadiusExceeded, exp_map, self.p, v)

    def test_zero_point(self):
        self.assertRaises(ConstraintViolation, ManifoldPoint, self.S,
                          [0.0, 0.0, 0.0])

    def test_non_tangent_vector(self):
        self.assertRaises(ConstraintViolation, TangentVector, self.p,
                          [1.0, 0.0, 0.0])

    def test_basepoint_mismatch(self):
        v = TangentVector(self.p, [0.0, 1.0, 0.0])
        w = TangentVector(self.q, [0.0, 0.0, 1.0])
        self.assertRaises(BasepointMismatch, inner, v, w)
        self.assertRaises(BasepointMismatch, lambda: v + w)

    def test_transport_of_geodesic_velocity(self):
        v = log_map(self.p, self.q)
        moved = parallel_transport(v, self.q)
        back = log_map(self.q, self.p)
        self.assertTrue(np.abs(moved.coords + back.coords).max() < 1e-12)

    def test_transport_is_isometric(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = TangentVector(self.p, self.S.random_tangent(self.p.coords,
                                                            rng, False))
            b = TangentVector(self.p, self.S.random_tangent(self.p.coords,
                                                            rng, False))
            ta, tb = parallel_transport(a, self.q), parallel_transport(b,
                                                                       self.q)
            self.assertTrue(abs(inner(ta, tb) - inner(a, b)) < 1e-12)

    def test_sectional_curvature(self):
        S = Sphere(2, radius=2.0)
        p = ManifoldPoint(S, [2.0, 0.0, 0.0])
        x = TangentVector(p, [0.0, 1.0, 0.0])
        y = TangentVector(p, [0.0, 0.3, 0.7])
        self.assertTrue(abs(sectional_curvature(x, y) - 0.25) < 1e-12)
        self.assertRaises(ValueError, sectional_curvature, x, x)

    def test_curvature_sign(self):
        x = TangentVector(self.p, [0.0, 1.0, 0.0])
        y = TangentVector(self.p, [0.0, 0.0, 1.0])
        Ryy = curvature(self.p, x, y, y)
        self.assertTrue(inner(Ryy, x) > 0.99)

    def test_hessian_of_half_squared_distance(self):
        P = ManifoldPoint(self.S, [0.0, 0.0, 1.0])
        q = ManifoldPoint(self.S, [np.sin(1.0), 0.0, np.cos(1.0)])
        radial = TangentVector(q, [np.cos(1.0), 0.0, -np.sin(1.0)])
        normal = TangentVector(q, [0.0, 1.0, 0.0])
        report = hess_half_sq_dist(q, P, radial, radial)
        self.assertTrue(abs(report.value - 1.0) < 1e-10)
        self.assertTrue(report.is_consistent())
        report = hess_half_sq_dist(q, P, normal, normal)
        self.assertTrue(abs(report.value - 1.0 / np.tan(1.0)) < 1e-10)
        self.assertTrue(report.is_consistent())
        self.assertTrue(abs(hess_half_sq_dist(q, P, radial,
                                              normal).value) < 1e-10)

    def test_laplacian(self):
        P = ManifoldPoint(self.S, [0.0, 0.0, 1.0])
        q = ManifoldPoint(self.S, [np.sin(1.0), 0.0, np.cos(1.0)])
        self.assertTrue(abs(laplacian_half_sq_dist(P, P) - 2.0) < 1e-12)
        self.assertTrue(abs(laplacian_half_sq_dist(q, P) -
                            (1.0 + 1.0 / np.tan(1.0))) < 1e-10)


class RotationGeometry(unittest.TestCase):

    def setUp(self):
        self.M = SO3()
        self.I = ManifoldPoint(self.M, np.eye(3))

    def test_distance(self):
        R = ManifoldPoint(self.M, rotation_matrix([0.0, 0.0, 1.0], 0.7))
        self.assertTrue(abs(dist(self.I, R) - np.sqrt(2.0) * 0.7) < 1e-12)
        self.assertTrue(R.same_as(exp_map(self.I, log_map(self.I, R)),
                                  1e-12))

    def test_cut_locus(self):
        R = ManifoldPoint(self.M, rotation_matrix([1.0, 0.0, 0.0], np.pi))
        self.assertRaises(AtCutLocus, log_map, self.I, R)

    def test_sectional_curvature(self):
        x, y, _ = [TangentVector(self.I, b)
                   for b in self.M.orthonormal_basis(self.I.coords)]
        self.assertTrue(abs(sectional_curvature(x, y) - 0.125) < 1e-12)

    def test_transport_is_isometric(self):
        rng = np.random.default_rng(5)
        p = ManifoldPoint(self.M, self.M.random_point(rng))
        q = ManifoldPoint(self.M, self.M.random_point(rng))
        a = TangentVector(p, self.M.random_tangent(p.coords, rng))
        b = TangentVector(p, self.M.random_tangent(p.coords, rng))
        if self.M.dist(p.coords, q.coords) < np.sqrt(2.0) * (np.pi - 0.1):
            ta, tb = parallel_transport(a, q), parallel_transport(b, q)
            self.assertTrue(abs(inner(ta, tb) - inner(a, b)) < 1e-10)


class SpdGeometry(unittest.TestCase):

    def setUp(self):
        self.M = SPD(3)
        self.rng = np.random.default_rng(7)

    def test_affine_invariance(self):
        P = self.M.random_point(self.rng)
        Q = self.M.random_point(self.rng)
        G = self.rng.standard_normal((3, 3)) + 3 * np.eye(3)
        d = self.M.dist(P, Q)
        dG = self.M.dist(G.dot(P).dot(G.T), G.dot(Q).dot(G.T))
        self.assertTrue(abs(d - dG) < 1e-9 * max(1.0, d))

    def test_exp_log(self):
        P = ManifoldPoint(self.M, self.M.random_point(self.rng))
        Q = ManifoldPoint(self.M, self.M.random_point(self.rng))
        v = log_map(P, Q)
        self.assertTrue(abs(v.norm - dist(P, Q)) < 1e-9)
        self.assertTrue(np.abs(exp_map(P, v).coords - Q.coords).max() < 1e-9)

    def test_sectional_curvature_bounds(self):
        for _ in range(10):
            p = ManifoldPoint(self.M, self.M.random_point(self.rng))
            x = TangentVector(p, self.M.random_tangent(p.coords, self.rng))
            y = TangentVector(p, self.M.random_tangent(p.coords, self.rng))
            K = sectional_curvature(x, y)
            self.assertTrue(-0.5 - 1e-10 <= K <= 1e-10)

    def test_not_positive_definite(self):
        self.assertRaises(ConstraintViolation, ManifoldPoint, SPD(2),
                          [[1.0, 0.0], [0.0, -1.0]])

    def test_transport_is_isometric(self):
        p = ManifoldPoint(self.M, self.M.random_point(self.rng))
        q = ManifoldPoint(self.M, self.M.random_point(self.rng))
        a = TangentVector(p, self.M.random_tangent(p.coords, self.rng))
        b = TangentVector(p, self.M.random_tangent(p.coords, self.rng))
        ta, tb = parallel_transport(a, q), parallel_transport(b, q)
        self.assertTrue(abs(inner(ta, tb) - inner(a, b)) < 1e-9)


def sample_manifolds():
    return [Euclidean(3), Sphere(2, radius=2.0), SO3(), SPD(3)]


def step_length(M, rng):
    return rng.uniform(0.1, 0.8) * min(M.injectivity_radius, 3.0)


class RandomSamples(unittest.TestCase):

    def test_exp_log_round_trip(self):
        rng = np.random.default_rng(11)
        for M in sample_manifolds():
            for _ in range(100):
                x = M.random_point(rng)
                u = step_length(M, rng) * M.random_tangent(x, rng)
                y = M.exp(x, u)
                M.check_point(y, 1e-8)
                err = M.norm(x, M.log(x, y) - u)
                self.assertTrue(err < 1e-8 * (1 + M.norm(x, u)), repr(M))
                self.assertTrue(abs(M.dist(x, y) - M.norm(x, u)) < 1e-8,
                                repr(M))

    def test_transport_is_isometric(self):
        rng = np.random.default_rng(12)
        for M in sample_manifolds():
            for _ in range(100):
                x = M.random_point(rng)
                y = M.exp(x, step_length(M, rng) * M.random_tangent(x, rng))
                a = M.random_tangent(x, rng, False)
                b = M.random_tangent(x, rng, False)
                ta, tb = M.transp(x, y, a), M.transp(x, y, b)
                M.check_tangent(y, ta, 1e-8)
                self.assertTrue(abs(M.inner(y, ta, tb) - M.inner(x, a, b)) <
                                1e-8 * (1 + M.norm(x, a) * M.norm(x, b)),
                                repr(M))


class CurvatureSignLock(unittest.TestCase):

    def test_random_patches(self):
        rng = np.random.default_rng(13)
        grid = 0.01 * np.arange(-5, 6)
        for M in (Sphere(2, radius=1.5), SO3(), SPD(2)):
            for _ in range(50):
                x0 = M.random_point(rng)
                a, b, c = [M.random_tangent(x0, rng) for _ in range(3)]
                C = M.random_tangent(x0, rng)
                patch = SurfacePatch(
                    M, lambda s, t: M.exp(x0, s * a + t * b + 0.3 * s * t * c),
                    grid, grid)
                diff = fd_curvature(patch, lambda s, t, p: C)
                qs, qt = patch.partials()
                X = patch.sample_field(lambda s, t, p: C)
                closed = patch.interior(np.array(
                    [[M.curvature(p, u, v, w) for p, u, v, w in zip(*row)]
                     for row in zip(patch.points, qs, qt, X)]))
                scale = max(1.0, np.abs(closed).max())
                self.assertTrue(np.abs(diff - closed).max() < 1e-5 * scale,
                                repr(M))


class HessianAgainstDifferences(unittest.TestCase):

    def pairs(self, M, rng, n=10):
        for _ in range(n):
            P = M.random_point(rng)
            q = M.exp(P, 1.5 * M.random_tangent(P, rng))
            yield ManifoldPoint(M, q), ManifoldPoint(M, P)

    def test_rotations(self):
        M = SO3()
        rng = np.random.default_rng(14)
        for q, P in self.pairs(M, rng):
            v = TangentVector(q, M.random_tangent(q.coords, rng))
            report = hess_half_sq_dist(q, P, v, v)
            fd = fd_hessian_half_sq_dist(M, q.coords, P.coords, v.coords)
            self.assertTrue(abs(report.value - fd) < 1e-5)
            self.assertTrue(report.is_consistent())
            self.assertTrue(report.value <= 1.0 + 1e-9)
            trace = sum(fd_hessian_half_sq_dist(M, q.coords, P.coords, e)
                        for e in M.orthonormal_basis(q.coords))
            self.assertTrue(abs(laplacian_half_sq_dist(q, P) - trace) < 1e-4)

    def test_spd_lower_bound(self):
        M = SPD(2)
        rng = np.random.default_rng(15)
        for q, P in self.pairs(M, rng):
            v = TangentVector(q, M.random_tangent(q.coords, rng))
            report = hess_half_sq_dist(q, P, v, v)
            fd = fd_hessian_half_sq_dist(M, q.coords, P.coords, v.coords)
            self.assertTrue(abs(report.value - fd) < 1e-5)
            self.assertTrue(abs(report.lower_bound - 1.0) < 1e-9)
            self.assertTrue(fd >= report.lower_bound - 1e-5)
            self.assertTrue(report.is_consistent())
            d = M.dist(q.coords, P.coords)
            x = np.sqrt(0.5) * d
            self.assertTrue(abs(report.upper_bound - x / np.tanh(x)) < 1e-9)
            trace = sum(fd_hessian_half_sq_dist(M, q.coords, P.coords, e)
                        for e in M.orthonormal_basis(q.coords))
            self.assertTrue(abs(laplacian_half_sq_dist(q, P) - trace) < 1e-4)
            self.assertTrue(laplacian_half_sq_dist(q, P) >= 3.0 - 1e-9)


class CurvatureIdentities(unittest.TestCase):

    def check_identities(self, M, seed):
        rng = np.random.default_rng(seed)
        for _ in range(5):
            x = M.random_point(rng)
            u, v, w, z = [M.random_tangent(x, rng, False) for _ in range(4)]
            R = lambda a, b, c: M.curvature(x, a, b, c)
            self.assertTrue(np.abs(R(u, v, w) + R(v, u, w)).max() < 1e-10)
            bianchi = R(u, v, w) + R(v, w, u) + R(w, u, v)
            self.assertTrue(np.abs(bianchi).max() < 1e-10)
            self.assertTrue(abs(M.inner(x, R(u, v, w), z) +
                                M.inner(x, R(u, v, z), w)) < 1e-10)

    def test_so3(self):
        self.check_identities(SO3(), 5)

    def test_spd(self):
        self.check_identities(SPD(3), 6)

    def test_sphere(self):
        self.check_identities(Sphere(3, radius=1.5), 7)

    def test_gradient_matches_directional_derivative(self):
        S = Sphere(2)
        q = ManifoldPoint(S, S.project_point([0.4, -0.2, 0.9]))
        P = ManifoldPoint(S, [0.0, 1.0, 0.0])
        v = S.project_tangent(q.coords, [0.3, 0.5, -0.1])
        F = lambda x: 0.5 * S.dist(x, P.coords) ** 2
        eps = 1e-5
        slope = (F(S.exp(q.coords, eps * v)) -
                 F(S.exp(q.coords, -eps * v))) / (2 * eps)
        grad = grad_half_sq_dist(q, P)
        self.assertTrue(abs(slope - inner(grad, TangentVector(q, v))) < 1e-8)


class Construction(unittest.TestCase):

    def test_make_manifold(self):
        self.assertEqual(make_manifold("sphere", 2), Sphere(2))
        self.assertEqual(make_manifold("SO3"), SO3())
        self.assertNotEqual(make_manifold("sphere", 2, 2.0), Sphere(2))
        self.assertRaises(ValueError, make_manifold, "torus", 2)

    def test_frozen_coordinates(self):
        p = ManifoldPoint(Sphere(2), [0.0, 1.0, 0.0])

        def write():
            p.coords[0] = 1.0
        self.assertRaises(ValueError, write)


if __name__ == '__main__':
    unittest.main()
