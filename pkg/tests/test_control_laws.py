import unittest
import numpy as np
from scipy.linalg import expm
from riemcontrol import AtCutLocus, BeyondValidityRange, DegenerateInput, \
    Euclidean, FirstOrderField, GainOutOfRange, Gains, ManifoldPoint, \
    NotKilling, Potential, ReferenceSignal, SO3, SPD, Sphere, TangentVector, \
    certify_killing, congruence_isometry, contraction_certificate, \
    contraction_rate_bound, gradient_flow, gradient_flow_field, \
    gravity_potential, integrate_first_order, killing_filter, \
    killing_filter_discrete_step, killing_filter_field, rotation_isometry, \
    so3_filter, so3_filter_field, so3_tracking_field, speed_observer_field, \
    tracking_force, translation_isometry, volume_rate, zero_potential, \
    zero_vector
from riemcontrol.matrix_utils import hat, rotation_matrix


class GainHandling(unittest.TestCase):

    def test_unknown_gain(self):
        self.assertRaises(ValueError, Gains, kp=1.0)

    def test_require(self):
        gains = Gains(k1=2.0, k2=0.0)
        self.assertEqual(gains.require("k1"), [2.0])
        self.assertRaises(GainOutOfRange, gains.require, "k2")
        self.assertRaises(GainOutOfRange, gains.require, "alpha")


class Tracking(unittest.TestCase):

    def setUp(self):
        self.S = Sphere(2)
        self.gains = Gains(k1=2.0, k2=3.0)

    def test_no_error_no_feedback(self):
        p = ManifoldPoint(self.S, [0.0, 0.6, 0.8])
        v = TangentVector(p, [1.0, 0.0, 0.0])
        u = tracking_force(p, v, p, v, self.gains)
        self.assertTrue(np.abs(u.coords).max() < 1e-14)

    def test_proportional_term(self):
        p = ManifoldPoint(self.S, [1.0, 0.0, 0.0])
        ref = ManifoldPoint(self.S, [np.cos(0.2), np.sin(0.2), 0.0])
        u = tracking_force(p, zero_vector(p), ref, zero_vector(ref),
                           self.gains)
        self.assertTrue(np.abs(u.coords - [0.0, 3.0 * 0.2, 0.0]).max() <
                        1e-12)

    def test_cut_locus(self):
        p = ManifoldPoint(self.S, [1.0, 0.0, 0.0])
        ref = ManifoldPoint(self.S, [-1.0, 0.0, 0.0])
        self.assertRaises(AtCutLocus, tracking_force, p, zero_vector(p), ref,
                          zero_vector(ref), self.gains)

    def test_missing_gain(self):
        p = ManifoldPoint(self.S, [1.0, 0.0, 0.0])
        self.assertRaises(GainOutOfRange, tracking_force, p, zero_vector(p),
                          p, zero_vector(p), Gains(k1=1.0))


class Potentials(unittest.TestCase):

    def test_gravity_hessian_matches_difference(self):
        S = Sphere(2)
        V = gravity_potential(S, 2.0)
        fd = Potential(S, V.value, V.gradient)
        x = S.project_point([0.3, -0.4, 0.7])
        u = S.project_tangent(x, [1.0, 0.5, -0.2])
        self.assertTrue(np.abs(V.hessian(x, u) - fd.hessian(x, u)).max() <
                        1e-7)

    def test_gravity_needs_sphere_or_euclidean(self):
        self.assertRaises(ValueError, gravity_potential, SO3())

    def test_great_circle_is_feasible(self):
        S = Sphere(2)
        ref = ReferenceSignal.great_circle(S, [1.0, 0.0, 0.0],
                                           [0.0, 0.5, 0.0])
        times = np.linspace(0.0, 2.0, 201)
        self.assertTrue(ref.feasibility_residual(zero_potential(S),
                                                 times) < 1e-7)
        self.assertTrue(ref.feasibility_residual(gravity_potential(S),
                                                 times) > 0.1)

    def test_great_circle_needs_velocity(self):
        self.assertRaises(DegenerateInput, ReferenceSignal.great_circle,
                          Sphere(2), [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])

    def test_reference_from_trajectory(self):
        S = Sphere(2)
        W = hat([0.0, 0.0, 1.0])
        field = FirstOrderField(S, lambda t, x: W.dot(x))
        traj = integrate_first_order(field, ManifoldPoint(S, [1.0, 0.0, 0.0]),
                                     (0.0, 1.0), 0.1)
        ref = ReferenceSignal.from_trajectory(traj, field)
        p, v = ref(0.5)
        self.assertTrue(np.abs(p.coords - traj.points[5]).max() == 0.0)
        self.assertTrue(np.abs(v.coords - W.dot(traj.points[5])).max() <
                        1e-14)
        p, _ = ref(0.55)
        self.assertTrue(abs(S.dist(p.coords, traj.points[5]) - 0.05) < 1e-9)


class Observer(unittest.TestCase):

    def test_matching_estimate(self):
        S = Sphere(2)
        V = gravity_potential(S)
        q = ManifoldPoint(S, [0.6, 0.0, 0.8])
        vhat = TangentVector(q, [0.0, 1.0, 0.0])
        a, b = speed_observer_field(q, vhat, q, V, Gains(alpha=1.0, beta=2.0))
        self.assertTrue(np.abs(a.coords - vhat.coords).max() < 1e-14)
        self.assertTrue(np.abs(b.coords + V.gradient(q.coords)).max() < 1e-14)


class Attitude(unittest.TestCase):

    def setUp(self):
        self.M = SO3()
        self.omega = np.array([0.1, -0.3, 0.2])

    def test_tracking_without_error(self):
        R = ManifoldPoint(self.M, rotation_matrix([1.0, 2.0, 0.5], 0.4))
        rate = so3_tracking_field(R, R, self.omega, 2.0)
        self.assertTrue(np.abs(rate.coords -
                               R.coords.dot(hat(self.omega))).max() < 1e-14)

    def test_filter_variants_agree_to_first_order(self):
        R = ManifoldPoint(self.M, np.eye(3))
        small = ManifoldPoint(self.M, rotation_matrix([0.0, 0.0, 1.0], 1e-3))
        g = so3_filter_field(R, small, self.omega, 2.0, "gradient")
        l = so3_filter_field(R, small, self.omega, 2.0, "log")
        self.assertTrue(np.abs(g.coords - l.coords).max() < 1e-8)
        self.assertRaises(ValueError, so3_filter_field, R, small, self.omega,
                          2.0, "other")

    def test_log_variant_contracts_at_rate_k(self):
        # Constant attitude measured exactly: the log variant moves along
        # the geodesic and d(t) = d(0) exp(-k t).
        target = rotation_matrix([0.0, 1.0, 0.0], 1.0)
        measured = ReferenceSignal(self.M, lambda t: (target,
                                                      np.zeros((3, 3))))
        field = so3_filter(measured, lambda t: np.zeros(3), 2.0, "log")
        traj = integrate_first_order(field, ManifoldPoint(self.M, np.eye(3)),
                                     (0.0, 1.0), 0.01)
        d = self.M.dist(traj.points[-1], target)
        self.assertTrue(abs(d - np.sqrt(2.0) * np.exp(-2.0)) < 1e-7)


class KillingFilters(unittest.TestCase):

    def setUp(self):
        self.M = SPD(2)
        A = np.array([[0.0, -1.0], [1.0, 0.0]])
        self.drift = FirstOrderField(self.M,
                                     lambda t, P: A.dot(P) + P.dot(A.T))

    def test_certificate(self):
        self.assertTrue(certify_killing(self.drift).certified)
        radial = gradient_flow(self.M, np.eye(2), 1.0)
        self.assertFalse(certify_killing(radial).certified)

    def test_uncertified_drift(self):
        radial = gradient_flow(self.M, np.eye(2), 1.0)
        measured = ReferenceSignal(self.M, lambda t: (np.eye(2),
                                                      np.zeros((2, 2))))
        self.assertRaises(NotKilling, killing_filter, radial, measured, 1.0)
        self.assertRaises(NotKilling, killing_filter, self.drift, measured,
                          1.0)
        p = ManifoldPoint(self.M, np.eye(2))
        self.assertRaises(NotKilling, killing_filter_field, p, p, radial, 1.0)

    def test_filter_field(self):
        field = certify_killing(self.drift)
        P = ManifoldPoint(self.M, [[2.0, 0.0], [0.0, 1.0]])
        rate = killing_filter_field(P, P, field, 3.0)
        self.assertTrue(np.abs(rate.coords -
                               self.drift.rate(0.0, P.coords)).max() < 1e-14)

    def test_discrete_step_euclidean(self):
        E = Euclidean(2)
        tau = translation_isometry(E, [1.0, -2.0])
        qhat = ManifoldPoint(E, [0.0, 0.0])
        q = ManifoldPoint(E, [3.0, 4.0])
        k, dt = 2.0, 0.1
        new = killing_filter_discrete_step(qhat, q, tau, k, dt)
        error = E.dist(new.coords, tau.apply(q.coords))
        self.assertTrue(abs(error - (1 - k * dt) * 5.0) < 1e-12)

    def test_discrete_step_spd(self):
        G = expm(0.1 * np.array([[0.0, -1.0], [1.0, 0.0]]))
        tau = congruence_isometry(self.M, G)
        qhat = ManifoldPoint(self.M, [[1.0, 0.0], [0.0, 1.5]])
        q = ManifoldPoint(self.M, [[2.0, 0.5], [0.5, 1.0]])
        new = killing_filter_discrete_step(qhat, q, tau, 1.0, 0.1)
        before = self.M.dist(qhat.coords, q.coords)
        after = self.M.dist(new.coords, tau.apply(q.coords))
        self.assertTrue(abs(after - 0.9 * before) < 1e-9)

    def test_discrete_gain_range(self):
        E = Euclidean(1)
        tau = translation_isometry(E, [0.0])
        p = ManifoldPoint(E, [0.0])
        self.assertRaises(GainOutOfRange, killing_filter_discrete_step, p, p,
                          tau, 10.0, 0.1)

    def test_rotation_isometry_preserves_distance(self):
        S = Sphere(2)
        Q = rotation_matrix([1.0, 1.0, 0.0], 0.8)
        tau = rotation_isometry(S, Q)
        x = S.project_point([0.1, 0.2, 0.9])
        y = S.project_point([0.5, -0.3, 0.4])
        self.assertTrue(abs(S.dist(tau.apply(x), tau.apply(y)) -
                            S.dist(x, y)) < 1e-12)


class GradientFlow(unittest.TestCase):

    def setUp(self):
        self.S = Sphere(2)
        self.P = ManifoldPoint(self.S, [0.0, 0.0, 1.0])

    def point_at(self, d):
        return ManifoldPoint(self.S, [np.sin(d), 0.0, np.cos(d)])

    def test_rate_bound(self):
        q = self.point_at(np.pi / 4)
        self.assertTrue(abs(contraction_rate_bound(q, self.P, 1.0, 1.0) -
                            np.pi / 2) < 1e-12)
        self.assertTrue(abs(contraction_rate_bound(self.P, self.P, 0.5, 1.0) -
                            4.0) < 1e-12)
        self.assertRaises(BeyondValidityRange, contraction_rate_bound,
                          self.point_at(1.6), self.P, 1.0, 1.0)

    def test_volume_rate(self):
        self.assertTrue(abs(volume_rate(self.P, self.P, 1.0) + 2.0) < 1e-12)
        self.assertTrue(abs(volume_rate(self.point_at(1.0), self.P, 1.0) +
                            1.0 + 1.0 / np.tan(1.0)) < 1e-10)

    def test_field(self):
        q = self.point_at(0.5)
        v = gradient_flow_field(q, self.P, 2.0)
        self.assertTrue(abs(v.norm - 0.25) < 1e-12)

    def test_certificate(self):
        field = gradient_flow(self.S, self.P, 1.0)
        base = integrate_first_order(field, self.point_at(0.7), (0.0, 2.0),
                                     0.01)
        margin = contraction_certificate(field, base)
        self.assertTrue(margin >= 0.7 / np.tan(0.7) - 1e-4)
        self.assertTrue(margin <= 1.0 + 1e-4)


if __name__ == '__main__':
    unittest.main()
