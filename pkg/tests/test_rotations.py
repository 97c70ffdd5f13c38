"""Rotation / pose primitive tests.

The exponential map is checked against a scaling-and-squaring oracle that
shares no code with the Rodrigues implementation.
"""

import math

import numpy as np
import pytest

from unirigid.errors import AngleNearPiError, GimbalLockError
from unirigid.geom3 import (
    EulerAngles,
    Pose,
    Rotation,
    adjoint,
    euler_to_rotation,
    exp_so3,
    geodesic_distance,
    hat,
    log_so3,
    pose_compose,
    pose_inverse,
    quaternion_to_rotation,
    rotation_to_euler,
    rotation_to_quaternion,
)

RNG = np.random.default_rng(20260809)


def matrix_exp_oracle(w):
    """exp(hat(w)) by 50 squarings of the first-order seed I + hat(w)/2^50."""
    m = np.eye(3) + hat(w) / 2.0**50
    for _ in range(50):
        m = m @ m
    return m


def random_rotation(rng, max_angle=3.0):
    w = rng.normal(size=3)
    w *= rng.uniform(0.0, max_angle) / np.linalg.norm(w)
    return exp_so3(w)


def random_pose(rng, max_angle=3.0):
    return Pose(random_rotation(rng, max_angle), rng.normal(size=3))


class TestHat:
    def test_zero(self):
        assert np.array_equal(hat([0.0, 0.0, 0.0]), np.zeros((3, 3)))

    def test_unit_x(self):
        expected = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
        assert np.array_equal(hat([1.0, 0.0, 0.0]), expected)

    def test_matches_cross_product(self):
        for _ in range(200):
            w = RNG.normal(size=3)
            u = RNG.normal(size=3)
            assert np.allclose(hat(w) @ u, np.cross(w, u), atol=1e-15)

    def test_skew(self):
        w = RNG.normal(size=3)
        s = hat(w)
        assert np.array_equal(s.T, -s)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            hat([np.nan, 0.0, 0.0])


class TestExpSo3:
    def test_zero_is_identity(self):
        assert np.allclose(exp_so3(np.zeros(3)).m, np.eye(3), atol=0)

    def test_quarter_turn_about_x(self):
        r = exp_so3([math.pi / 2, 0.0, 0.0])
        assert np.allclose(r.apply([0.0, 1.0, 0.0]), [0.0, 0.0, 1.0], atol=1e-12)

    def test_against_scaling_and_squaring(self):
        for _ in range(200):
            w = RNG.normal(size=3) * RNG.uniform(0.0, 2.0)
            assert np.allclose(exp_so3(w).m, matrix_exp_oracle(w), atol=1e-10)

    def test_small_angle_branch_continuity(self):
        # Entrywise agreement between the Taylor and closed-form coefficient
        # branches for angles within 1e-9 of the 1e-6 switch point.
        def rodrigues_closed_form(w):
            theta = np.linalg.norm(w)
            s = hat(w)
            a = math.sin(theta) / theta
            b = (1.0 - math.cos(theta)) / theta**2
            return np.eye(3) + a * s + b * (s @ s)

        def rodrigues_taylor(w):
            theta2 = float(np.dot(w, w))
            s = hat(w)
            a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0
            b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0
            return np.eye(3) + a * s + b * (s @ s)

        axis = np.array([0.6, -0.8, 0.0])
        for angle in (1e-6 - 1e-9, 1e-6, 1e-6 + 1e-9):
            w = axis * angle
            assert np.max(np.abs(rodrigues_closed_form(w) - rodrigues_taylor(w))) <= 1e-12
            # Whichever branch exp_so3 picked, it must agree with both.
            assert np.max(np.abs(exp_so3(w).m - rodrigues_taylor(w))) <= 1e-12


class TestLogSo3:
    def test_identity(self):
        assert np.array_equal(log_so3(Rotation.identity()), np.zeros(3))

    def test_round_trip_fixed(self):
        w = np.array([0.3, -0.2, 0.1])
        assert np.allclose(log_so3(exp_so3(w)), w, atol=1e-10)

    def test_round_trip_random(self):
        for _ in range(1000):
            w = RNG.normal(size=3)
            w *= RNG.uniform(0.0, 3.0) / np.linalg.norm(w)
            assert np.linalg.norm(log_so3(exp_so3(w)) - w) < 1e-9

    def test_tiny_angle_round_trip(self):
        for scale in (1e-10, 1e-8, 1e-7, 1e-5):
            w = np.array([1.0, -2.0, 2.0]) * (scale / 3.0)
            assert np.linalg.norm(log_so3(exp_so3(w)) - w) <= 1e-9 * max(1.0, scale)

    def test_angle_near_pi_rejected(self):
        r = exp_so3([math.pi - 1e-12, 0.0, 0.0])
        with pytest.raises(AngleNearPiError):
            log_so3(r)

    def test_angle_in_range(self):
        for _ in range(100):
            w = log_so3(random_rotation(RNG, max_angle=3.1))
            assert 0.0 <= np.linalg.norm(w) < math.pi


class TestGeodesicDistance:
    def test_coincident(self):
        r = random_rotation(RNG)
        assert geodesic_distance(r, r) == 0.0

    def test_exponential_coordinates(self):
        assert math.isclose(
            geodesic_distance(Rotation.identity(), exp_so3([0.5, 0.0, 0.0])), 0.5, rel_tol=1e-12
        )

    def test_symmetry(self):
        a, b = random_rotation(RNG), random_rotation(RNG)
        assert math.isclose(geodesic_distance(a, b), geodesic_distance(b, a), rel_tol=1e-12)

    def test_triangle_inequality(self):
        for _ in range(1000):
            a = random_rotation(RNG, 1.0)
            b = random_rotation(RNG, 1.0)
            c = random_rotation(RNG, 1.0)
            assert geodesic_distance(a, c) <= (
                geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12
            )


class TestEulerAngles:
    def test_zero_is_identity(self):
        assert np.allclose(euler_to_rotation(EulerAngles(0.0, 0.0, 0.0)).m, np.eye(3))

    def test_degenerate_axis_composition(self):
        # With theta = 0 both z-rotations merge: R(phi, 0, psi) = Rz(phi + psi).
        phi, psi = 0.7, -0.4
        r = euler_to_rotation(EulerAngles(phi, 0.0, psi))
        expected = euler_to_rotation(EulerAngles(phi + psi, 0.0, 0.0))
        assert np.allclose(r.m, expected.m, atol=1e-15)

    def test_round_trip(self):
        for _ in range(1000):
            e = EulerAngles(
                RNG.uniform(-math.pi, math.pi),
                RNG.uniform(0.05, math.pi - 0.05),
                RNG.uniform(-math.pi, math.pi),
            )
            back = rotation_to_euler(euler_to_rotation(e))
            assert abs(back.theta - e.theta) < 1e-10
            assert abs(math.remainder(back.phi - e.phi, 2 * math.pi)) < 1e-10
            assert abs(math.remainder(back.psi - e.psi, 2 * math.pi)) < 1e-10

    def test_gimbal_lock_rejected(self):
        with pytest.raises(GimbalLockError):
            rotation_to_euler(Rotation.identity())


class TestPose:
    def test_identity_neutral(self):
        p = random_pose(RNG)
        q = pose_compose(Pose.identity(), p)
        assert np.allclose(q.rotation.m, p.rotation.m) and np.allclose(q.position, p.position)

    def test_inverse(self):
        p = random_pose(RNG)
        q = pose_compose(p, pose_inverse(p))
        assert np.linalg.norm(q.rotation.m - np.eye(3)) <= 1e-12
        assert np.linalg.norm(q.position) <= 1e-12

    def test_associativity(self):
        for _ in range(1000):
            a, b, c = random_pose(RNG), random_pose(RNG), random_pose(RNG)
            left = pose_compose(pose_compose(a, b), c)
            right = pose_compose(a, pose_compose(b, c))
            assert np.allclose(left.rotation.m, right.rotation.m, atol=1e-12)
            assert np.allclose(left.position, right.position, atol=1e-12)


class TestAdjoint:
    def test_identity(self):
        assert np.array_equal(adjoint(Pose.identity()), np.eye(6))

    def test_pure_translation_lever_arm(self):
        x = np.array([1.0, -2.0, 0.5])
        omega = np.array([0.3, 0.1, -0.7])
        tw = adjoint(Pose(Rotation.identity(), x)) @ np.concatenate([omega, np.zeros(3)])
        assert np.allclose(tw[:3], omega)
        assert np.allclose(tw[3:], np.cross(x, omega), atol=1e-15)

    def test_homomorphism(self):
        for _ in range(1000):
            a, b = random_pose(RNG), random_pose(RNG)
            lhs = adjoint(pose_compose(a, b))
            rhs = adjoint(a) @ adjoint(b)
            assert np.max(np.abs(lhs - rhs)) <= 1e-11


class TestQuaternion:
    def test_round_trip(self):
        for _ in range(500):
            r = random_rotation(RNG)
            q = rotation_to_quaternion(r)
            assert q[0] >= 0.0
            assert math.isclose(np.linalg.norm(q), 1.0, rel_tol=1e-14)
            assert np.allclose(quaternion_to_rotation(q).m, r.m, atol=1e-12)

    def test_identity(self):
        assert np.allclose(rotation_to_quaternion(Rotation.identity()), [1, 0, 0, 0])

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            quaternion_to_rotation([0.0, 0.0, 0.0, 0.0])


class TestRotationInvariants:
    def test_construction_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            Rotation(np.eye(3) + 1e-6)

    def test_construction_rejects_reflection(self):
        with pytest.raises(ValueError):
            Rotation(np.diag([1.0, 1.0, -1.0]))

    def test_matrix_is_read_only(self):
        r = Rotation.identity()
        with pytest.raises(ValueError):
            r.m[0, 0] = 2.0
