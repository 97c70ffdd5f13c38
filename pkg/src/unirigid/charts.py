"""Velocity charts: configuration-dependent maps from chart velocities to the body twist.

A chart assigns to every pose q a 6x6 kinematic matrix Phi(q) such that the
body twist is nu = Phi(q) u, where u are the chart velocities.  The dynamics
engine is written once against (Phi, dPhi/dt); picking a chart picks a
formulation:

* ``BODY_TWIST``    u is the body twist itself (Phi = I).  Kirchhoff /
                    Newton-Euler route.
* ``SPATIAL_TWIST`` u is the space-frame twist; Phi = Ad(q)^-1.
* ``EULER_COM``     u = (phi_dot, theta_dot, psi_dot, xdot) where (phi,
                    theta, psi) are Z-X-Z Euler angles and x is the position
                    of the body-frame origin (the center of mass in the
                    standard configuration).  Plain generalized coordinates;
                    the Lagrange route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import GimbalLockError, IllConditionedError
from .geom3 import (
    GIMBAL_EPS,
    EulerAngles,
    Pose,
    _as_vec3,
    _readonly,
    euler_to_rotation,
    exp_so3,
    hat,
    log_so3,
    pose_compose,
    rotation_to_euler,
    se3_ad,
)

# Charts refuse to solve through kinematic matrices worse conditioned than this.
COND_LIMIT = 1e8
# Step for the finite-difference commutators behind hamel_coefficients.
HAMEL_FD_STEP = 1e-5


class Frame(Enum):
    BODY = "body"
    SPATIAL = "spatial"


class ChartId(Enum):
    BODY_TWIST = "body-twist"
    SPATIAL_TWIST = "spatial-twist"
    EULER_COM = "euler-com"


@dataclass(frozen=True)
class Twist:
    """Angular + linear velocity pair with an explicit frame tag."""

    omega: np.ndarray
    vel: np.ndarray
    frame: Frame

    def __post_init__(self):
        object.__setattr__(self, "omega", _readonly(_as_vec3(self.omega, "omega")))
        object.__setattr__(self, "vel", _readonly(_as_vec3(self.vel, "vel")))
        if not isinstance(self.frame, Frame):
            raise ValueError(f"frame must be a Frame, got {self.frame!r}")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.omega, self.vel])


@dataclass(frozen=True)
class ChartEval:
    """Kinematic matrix Phi and its time derivative along the current motion."""

    phi: np.ndarray
    phi_dot: np.ndarray


@dataclass(frozen=True)
class ChartState:
    """Dynamic state advanced in time: a pose plus chart velocities."""

    pose: Pose
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (6,):
            raise ValueError(f"chart velocity must have shape (6,), got {u.shape}")
        for i in range(6):
            if not math.isfinite(u[i]):
                raise ValueError("chart velocity must be finite")
        object.__setattr__(self, "u", _readonly(u))


def _as_u6(u) -> np.ndarray:
    a = np.asarray(u, dtype=float)
    if a.shape != (6,):
        raise ValueError(f"chart velocity must have shape (6,), got {a.shape}")
    return a


def euler_rate_matrix(theta: float, psi: float) -> np.ndarray:
    """Body angular velocity from Z-X-Z rates: omega = E(theta, psi) @ (phi', theta', psi')."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(psi), math.cos(psi)
    return np.array([[st * sp, cp, 0.0], [st * cp, -sp, 0.0], [ct, 0.0, 1.0]])


def _euler_rate_matrix_dot(theta, psi, theta_dot, psi_dot) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(psi), math.cos(psi)
    d_theta = np.array([[ct * sp, 0.0, 0.0], [ct * cp, 0.0, 0.0], [-st, 0.0, 0.0]])
    d_psi = np.array([[st * cp, -sp, 0.0], [-st * sp, -cp, 0.0], [0.0, 0.0, 0.0]])
    return d_theta * theta_dot + d_psi * psi_dot


def _require_euler_valid(pose: Pose) -> "tuple[float, float, float]":
    """Z-X-Z angles of the pose, guarded by the single gimbal threshold."""
    e = rotation_to_euler(pose.rotation)
    if math.sin(e.theta) < GIMBAL_EPS:
        raise GimbalLockError(f"sin(theta) = {math.sin(e.theta):.3e} below {GIMBAL_EPS:g}")
    return e.phi, e.theta, e.psi


def _phi(chart: ChartId, pose: Pose) -> np.ndarray:
    if chart is ChartId.BODY_TWIST:
        return np.eye(6)
    if chart is ChartId.SPATIAL_TWIST:
        # Ad(q)^-1: spatial twist mapped to the body twist.
        rt = pose.rotation.m.T
        out = np.zeros((6, 6))
        out[:3, :3] = rt
        out[3:, 3:] = rt
        out[3:, :3] = -rt @ hat(pose.position)
        return out
    phi_a, theta, psi = _require_euler_valid(pose)
    out = np.zeros((6, 6))
    out[:3, :3] = euler_rate_matrix(theta, psi)
    out[3:, 3:] = pose.rotation.m.T
    return out


def _phi_dot(chart: ChartId, pose: Pose, u: np.ndarray, phi: np.ndarray) -> np.ndarray:
    if chart is ChartId.BODY_TWIST:
        return np.zeros((6, 6))
    if chart is ChartId.SPATIAL_TWIST:
        # d/dt Ad(q)^-1 = -ad_nu Ad(q)^-1 with nu the body twist.
        nu = phi @ u
        return -se3_ad(nu[:3], nu[3:]) @ phi
    _, theta, psi = _require_euler_valid(pose)
    omega = phi[:3, :3] @ u[:3]
    out = np.zeros((6, 6))
    out[:3, :3] = _euler_rate_matrix_dot(theta, psi, u[1], u[2])
    out[3:, 3:] = -hat(omega) @ pose.rotation.m.T
    return out


def chart_eval(chart: ChartId, pose: Pose, u) -> ChartEval:
    """Kinematic matrix and its time derivative at (pose, u)."""
    u = _as_u6(u)
    if chart is ChartId.EULER_COM:
        # One angle extraction serves both matrices.
        _, theta, psi = _require_euler_valid(pose)
        rt = pose.rotation.m.T
        e = euler_rate_matrix(theta, psi)
        phi = np.zeros((6, 6))
        phi[:3, :3] = e
        phi[3:, 3:] = rt
        omega = e @ u[:3]
        phi_dot = np.zeros((6, 6))
        phi_dot[:3, :3] = _euler_rate_matrix_dot(theta, psi, u[1], u[2])
        phi_dot[3:, 3:] = -hat(omega) @ rt
        return ChartEval(phi=phi, phi_dot=phi_dot)
    phi = _phi(chart, pose)
    return ChartEval(phi=phi, phi_dot=_phi_dot(chart, pose, u, phi))


def chart_condition_ok(chart: ChartId, pose: Pose, phi: np.ndarray) -> bool:
    """True when cond(Phi) is certifiably within COND_LIMIT.

    The Euler chart admits an analytic bound: sigma_min of the rate matrix is
    at least sin(theta)/3 while no singular value exceeds sqrt(3), so
    cond(Phi) <= 3 sqrt(3) / sin(theta).  Only near the singularity (or for
    other charts) is the exact condition number computed.
    """
    if chart is ChartId.BODY_TWIST:
        return True
    if chart is ChartId.EULER_COM:
        sin_theta = math.sqrt(max(0.0, 1.0 - pose.rotation.m[2, 2] ** 2))
        if 3.0 * math.sqrt(3.0) <= COND_LIMIT * sin_theta:
            return True
    return bool(np.linalg.cond(phi) <= COND_LIMIT)


def body_twist(chart: ChartId, state: ChartState) -> Twist:
    """nu = Phi(q) u, tagged as a body-frame twist."""
    nu = _phi(chart, state.pose) @ state.u
    return Twist(nu[:3], nu[3:], Frame.BODY)


def chart_from_body_twist(chart: ChartId, pose: Pose, nu: Twist) -> np.ndarray:
    """u = Phi(q)^-1 nu; the common entry point for starting any formulation."""
    if nu.frame is not Frame.BODY:
        raise ValueError("chart_from_body_twist requires a body-frame twist")
    phi = _phi(chart, pose)
    if not chart_condition_ok(chart, pose, phi):
        raise IllConditionedError(
            f"chart matrix condition number exceeds {COND_LIMIT:g}"
        )
    return np.linalg.solve(phi, nu.as_array())


def advance_pose(chart: ChartId, state: ChartState, dt: float) -> Pose:
    """Exact-kinematics pose update used inside the integrators.

    Twist charts move the pose by the exponential of the rotation increment
    (left-invariant update for the body chart, right-invariant for the spatial
    chart); the Euler chart advances its coordinates directly.
    """
    pose, u = state.pose, state.u
    if chart is ChartId.BODY_TWIST:
        r = pose.rotation.compose(exp_so3(u[:3] * dt))
        return Pose(r, pose.position + pose.rotation.m @ u[3:] * dt)
    if chart is ChartId.SPATIAL_TWIST:
        step = Pose(exp_so3(u[:3] * dt), u[3:] * dt)
        return pose_compose(step, pose)
    phi_a, theta, psi = _require_euler_valid(pose)
    angles = EulerAngles(phi_a + u[0] * dt, theta + u[1] * dt, psi + u[2] * dt)
    return Pose(euler_to_rotation(angles), pose.position + u[3:] * dt)


def _local_field_columns(chart: ChartId, base: Pose, z: np.ndarray) -> np.ndarray:
    """Chart basis fields written in the product local chart around ``base``.

    The local chart is z = (w, s) -> base * (exp_so3(w), s).  Column i is the
    z-velocity of the motion generated by unit chart velocity e_i at that
    configuration; its rotational part comes from a central difference of the
    log map, its translational part is exact.
    """
    h = HAMEL_FD_STEP
    rot_z = exp_so3(z[:3])
    g = pose_compose(base, Pose(rot_z, z[3:]))
    phi = _phi(chart, g)
    cols = np.zeros((6, 6))
    for i in range(6):
        omega, vel = phi[:3, i], phi[3:, i]
        plus = log_so3(rot_z.compose(exp_so3(h * omega)))
        minus = log_so3(rot_z.compose(exp_so3(-h * omega)))
        cols[:3, i] = (plus - minus) / (2.0 * h)
        cols[3:, i] = rot_z.m @ vel
    return cols


def hamel_coefficients(chart: ChartId, pose: Pose) -> np.ndarray:
    """Bracket coefficients gamma[k, i, j] of the chart basis fields.

    Defined through [X_i, X_j] = -gamma^k_ij X_k and computed numerically:
    the fields are differentiated in a local chart by central differences and
    the commutator is re-expressed in the chart basis.  For the body-twist
    chart this reproduces (minus) the structure constants of the rigid-motion
    algebra; for the Euler coordinate chart it vanishes.
    """
    h = HAMEL_FD_STEP
    x0 = _local_field_columns(chart, pose, np.zeros(6))
    jac = np.zeros((6, 6, 6))  # jac[k, i, a] = d (X_i)_k / d z_a
    for a in range(6):
        dz = np.zeros(6)
        dz[a] = h
        jac[:, :, a] = (
            _local_field_columns(chart, pose, dz) - _local_field_columns(chart, pose, -dz)
        ) / (2.0 * h)
    # [X_i, X_j] = DX_j . X_i - DX_i . X_j, evaluated at z = 0.
    bracket = np.einsum("kja,ai->kij", jac, x0) - np.einsum("kia,aj->kij", jac, x0)
    phi0 = _phi(chart, pose)
    gamma = -np.linalg.solve(phi0, bracket.reshape(6, 36)).reshape(6, 6, 6)
    # Enforce the exact antisymmetry the construction carries up to roundoff.
    return 0.5 * (gamma - np.transpose(gamma, (0, 2, 1)))
