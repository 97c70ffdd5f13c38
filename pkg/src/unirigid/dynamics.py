"""Equations of motion for a single rigid body in quasi-velocity form.

Momenta are taken about the body-frame origin, which need not be the center
of mass; one 6x6 generalized inertia

    M = [[J, m hat(c)], [-m hat(c), m I]]

covers both the aligned (c = 0) and offset cases.  The momentum-form balance
in body coordinates reads

    pi_dot + omega x pi + v x p = tau
    p_dot  + omega x p          = f

(the Kirchhoff equations), and the chart engine transports exactly this
balance into any velocity chart:

    (Phi^T M Phi) u_dot = Phi^T F - Phi^T (M Phi_dot u + bias(nu))

with nu = Phi u and bias(nu) = (omega x pi + v x p, omega x p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .charts import (
    ChartId,
    ChartState,
    Frame,
    Twist,
    _euler_rate_matrix_dot,
    _require_euler_valid,
    chart_condition_ok,
    chart_eval,
    euler_rate_matrix,
)
from .errors import FrameNotAtCoMError, IllConditionedError, NotPositiveDefiniteError
from .geom3 import Pose, _as_vec3, _readonly, cross3, hat

# Symmetry / triangle-inequality slack for inertia validation.
INERTIA_TOL = 1e-12
COND_LIMIT = 1e8

STANDARD_GRAVITY = np.array([0.0, 0.0, -9.81])


@dataclass(frozen=True)
class SpatialInertia:
    """Mass, inertia tensor about the body origin (body axes), CoM offset."""

    mass: float
    j: np.ndarray
    c: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0.0):
            raise NotPositiveDefiniteError(f"mass must be positive and finite, got {self.mass!r}")
        j = np.asarray(self.j, dtype=float)
        if j.shape != (3, 3):
            raise ValueError(f"inertia tensor must be 3x3, got {j.shape}")
        if not np.all(np.isfinite(j)):
            raise ValueError("inertia tensor must be finite")
        scale = max(1.0, float(np.abs(j).max()))
        if np.abs(j - j.T).max() > INERTIA_TOL * scale:
            raise ValueError("inertia tensor must be symmetric")
        lam = np.linalg.eigvalsh(0.5 * (j + j.T))
        if lam[0] <= 0.0:
            raise NotPositiveDefiniteError(f"inertia tensor has eigenvalue {lam[0]!r} <= 0")
        # Any mass distribution satisfies the principal-moment triangle inequalities.
        for a, b, cc in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            if lam[cc] > lam[a] + lam[b] + INERTIA_TOL * scale:
                raise NotPositiveDefiniteError(
                    "inertia triangle inequality violated: "
                    f"principal moments {lam[0]!r}, {lam[1]!r}, {lam[2]!r}"
                )
        object.__setattr__(self, "j", _readonly(j))
        object.__setattr__(self, "c", _readonly(_as_vec3(self.c, "c")))
        # The assembled 6x6 must itself be positive definite (CoM-shifted inertia).
        try:
            np.linalg.cholesky(assemble_inertia(self))
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(
                "assembled 6x6 inertia is not positive definite (CoM offset too large)"
            ) from None


@dataclass(frozen=True)
class Momentum:
    """Angular and linear momentum in body axes, about the body origin."""

    pi: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi", _readonly(_as_vec3(self.pi, "pi")))
        object.__setattr__(self, "p", _readonly(_as_vec3(self.p, "p")))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.pi, self.p])


@dataclass(frozen=True)
class Wrench:
    """Torque + force with a frame tag; body wrenches act about the body origin."""

    torque: np.ndarray
    force: np.ndarray
    frame: Frame = Frame.BODY

    def __post_init__(self):
        object.__setattr__(self, "torque", _readonly(_as_vec3(self.torque, "torque")))
        object.__setattr__(self, "force", _readonly(_as_vec3(self.force, "force")))
        if not isinstance(self.frame, Frame):
            raise ValueError(f"frame must be a Frame, got {self.frame!r}")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.torque, self.force])

    @staticmethod
    def zero(frame: Frame = Frame.BODY) -> "Wrench":
        return Wrench(np.zeros(3), np.zeros(3), frame)


@dataclass(frozen=True)
class ForceModel:
    """Applied-force description: uniform gravity plus optional wrenches.

    ``callback`` must be a pure function (t, pose, twist) -> Wrench; spatial
    wrenches are taken about the space origin and converted internally.
    """

    gravity: np.ndarray = field(default_factory=lambda: STANDARD_GRAVITY.copy())
    constant_wrench: Wrench = field(default_factory=Wrench.zero)
    callback: Optional[Callable[[float, Pose, Twist], Wrench]] = None

    def __post_init__(self):
        object.__setattr__(self, "gravity", _readonly(_as_vec3(self.gravity, "gravity")))


def spd_factor(a: np.ndarray, what: str):
    """Cholesky factorization of a symmetric positive definite matrix."""
    try:
        return scipy.linalg.cho_factor(0.5 * (a + a.T), lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{what} is not positive definite") from None


def _spd_solve(a: np.ndarray, rhs: np.ndarray, what: str, factor=None) -> np.ndarray:
    """Cholesky solve of a symmetric positive definite system.

    ``factor`` short-circuits with a precomputed spd_factor(a, ...) result;
    the solve is bitwise identical either way.
    """
    if factor is None:
        factor = spd_factor(a, what)
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def assemble_inertia(si: SpatialInertia) -> np.ndarray:
    """The 6x6 generalized inertia coupling twists to momenta."""
    m = np.zeros((6, 6))
    mc = si.mass * hat(si.c)
    m[:3, :3] = si.j
    m[:3, 3:] = mc
    m[3:, :3] = -mc
    m[3:, 3:] = si.mass * np.eye(3)
    return m


def momentum(si: SpatialInertia, nu: Twist) -> Momentum:
    """(pi, p) = M (omega, v); the kinetic-energy gradient in the body twist."""
    if nu.frame is not Frame.BODY:
        raise ValueError("momentum requires a body-frame twist")
    m6 = assemble_inertia(si)
    out = m6 @ nu.as_array()
    return Momentum(out[:3], out[3:])


def energy(si: SpatialInertia, nu: Twist) -> float:
    """Kinetic energy T = 1/2 nu^T M nu."""
    if nu.frame is not Frame.BODY:
        raise ValueError("energy requires a body-frame twist")
    v = nu.as_array()
    return 0.5 * float(v @ assemble_inertia(si) @ v)


def momentum_bias(nu6: np.ndarray, mom6: np.ndarray) -> np.ndarray:
    """Gyroscopic term (omega x pi + v x p, omega x p) of the momentum balance."""
    omega, v = nu6[:3], nu6[3:]
    pi, p = mom6[:3], mom6[3:]
    out = np.empty(6)
    out[:3] = cross3(omega, pi) + cross3(v, p)
    out[3:] = cross3(omega, p)
    return out


def kirchhoff_rhs6(
    nu6: np.ndarray, w6: np.ndarray, m6: np.ndarray, m6_factor=None
) -> np.ndarray:
    """Raw-array core of kirchhoff_rhs."""
    rhs = w6 - momentum_bias(nu6, m6 @ nu6)
    return _spd_solve(m6, rhs, "generalized inertia", factor=m6_factor)


def kirchhoff_rhs(
    si: SpatialInertia,
    nu: Twist,
    w: Wrench,
    m6: np.ndarray | None = None,
    m6_factor=None,
) -> np.ndarray:
    """Body-twist acceleration from M nu_dot = (tau - omega x pi - v x p, f - omega x p).

    ``m6`` / ``m6_factor`` let callers in integration loops reuse the
    assembled inertia and its factorization; results are unchanged.
    """
    if nu.frame is not Frame.BODY or w.frame is not Frame.BODY:
        raise ValueError("kirchhoff_rhs requires body-frame twist and wrench")
    if m6 is None:
        m6 = assemble_inertia(si)
    return kirchhoff_rhs6(nu.as_array(), w.as_array(), m6, m6_factor)


def newton_euler_rhs(si: SpatialInertia, nu: Twist, w: Wrench) -> np.ndarray:
    """Closed form for the CoM-aligned case: Euler equation plus momentum balance.

    omega_dot = J^-1 (tau - omega x J omega),  v_dot = f/m - omega x v.
    """
    if np.linalg.norm(si.c) > 1e-12:
        raise FrameNotAtCoMError(
            f"body frame origin is {np.linalg.norm(si.c)!r} m from the CoM; "
            "newton_euler_rhs requires c = 0"
        )
    if nu.frame is not Frame.BODY or w.frame is not Frame.BODY:
        raise ValueError("newton_euler_rhs requires body-frame twist and wrench")
    omega, v = nu.omega, nu.vel
    omega_dot = np.linalg.solve(si.j, w.torque - cross3(omega, si.j @ omega))
    v_dot = w.force / si.mass - cross3(omega, v)
    return np.concatenate([omega_dot, v_dot])


def wrench_to_body(w: Wrench, pose: Pose) -> Wrench:
    """Transport a wrench to body axes about the body origin.

    Spatial wrenches are torque/force pairs about the space origin; the
    conversion is the transpose of the pose adjoint.
    """
    if w.frame is Frame.BODY:
        return w
    rt = pose.rotation.m.T
    torque = rt @ (w.torque - cross3(pose.position, w.force))
    return Wrench(torque, rt @ w.force, Frame.BODY)


def body_wrench6(
    forces: ForceModel, si: SpatialInertia, t: float, pose: Pose, nu6: np.ndarray
) -> np.ndarray:
    """Raw-array core of body_wrench: total (torque, force) about the body origin."""
    g_body = pose.rotation.m.T @ forces.gravity
    out = np.empty(6)
    out[:3] = si.mass * cross3(si.c, g_body)
    out[3:] = si.mass * g_body
    cw = forces.constant_wrench
    if cw.frame is not Frame.BODY:
        cw = wrench_to_body(cw, pose)
    out[:3] += cw.torque
    out[3:] += cw.force
    if forces.callback is not None:
        nu = Twist(nu6[:3], nu6[3:], Frame.BODY)
        extra = wrench_to_body(forces.callback(t, pose, nu), pose)
        out[:3] += extra.torque
        out[3:] += extra.force
    return out


def body_wrench(forces: ForceModel, si: SpatialInertia, t: float, pose: Pose, nu: Twist) -> Wrench:
    """Total applied wrench in body axes about the body origin.

    Gravity acts at the CoM: force m R^T g, torque m c x (R^T g).
    """
    w6 = body_wrench6(forces, si, t, pose, nu.as_array())
    return Wrench(w6[:3], w6[3:], Frame.BODY)


def chart_rhs(
    chart: ChartId,
    si: SpatialInertia,
    state: ChartState,
    forces: ForceModel,
    t: float = 0.0,
    m6: np.ndarray | None = None,
    m6_factor=None,
) -> np.ndarray:
    """Chart-velocity acceleration u_dot from the unified quasi-velocity equations.

    Solves (Phi^T M Phi) u_dot = Phi^T F - Phi^T (M Phi_dot u + bias(nu)) with
    nu = Phi u.  For the body-twist chart Phi is the identity and Phi_dot
    vanishes, so the system reduces to the Kirchhoff solve verbatim.  ``m6``
    and ``m6_factor`` reuse the assembled inertia and its factorization.
    """
    if m6 is None:
        m6 = assemble_inertia(si)
    if chart is ChartId.BODY_TWIST:
        nu6 = state.u
        w6 = body_wrench6(forces, si, t, state.pose, nu6)
        return kirchhoff_rhs6(nu6, w6, m6, m6_factor)
    if chart is ChartId.EULER_COM:
        out = _chart_rhs_euler(si, state, forces, t, m6)
        if out is not None:
            return out
    ev = chart_eval(chart, state.pose, state.u)
    phi, phi_dot = ev.phi, ev.phi_dot
    if not chart_condition_ok(chart, state.pose, phi):
        raise IllConditionedError(
            f"chart matrix condition number exceeds {COND_LIMIT:g}"
        )
    nu6 = phi @ state.u
    f6 = body_wrench6(forces, si, t, state.pose, nu6)
    rhs = phi.T @ (f6 - m6 @ (phi_dot @ state.u) - momentum_bias(nu6, m6 @ nu6))
    a = phi.T @ m6 @ phi
    return _spd_solve(a, rhs, "chart mass matrix Phi^T M Phi")


def _chart_rhs_euler(
    si: SpatialInertia, state: ChartState, forces: ForceModel, t: float, m6: np.ndarray
) -> np.ndarray:
    """Euler-chart specialization of chart_rhs exploiting the block structure.

    Phi = [[E, 0], [0, R^T]] and Phi_dot = [[E_dot, 0], [0, -hat(omega) R^T]],
    so Phi^T M Phi assembles from 3x3 blocks and Phi_dot u collapses to
    (E_dot u_ang, -omega x v).  Same equations as the generic branch; within
    the razor-thin band where the analytic conditioning bound is inconclusive
    it returns None and the generic branch takes over with the exact check.
    """
    pose, u = state.pose, state.u
    _, theta, psi = _require_euler_valid(pose)
    if 3.0 * math.sqrt(3.0) > COND_LIMIT * math.sin(theta):
        return None
    r = pose.rotation.m
    e = euler_rate_matrix(theta, psi)
    e_dot = _euler_rate_matrix_dot(theta, psi, u[1], u[2])
    omega = e @ u[:3]
    v = r.T @ u[3:]
    nu6 = np.empty(6)
    nu6[:3] = omega
    nu6[3:] = v
    f6 = body_wrench6(forces, si, t, pose, nu6)
    pdu = np.empty(6)
    pdu[:3] = e_dot @ u[:3]
    pdu[3:] = -cross3(omega, v)
    body_rhs = f6 - m6 @ pdu - momentum_bias(nu6, m6 @ nu6)
    rhs = np.empty(6)
    rhs[:3] = e.T @ body_rhs[:3]
    rhs[3:] = r @ body_rhs[3:]
    a = np.empty((6, 6))
    a[:3, :3] = e.T @ si.j @ e
    if si.c[0] == 0.0 and si.c[1] == 0.0 and si.c[2] == 0.0:
        a[:3, 3:] = 0.0
        a[3:, :3] = 0.0
    else:
        coupling = si.mass * (e.T @ hat(si.c) @ r.T)
        a[:3, 3:] = coupling
        a[3:, :3] = coupling.T
    a[3:, 3:] = si.mass * _EYE3_D
    return _spd_solve(a, rhs, "chart mass matrix Phi^T M Phi")


_EYE3_D = np.eye(3)


def gravity_potential(si: SpatialInertia, pose: Pose, gravity) -> float:
    """Potential -m g . x_G with x_G the CoM position in space."""
    x_g = pose.position + pose.rotation.m @ si.c
    return -si.mass * float(np.asarray(gravity, dtype=float) @ x_g)


def spatial_angular_momentum(si: SpatialInertia, pose: Pose, nu: Twist) -> np.ndarray:
    """Angular momentum about the space origin: L = R pi + x x (R p)."""
    mom = momentum(si, nu)
    r, x = pose.rotation.m, pose.position
    return r @ mom.pi + cross3(x, r @ mom.p)
