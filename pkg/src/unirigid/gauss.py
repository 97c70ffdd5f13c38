"""Least-constraint acceleration solver.

The true acceleration of a constrained body minimizes the mass-weighted
squared deviation from the unconstrained acceleration,

    G(nu_dot) = 1/2 (nu_dot - nu_dot_free)^T M (nu_dot - nu_dot_free),

over the affine set A nu_dot = b.  The minimizer comes from one bordered
(KKT) solve, which also exposes the constraint reaction.  Constraints are
expressed in the body-twist chart only; with no constraint rows the solver
reproduces the free Kirchhoff acceleration exactly, which is what makes it
usable as an independent oracle for the chart engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .charts import Frame, Twist
from .dynamics import SpatialInertia, Wrench, assemble_inertia, kirchhoff_rhs6
from .errors import NotPositiveDefiniteError, RankDeficientConstraintError
from .geom3 import _as_vec3, _readonly, cross3, hat

# Relative singular-value threshold below which constraint rows count as dependent.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class AccelConstraint:
    """Affine acceleration-level constraint A nu_dot = b in the body-twist chart."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[1] != 6:
            raise ValueError(f"constraint matrix must be (k, 6), got {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"constraint offset must be ({a.shape[0]},), got {b.shape}")
        if a.shape[0] > 6:
            raise RankDeficientConstraintError(f"{a.shape[0]} rows cannot be independent in 6 dof")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("constraint data must be finite")
        if a.shape[0] > 0:
            sv = np.linalg.svd(a, compute_uv=False)
            if sv[-1] <= RANK_TOL * sv[0]:
                raise RankDeficientConstraintError(
                    f"constraint rows dependent: singular values {sv!r}"
                )
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", _readonly(b))

    @property
    def k(self) -> int:
        return self.a.shape[0]

    @staticmethod
    def empty() -> "AccelConstraint":
        return AccelConstraint(np.zeros((0, 6)), np.zeros(0))


@dataclass(frozen=True)
class FixedPointConstraint:
    """Body point r_b pinned in space, with optional Baumgarte gains (1/s)."""

    r_b: np.ndarray
    baumgarte_alpha: float = 0.0
    baumgarte_beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r_b", _readonly(_as_vec3(self.r_b, "r_b")))
        if not (math.isfinite(self.baumgarte_alpha) and math.isfinite(self.baumgarte_beta)):
            raise ValueError("Baumgarte gains must be finite")


def gauss_functional(
    si: SpatialInertia,
    nu_dot_candidate,
    nu_dot_free,
    m6: np.ndarray | None = None,
) -> float:
    """Mass-weighted squared deviation from the free acceleration; zero at it."""
    if m6 is None:
        m6 = assemble_inertia(si)
    d = np.asarray(nu_dot_candidate, dtype=float) - np.asarray(nu_dot_free, dtype=float)
    return 0.5 * float(d @ m6 @ d)


def constrained_accel6(
    nu6: np.ndarray,
    w6: np.ndarray,
    m6: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    m6_factor=None,
) -> "tuple[np.ndarray, np.ndarray]":
    """Raw-array core of constrained_accel; (a, b) must already be validated."""
    nu_dot_free = kirchhoff_rhs6(nu6, w6, m6, m6_factor)
    k = a.shape[0]
    if k == 0:
        return nu_dot_free, np.zeros(0)
    kkt = np.zeros((6 + k, 6 + k))
    kkt[:6, :6] = 0.5 * (m6 + m6.T)
    kkt[:6, 6:] = a.T
    kkt[6:, :6] = a
    rhs = np.concatenate([m6 @ nu_dot_free, b])
    try:
        sol = scipy.linalg.solve(kkt, rhs, assume_a="sym", check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        raise NotPositiveDefiniteError("KKT system is singular") from None
    return sol[:6], -sol[6:]


def constrained_accel(
    si: SpatialInertia,
    nu: Twist,
    wrench: Wrench,
    con: AccelConstraint,
    m6: np.ndarray | None = None,
    m6_factor=None,
) -> "tuple[np.ndarray, np.ndarray]":
    """Acceleration minimizing the constraint functional over A nu_dot = b.

    Solves the bordered system [[M, A^T], [A, 0]] (nu_dot, mu) = (M nu_dot_free, b)
    by a symmetric indefinite factorization and returns (nu_dot, lambda) with
    lambda = -mu, so that lambda is the physical reaction:

        M nu_dot + bias(nu) = F + A^T lambda.

    With no rows the free acceleration is returned untouched.
    """
    if nu.frame is not Frame.BODY or wrench.frame is not Frame.BODY:
        raise ValueError("constrained_accel requires body-frame twist and wrench")
    if m6 is None:
        m6 = assemble_inertia(si)
    return constrained_accel6(nu.as_array(), wrench.as_array(), m6, con.a, con.b, m6_factor)


def fixed_point_rows(fp: FixedPointConstraint) -> np.ndarray:
    """Constant constraint matrix [-hat(r_b) | I] of the pinned point."""
    return np.hstack([-hat(fp.r_b), np.eye(3)])


def fixed_point_offset6(fp: FixedPointConstraint, nu6: np.ndarray, position_drift) -> np.ndarray:
    """Raw-array core of the pinned-point constraint offset b."""
    omega = nu6[:3]
    c_v = nu6[3:] + cross3(omega, fp.r_b)
    b = -cross3(omega, c_v) - 2.0 * fp.baumgarte_alpha * c_v
    if position_drift is not None:
        b = b - fp.baumgarte_beta**2 * position_drift
    return b


def fixed_point_constraint(
    fp: FixedPointConstraint,
    nu: Twist,
    position_drift=None,
) -> AccelConstraint:
    """Acceleration-level rows for the pinned point.

    The pinned point has body-frame velocity c_v = v + omega x r_b; requiring
    zero spatial acceleration of that material point gives

        [-hat(r_b) | I] nu_dot = -omega x c_v - 2 alpha c_v - beta^2 c_x,

    where c_x is the accumulated position drift of the pin in body axes,
    supplied by the caller that tracks the anchor (defaults to zero).
    """
    if nu.frame is not Frame.BODY:
        raise ValueError("fixed_point_constraint requires a body-frame twist")
    if position_drift is not None:
        position_drift = _as_vec3(position_drift, "position_drift")
    return AccelConstraint(
        fixed_point_rows(fp), fixed_point_offset6(fp, nu.as_array(), position_drift)
    )


def steady_precession_rates(
    transverse_inertia: float,
    axial_inertia: float,
    mass: float,
    com_distance: float,
    theta0: float,
    spin: float,
    gravity: float = 9.81,
) -> "tuple[float, float]":
    """Precession rates holding the nutation angle constant for a symmetric top.

    Roots of  I1 rate^2 cos(theta0) - I3 spin rate + m g l = 0, with I1 the
    transverse and I3 the axial moment about the pivot, l the pivot-to-CoM
    distance and spin the body-axis angular velocity component.  Returns
    (slow, fast); both are exact steady states.
    """
    a = transverse_inertia * math.cos(theta0)
    bq = -axial_inertia * spin
    cq = mass * gravity * com_distance
    disc = bq * bq - 4.0 * a * cq
    if disc < 0.0:
        raise ValueError(
            f"no steady precession: spin too slow (discriminant {disc!r} < 0)"
        )
    sq = math.sqrt(disc)
    r1 = (-bq - sq) / (2.0 * a)
    r2 = (-bq + sq) / (2.0 * a)
    slow, fast = sorted((r1, r2), key=abs)
    return slow, fast
