"""Trajectory generation and the position/attitude tracking control laws.

The plant is commanded through the fully-actuated wrench abstraction: the
position loop produces (u_x, u_y, u_z) and the attitude loop the three
torques, each cancelling the trajectory feedforward and the estimated
uncertainty and closing a PD loop on the estimated errors:

    u_p = -Xi_p - delta_p_hat - m (kp1 e_p_hat + kp2 e_p_dot_hat)
    u_a = -Xi_a - delta_a_hat - J (ka1 e_a_hat + ka2 e_a_dot_hat)

With exact estimates each error axis collapses to e'' = -kp1 e - kp2 e'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .plant import UavParams, WrenchInput

__all__ = [
    "TrajectoryPoint", "CircleTrajectory", "HoverTrajectory", "ControlGains",
    "EstimateBundle", "feedforward_terms", "position_control",
    "attitude_control", "uncertainty_rescale", "wrench_from_controls",
]


class TrajectoryPoint(NamedTuple):
    """Desired pose, velocity and acceleration in state order (x..phi)."""

    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray


class HoverTrajectory:
    """Fixed hover point with zero desired attitude."""

    def __init__(self, x: float = 0.0, y: float = 0.0, altitude: float = 0.0):
        self._pos = np.array([x, y, altitude, 0.0, 0.0, 0.0])

    def point(self, t: float) -> TrajectoryPoint:
        return TrajectoryPoint(self._pos.copy(), np.zeros(6), np.zeros(6))


class CircleTrajectory:
    """Quintic climb to altitude, then a constant-speed horizontal circle.

    The climb holds the start point in the horizontal plane and raises z with
    a quintic profile (zero velocity and acceleration at both ends).  The
    circle starts at the climb endpoint: its center sits one radius in the
    -x direction from the start, phase zero.  Desired attitude is identically
    zero; the loops are independent under the fully-actuated abstraction.
    """

    def __init__(self, radius: float, speed: float, altitude: float,
                 climb_time: float, start_x: float = 0.0, start_y: float = 0.0):
        if min(radius, speed, altitude, climb_time) <= 0:
            raise ValueError("radius, speed, altitude and climb_time must be positive")
        self.radius = radius
        self.speed = speed
        self.altitude = altitude
        self.climb_time = climb_time
        self.start = (start_x, start_y)
        self.omega = speed / radius
        self.center = (start_x - radius, start_y)

    def point(self, t: float) -> TrajectoryPoint:
        pos = np.zeros(6)
        vel = np.zeros(6)
        acc = np.zeros(6)
        x0, y0 = self.start
        if t < self.climb_time:
            s = t / self.climb_time
            blend = s ** 3 * (10.0 + s * (-15.0 + 6.0 * s))
            dblend = s * s * (30.0 + s * (-60.0 + 30.0 * s)) / self.climb_time
            ddblend = s * (60.0 + s * (-180.0 + 120.0 * s)) / self.climb_time ** 2
            pos[0], pos[1], pos[2] = x0, y0, self.altitude * blend
            vel[2] = self.altitude * dblend
            acc[2] = self.altitude * ddblend
            return TrajectoryPoint(pos, vel, acc)
        tau = t - self.climb_time
        ang = self.omega * tau
        cx, cy = self.center
        r, w = self.radius, self.omega
        pos[0] = cx + r * math.cos(ang)
        pos[1] = cy + r * math.sin(ang)
        pos[2] = self.altitude
        vel[0] = -r * w * math.sin(ang)
        vel[1] = r * w * math.cos(ang)
        acc[0] = -r * w * w * math.cos(ang)
        acc[1] = -r * w * w * math.sin(ang)
        return TrajectoryPoint(pos, vel, acc)


@dataclass(frozen=True)
class ControlGains:
    kp1: float = 2.5
    kp2: float = 4.0
    ka1: float = 2.5
    ka2: float = 4.0

    def __post_init__(self):
        if min(self.kp1, self.kp2, self.ka1, self.ka2) <= 0:
            raise ValueError("control gains must be positive")


class EstimateBundle(NamedTuple):
    """Inputs the control laws consume.

    pos/vel: six estimated coordinates and velocities (corrector outputs);
    delta_p/delta_a: estimated uncertainty forces and torques (observer
    outputs rescaled by mass and inertias).
    """

    pos: np.ndarray
    vel: np.ndarray
    delta_p: np.ndarray
    delta_a: np.ndarray


def feedforward_terms(tp: TrajectoryPoint, params: UavParams) -> tuple[np.ndarray, np.ndarray]:
    """Xi_p = -m*(acc_xy, acc_z + g); Xi_a = -J*acc_attitude."""
    xi_p = -params.m * tp.acc[:3]
    xi_p[2] -= params.m * params.g
    xi_a = -np.array(params.inertias) * tp.acc[3:]
    return xi_p, xi_a


def position_control(est: EstimateBundle, tp: TrajectoryPoint,
                     gains: ControlGains, params: UavParams) -> np.ndarray:
    m, kp1, kp2 = params.m, gains.kp1, gains.kp2
    u = [0.0, 0.0, 0.0]
    for i in range(3):
        e = est.pos[i] - tp.pos[i]
        ed = est.vel[i] - tp.vel[i]
        xi = -m * tp.acc[i] - (m * params.g if i == 2 else 0.0)
        u[i] = -xi - est.delta_p[i] - m * (kp1 * e + kp2 * ed)
        if not math.isfinite(u[i]):
            raise ValueError("non-finite position control output")
    return np.array(u)


def attitude_control(est: EstimateBundle, tp: TrajectoryPoint,
                     gains: ControlGains, params: UavParams) -> np.ndarray:
    ka1, ka2 = gains.ka1, gains.ka2
    inert = params.inertias
    u = [0.0, 0.0, 0.0]
    for i in range(3):
        e = est.pos[3 + i] - tp.pos[3 + i]
        ed = est.vel[3 + i] - tp.vel[3 + i]
        xi = -inert[i] * tp.acc[3 + i]
        u[i] = -xi - est.delta_a[i] - inert[i] * (ka1 * e + ka2 * ed)
        if not math.isfinite(u[i]):
            raise ValueError("non-finite attitude control output")
    return np.array(u)


def uncertainty_rescale(sigma_hat, params: UavParams) -> tuple[np.ndarray, np.ndarray]:
    """Convert per-axis uncertainty accelerations into forces and torques.

    The observers estimate sigma_i (acceleration units); the control laws
    cancel delta_p and delta_a (force/torque units), which differ by the mass
    and the inertias.
    """
    sig = np.asarray(sigma_hat, dtype=float)
    if sig.shape != (6,):
        raise ValueError("expected six uncertainty estimates")
    delta_p = params.m * sig[:3]
    delta_a = np.array(params.inertias) * sig[3:]
    return delta_p, delta_a


def wrench_from_controls(u_p: np.ndarray, u_a: np.ndarray) -> WrenchInput:
    return WrenchInput(float(u_p[0]), float(u_p[1]), float(u_p[2]),
                       float(u_a[0]), float(u_a[1]), float(u_a[2]))
