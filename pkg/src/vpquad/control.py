"""PD attitude control, pitch allocation for an X quadrotor, and rotor-speed governor."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aero import (
    DEFAULT_VARIANT,
    AeroConstants,
    InflowVariant,
    RotorGeometry,
    RotorOperatingPoint,
    solve_rotor,
)
from .errors import SingularJacobian

#: +1 counter-clockwise, -1 clockwise; ordered around the frame.
DEFAULT_SPIN = (1, -1, 1, -1)
JACOBIAN_STEP = 1e-4
MAX_CONDITION = 1e8


@dataclass(frozen=True)
class AxisSpec:
    inertia: float  # kg m^2
    zeta: float = 0.8
    omega_n: float = 7.0  # rad/s

    def __post_init__(self):
        if not (self.inertia > 0 and self.zeta > 0 and self.omega_n > 0):
            raise ValueError("inertia, damping ratio and natural frequency must be positive")
        if self.zeta > 2:
            raise ValueError(f"damping ratio {self.zeta} exceeds sanity bound 2")


@dataclass(frozen=True)
class PdGains:
    kp: float  # N m / rad
    kd: float  # N m / (rad/s)


@dataclass(frozen=True)
class GovernorSpec:
    omega_ref: float  # rad/s
    time_constant: float = 0.5  # s

    def __post_init__(self):
        if not (self.omega_ref > 0 and self.time_constant > 0):
            raise ValueError("governor reference and time constant must be positive")


def synthesize_pd(spec: AxisSpec) -> PdGains:
    """Gains placing the rigid-axis closed loop at ``s^2 + 2 zeta wn s + wn^2``."""
    return PdGains(kp=spec.inertia * spec.omega_n**2,
                   kd=2.0 * spec.zeta * spec.omega_n * spec.inertia)


def pd_torque(gains: PdGains, angle_error: float, body_rate: float) -> float:
    # derivative acts on the measured rate, not the error
    return gains.kp * angle_error - gains.kd * body_rate


def governor_step(spec: GovernorSpec, omega: float, dt: float) -> float:
    """Advance a first-order lag toward ``omega_ref`` by ``dt`` (exact discretization)."""
    if not (dt > 0):
        raise ValueError("dt must be positive")
    return omega + (spec.omega_ref - omega) * (1.0 - math.exp(-dt / spec.time_constant))


def rotor_positions(arm_length: float) -> np.ndarray:
    """Body-frame (x, y) of the four rotors of an X frame, going around it.

    Rotor 1 is front-left, then rear-left, rear-right, front-right.
    """
    d = arm_length / math.sqrt(2.0)
    return np.array([[d, d], [-d, d], [-d, -d], [d, -d]])


@dataclass(frozen=True)
class Mixer:
    """Linearized allocation about a common hover pitch."""

    geom: RotorGeometry
    arm_length: float
    spin: tuple[int, ...]
    hover_pitch: float
    omega: float
    hover_thrust_total: float
    jacobian: np.ndarray  # rows: T_total, tau_x, tau_y, tau_z; columns: rotors
    jacobian_inv: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return rotor_positions(self.arm_length)


def _check_spin(spin) -> tuple[int, ...]:
    spin = tuple(int(s) for s in spin)
    if len(spin) != 4 or any(s not in (-1, 1) for s in spin):
        raise ValueError("spin directions must be four values of +1/-1")
    if any(spin[i] == spin[(i + 1) % 4] for i in range(4)):
        raise ValueError("adjacent rotors must spin in opposite directions")
    return spin


def build_allocation_jacobian(geom: RotorGeometry, consts: AeroConstants, omega: float,
                              arm_length: float, hover_pitch: float,
                              spin=DEFAULT_SPIN,
                              variant: InflowVariant = DEFAULT_VARIANT) -> np.ndarray:
    """Central-difference map from rotor pitch deviations to total thrust and body torques.

    Thrust acts along body +z at each rotor position; the reaction torque of
    rotor ``i`` about body z is ``spin[i] * Q_i``.
    """
    spin = _check_spin(spin)
    if not (arm_length > 0):
        raise ValueError("arm length must be positive")
    h = JACOBIAN_STEP
    up = solve_rotor(geom, consts, RotorOperatingPoint(omega, hover_pitch + h), variant)
    dn = solve_rotor(geom, consts, RotorOperatingPoint(omega, hover_pitch - h), variant)
    dT = (up.thrust - dn.thrust) / (2 * h)
    dQ = (up.torque - dn.torque) / (2 * h)
    pos = rotor_positions(arm_length)
    jac = np.empty((4, 4))
    for i in range(4):
        x, y = pos[i]
        jac[:, i] = (dT, y * dT, -x * dT, spin[i] * dQ)
    cond = np.linalg.cond(jac)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularJacobian(f"allocation jacobian condition number {cond:.3g}")
    return jac


def build_mixer(geom: RotorGeometry, consts: AeroConstants, omega: float,
                arm_length: float, hover_pitch: float, spin=DEFAULT_SPIN,
                variant: InflowVariant = DEFAULT_VARIANT) -> Mixer:
    spin = _check_spin(spin)
    jac = build_allocation_jacobian(geom, consts, omega, arm_length, hover_pitch, spin, variant)
    t_hover = solve_rotor(geom, consts, RotorOperatingPoint(omega, hover_pitch), variant).thrust
    return Mixer(geom=geom, arm_length=arm_length, spin=spin, hover_pitch=hover_pitch,
                 omega=omega, hover_thrust_total=4 * t_hover,
                 jacobian=jac, jacobian_inv=np.linalg.inv(jac))


def _max_scale(base: np.ndarray, delta: np.ndarray, lo: float, hi: float) -> float:
    """Largest s in [0, 1] keeping ``base + s*delta`` inside ``[lo, hi]``."""
    s = 1.0
    for b, d in zip(base, delta):
        if d > 0 and b + d > hi:
            s = min(s, max((hi - b) / d, 0.0))
        elif d < 0 and b + d < lo:
            s = min(s, max((lo - b) / d, 0.0))
    return s


def allocate(mixer: Mixer, thrust_cmd: float, torque_cmd) -> np.ndarray:
    """Rotor pitches (rad) realizing a total-thrust and body-torque command.

    Under saturation the thrust command is kept and torque authority is
    shed, roll/pitch before yaw.
    """
    tx, ty, tz = torque_cmd
    inv = mixer.jacobian_inv
    lo, hi = mixer.geom.pitch_min, mixer.geom.pitch_max
    base = mixer.hover_pitch + inv[:, 0] * (thrust_cmd - mixer.hover_thrust_total)
    d_rp = inv[:, 1] * tx + inv[:, 2] * ty
    d_yaw = inv[:, 3] * tz
    full = base + d_rp + d_yaw
    if np.all((full >= lo) & (full <= hi)):
        return full
    s_rp = _max_scale(base, d_rp, lo, hi)
    theta = base + s_rp * d_rp
    if s_rp == 1.0:
        theta = theta + _max_scale(theta, d_yaw, lo, hi) * d_yaw
    return np.clip(theta, lo, hi)
