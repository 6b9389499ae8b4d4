"""Closed-loop attitude and vertical-axis simulation of the quadrotor.

The plant is a rigid body with diagonal inertia, attitude held as a unit
quaternion (body to world, scalar first), plus altitude. Rotor thrust and
torque come from the blade element model at the current rotor speed, which
is driven by the governor. Horizontal translation is not modelled.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .aero import (
    DEFAULT_VARIANT,
    AeroConstants,
    InflowVariant,
    RotorGeometry,
    pitch_for_thrust,
    rotor_loads,
)
from .control import (
    DEFAULT_SPIN,
    AxisSpec,
    GovernorSpec,
    Mixer,
    PdGains,
    allocate,
    build_mixer,
    governor_step,
    pd_torque,
    synthesize_pd,
)
from .errors import NumericalBlowup, StepNotFound

GRAVITY = 9.81
BLOWUP_LIMIT = 1e6

LOG_COLUMNS = (
    "time_s", "roll_rad", "pitch_rad", "yaw_rad", "p_rads", "q_rads", "r_rads",
    "theta1_rad", "theta2_rad", "theta3_rad", "theta4_rad", "omega_rads",
    "altitude_m", "vz_mps", "thrust_total_n", "roll_ref_rad", "pitch_ref_rad",
    "yaw_ref_rad",
)
AXES = ("roll", "pitch", "yaw")


@dataclass(frozen=True)
class VehicleModel:
    mass: float
    inertia: tuple[float, float, float]
    geom: RotorGeometry
    consts: AeroConstants
    mixer: Mixer
    governor: GovernorSpec
    gains: tuple[PdGains, PdGains, PdGains]
    variant: InflowVariant = DEFAULT_VARIANT
    gravity: float = GRAVITY

    def __post_init__(self):
        if not (self.mass > 0):
            raise ValueError("mass must be positive")
        if len(self.inertia) != 3 or min(self.inertia) <= 0:
            raise ValueError("inertia must be three positive values")
        if self.inertia[0] != self.inertia[1]:
            warnings.warn("Ixx != Iyy: frame is not symmetric", stacklevel=2)

    @property
    def weight(self) -> float:
        return self.mass * self.gravity


def build_vehicle(geom: RotorGeometry, consts: AeroConstants, mass: float,
                  inertia: Sequence[float], arm_length: float, omega: float,
                  zeta: float = 0.8, omega_n: float = 7.0, governor_tau: float = 0.5,
                  spin=DEFAULT_SPIN, variant: InflowVariant = DEFAULT_VARIANT,
                  gravity: float = GRAVITY) -> VehicleModel:
    """Trim the rotors for hover at ``mass`` and synthesize per-axis PD gains."""
    hover_pitch = pitch_for_thrust(geom, consts, omega, mass * gravity / 4, variant)
    mixer = build_mixer(geom, consts, omega, arm_length, hover_pitch, spin, variant)
    gains = tuple(synthesize_pd(AxisSpec(i, zeta, omega_n)) for i in inertia)
    return VehicleModel(mass=mass, inertia=tuple(float(i) for i in inertia), geom=geom,
                        consts=consts, mixer=mixer,
                        governor=GovernorSpec(omega, governor_tau), gains=gains,
                        variant=variant, gravity=gravity)


@dataclass(frozen=True)
class SimState:
    quaternion: np.ndarray  # (w, x, y, z), body -> world
    body_rates: np.ndarray  # (p, q, r) rad/s
    altitude: float = 0.0
    vertical_velocity: float = 0.0
    omega: float = 0.0  # rotor speed, rad/s
    time: float = 0.0

    def vector(self) -> np.ndarray:
        return np.concatenate([self.quaternion, self.body_rates,
                               [self.altitude, self.vertical_velocity]])

    @classmethod
    def from_vector(cls, x: np.ndarray, omega: float, time: float) -> "SimState":
        return cls(x[0:4].copy(), x[4:7].copy(), float(x[7]), float(x[8]), omega, time)


def hover_state(model: VehicleModel, altitude: float = 0.0) -> SimState:
    return SimState(np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3), altitude, 0.0,
                    model.governor.omega_ref, 0.0)


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_from_euler(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """ZYX (yaw, then pitch, then roll) Euler angles to a quaternion."""
    cr, sr = math.cos(roll / 2), math.sin(roll / 2)
    cp, sp = math.cos(pitch / 2), math.sin(pitch / 2)
    cy, sy = math.cos(yaw / 2), math.sin(yaw / 2)
    return np.array([
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    ])


def euler_from_quat(q: np.ndarray) -> tuple[float, float, float]:
    w, x, y, z = q
    roll = math.atan2(2 * (w * x + y * z), 1 - 2 * (x * x + y * y))
    pitch = math.asin(max(-1.0, min(1.0, 2 * (w * y - z * x))))
    yaw = math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z))
    return roll, pitch, yaw


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    return a - 2 * math.pi * math.ceil((a - math.pi) / (2 * math.pi))


def rotor_wrench(model: VehicleModel, pitches, omega: float):
    """Total thrust (N) and body torque (N m) from the four rotors."""
    pos = model.mixer.positions
    total = 0.0
    tx = ty = tz = 0.0
    for i in range(4):
        t, q = rotor_loads(model.geom, model.consts, omega, float(pitches[i]), model.variant)
        total += t
        tx += pos[i, 1] * t
        ty -= pos[i, 0] * t
        tz += model.mixer.spin[i] * q
    return total, np.array([tx, ty, tz])


def _rhs(model: VehicleModel, x: np.ndarray, thrust: float, torque: np.ndarray) -> np.ndarray:
    q = x[0:4]
    w = x[4:7]
    inertia = np.asarray(model.inertia)
    w_dot = (torque - np.cross(w, inertia * w)) / inertia
    q_dot = 0.5 * quat_multiply(q, np.array([0.0, w[0], w[1], w[2]]))
    cos_tilt = 1.0 - 2.0 * (q[1] * q[1] + q[2] * q[2])
    az = (thrust * cos_tilt - model.mass * model.gravity) / model.mass
    return np.concatenate([q_dot, w_dot, [x[8], az]])


def dynamics_derivative(model: VehicleModel, state: SimState, pitches,
                        omega: Optional[float] = None) -> np.ndarray:
    """Time derivative of ``(q[4], p, q, r, altitude, vz)`` at fixed pitches and rotor speed."""
    omega = state.omega if omega is None else omega
    thrust, torque = rotor_wrench(model, pitches, omega)
    return _rhs(model, state.vector(), thrust, torque)


def step_rk4(model: VehicleModel, state: SimState, pitches, dt: float) -> SimState:
    """One classical Runge-Kutta step with pitches and rotor speed held over the step."""
    if not (dt > 0):
        raise ValueError("dt must be positive")
    # loads depend only on pitches and rotor speed, both frozen for the step
    thrust, torque = rotor_wrench(model, pitches, state.omega)
    x = state.vector()
    k1 = _rhs(model, x, thrust, torque)
    k2 = _rhs(model, x + 0.5 * dt * k1, thrust, torque)
    k3 = _rhs(model, x + 0.5 * dt * k2, thrust, torque)
    k4 = _rhs(model, x + dt * k3, thrust, torque)
    x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > BLOWUP_LIMIT:
        raise NumericalBlowup(f"state diverged at t={state.time + dt:.4f} s")
    x[0:4] /= np.linalg.norm(x[0:4])
    omega = governor_step(model.governor, state.omega, dt)
    return SimState.from_vector(x, omega, state.time + dt)


@dataclass(frozen=True)
class Segment:
    start: float  # s
    roll: float = 0.0  # rad
    pitch: float = 0.0
    yaw: float = 0.0
    thrust: Optional[float] = None  # N; None holds the vehicle weight


@dataclass(frozen=True)
class Disturbance:
    time: float  # s
    axis: str  # roll | pitch | yaw
    impulse: float  # N m s

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"disturbance axis must be one of {AXES}, got {self.axis!r}")


@dataclass(frozen=True)
class Scenario:
    duration: float
    dt: float
    segments: tuple[Segment, ...]
    disturbances: tuple[Disturbance, ...] = ()
    initial: Optional[SimState] = None  # None starts at hover trim

    def __post_init__(self):
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        if not (self.duration > 0):
            raise ValueError("duration must be positive")
        if not self.segments:
            raise ValueError("scenario needs at least one segment")
        if self.segments[0].start != 0:
            raise ValueError("first segment must start at t=0")
        starts = [s.start for s in self.segments]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly increasing")
        if starts[-1] >= self.duration:
            raise ValueError("segment starts beyond the scenario duration")
        for d in self.disturbances:
            if not (0 <= d.time <= self.duration):
                raise ValueError(f"disturbance at {d.time} s outside scenario")

    @property
    def step_count(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass
class SimLog:
    columns: tuple[str, ...]
    data: np.ndarray

    def __len__(self):
        return self.data.shape[0]

    def __contains__(self, name):
        return name in self.columns

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    @classmethod
    def from_columns(cls, cols: dict) -> "SimLog":
        names = tuple(cols)
        return cls(names, np.column_stack([np.asarray(cols[n], dtype=float) for n in names]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.data:
                writer.writerow([f"{v:.9g}" for v in row])

    @classmethod
    def read_csv(cls, path) -> "SimLog":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            rows = [[float(v) for v in r] for r in reader]
        return cls(header, np.array(rows, dtype=float).reshape(-1, len(header)))


def run_scenario(model: VehicleModel, scenario: Scenario) -> SimLog:
    """Fly ``scenario`` closed loop and return one log record per step.

    Each record holds the state at the start of the step together with the
    commands applied over that step.
    """
    state = scenario.initial if scenario.initial is not None else hover_state(model)
    dt = scenario.dt
    n = scenario.step_count
    impulses: dict[int, np.ndarray] = {}
    for d in scenario.disturbances:
        k = min(int(math.floor(d.time / dt + 1e-9)), n - 1)
        impulses.setdefault(k, np.zeros(3))[AXES.index(d.axis)] += d.impulse
    inertia = np.asarray(model.inertia)
    starts = [s.start for s in scenario.segments]

    out = np.empty((n, len(LOG_COLUMNS)))
    seg_idx = 0
    for k in range(n):
        t = k * dt
        while seg_idx + 1 < len(starts) and starts[seg_idx + 1] <= t + 1e-12:
            seg_idx += 1
        seg = scenario.segments[seg_idx]
        if k in impulses:
            state = replace(state, body_rates=state.body_rates + impulses[k] / inertia)

        roll, pitch, yaw = euler_from_quat(state.quaternion)
        errors = (seg.roll - roll, seg.pitch - pitch, wrap_angle(seg.yaw - yaw))
        torque = [pd_torque(g, e, w) for g, e, w in zip(model.gains, errors, state.body_rates)]
        thrust_cmd = model.weight if seg.thrust is None else seg.thrust
        pitches = allocate(model.mixer, thrust_cmd, torque)
        thrust_total, _ = rotor_wrench(model, pitches, state.omega)

        out[k] = (t, roll, pitch, yaw, *state.body_rates, *pitches, state.omega,
                  state.altitude, state.vertical_velocity, thrust_total,
                  seg.roll, seg.pitch, seg.yaw)
        state = step_rk4(model, state, pitches, dt)
        state = replace(state, time=(k + 1) * dt)
    return SimLog(LOG_COLUMNS, out)


@dataclass(frozen=True)
class StepMetrics:
    overshoot: float  # fraction of the reference step
    settling_time: float  # s after the step, 2 % band
    steady_state_error: float  # reference minus final value
    peak_time: float  # s after the step
    final_value: float


def _channel_column(log: SimLog, channel: str) -> str:
    if channel in log:
        return channel
    name = f"{channel}_rad"
    if name in log:
        return name
    raise KeyError(f"channel {channel!r} not in log")


def step_metrics(log: SimLog, channel: str, step_time: float,
                 reference_delta: float) -> StepMetrics:
    """Transient metrics of ``channel`` following a reference step at ``step_time``.

    Overshoot and the 2 % settling band are measured against the step
    target: the logged reference (``<channel>_ref_rad``) when present,
    otherwise the pre-step value plus ``reference_delta``. The steady-state
    error compares that target with the mean of the last 10 % of the log.
    """
    if reference_delta == 0:
        raise ValueError("reference_delta must be non-zero")
    col = _channel_column(log, channel)
    t = log["time_s"]
    y = log[col]
    after = np.nonzero(t >= step_time - 1e-12)[0]
    if len(after) < 2 or step_time < t[0] or step_time > t[-1]:
        raise StepNotFound(f"no step at t={step_time} within log [{t[0]}, {t[-1]}]")
    i0 = after[0]

    ref_col = col[:-4] + "_ref_rad" if col.endswith("_rad") else None
    if ref_col is not None and ref_col in log:
        target = float(log[ref_col][-1])
    else:
        y_before = y[i0 - 1] if i0 > 0 else y[i0]
        target = float(y_before) + reference_delta
    tail = max(1, int(math.ceil(0.1 * len(t))))
    y_final = float(np.mean(y[-tail:]))

    ys = y[i0:]
    ts = t[i0:]
    excursion = (ys - target) / reference_delta
    ipk = int(np.argmax(excursion))
    overshoot = max(float(excursion[ipk]), 0.0)

    outside = np.nonzero(np.abs(ys - target) > 0.02 * abs(reference_delta))[0]
    if len(outside) == 0:
        settling = 0.0
    elif outside[-1] == len(ys) - 1:
        settling = math.inf
    else:
        settling = float(ts[outside[-1] + 1] - step_time)
    return StepMetrics(overshoot=overshoot, settling_time=settling,
                       steady_state_error=target - y_final,
                       peak_time=float(ts[ipk] - step_time), final_value=y_final)


def second_order_estimate(metrics: StepMetrics) -> tuple[float, float]:
    """Damping ratio and natural frequency implied by overshoot and peak time."""
    if not (0 < metrics.overshoot < 1) or not (metrics.peak_time > 0):
        raise ValueError("needs an underdamped response with a peak")
    ln_mp = math.log(metrics.overshoot)
    zeta = -ln_mp / math.sqrt(math.pi**2 + ln_mp**2)
    wn = math.pi / (metrics.peak_time * math.sqrt(1 - zeta**2))
    return zeta, wn
