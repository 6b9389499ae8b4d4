"""Hover performance of a constant-speed, variable-pitch rotor.

Blade element theory with uniform inflow gives the thrust and power
coefficients as closed-form functions of collective pitch; momentum
theory supplies the ideal (minimum) hover power used as a lower bound.

All angles are radians and all rotational speeds rad/s.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import ConvergenceError, EmptyRange, NoSolution, OutOfEnvelope

#: Bracket used when checking the drag polar for positivity.
POLAR_CHECK_RANGE = 0.35

BISECT_TOL = 1e-6
BISECT_MAX_ITER = 200
_ENVELOPE_EPS = 1e-12
_SOLIDITY_MAX = 0.3


class InflowVariant(enum.Enum):
    """Closed form used for the uniform inflow ratio.

    ``AS_PRINTED`` uses ``64*theta/(sigma*a)`` under the radical.
    ``MOMENTUM_CONSISTENT`` uses ``64*theta/(3*sigma*a)``, the form for
    which ``lambda == sqrt(CT/2)`` holds identically.
    """

    AS_PRINTED = "printed"
    MOMENTUM_CONSISTENT = "consistent"


DEFAULT_VARIANT = InflowVariant.MOMENTUM_CONSISTENT


@dataclass(frozen=True)
class AeroConstants:
    """Empirical aerodynamic constants of the blade section and the air."""

    a: float = 5.7  # lift-curve slope, per rad
    kappa: float = 1.60  # induced power correction
    beta0: float = 0.0130
    beta1: float = -0.0216
    beta2: float = 0.400
    rho: float = 1.18  # kg/m^3

    def __post_init__(self):
        if not (self.a > 0):
            raise ValueError(f"lift-curve slope must be positive, got {self.a}")
        if not (self.rho > 0):
            raise ValueError(f"air density must be positive, got {self.rho}")
        if not (self.kappa >= 1):
            raise ValueError(f"induced correction must be >= 1, got {self.kappa}")
        # minimum of a quadratic over a closed interval: endpoints or vertex
        candidates = [-POLAR_CHECK_RANGE, POLAR_CHECK_RANGE]
        if self.beta2 != 0:
            vertex = -self.beta1 / (2 * self.beta2)
            if abs(vertex) <= POLAR_CHECK_RANGE:
                candidates.append(vertex)
        if min(self.drag(x) for x in candidates) <= 0:
            raise ValueError("drag polar must be positive on [-0.35, 0.35] rad")

    def drag(self, alpha: float) -> float:
        """Section drag coefficient at angle of attack ``alpha``."""
        return self.beta0 + self.beta1 * alpha + self.beta2 * alpha * alpha


@dataclass(frozen=True)
class RotorGeometry:
    radius: float
    blade_count: int = 2
    solidity: float = 0.039
    pitch_min: float = -math.radians(14.0)
    pitch_max: float = math.radians(14.0)

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.blade_count < 2:
            raise ValueError(f"blade_count must be >= 2, got {self.blade_count}")
        if not (0 < self.solidity < _SOLIDITY_MAX):
            raise ValueError(f"solidity must lie in (0, 0.3), got {self.solidity}")
        if not (self.pitch_min < 0 < self.pitch_max):
            raise ValueError("pitch limits must bracket zero")
        if max(-self.pitch_min, self.pitch_max) > POLAR_CHECK_RANGE:
            raise ValueError("pitch limits must not exceed 0.35 rad in magnitude")

    @property
    def disk_area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, theta: float) -> bool:
        return self.pitch_min - _ENVELOPE_EPS <= theta <= self.pitch_max + _ENVELOPE_EPS


@dataclass(frozen=True)
class RotorOperatingPoint:
    omega: float  # rad/s
    theta: float  # collective pitch, rad

    def __post_init__(self):
        if not (self.omega > 0) or not math.isfinite(self.omega):
            raise ValueError(f"angular velocity must be positive, got {self.omega}")
        if not math.isfinite(self.theta):
            raise ValueError(f"pitch must be finite, got {self.theta}")


@dataclass(frozen=True)
class RotorSolution:
    ct: float
    cp_total: float
    cp_induced: float
    cp_profile: float
    inflow: float
    alpha_eff: float
    thrust: float  # N
    power: float  # W
    torque: float  # N m


@dataclass(frozen=True)
class CurveRow:
    theta: float
    thrust: float
    power: float
    torque: float
    ct: float
    cp: float
    inflow: float


# --- closed forms on raw solidity, shared by the public functions and the
# --- solidity calibration (which must probe values outside a valid geometry)


def _inflow(sigma: float, a: float, theta: float, variant: InflowVariant) -> float:
    if not math.isfinite(theta):
        raise ValueError(f"pitch must be finite, got {theta}")
    sa = sigma * a
    if not (sa > 0):
        raise ValueError("solidity times lift slope must be positive")
    if theta < 0:
        return -_inflow(sigma, a, -theta, variant)
    k = 64.0 if variant is InflowVariant.AS_PRINTED else 64.0 / 3.0
    return sa / 16.0 * (math.sqrt(1.0 + k * theta / sa) - 1.0)


def _thrust_coeff(sigma: float, a: float, theta: float, variant: InflowVariant):
    lam = _inflow(sigma, a, theta, variant)
    return sigma * a / 2.0 * (theta / 3.0 - lam / 2.0), lam


def _power_coeffs(sigma: float, consts: AeroConstants, theta: float, variant: InflowVariant):
    ct, lam = _thrust_coeff(sigma, consts.a, theta, variant)
    alpha = theta - lam
    cp_i = consts.kappa * abs(ct) ** 1.5 / math.sqrt(2.0)
    cp_o = sigma / 8.0 * consts.drag(alpha)
    return ct, lam, alpha, cp_i, cp_o


def _solve(sigma: float, radius: float, consts: AeroConstants, omega: float,
           theta: float, variant: InflowVariant) -> RotorSolution:
    ct, lam, alpha, cp_i, cp_o = _power_coeffs(sigma, consts, theta, variant)
    cp = cp_i + cp_o
    area = math.pi * radius**2
    tip = omega * radius
    power = cp * consts.rho * area * tip**3
    return RotorSolution(
        ct=ct,
        cp_total=cp,
        cp_induced=cp_i,
        cp_profile=cp_o,
        inflow=lam,
        alpha_eff=alpha,
        thrust=ct * consts.rho * area * tip**2,
        power=power,
        torque=power / omega,
    )


def _bisect(f: Callable[[float], float], lo: float, hi: float, target: float) -> float:
    """Root of increasing ``f(x) = target`` on ``[lo, hi]`` (bracket assumed)."""
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        err = f(mid) - target
        if abs(err) <= BISECT_TOL:
            return mid
        if err < 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not reach {BISECT_TOL} in {BISECT_MAX_ITER} iterations")


# --- public API


def inflow_ratio(geom: RotorGeometry, consts: AeroConstants, theta: float,
                 variant: InflowVariant = DEFAULT_VARIANT) -> float:
    """Uniform inflow ratio; odd in ``theta``."""
    return _inflow(geom.solidity, consts.a, theta, variant)


def thrust_coefficient(geom: RotorGeometry, consts: AeroConstants, theta: float,
                       variant: InflowVariant = DEFAULT_VARIANT) -> tuple[float, float]:
    """Return ``(ct, inflow)`` at collective pitch ``theta``."""
    return _thrust_coeff(geom.solidity, consts.a, theta, variant)


def power_coefficient(geom: RotorGeometry, consts: AeroConstants, theta: float,
                      variant: InflowVariant = DEFAULT_VARIANT):
    """Return ``(cp_total, cp_induced, cp_profile, alpha_eff)``.

    The effective angle of attack is ``theta - inflow``; induced power uses
    ``|ct|`` so that negative pitch produces the same induced power as the
    mirrored positive pitch.
    """
    _, _, alpha, cp_i, cp_o = _power_coeffs(geom.solidity, consts, theta, variant)
    return cp_i + cp_o, cp_i, cp_o, alpha


def solve_rotor(geom: RotorGeometry, consts: AeroConstants, op: RotorOperatingPoint,
                variant: InflowVariant = DEFAULT_VARIANT) -> RotorSolution:
    if not geom.contains(op.theta):
        raise OutOfEnvelope(
            f"pitch {math.degrees(op.theta):.3f} deg outside "
            f"[{math.degrees(geom.pitch_min):.3f}, {math.degrees(geom.pitch_max):.3f}] deg"
        )
    return _solve(geom.solidity, geom.radius, consts, op.omega, op.theta, variant)


def rotor_loads(geom: RotorGeometry, consts: AeroConstants, omega: float, theta: float,
                variant: InflowVariant = DEFAULT_VARIANT) -> tuple[float, float]:
    """Thrust and torque at ``(omega, theta)``; shorthand for :func:`solve_rotor`."""
    sol = solve_rotor(geom, consts, RotorOperatingPoint(omega, theta), variant)
    return sol.thrust, sol.torque


def pitch_for_thrust(geom: RotorGeometry, consts: AeroConstants, omega: float,
                     thrust_target: float, variant: InflowVariant = DEFAULT_VARIANT) -> float:
    """Collective pitch producing ``thrust_target`` newtons at ``omega``."""
    if not math.isfinite(thrust_target):
        raise ValueError(f"thrust target must be finite, got {thrust_target}")
    RotorOperatingPoint(omega, 0.0)

    def thrust(theta):
        return _solve(geom.solidity, geom.radius, consts, omega, theta, variant).thrust

    if thrust_target == 0:
        return 0.0
    if thrust_target > 0:
        t_max = thrust(geom.pitch_max)
        if thrust_target > t_max + BISECT_TOL:
            raise OutOfEnvelope(
                f"target {thrust_target:.3f} N exceeds {t_max:.3f} N available at pitch_max"
            )
        return _bisect(thrust, 0.0, geom.pitch_max, thrust_target)
    t_min = thrust(geom.pitch_min)
    if thrust_target < t_min - BISECT_TOL:
        raise OutOfEnvelope(
            f"target {thrust_target:.3f} N below {t_min:.3f} N available at pitch_min"
        )
    return _bisect(thrust, geom.pitch_min, 0.0, thrust_target)


def sweep_curves(geom: RotorGeometry, consts: AeroConstants, omega: float,
                 theta_start: float, theta_end: float, theta_step: float,
                 variant: InflowVariant = DEFAULT_VARIANT) -> list[CurveRow]:
    """Performance table over an inclusive, evenly spaced pitch range."""
    if not (theta_step > 0):
        raise ValueError(f"pitch step must be positive, got {theta_step}")
    if theta_start > theta_end:
        raise EmptyRange(f"start {theta_start} > end {theta_end}")
    if not (geom.contains(theta_start) and geom.contains(theta_end)):
        raise OutOfEnvelope("sweep range exceeds rotor pitch limits")
    count = int(math.floor((theta_end - theta_start) / theta_step + 1e-9)) + 1
    rows = []
    for i in range(count):
        theta = min(theta_start + i * theta_step, theta_end)
        sol = solve_rotor(geom, consts, RotorOperatingPoint(omega, theta), variant)
        rows.append(CurveRow(theta, sol.thrust, sol.power, sol.torque,
                             sol.ct, sol.cp_total, sol.inflow))
    return rows


def ideal_hover_power(total_lift: float, rotor_count: int, disk_area_each: float,
                      rho: float) -> float:
    """Momentum-theory minimum power for ``rotor_count`` equal rotors.

    Depends only on the total disk area, so a single rotor of area ``n*A``
    gives the same result.
    """
    if not (total_lift > 0 and rotor_count > 0 and disk_area_each > 0 and rho > 0):
        raise ValueError("lift, rotor count, disk area and density must be positive")
    return total_lift**1.5 / math.sqrt(2.0 * rho * (rotor_count * disk_area_each))


def calibrate_solidity(geom: RotorGeometry, consts: AeroConstants, omega: float,
                       theta_ref: float, thrust_ref: float,
                       variant: InflowVariant = DEFAULT_VARIANT) -> float:
    """Solidity for which the rotor delivers ``thrust_ref`` at ``theta_ref``.

    ``geom.solidity`` is ignored.
    """
    if not (thrust_ref > 0 and theta_ref > 0):
        raise ValueError("reference thrust and pitch must be positive")
    RotorOperatingPoint(omega, theta_ref)

    def thrust(sigma):
        return _solve(sigma, geom.radius, consts, omega, theta_ref, variant).thrust

    lo, hi = 1e-9, _SOLIDITY_MAX
    if not (thrust(lo) < thrust_ref < thrust(hi)):
        raise NoSolution(f"no solidity in (0, 0.3) yields {thrust_ref} N at the reference pitch")
    return _bisect(thrust, lo, hi, thrust_ref)


def calibrated_geometry(geom: RotorGeometry, consts: AeroConstants, omega: float,
                        theta_ref: float, thrust_ref: float,
                        variant: InflowVariant = DEFAULT_VARIANT) -> RotorGeometry:
    sigma = calibrate_solidity(geom, consts, omega, theta_ref, thrust_ref, variant)
    return replace(geom, solidity=sigma)


def rpm_to_rads(rpm: float) -> float:
    return rpm * 2.0 * math.pi / 60.0


def rads_to_rpm(omega: float) -> float:
    return omega * 60.0 / (2.0 * math.pi)
