"""Rotor/engine matching, take-off weight, fuel endurance and vibration checks."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .aero import (
    DEFAULT_VARIANT,
    AeroConstants,
    InflowVariant,
    RotorGeometry,
    RotorOperatingPoint,
    pitch_for_thrust,
    rads_to_rpm,
    solve_rotor,
)
from .errors import OverweightError

GRAVITY = 9.81


@dataclass(frozen=True)
class EngineSpec:
    name: str
    displacement_cc: float
    max_power_w: float
    max_torque_nm: float  # referred to rotor speed
    bsfc_g_per_kwh: float
    rpm_min: float
    rpm_max: float

    def __post_init__(self):
        if not (self.max_power_w > 0):
            raise ValueError(f"{self.name}: max_power_w must be positive")
        if not (self.max_torque_nm > 0):
            raise ValueError(f"{self.name}: max_torque_nm must be positive")
        if not (self.bsfc_g_per_kwh > 0):
            raise ValueError(f"{self.name}: bsfc_g_per_kwh must be positive")
        if not (self.rpm_min < self.rpm_max):
            raise ValueError(f"{self.name}: rpm_min must be below rpm_max")


@dataclass(frozen=True)
class FuelSpec:
    tank_volume_l: float
    density_g_per_l: float = 770.0

    def __post_init__(self):
        if not (self.tank_volume_l >= 0):
            raise ValueError("tank volume must be non-negative")
        if not (self.density_g_per_l > 0):
            raise ValueError("fuel density must be positive")

    @property
    def mass_g(self) -> float:
        return self.tank_volume_l * self.density_g_per_l


@dataclass(frozen=True)
class SizingConfig:
    rotor_count: int = 4
    control_margin: float = 0.5
    transmission_efficiency: float = 0.8

    def __post_init__(self):
        if self.rotor_count < 3:
            raise ValueError("rotor_count must be >= 3")
        if not (0 <= self.control_margin <= 1):
            raise ValueError("control_margin must lie in [0, 1]")
        if not (0 < self.transmission_efficiency <= 1):
            raise ValueError("transmission_efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class StructuralMode:
    name: str
    frequency_hz: float
    activatable: bool  # excited by the contra-rotating rotor pattern

    def __post_init__(self):
        if not (self.frequency_hz > 0):
            raise ValueError(f"mode {self.name!r}: frequency must be positive")


class Verdict(enum.IntEnum):
    PASS = 0
    WARN = 1
    FAIL = 2


@dataclass(frozen=True)
class ModeVerdict:
    mode: StructuralMode
    verdict: Verdict
    separation: float  # |f_mode - f_exc| / f_exc
    notes: tuple[str, ...] = ()


@dataclass
class SizingReport:
    max_total_lift_n: float
    mtow_kg: float
    vehicle_mass_kg: float
    hover_pitch_rad: float
    hover_rotor_power_w: float  # aerodynamic power, all rotors
    hover_power_w: float  # engine-side, after transmission losses
    required_power_w: float  # all rotors at pitch_max
    required_torque_nm: float
    required_shaft_power_w: float  # required_power_w / eta
    selected_engine: Optional[EngineSpec]
    endurance_hours: Optional[float]
    excitation_hz: float
    resonance_verdicts: list[ModeVerdict] = field(default_factory=list)

    def lines(self) -> list[tuple[str, str]]:
        """Stable ``(key, value)`` pairs for reporting."""
        eng = self.selected_engine
        out = [
            ("max_total_lift_n", f"{self.max_total_lift_n:.2f}"),
            ("max_total_lift_kgf", f"{self.max_total_lift_n / GRAVITY:.2f}"),
            ("mtow_kg", f"{self.mtow_kg:.2f}"),
            ("vehicle_mass_kg", f"{self.vehicle_mass_kg:.2f}"),
            ("hover_pitch_deg", f"{math.degrees(self.hover_pitch_rad):.2f}"),
            ("hover_rotor_power_w", f"{self.hover_rotor_power_w:.1f}"),
            ("hover_power_w", f"{self.hover_power_w:.1f}"),
            ("required_power_w", f"{self.required_power_w:.1f}"),
            ("required_torque_nm", f"{self.required_torque_nm:.3f}"),
            ("required_shaft_power_w", f"{self.required_shaft_power_w:.1f}"),
            ("engine", eng.name if eng else "none"),
            ("endurance_hours",
             f"{self.endurance_hours:.2f}" if self.endurance_hours is not None else "none"),
            ("excitation_hz", f"{self.excitation_hz:.2f}"),
        ]
        for mv in self.resonance_verdicts:
            out.append((f"mode[{mv.mode.name}]", mv.verdict.name))
        return out


def max_total_lift(geom: RotorGeometry, consts: AeroConstants, omega: float,
                   rotor_count: int, variant: InflowVariant = DEFAULT_VARIANT) -> float:
    sol = solve_rotor(geom, consts, RotorOperatingPoint(omega, geom.pitch_max), variant)
    return rotor_count * sol.thrust


def max_takeoff_weight(max_total_lift_n: float, control_margin: float) -> float:
    """Take-off mass (kg) leaving ``control_margin`` of the weight as thrust reserve."""
    if not (0 <= control_margin <= 1):
        raise ValueError("control_margin must lie in [0, 1]")
    return max_total_lift_n / (GRAVITY * (1.0 + control_margin))


def required_power_torque(geom: RotorGeometry, consts: AeroConstants, omega: float,
                          rotor_count: int, eta: float = 1.0,
                          variant: InflowVariant = DEFAULT_VARIANT) -> tuple[float, float]:
    """Shaft power (W) and torque at rotor speed (N m) for all rotors at pitch_max."""
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    sol = solve_rotor(geom, consts, RotorOperatingPoint(omega, geom.pitch_max), variant)
    p_req = rotor_count * sol.power / eta
    return p_req, p_req / omega


def select_engine(catalog: Sequence[EngineSpec], p_req: float, q_req: float,
                  omega_rotor: float | None = None) -> Optional[EngineSpec]:
    """Smallest engine meeting both the power and the torque requirement.

    Torque ratings are already referred to rotor speed, so ``omega_rotor``
    is accepted for interface symmetry but not needed for the comparison.
    """
    ok = [e for e in catalog if e.max_power_w >= p_req and e.max_torque_nm >= q_req]
    if not ok:
        return None
    return min(ok, key=lambda e: (e.max_power_w, e.displacement_cc, e.name))


def endurance(fuel: FuelSpec, bsfc_g_per_kwh: float, shaft_power_w: float,
              eta: float = 1.0) -> float:
    """Flight time in hours burning ``fuel`` at ``shaft_power_w`` delivered to the rotors."""
    if not (shaft_power_w > 0):
        raise ValueError("shaft power must be positive")
    if not (bsfc_g_per_kwh > 0):
        raise ValueError("bsfc must be positive")
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    burn_g_per_h = bsfc_g_per_kwh * (shaft_power_w / 1000.0) / eta
    return fuel.mass_g / burn_g_per_h


def excitation_frequency(rotor_rpm: float, blades_per_rotor: int) -> float:
    """Blade-passage (n-per-rev) frequency in Hz."""
    if not (rotor_rpm > 0):
        raise ValueError("rpm must be positive")
    if blades_per_rotor < 1:
        raise ValueError("blade count must be >= 1")
    return rotor_rpm / 60.0 * blades_per_rotor


def resonance_check(f_excitation: float, modes: Sequence[StructuralMode],
                    margin_fraction: float = 0.2) -> list[ModeVerdict]:
    """Classify each structural mode against the rotor excitation.

    A mode within ``margin_fraction`` of the excitation fails if the rotor
    pattern can excite it, otherwise it only warns (contra-rotating rotors
    cancel in-phase excitation). Activatable modes below the excitation are
    swept through while the rotors spool up, which also earns a warning.
    """
    if not (0 < margin_fraction < 1):
        raise ValueError("margin_fraction must lie in (0, 1)")
    if not (f_excitation > 0):
        raise ValueError("excitation frequency must be positive")
    verdicts = []
    for mode in modes:
        sep = abs(mode.frequency_hz - f_excitation) / f_excitation
        verdict = Verdict.PASS
        notes = []
        if sep < margin_fraction:
            if mode.activatable:
                verdict = Verdict.FAIL
                notes.append("proximity")
            else:
                verdict = Verdict.WARN
                notes.append("proximity-cancelled")
        if mode.activatable and mode.frequency_hz < f_excitation:
            verdict = max(verdict, Verdict.WARN)
            notes.append("spool-up")
        verdicts.append(ModeVerdict(mode, verdict, sep, tuple(notes)))
    return verdicts


def build_sizing_report(geom: RotorGeometry, consts: AeroConstants, omega: float,
                        config: SizingConfig, fuel: FuelSpec,
                        catalog: Sequence[EngineSpec], modes: Sequence[StructuralMode],
                        vehicle_mass_kg: float, resonance_margin: float = 0.2,
                        variant: InflowVariant = DEFAULT_VARIANT) -> SizingReport:
    n = config.rotor_count
    eta = config.transmission_efficiency
    lift = max_total_lift(geom, consts, omega, n, variant)
    mtow = max_takeoff_weight(lift, config.control_margin)
    if vehicle_mass_kg > mtow:
        raise OverweightError(f"mass {vehicle_mass_kg:.2f} kg exceeds MTOW {mtow:.2f} kg")

    hover_pitch = pitch_for_thrust(geom, consts, omega, vehicle_mass_kg * GRAVITY / n, variant)
    hover_sol = solve_rotor(geom, consts, RotorOperatingPoint(omega, hover_pitch), variant)
    hover_rotor_power = n * hover_sol.power

    # engine rating is compared with the rotor-side requirement; eta only
    # enters the fuel burn
    p_req, q_req = required_power_torque(geom, consts, omega, n, 1.0, variant)
    engine = select_engine(catalog, p_req, q_req, omega)
    hours = None
    if engine is not None:
        hours = endurance(fuel, engine.bsfc_g_per_kwh, hover_rotor_power, eta)

    f_exc = excitation_frequency(rads_to_rpm(omega), geom.blade_count)
    return SizingReport(
        max_total_lift_n=lift,
        mtow_kg=mtow,
        vehicle_mass_kg=vehicle_mass_kg,
        hover_pitch_rad=hover_pitch,
        hover_rotor_power_w=hover_rotor_power,
        hover_power_w=hover_rotor_power / eta,
        required_power_w=p_req,
        required_torque_nm=q_req,
        required_shaft_power_w=p_req / eta,
        selected_engine=engine,
        endurance_hours=hours,
        excitation_hz=f_exc,
        resonance_verdicts=resonance_check(f_exc, modes, resonance_margin),
    )
