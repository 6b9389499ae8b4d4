"""YAML loaders for vehicle, engine catalog, structural mode and scenario files.

Files carry degrees and RPM; everything returned is in radians and rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .aero import (
    AeroConstants,
    InflowVariant,
    RotorGeometry,
    calibrated_geometry,
    rpm_to_rads,
)
from .sim import Disturbance, Scenario, Segment, SimState, VehicleModel, build_vehicle, quat_from_euler
from .sizing import EngineSpec, FuelSpec, SizingConfig, StructuralMode

ENGINE_KEYS = ("name", "displacement_cc", "max_power_w", "max_torque_nm",
               "bsfc_g_per_kwh", "rpm_min", "rpm_max")


class ConfigError(ValueError):
    """Malformed or inconsistent input file."""


def data_path(name: str) -> Path:
    """Path of a file shipped in the package ``data`` directory."""
    return Path(str(resources.files("vpquad") / "data" / name))


def _read(path) -> Any:
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc


def _section(doc, key, where) -> dict:
    val = doc.get(key) if isinstance(doc, dict) else None
    if not isinstance(val, dict):
        raise ConfigError(f"{where}: missing section {key!r}")
    return val


def _num(sec: dict, key: str, where: str, default=None) -> float:
    if key not in sec:
        if default is not None:
            return default
        raise ConfigError(f"{where}: missing key {key!r}")
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key}: expected a number, got {val!r}")
    return float(val)


def parse_variant(name: str) -> InflowVariant:
    try:
        return InflowVariant(name)
    except ValueError:
        raise ConfigError(f"unknown inflow variant {name!r} (use 'printed' or 'consistent')")


@dataclass(frozen=True)
class VehicleConfig:
    geom: RotorGeometry
    consts: AeroConstants
    variant: InflowVariant
    mass_kg: float
    mtow_kg: float
    rotor_count: int
    arm_length_m: float
    inertia: tuple[float, float, float]
    eta: float
    zeta: float
    omega_n: float
    governor_rpm: float
    governor_tau_s: float
    fuel: FuelSpec

    @property
    def omega(self) -> float:
        return rpm_to_rads(self.governor_rpm)

    def sizing_config(self, margin: Optional[float] = None) -> SizingConfig:
        kw = {} if margin is None else {"control_margin": margin}
        return SizingConfig(rotor_count=self.rotor_count, transmission_efficiency=self.eta, **kw)

    def build_model(self) -> VehicleModel:
        if self.rotor_count != 4:
            raise ConfigError("simulation supports rotor_count = 4 only")
        return build_vehicle(self.geom, self.consts, self.mass_kg, self.inertia,
                             self.arm_length_m, self.omega, self.zeta, self.omega_n,
                             self.governor_tau_s, variant=self.variant)


def load_vehicle(path=None, variant: Optional[InflowVariant] = None) -> VehicleConfig:
    """Parse a vehicle file; calibrates solidity when an anchor is given.

    ``variant`` overrides the file's inflow variant (and the calibration is
    redone under it).
    """
    path = data_path("reference_vehicle.yaml") if path is None else path
    doc = _read(path)
    where = str(path)
    rotor = _section(doc, "rotor", where)
    aero = _section(doc, "aero", where)
    veh = _section(doc, "vehicle", where)
    ctl = _section(doc, "control", where)
    fuel = _section(doc, "fuel", where)
    try:
        consts = AeroConstants(*(_num(aero, k, where + ".aero")
                                 for k in ("a", "kappa", "beta0", "beta1", "beta2", "rho")))
        if variant is None:
            variant = parse_variant(rotor.get("variant", "consistent"))
        limits = rotor.get("pitch_limits_deg", [-14.0, 14.0])
        if not (isinstance(limits, list) and len(limits) == 2):
            raise ConfigError(f"{where}.rotor.pitch_limits_deg: expected [min, max]")
        governor_rpm = _num(ctl, "governor_rpm", where + ".control")
        if not governor_rpm > 0:
            raise ConfigError(f"{where}.control.governor_rpm must be positive")
        base = dict(radius=_num(rotor, "radius_m", where + ".rotor"),
                    blade_count=int(_num(rotor, "blade_count", where + ".rotor", 2)),
                    pitch_min=math.radians(float(limits[0])),
                    pitch_max=math.radians(float(limits[1])))
        if "solidity" in rotor:
            geom = RotorGeometry(solidity=_num(rotor, "solidity", where + ".rotor"), **base)
        elif isinstance(rotor.get("calibration"), dict):
            cal = rotor["calibration"]
            cw = where + ".rotor.calibration"
            geom = calibrated_geometry(
                RotorGeometry(**base), consts,
                rpm_to_rads(_num(cal, "rpm", cw, governor_rpm)),
                math.radians(_num(cal, "theta_deg", cw)), _num(cal, "thrust_n", cw), variant)
        else:
            raise ConfigError(f"{where}.rotor: give either 'solidity' or 'calibration'")
        inertia = _section(veh, "inertia_kg_m2", where + ".vehicle")
        cfg = VehicleConfig(
            geom=geom, consts=consts, variant=variant,
            mass_kg=_num(veh, "mass_kg", where + ".vehicle"),
            mtow_kg=_num(veh, "mtow_kg", where + ".vehicle"),
            rotor_count=int(_num(veh, "rotor_count", where + ".vehicle")),
            arm_length_m=_num(veh, "arm_length_m", where + ".vehicle", 0.6),
            inertia=tuple(_num(inertia, k, where + ".vehicle.inertia_kg_m2")
                          for k in ("ixx", "iyy", "izz")),
            eta=_num(veh, "eta_transmission", where + ".vehicle"),
            zeta=_num(ctl, "zeta", where + ".control"),
            omega_n=_num(ctl, "omega_n", where + ".control"),
            governor_rpm=governor_rpm,
            governor_tau_s=_num(ctl, "governor_tau_s", where + ".control", 0.5),
            fuel=FuelSpec(_num(fuel, "tank_l", where + ".fuel"),
                          _num(fuel, "density_g_per_l", where + ".fuel")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if cfg.mass_kg <= 0 or cfg.mtow_kg <= 0 or min(cfg.inertia) <= 0:
        raise ConfigError(f"{where}: masses and inertias must be positive")
    if not (0 < cfg.eta <= 1):
        raise ConfigError(f"{where}.vehicle.eta_transmission must lie in (0, 1]")
    return cfg


def load_engines(path=None) -> list[EngineSpec]:
    path = data_path("engines.yaml") if path is None else path
    doc = _read(path)
    recs = doc.get("engines") if isinstance(doc, dict) else None
    if recs is None:
        recs = []
    if not isinstance(recs, list):
        raise ConfigError(f"{path}: 'engines' must be a list")
    out = []
    for i, rec in enumerate(recs):
        where = f"{path}: engines[{i}]"
        if not isinstance(rec, dict) or set(rec) != set(ENGINE_KEYS):
            raise ConfigError(f"{where}: keys must be exactly {', '.join(ENGINE_KEYS)}")
        try:
            out.append(EngineSpec(str(rec["name"]),
                                  *(_num(rec, k, where) for k in ENGINE_KEYS[1:])))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return out


def load_modes(path=None) -> list[StructuralMode]:
    path = data_path("modes.yaml") if path is None else path
    doc = _read(path)
    recs = doc.get("modes") if isinstance(doc, dict) else None
    if recs is None:
        recs = []
    if not isinstance(recs, list):
        raise ConfigError(f"{path}: 'modes' must be a list")
    out = []
    for i, rec in enumerate(recs):
        where = f"{path}: modes[{i}]"
        if not isinstance(rec, dict) or not {"mode_name", "frequency_hz", "activatable"} <= set(rec):
            raise ConfigError(f"{where}: needs mode_name, frequency_hz, activatable")
        if not isinstance(rec["activatable"], bool):
            raise ConfigError(f"{where}: activatable must be true or false")
        try:
            out.append(StructuralMode(str(rec["mode_name"]), _num(rec, "frequency_hz", where),
                                      rec["activatable"]))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return out


def load_scenario(path, default_rpm: float) -> Scenario:
    """Parse a scenario; the initial state defaults to level hover at ``default_rpm``."""
    doc = _read(path)
    where = str(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected a mapping")
    segs = doc.get("segments")
    if not isinstance(segs, list) or not segs:
        raise ConfigError(f"{where}: 'segments' must be a non-empty list")
    try:
        segments = []
        for i, s in enumerate(segs):
            sw = f"{where}.segments[{i}]"
            if not isinstance(s, dict):
                raise ConfigError(f"{sw}: expected a mapping")
            segments.append(Segment(
                start=_num(s, "start_s", sw),
                roll=math.radians(_num(s, "roll_deg", sw, 0.0)),
                pitch=math.radians(_num(s, "pitch_deg", sw, 0.0)),
                yaw=math.radians(_num(s, "yaw_deg", sw, 0.0)),
                thrust=_num(s, "thrust_n", sw) if "thrust_n" in s else None,
            ))
        dist = []
        for i, d in enumerate(doc.get("disturbances") or []):
            dw = f"{where}.disturbances[{i}]"
            if not isinstance(d, dict):
                raise ConfigError(f"{dw}: expected a mapping")
            dist.append(Disturbance(_num(d, "time_s", dw), str(d.get("axis")),
                                    _num(d, "impulse_nms", dw)))
        init = doc.get("initial") or {}
        if not isinstance(init, dict):
            raise ConfigError(f"{where}.initial: expected a mapping")
        iw = where + ".initial"
        rates = init.get("rates_dps", [0.0, 0.0, 0.0])
        if not (isinstance(rates, list) and len(rates) == 3):
            raise ConfigError(f"{iw}.rates_dps: expected [p, q, r]")
        rpm = _num(init, "rpm", iw, default_rpm)
        if not rpm > 0:
            raise ConfigError(f"{iw}.rpm must be positive")
        initial = SimState(
            quat_from_euler(*(math.radians(_num(init, k, iw, 0.0))
                              for k in ("roll_deg", "pitch_deg", "yaw_deg"))),
            np.radians(np.array(rates, dtype=float)),
            _num(init, "altitude_m", iw, 0.0), _num(init, "vz_mps", iw, 0.0),
            rpm_to_rads(rpm), 0.0)
        return Scenario(duration=_num(doc, "duration_s", where), dt=_num(doc, "dt_s", where),
                        segments=tuple(segments), disturbances=tuple(dist), initial=initial)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
