"""Design and analysis toolkit for variable-pitch, engine-driven quadrotors."""

from .aero import (
    AeroConstants,
    InflowVariant,
    RotorGeometry,
    RotorOperatingPoint,
    RotorSolution,
    calibrate_solidity,
    ideal_hover_power,
    pitch_for_thrust,
    solve_rotor,
    sweep_curves,
)
from .control import AxisSpec, GovernorSpec, PdGains, allocate, build_mixer, synthesize_pd
from .sim import Scenario, Segment, SimState, VehicleModel, build_vehicle, run_scenario
from .sizing import EngineSpec, FuelSpec, SizingConfig, StructuralMode, build_sizing_report

__version__ = "0.1.0"
