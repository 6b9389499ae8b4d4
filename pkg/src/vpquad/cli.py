"""Command-line front end.

Exit status: 0 success, 1 invalid input, 2 infeasible design request,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import aero, config, control, sim, sizing
from .errors import InfeasibleError, NumericalError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3

CURVE_COLUMNS = ("theta_deg", "thrust_n", "power_w", "torque_nm", "ct", "cp", "lambda")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _positive(name, value):
    if not (value > 0) or not math.isfinite(value):
        raise ValueError(f"{name} must be positive, got {value}")


def _emit(pairs):
    for k, v in pairs:
        print(f"{k}={v}")


def cmd_curves(args) -> int:
    _positive("--rpm", args.rpm)
    _positive("--step", args.step)
    variant = config.parse_variant(args.variant) if args.variant else None
    veh = config.load_vehicle(args.vehicle, variant)
    rows = aero.sweep_curves(veh.geom, veh.consts, aero.rpm_to_rads(args.rpm),
                             math.radians(args.theta_min), math.radians(args.theta_max),
                             math.radians(args.step), veh.variant)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_COLUMNS)
        for r in rows:
            w.writerow([f"{v:.9g}" for v in (math.degrees(r.theta), r.thrust, r.power,
                                               r.torque, r.ct, r.cp, r.inflow)])
    _emit([("rows", len(rows)), ("solidity", f"{veh.geom.solidity:.6f}")])
    return EXIT_OK


def cmd_size(args) -> int:
    veh = config.load_vehicle(args.vehicle)
    catalog = config.load_engines(args.engines)
    modes = config.load_modes(args.modes)
    report = sizing.build_sizing_report(
        veh.geom, veh.consts, veh.omega, veh.sizing_config(args.margin), veh.fuel,
        catalog, modes, veh.mtow_kg, args.band, veh.variant)
    pairs = report.lines()
    _emit(pairs)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("key", "value"))
            w.writerows(pairs)
    if report.selected_engine is None:
        print("error: no engine in the catalog meets the power and torque requirement",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_gains(args) -> int:
    for name in ("inertia", "zeta", "omega_n"):
        _positive("--" + name.replace("_", "-"), getattr(args, name))
    g = control.synthesize_pd(control.AxisSpec(args.inertia, args.zeta, args.omega_n))
    _emit([("kp", f"{g.kp:.3f}"), ("kd", f"{g.kd:.3f}")])
    return EXIT_OK


def cmd_vibration(args) -> int:
    _positive("--rpm", args.rpm)
    if args.blades < 1:
        raise ValueError("--blades must be >= 1")
    modes = config.load_modes(args.modes)
    f_exc = sizing.excitation_frequency(args.rpm, args.blades)
    verdicts = sizing.resonance_check(f_exc, modes, args.band)
    print(f"excitation_hz={f_exc:.2f}")
    for v in verdicts:
        notes = ",".join(v.notes) or "-"
        print(f"mode[{v.mode.name}]={v.verdict.name} frequency_hz={v.mode.frequency_hz:.2f} "
              f"separation={v.separation:.3f} notes={notes}")
    if any(v.verdict is sizing.Verdict.FAIL for v in verdicts):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_endurance(args) -> int:
    for flag, val in (("--fuel-l", args.fuel_l), ("--density", args.density),
                      ("--bsfc", args.bsfc), ("--power-w", args.power_w), ("--eta", args.eta)):
        _positive(flag, val)
    if args.eta > 1:
        raise ValueError("--eta must not exceed 1")
    hours = sizing.endurance(sizing.FuelSpec(args.fuel_l, args.density), args.bsfc,
                             args.power_w, args.eta)
    print(f"endurance_hours={hours:.2f}")
    return EXIT_OK


def _first_step(log_: sim.SimLog, channel: str):
    ref = log_[f"{channel}_ref_rad"]
    changed = np.nonzero(np.diff(ref) != 0)[0]
    if len(changed) == 0:
        raise ValueError(f"no reference step on channel {channel!r}")
    i = changed[0] + 1
    return float(log_["time_s"][i]), float(ref[i] - ref[i - 1])


def cmd_simulate(args) -> int:
    veh = config.load_vehicle(args.vehicle)
    model = veh.build_model()
    scenario = config.load_scenario(args.scenario, veh.governor_rpm)
    result = sim.run_scenario(model, scenario)
    result.to_csv(args.out)
    print(f"records={len(result)}")
    if args.metrics:
        if args.metrics not in sim.AXES:
            raise ValueError(f"--metrics must be one of {', '.join(sim.AXES)}")
        t_step, delta = _first_step(result, args.metrics)
        m = sim.step_metrics(result, args.metrics, t_step, delta)
        _emit([("step_time_s", f"{t_step:.3f}"), ("overshoot", f"{m.overshoot:.4f}"),
               ("settling_time_s", f"{m.settling_time:.3f}"),
               ("steady_state_error", f"{m.steady_state_error:.3e}")])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vpquad", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("curves", help="thrust/power/torque vs. collective pitch")
    c.add_argument("--vehicle", help="vehicle file (default: shipped reference vehicle)")
    c.add_argument("--rpm", type=float, required=True)
    c.add_argument("--theta-min", type=float, required=True, help="deg")
    c.add_argument("--theta-max", type=float, required=True, help="deg")
    c.add_argument("--step", type=float, required=True, help="deg")
    c.add_argument("--variant", choices=("printed", "consistent"))
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curves)

    s = sub.add_parser("size", help="lift, MTOW, engine choice, endurance, vibration")
    s.add_argument("--vehicle")
    s.add_argument("--engines")
    s.add_argument("--modes")
    s.add_argument("--margin", type=float, help="control margin fraction (default 0.5)")
    s.add_argument("--band", type=float, default=0.2, help="resonance band fraction")
    s.add_argument("--out", help="also write the report as key,value CSV")
    s.set_defaults(func=cmd_size)

    g = sub.add_parser("gains", help="PD gains from second-order damping and frequency")
    g.add_argument("--inertia", type=float, required=True, help="kg m^2")
    g.add_argument("--zeta", type=float, required=True)
    g.add_argument("--omega-n", type=float, required=True, help="rad/s")
    g.set_defaults(func=cmd_gains)

    v = sub.add_parser("vibration", help="n-per-rev excitation vs. structural modes")
    v.add_argument("--rpm", type=float, required=True)
    v.add_argument("--blades", type=int, required=True)
    v.add_argument("--modes")
    v.add_argument("--band", type=float, default=0.2)
    v.set_defaults(func=cmd_vibration)

    e = sub.add_parser("endurance", help="fuel-limited flight time")
    e.add_argument("--fuel-l", type=float, required=True)
    e.add_argument("--density", type=float, required=True, help="g/L")
    e.add_argument("--bsfc", type=float, required=True, help="g/kWh")
    e.add_argument("--power-w", type=float, required=True, help="power at the rotors")
    e.add_argument("--eta", type=float, required=True, help="transmission efficiency")
    e.set_defaults(func=cmd_endurance)

    m = sub.add_parser("simulate", help="closed-loop scenario simulation")
    m.add_argument("--vehicle")
    m.add_argument("--scenario", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--metrics", help="roll | pitch | yaw")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
