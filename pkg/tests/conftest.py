import math

import pytest

from vpquad.aero import AeroConstants, RotorGeometry, calibrated_geometry, rpm_to_rads
from vpquad.sim import build_vehicle

OMEGA_2500 = rpm_to_rads(2500)
THETA_14 = math.radians(14.0)

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def consts():
    return AeroConstants()


@pytest.fixture(scope="session")
def omega():
    return OMEGA_2500


@pytest.fixture(scope="session")
def geom(consts):
    """800 mm rotor with solidity anchored to 39 N at 14 deg, 2500 RPM."""
    return calibrated_geometry(RotorGeometry(radius=0.4), consts, OMEGA_2500, THETA_14, 39.0)


@pytest.fixture(scope="session")
def vehicle(geom, consts):
    return build_vehicle(geom, consts, 10.0, (0.43, 0.43, 0.67), 0.6, OMEGA_2500)


@pytest.fixture(scope="session")
def acceptance_report():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
