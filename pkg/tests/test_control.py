import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from vpquad.aero import AeroConstants, RotorOperatingPoint, solve_rotor
from vpquad.control import (
    AxisSpec,
    GovernorSpec,
    PdGains,
    allocate,
    build_allocation_jacobian,
    build_mixer,
    governor_step,
    pd_torque,
    rotor_positions,
    synthesize_pd,
)
from vpquad.errors import SingularJacobian

GAIN_TABLE = [  # inertia, kp, kd
    (0.43, 21.1, 4.8),
    (0.43, 21.1, 4.8),
    (0.67, 32.8, 7.5),
]


def analytic_dthrust_dpitch(geom, consts, omega, theta):
    """d(thrust)/d(theta) differentiated by hand from the closed form."""
    sa = geom.solidity * consts.a
    k = 64.0 / 3.0
    dlam = k / (32.0 * math.sqrt(1.0 + k * theta / sa))
    dct = sa / 2.0 * (1.0 / 3.0 - dlam / 2.0)
    return dct * consts.rho * geom.disk_area * (omega * geom.radius) ** 2


@pytest.fixture(scope="module")
def mixer(vehicle):
    return vehicle.mixer


class TestGains:
    @pytest.mark.parametrize("inertia,kp,kd", GAIN_TABLE)
    def test_table_values(self, inertia, kp, kd):
        g = synthesize_pd(AxisSpec(inertia, 0.8, 7.0))
        assert abs(g.kp - kp) <= 0.05
        assert abs(g.kd - kd) <= 0.05

    def test_unrounded(self):
        g = synthesize_pd(AxisSpec(0.43, 0.8, 7.0))
        assert (g.kp, g.kd) == pytest.approx((21.07, 4.816), abs=1e-12)
        g = synthesize_pd(AxisSpec(0.67, 0.8, 7.0))
        assert (g.kp, g.kd) == pytest.approx((32.83, 7.504), abs=1e-12)

    def test_unit(self):
        g = synthesize_pd(AxisSpec(1.0, 0.5, 1.0))
        assert (g.kp, g.kd) == (1.0, 1.0)

    @given(st.floats(0.01, 10), st.floats(0.05, 2), st.floats(0.1, 50))
    def test_characteristic_polynomial(self, inertia, zeta, wn):
        g = synthesize_pd(AxisSpec(inertia, zeta, wn))
        assert math.isclose(g.kd / inertia, 2 * zeta * wn, rel_tol=1e-14)
        assert math.isclose(g.kp / inertia, wn**2, rel_tol=1e-14)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            AxisSpec(0.43, 2.5, 7.0)
        with pytest.raises(ValueError):
            AxisSpec(0.0, 0.8, 7.0)


class TestPdLaw:
    def test_zero(self):
        assert pd_torque(PdGains(21.1, 4.8), 0.0, 0.0) == 0.0

    def test_proportional(self):
        assert pd_torque(PdGains(21.1, 4.8), 0.1, 0.0) == pytest.approx(2.11)

    def test_damping(self):
        assert pd_torque(PdGains(21.1, 4.8), 0.0, 1.0) == -4.8


class TestGovernor:
    spec = GovernorSpec(261.8, 0.5)

    def test_fixed_point(self):
        assert governor_step(self.spec, 261.8, 0.01) == 261.8

    def test_one_time_constant(self):
        assert governor_step(self.spec, 0.0, 0.5) == pytest.approx(261.8 * (1 - math.exp(-1)))
        assert governor_step(self.spec, 0.0, 0.5) == pytest.approx(165.5, abs=0.05)

    def test_asymptote(self):
        assert abs(governor_step(self.spec, 0.0, 50.0) - 261.8) <= 1e-9

    @given(st.floats(0, 600), st.floats(1e-4, 1.0))
    def test_contracts(self, omega, dt):
        if omega == self.spec.omega_ref:
            return
        new = governor_step(self.spec, omega, dt)
        assert abs(new - self.spec.omega_ref) < abs(omega - self.spec.omega_ref)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            governor_step(self.spec, 0.0, 0.0)


class TestJacobian:
    def test_structure(self, mixer):
        jac = mixer.jacobian
        assert np.all(jac[0] == jac[0, 0])
        assert np.array_equal(np.sign(jac[3]), np.array(mixer.spin, dtype=float))

    def test_thrust_slope_against_analytic(self, geom, consts, omega):
        theta0 = math.radians(9.5)
        jac = build_allocation_jacobian(geom, consts, omega, 0.6, theta0)
        expected = analytic_dthrust_dpitch(geom, consts, omega, theta0)
        assert jac[0, 0] == pytest.approx(expected, rel=1e-6)
        assert 170 <= jac[0, 0] <= 200

    def test_moment_arms(self, mixer):
        d = mixer.arm_length / math.sqrt(2)
        assert np.allclose(np.abs(mixer.jacobian[1:3]), d * mixer.jacobian[0, 0], rtol=1e-14)

    def test_spin_must_alternate(self, geom, consts, omega):
        with pytest.raises(ValueError):
            build_allocation_jacobian(geom, consts, omega, 0.6, 0.15, spin=(1, 1, -1, -1))

    def test_singular_when_no_torque_slope(self, geom, consts, omega):
        # constant drag and zero pitch: dQ/dtheta vanishes, so no yaw authority
        flat = AeroConstants(kappa=1.0, beta1=0.0, beta2=0.0)
        with pytest.raises(SingularJacobian):
            build_allocation_jacobian(geom, flat, omega, 0.6, 0.0)


class TestAllocate:
    def test_hover_point(self, mixer):
        theta = allocate(mixer, mixer.hover_thrust_total, (0.0, 0.0, 0.0))
        assert np.all(theta == mixer.hover_pitch)

    def test_pure_yaw_antisymmetric(self, mixer):
        dtheta = allocate(mixer, mixer.hover_thrust_total, (0.0, 0.0, 1.0)) - mixer.hover_pitch
        spin = np.array(mixer.spin)
        ccw, cw = dtheta[spin > 0], dtheta[spin < 0]
        assert np.allclose(ccw, -cw, atol=1e-15)
        assert np.allclose(ccw, ccw[0], atol=1e-15)

    @given(st.floats(-20, 20), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_round_trip(self, vehicle, dthrust, tx, ty, tz):
        m = vehicle.mixer
        w = np.array([dthrust, tx, ty, tz])
        unsat = m.hover_pitch + m.jacobian_inv @ w
        assume(np.all(unsat <= m.geom.pitch_max) and np.all(unsat >= m.geom.pitch_min))
        theta = allocate(m, m.hover_thrust_total + dthrust, (tx, ty, tz))
        assert np.allclose(m.jacobian @ (theta - m.hover_pitch), w, atol=1e-9)

    def test_yaw_authority_limited_by_headroom(self, mixer):
        # dQ/dtheta is small, so a few N m of yaw already reaches pitch_max
        theta = allocate(mixer, mixer.hover_thrust_total, (0.0, 0.0, 3.0))
        assert np.isclose(theta.max(), mixer.geom.pitch_max)
        w = mixer.jacobian @ (theta - mixer.hover_pitch)
        assert 2.0 < w[3] < 3.0

    def test_saturation_keeps_thrust(self, mixer):
        theta = allocate(mixer, mixer.hover_thrust_total, (200.0, 0.0, 50.0))
        g = mixer.geom
        assert np.all(theta <= g.pitch_max + 1e-15) and np.all(theta >= g.pitch_min - 1e-15)
        w = mixer.jacobian @ (theta - mixer.hover_pitch)
        assert abs(w[0]) <= 1e-9
        assert 0 < w[1] < 200.0
        assert abs(w[3]) <= 1e-9  # roll consumed the authority, yaw shed first

    def test_yaw_scaled_before_roll(self, mixer):
        theta = allocate(mixer, mixer.hover_thrust_total, (10.0, 0.0, 500.0))
        w = mixer.jacobian @ (theta - mixer.hover_pitch)
        assert w[1] == pytest.approx(10.0, abs=1e-9)
        assert 0 < w[3] < 500.0

    def test_yaw_authority_symmetry(self, geom, consts, omega, mixer):
        spin = np.array(mixer.spin)
        pos = rotor_positions(mixer.arm_length)
        bump = 0.02

        def yaw_torque(theta):
            q = [solve_rotor(geom, consts, RotorOperatingPoint(omega, t)).torque for t in theta]
            return float(np.dot(spin, q))

        base = np.full(4, mixer.hover_pitch)
        ccw = yaw_torque(base + bump * (spin > 0))
        cw = yaw_torque(base + bump * (spin < 0))
        assert ccw > 0
        assert ccw == pytest.approx(-cw, rel=1e-12)
        assert pos.shape == (4, 2)


def test_build_mixer_hover_thrust(geom, consts, omega):
    m = build_mixer(geom, consts, omega, 0.6, 0.15)
    t = solve_rotor(geom, consts, RotorOperatingPoint(omega, 0.15)).thrust
    assert m.hover_thrust_total == 4 * t
    assert np.allclose(m.jacobian @ m.jacobian_inv, np.eye(4), atol=1e-12)
