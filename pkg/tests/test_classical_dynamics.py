"""
Tests for the classical deformed oscillator.
"""

import math

import numpy as np
import pytest

from qdeform.classical_dynamics import (
    FREQUENCY_GRID_LAMBDAS,
    FREQUENCY_GRID_U0S,
    FrequencyLaw,
    Integrator,
    OscState,
    TrajectoryConfig,
    energy_drift,
    frequency_check,
    frequency_scan,
    integrate,
    measure_frequency,
    periods_config,
    predicted_frequency,
)
from qdeform.deform_core import DeformationSpec
from qdeform.errors import IncompatibleStatistics, InsufficientData, NonFiniteState
from tests.input.test_params_classical import ALL_CLASSICAL_TEST_PARAMS


def test_predicted_frequency_example():
    omega = predicted_frequency(DeformationSpec.q_boson(0.5), OscState(2.0, 0.0))
    assert omega == pytest.approx(0.5 * math.cosh(0.75) / math.sinh(0.5), rel=1e-14)
    assert omega == pytest.approx(1.2423, abs=1e-4)


def test_frequency_law_closed_form_matches_spline():
    lam = 0.4
    analytic = FrequencyLaw(DeformationSpec.q_boson(lam))
    table = DeformationSpec.custom(np.asarray([1.0] + [math.sinh(lam * n) / (n * math.sinh(lam)) for n in range(1, 40)]))
    spline = FrequencyLaw(table)
    for u in (5.0, 10.0, 20.0):
        assert spline.energy(u) == pytest.approx(analytic.energy(u), rel=1e-10)
        assert spline.omega(u) == pytest.approx(analytic.omega(u), rel=1e-3)


def test_frequency_law_rejects_fermions():
    with pytest.raises(IncompatibleStatistics):
        FrequencyLaw(DeformationSpec.q_fermion(0.5))


def test_state_validation():
    with pytest.raises(NonFiniteState):
        OscState(float("nan"), 0.0)
    with pytest.raises(ValueError):
        OscState.from_u(-1.0)
    assert OscState.from_u(1.5).q == pytest.approx(2.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(dt=0.0)


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.8, 1.0])
@pytest.mark.parametrize("u0", [-0.4, 0.0, 0.5, 1.0, 2.0, 3.0])
def test_rk4_frequency_law(lam, u0):
    spec = DeformationSpec.q_boson(lam)
    result, _ = frequency_check(spec, OscState.from_u(u0))
    assert result.relative_error < 1e-4


@pytest.mark.parametrize("lam", FREQUENCY_GRID_LAMBDAS)
def test_measured_frequency_increases_with_amplitude(lam):
    results = frequency_scan([lam], [u0 for u0 in FREQUENCY_GRID_U0S if u0 >= 0.0])
    measured = [r.omega_measured for r in results]
    assert np.all(np.diff(measured) > 0.0)
    assert results[0].omega_predicted == pytest.approx(lam / math.sinh(lam), rel=1e-12)


def test_undeformed_limit():
    spec = DeformationSpec.q_boson(1e-8)
    result, traj = frequency_check(spec, OscState.from_u(0.5))
    assert abs(result.omega_measured - 1.0) < 1e-6
    assert traj.to_columns().startswith("# t q p H u")


def test_rk4_energy_drift_small():
    spec = DeformationSpec.q_boson(0.5)
    result, _ = frequency_check(spec, OscState(2.0, 0.0))
    assert result.energy_drift < 1e-10


def test_midpoint_preserves_radius():
    spec = DeformationSpec.q_boson(0.6)
    start = OscState(1.5, 0.5)
    traj = integrate(spec, start, TrajectoryConfig(dt=1e-2, steps=2000, integrator=Integrator.MIDPOINT))
    radius = traj.q**2 + traj.p**2
    assert np.max(np.abs(radius - radius[0])) < 1e-12
    assert energy_drift(traj) < 1e-12


def test_time_reversal():
    spec = DeformationSpec.q_boson(0.5)
    start = OscState(1.2, -0.3)
    cfg = TrajectoryConfig(dt=1e-3, steps=3000)
    forward = integrate(spec, start, cfg)
    back = integrate(spec, forward.final_state, cfg.reversed())
    assert back.final_state.q == pytest.approx(start.q, abs=1e-10)
    assert back.final_state.p == pytest.approx(start.p, abs=1e-10)


def test_measure_needs_two_periods():
    spec = DeformationSpec.q_boson(0.5)
    traj = integrate(spec, OscState(2.0, 0.0), TrajectoryConfig(dt=1e-3, steps=1000))
    with pytest.raises(InsufficientData):
        measure_frequency(traj)


def test_periods_config_covers_requested_periods():
    spec = DeformationSpec.q_boson(0.5)
    start = OscState(2.0, 0.0)
    cfg = periods_config(spec, start, dt=1e-3, periods=2.5)
    omega = predicted_frequency(spec, start)
    assert cfg.steps * cfg.dt * omega >= 2.5 * 2 * math.pi


def test_frequency_scan_grid():
    results = frequency_scan((0.2, 0.6), (0.0, 1.0))
    assert len(results) == 4
    assert all(r.relative_error < 1e-4 for r in results)
    assert [r.lam for r in results] == [0.2, 0.2, 0.6, 0.6]


@pytest.mark.parametrize("params", ALL_CLASSICAL_TEST_PARAMS)
def test_run_classical(params):
    from qdeform.runners import run_classical

    kwargs = {k: v for k, v in params.items() if not k.startswith("_") and k != "tool_name"}
    output = run_classical(**kwargs)
    assert all(c["passed"] for c in output.checks)
    header = "# lam u0" if params.get("scan") else "# t q p H u"
    assert output.columns.startswith(header)


def test_frequency_increases_with_amplitude():
    spec = DeformationSpec.q_boson(0.5)
    omegas = [predicted_frequency(spec, OscState.from_u(u)) for u in np.linspace(0.0, 3.0, 13)]
    assert all(b > a for a, b in zip(omegas, omegas[1:]))
    assert predicted_frequency(DeformationSpec.q_boson(1.0), OscState.from_u(0.0)) == pytest.approx(1.0 / math.sinh(1.0))
