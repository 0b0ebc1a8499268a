import math

import numpy as np
import pytest

from cnotsim.bloch import RegimeInit, TransitionParams, general_solution
from cnotsim.errors import DomainError, StepSizeError
from cnotsim.liouville import (
    DecayParams,
    HamiltonianFrame,
    SimulationTrace,
    hamiltonian_at,
    integrate,
    liouville_rhs,
)
from cnotsim.pulses import Pulse, RegimeSchedule, build_cnot_schedule
from cnotsim.states import DensityMatrix


def single_pulse_schedule(rabi, detuning, duration, spare=1.0):
    pulse = Pulse("square", "sigma_minus", rabi, duration, detuning)
    return RegimeSchedule(
        pulses=((0.0, pulse),),
        tau1=duration,
        tau2=duration + spare / 2,
        end=duration + spare,
    )


def pi_pulse_schedule(rabi=1.0):
    return single_pulse_schedule(rabi, 0.0, math.pi / rabi)


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------


def test_decay_params_validation():
    with pytest.raises(DomainError):
        DecayParams(np.full((4, 4), -1.0))
    asym = np.zeros((4, 4))
    asym[0, 1] = 1.0
    with pytest.raises(DomainError):
        DecayParams(asym)
    d = DecayParams.from_times(2.0, 4.0)
    assert d.gamma[0, 0] == 0.5
    assert d.gamma[0, 1] == 0.25
    assert np.allclose(DecayParams.from_times().gamma, 0.0)


def test_hamiltonian_frame_band_sparsity():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 2] = m[2, 0] = 0.5
    with pytest.raises(DomainError):
        HamiltonianFrame(m)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 0.5
    with pytest.raises(DomainError):
        HamiltonianFrame(m)  # not Hermitian


# ---------------------------------------------------------------------------
# hamiltonian_at
# ---------------------------------------------------------------------------


def test_hamiltonian_square_coupling():
    sched = single_pulse_schedule(2.0, 0.3, 1.0)
    h = hamiltonian_at(0.5, sched).matrix
    assert h[0, 1] == pytest.approx(-1.0)
    assert h[1, 0] == pytest.approx(-1.0)
    assert h[1, 1] == pytest.approx(0.3)
    assert np.count_nonzero(h) == 3


def test_hamiltonian_off_window_is_zero():
    sched = single_pulse_schedule(2.0, 0.3, 1.0)
    assert np.count_nonzero(hamiltonian_at(1.5, sched).matrix) == 0


def test_hamiltonian_boundary_belongs_to_earlier_window():
    sched = build_cnot_schedule(math.pi / 3, math.pi / 4, 2)
    h = hamiltonian_at(sched.tau1, sched).matrix
    assert h[0, 1] != 0  # still the first-regime coupling at t = tau1
    assert h[1, 2] == 0
    h2 = hamiltonian_at(sched.tau2, sched).matrix
    assert h2[1, 2] != 0
    assert h2[2, 3] == 0


def test_hamiltonian_outside_schedule():
    sched = single_pulse_schedule(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        hamiltonian_at(-0.1, sched)
    with pytest.raises(DomainError):
        hamiltonian_at(sched.end + 0.1, sched)


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------


def test_rhs_stationary_state():
    rho = DensityMatrix.maximally_mixed()
    h = HamiltonianFrame(np.diag([0.0, 1.0, 2.0, 3.0]).astype(complex))
    out = liouville_rhs(rho, h, DecayParams.zero())
    assert np.max(np.abs(out)) == 0.0


def test_rhs_pure_decay():
    rho = DensityMatrix.maximally_mixed()
    decay = DecayParams(np.full((4, 4), 0.7))
    out = liouville_rhs(rho, HamiltonianFrame(np.zeros((4, 4), complex)), decay)
    np.testing.assert_allclose(out, -0.7 * rho.matrix, atol=1e-15)


def test_population_grows_quadratically():
    # d(rho11)/dt = 0 at t = 0 and rho11 ~ (Omega^2/4) t^2 for short drives.
    om = 1.3
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = h[1, 0] = -om / 2.0
    rho = DensityMatrix.ground()
    out = liouville_rhs(rho, HamiltonianFrame(h), DecayParams.zero())
    assert out[1, 1] == pytest.approx(0.0, abs=1e-15)
    sched = single_pulse_schedule(om, 0.0, 0.05)
    tr = integrate(rho, sched, DecayParams.zero(), 0.005, t_stop=0.05)
    expected = om**2 * 0.05**2 / 4.0
    assert tr.populations[-1][1] == pytest.approx(expected, rel=1e-3)


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------


def test_zero_amplitude_schedule_is_constant():
    pulse = Pulse("square", "sigma_minus", 0.0, 1.0)
    sched = RegimeSchedule(pulses=((0.0, pulse),), tau1=1.0, tau2=1.5, end=2.0)
    rho0 = DensityMatrix(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex))
    tr = integrate(rho0, sched, DecayParams.zero(), 0.05)
    assert np.max(np.abs(tr.states - rho0.matrix)) < 1e-14


def test_pi_pulse_inversion():
    sched = pi_pulse_schedule()
    tr = integrate(DensityMatrix.ground(), sched, DecayParams.zero(), 0.005, t_stop=sched.tau1)
    assert tr.populations[-1][1] == pytest.approx(1.0, abs=1e-6)


def test_richardson_halving():
    sched = pi_pulse_schedule()
    period = 2 * math.pi
    t_end = sched.tau1
    a = integrate(DensityMatrix.ground(), sched, DecayParams.zero(), period / 1200, t_stop=t_end)
    b = integrate(DensityMatrix.ground(), sched, DecayParams.zero(), period / 2400, t_stop=t_end)
    assert np.max(np.abs(a.states[-1] - b.states[-1])) < 1e-8


def test_fourth_order_convergence():
    sched = pi_pulse_schedule()
    period = 2 * math.pi
    exact = np.zeros((4, 4), dtype=complex)
    exact[1, 1] = 1.0
    errors = []
    for n in (64, 128, 256):
        tr = integrate(
            DensityMatrix.ground(), sched, DecayParams.zero(), period / n, t_stop=sched.tau1
        )
        errors.append(np.max(np.abs(tr.states[-1] - exact)))
    for coarse, fine in zip(errors, errors[1:]):
        assert 13.0 <= coarse / fine <= 19.0


def test_hermiticity_and_trace_conservation():
    # Ten Rabi periods, undamped.
    sched = single_pulse_schedule(1.0, 0.0, 10 * 2 * math.pi)
    tr = integrate(
        DensityMatrix.ground(), sched, DecayParams.zero(), 2 * math.pi / 500, t_stop=sched.tau1
    )
    herm = np.max(np.abs(tr.states - np.conj(np.transpose(tr.states, (0, 2, 1)))))
    assert herm < 1e-10
    traces = tr.populations.sum(axis=1)
    assert np.max(np.abs(traces - 1.0)) < 1e-9


def test_trace_nonincreasing_with_decay():
    sched = single_pulse_schedule(1.0, 0.2, 4 * math.pi)
    tr = integrate(
        DensityMatrix.ground(), sched, DecayParams.from_times(30.0, 30.0), 0.01
    )
    traces = tr.populations.sum(axis=1)
    assert np.all(np.diff(traces) <= 1e-12)
    assert traces[-1] < 1.0


def test_oracle_matches_closed_form():
    # Same equations, two routes: direct integration against the damped
    # rotation form, on a handful of random single-regime problems.
    rng = np.random.default_rng(5)
    for _ in range(10):
        om = rng.uniform(0.5, 2.0)
        de = rng.uniform(-1.0, 1.0)
        big_t = rng.uniform(20.0, 200.0) / om
        b = math.hypot(om, de)
        dur = 2 * 2 * math.pi / b
        sched = single_pulse_schedule(om, de, dur)
        u0, v0 = rng.uniform(-0.4, 0.4, 2)
        w0 = rng.uniform(-1.0, -0.2)
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = (1 - w0) / 2
        rho[1, 1] = (1 + w0) / 2
        rho[0, 1] = (u0 + 1j * v0) / 2
        rho[1, 0] = (u0 - 1j * v0) / 2
        params = TransitionParams(om, de, big_t, big_t)
        init = RegimeInit(u0, v0, w0)
        tr = integrate(
            DensityMatrix(rho),
            sched,
            DecayParams.from_times(big_t, big_t),
            2 * math.pi / b / 400,
            stride=13,
            t_stop=dur,
        )
        uvw = tr.bloch((0, 1))
        for k, t in enumerate(tr.times):
            ref = general_solution(params, init, float(t))
            err = np.max(np.abs(uvw[k] - ref.as_array()))
            assert err < 1e-6


def test_step_size_gate():
    sched = pi_pulse_schedule()
    with pytest.raises(StepSizeError):
        integrate(DensityMatrix.ground(), sched, DecayParams.zero(), 2 * math.pi / 10)
    with pytest.raises(StepSizeError):
        integrate(DensityMatrix.ground(), sched, DecayParams.zero(), -0.1)


def test_record_times_are_exact():
    sched = pi_pulse_schedule()
    marks = (0.3, 1.1, 2.0)
    tr = integrate(
        DensityMatrix.ground(),
        sched,
        DecayParams.zero(),
        0.01,
        stride=10**9,
        record_times=marks,
    )
    for t in marks:
        state = tr.state_at(t)
        assert state.populations[1] == pytest.approx(math.sin(t / 2) ** 2, abs=1e-8)
    with pytest.raises(DomainError):
        tr.state_at(0.123456)


def test_areas_accumulate_along_trace():
    sched = build_cnot_schedule(math.pi / 3, math.pi / 4, 2)
    tr = integrate(DensityMatrix.ground(), sched, DecayParams.zero(), 0.01, stride=5)
    assert tr.areas[0] == 0.0
    assert np.all(np.diff(tr.areas) >= -1e-12)
    assert tr.areas[-1] == pytest.approx(math.pi / 3 + math.pi / 4 + 2 * math.pi / 2, abs=1e-9)


def test_trace_helpers():
    sched = pi_pulse_schedule()
    tr = integrate(DensityMatrix.ground(), sched, DecayParams.zero(), 0.01, t_stop=1.0)
    assert isinstance(tr, SimulationTrace)
    assert tr.final_state.trace == pytest.approx(1.0, abs=1e-9)
    uvw = tr.bloch((0, 1))
    assert uvw.shape[1] == 3
    with pytest.raises(DomainError):
        tr.bloch((0, 2))
