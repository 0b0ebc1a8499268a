"""Brute-force integration of the full 4x4 equations of motion.

The state evolves as

    drho/dt = -i [H(t), rho] - Gamma o rho

where H(t) is the piecewise pulse Hamiltonian in the rotating frame
(diagonal detunings plus the active coupling, in angular-frequency units)
and "o" is an elementwise product with a symmetric non-negative rate
matrix.  The elementwise decay damps diagonals at roughly 1/T1 and
coherences at roughly 1/T2; it is deliberately not trace preserving, and
no renormalization is ever applied.

Integration is classic fixed-step fourth order.  Steps are aligned to
pulse-window boundaries so each step sees a smooth Hamiltonian, which
keeps the scheme at full order and makes runs bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailureError, StepSizeError
from .pulses import RegimeSchedule
from .states import COUPLED_TRANSITIONS, DensityMatrix

HERMITICITY_FAIL = 1e-8
HERMITICITY_CHECK_EVERY = 1000
#: Step-size gate: dt must resolve the fastest generalized Rabi period.
MIN_STEPS_PER_PERIOD = 50


@dataclass(frozen=True)
class DecayParams:
    """Elementwise decay rates (1/s); symmetric so Hermiticity is preserved."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.shape != (4, 4):
            raise DomainError(f"decay matrix must be 4x4, got {g.shape}")
        if np.min(g) < 0:
            raise DomainError("decay rates must be non-negative")
        if np.max(np.abs(g - g.T)) > 0:
            raise DomainError("decay matrix must be symmetric")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_times(cls, t1: float = math.inf, t2: float = math.inf) -> "DecayParams":
        """Diagonal rates 1/T1, off-diagonal rates 1/T2."""
        if t1 <= 0 or t2 <= 0:
            raise DomainError("relaxation times must be positive")
        inv_t1 = 0.0 if math.isinf(t1) else 1.0 / t1
        inv_t2 = 0.0 if math.isinf(t2) else 1.0 / t2
        g = np.full((4, 4), inv_t2)
        np.fill_diagonal(g, inv_t1)
        return cls(g)

    @classmethod
    def zero(cls) -> "DecayParams":
        return cls(np.zeros((4, 4)))


@dataclass(frozen=True)
class HamiltonianFrame:
    """Rotating-frame Hamiltonian snapshot (angular-frequency units).

    Couplings live only on the driven band {(0,1), (1,2), (2,3)}; the
    diagonal carries per-transition detunings.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise DomainError(f"Hamiltonian must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise DomainError("Hamiltonian must be Hermitian")
        band = {(i, j) for i, j in COUPLED_TRANSITIONS}
        for i in range(4):
            for j in range(i + 1, 4):
                if (i, j) not in band and abs(m[i, j]) > 0:
                    raise DomainError(f"coupling outside the driven band at ({i}, {j})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _hamiltonian_matrix(t: float, schedule: RegimeSchedule) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    active = schedule.active_pulse(t)
    if active is None:
        return m
    start, pulse = active
    amp = pulse.envelope(t - start)
    if amp == 0.0:
        return m
    i, j = pulse.transition
    m[i, j] = -0.5 * amp
    m[j, i] = -0.5 * amp
    m[j, j] = pulse.detuning
    return m


def hamiltonian_at(t: float, schedule: RegimeSchedule) -> HamiltonianFrame:
    """Pulse Hamiltonian at time t; exactly one coupling is active at once.

    Boundary instants belong to the earlier window, so t = tau1 still sees
    the first-regime coupling.
    """
    if not 0.0 <= t <= schedule.end:
        raise DomainError(f"t = {t!r} outside the schedule [0, {schedule.end!r}]")
    return HamiltonianFrame(_hamiltonian_matrix(t, schedule))


def liouville_rhs(
    rho: DensityMatrix | np.ndarray,
    h: HamiltonianFrame | np.ndarray,
    decay: DecayParams,
) -> np.ndarray:
    """Time derivative -i[H, rho] - Gamma o rho."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    hm = h.matrix if isinstance(h, HamiltonianFrame) else np.asarray(h, dtype=complex)
    return -1j * (hm @ r - r @ hm) - decay.gamma * r


@dataclass(frozen=True)
class SimulationTrace:
    """Sampled states along one integration.

    ``states`` holds the full density matrices at the sample times;
    ``areas`` the cumulative drive area accrued by each sample.
    """

    times: np.ndarray
    states: np.ndarray
    areas: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        """Real diagonals, shape (n_samples, 4)."""
        return np.real(np.einsum("tii->ti", self.states))

    def coherence(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i, j]

    def bloch(self, transition: tuple[int, int]) -> np.ndarray:
        """(u, v, w) samples for one transition, shape (n_samples, 3)."""
        i, j = transition
        if (i, j) not in COUPLED_TRANSITIONS:
            raise DomainError(f"({i}, {j}) is not a coupled transition")
        c = self.states[:, i, j]
        u = 2.0 * c.real
        v = 2.0 * c.imag
        w = np.real(self.states[:, j, j] - self.states[:, i, i])
        return np.stack([u, v, w], axis=1)

    @property
    def final_state(self) -> DensityMatrix:
        return DensityMatrix(self.states[-1])

    def state_at(self, t: float) -> DensityMatrix:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"time {t!r} was not recorded in the trace")
        return DensityMatrix(self.states[idx])


def _segment_boundaries(
    schedule: RegimeSchedule,
    t_start: float,
    t_stop: float,
    record_times: tuple[float, ...],
) -> list[float]:
    pts = {t_start, t_stop}
    for start, pulse in schedule.pulses:
        for edge in (start, start + pulse.window_length):
            if t_start < edge < t_stop:
                pts.add(edge)
    for t in record_times:
        if not t_start <= t <= t_stop:
            raise DomainError(f"record time {t!r} outside [{t_start!r}, {t_stop!r}]")
        pts.add(t)
    return sorted(pts)


def integrate(
    rho0: DensityMatrix,
    schedule: RegimeSchedule,
    decay: DecayParams,
    dt: float,
    stride: int = 1,
    t_start: float = 0.0,
    t_stop: float | None = None,
    record_times: tuple[float, ...] = (),
) -> SimulationTrace:
    """Fixed-step fourth-order integration over [t_start, t_stop].

    Parameters
    ----------
    rho0 : initial state (placed at ``t_start``).
    schedule : pulse schedule defining H(t).
    decay : elementwise decay rates.
    dt : nominal step; must satisfy dt <= (2 pi / beta_max) / 50 over the
        scheduled pulses, else a StepSizeError is raised.  Steps are
        shrunk (never grown) to land exactly on window boundaries and on
        any requested ``record_times``.
    stride : record every ``stride``-th step (boundaries of the run and
        forced record times are always recorded).

    Raises
    ------
    NumericalFailureError
        If Hermiticity drifts beyond 1e-8; the partial trace accumulated
        so far is attached to the exception.
    """
    if dt <= 0:
        raise StepSizeError("dt must be positive")
    if stride < 1:
        raise DomainError("stride must be >= 1")
    beta_max = schedule.max_generalized_rabi()
    if beta_max > 0:
        dt_max = (2.0 * math.pi / beta_max) / MIN_STEPS_PER_PERIOD
        if dt > dt_max:
            raise StepSizeError(
                f"dt = {dt!r} too coarse; need dt <= {dt_max!r} "
                f"({MIN_STEPS_PER_PERIOD} steps per fastest period)"
            )
    if t_stop is None:
        t_stop = schedule.end
    if not 0.0 <= t_start <= t_stop <= schedule.end:
        raise DomainError("need 0 <= t_start <= t_stop <= schedule.end")

    gamma = decay.gamma
    rho = np.array(rho0.matrix, dtype=complex)

    times = [t_start]
    states = [rho.copy()]

    def rhs_const(r: np.ndarray, h: np.ndarray) -> np.ndarray:
        return -1j * (h @ r - r @ h) - gamma * r

    def record(t: float) -> None:
        times.append(t)
        states.append(rho.copy())

    def build_trace() -> SimulationTrace:
        t_arr = np.array(times)
        s_arr = np.array(states)
        areas = np.array([schedule.area_at(t) for t in t_arr])
        return SimulationTrace(times=t_arr, states=s_arr, areas=areas)

    step_count = 0
    boundaries = _segment_boundaries(schedule, t_start, t_stop, tuple(record_times))
    for seg_idx in range(len(boundaries) - 1):
        a, b = boundaries[seg_idx], boundaries[seg_idx + 1]
        length = b - a
        if length <= 0:
            continue
        n = max(1, math.ceil(length / dt - 1e-12))
        h_step = length / n
        t_mid = a + 0.5 * length
        active = schedule.active_pulse(t_mid)
        constant = active is None or active[1].shape == "square"
        if constant:
            h_mat = _hamiltonian_matrix(t_mid, schedule)
        for k in range(n):
            t = a + k * h_step
            if constant:
                k1 = rhs_const(rho, h_mat)
                k2 = rhs_const(rho + 0.5 * h_step * k1, h_mat)
                k3 = rhs_const(rho + 0.5 * h_step * k2, h_mat)
                k4 = rhs_const(rho + h_step * k3, h_mat)
            else:
                h_a = _hamiltonian_matrix(t, schedule)
                h_m = _hamiltonian_matrix(t + 0.5 * h_step, schedule)
                h_b = _hamiltonian_matrix(min(t + h_step, b), schedule)
                k1 = rhs_const(rho, h_a)
                k2 = rhs_const(rho + 0.5 * h_step * k1, h_m)
                k3 = rhs_const(rho + 0.5 * h_step * k2, h_m)
                k4 = rhs_const(rho + h_step * k3, h_b)
            rho = rho + (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            step_count += 1
            if step_count % HERMITICITY_CHECK_EVERY == 0:
                drift = float(np.max(np.abs(rho - rho.conj().T)))
                if drift > HERMITICITY_FAIL:
                    raise NumericalFailureError(
                        f"Hermiticity drift {drift:.3e} exceeds {HERMITICITY_FAIL:.0e} "
                        f"at t = {t + h_step!r}",
                        partial_trace=build_trace(),
                    )
            at_seg_end = k == n - 1
            if step_count % stride == 0 and not at_seg_end:
                record(t + h_step)
        record(b)

    trace = build_trace()
    final = trace.states[-1]
    drift = float(np.max(np.abs(final - final.conj().T)))
    if drift > 1e-10:
        raise NumericalFailureError(
            f"final Hermiticity drift {drift:.3e} exceeds 1e-10", partial_trace=trace
        )
    min_pop = float(np.min(np.real(np.diagonal(final))))
    if min_pop < -1e-10:
        raise NumericalFailureError(
            f"final population {min_pop:.3e} below -1e-10", partial_trace=trace
        )
    return trace
