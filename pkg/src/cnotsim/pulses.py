"""Pulse envelopes, area arithmetic, and the three-regime gate schedule.

A schedule drives the three transitions in strict succession:

    regime I   [0, tau1]      sigma-minus optical channel on (0, 1)
    regime II  (tau1, tau2]   microwave channel on (1, 2)
    regime III (tau2, end]    sigma-plus optical channel on (2, 3)

Boundary instants belong to the earlier window.  Gaussian envelopes are
truncated at +/-4 sigma, which changes the realized area by less than
1e-4 relative to the nominal Omega * sigma * sqrt(2 pi).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import erfinv

from .bloch import MODE_CONSISTENT, MODE_LITERAL, _require_mode
from .errors import DomainError, ValidityWarning
from .states import BlochVector, COUPLED_TRANSITIONS
from .bloch import RegimeInit

SHAPE_SQUARE = "square"
SHAPE_GAUSSIAN = "gaussian"
SHAPES = (SHAPE_SQUARE, SHAPE_GAUSSIAN)

CHANNEL_SIGMA_MINUS = "sigma_minus"
CHANNEL_MICROWAVE = "microwave"
CHANNEL_SIGMA_PLUS = "sigma_plus"
CHANNEL_TRANSITION = {
    CHANNEL_SIGMA_MINUS: (0, 1),
    CHANNEL_MICROWAVE: (1, 2),
    CHANNEL_SIGMA_PLUS: (2, 3),
}

#: Gaussian envelopes are cut off this many sigma either side of center.
GAUSS_HALF_WIDTH = 4.0
#: Fraction of the nominal Gaussian area realized inside the cutoff.
GAUSS_TRUNCATION_FACTOR = math.erf(GAUSS_HALF_WIDTH / math.sqrt(2.0))


@dataclass(frozen=True)
class Pulse:
    """One drive pulse.

    ``duration`` is the full width for square pulses and the Gaussian
    sigma otherwise.
    """

    shape: str
    channel: str
    peak_rabi: float
    duration: float
    detuning: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise DomainError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if self.channel not in CHANNEL_TRANSITION:
            raise DomainError(
                f"channel must be one of {sorted(CHANNEL_TRANSITION)}, got {self.channel!r}"
            )
        if self.peak_rabi < 0:
            raise DomainError("peak rabi rate must be non-negative")
        if self.duration <= 0:
            raise DomainError("duration must be positive")

    @property
    def transition(self) -> tuple[int, int]:
        return CHANNEL_TRANSITION[self.channel]

    @property
    def area(self) -> float:
        return pulse_area(self)

    @property
    def window_length(self) -> float:
        """Length of the time window the pulse occupies."""
        if self.shape == SHAPE_SQUARE:
            return self.duration
        return 2.0 * GAUSS_HALF_WIDTH * self.duration

    def envelope(self, t_local: float) -> float:
        """Instantaneous Rabi rate at ``t_local`` past the window start."""
        if not 0.0 <= t_local <= self.window_length:
            return 0.0
        if self.shape == SHAPE_SQUARE:
            return self.peak_rabi
        center = GAUSS_HALF_WIDTH * self.duration
        x = (t_local - center) / self.duration
        return self.peak_rabi * math.exp(-0.5 * x * x)

    def realized_area(self) -> float:
        """Area actually delivered inside the (possibly truncated) window."""
        if self.shape == SHAPE_SQUARE:
            return self.peak_rabi * self.duration
        return pulse_area(self) * GAUSS_TRUNCATION_FACTOR

    def area_by(self, t_local: float) -> float:
        """Area accrued by ``t_local`` past the window start."""
        if t_local <= 0.0:
            return 0.0
        if t_local >= self.window_length:
            return self.realized_area()
        if self.shape == SHAPE_SQUARE:
            return self.peak_rabi * t_local
        sigma = self.duration
        center = GAUSS_HALF_WIDTH * sigma
        z = (t_local - center) / (sigma * math.sqrt(2.0))
        scale = self.peak_rabi * sigma * math.sqrt(math.pi / 2.0)
        return scale * (math.erf(z) + GAUSS_TRUNCATION_FACTOR)


def pulse_area(p: Pulse) -> float:
    """Nominal pulse area: Omega * duration (square) or Omega * sigma * sqrt(2 pi)."""
    if p.shape == SHAPE_SQUARE:
        return p.peak_rabi * p.duration
    return p.peak_rabi * p.duration * math.sqrt(2.0 * math.pi)


def duration_for_area(shape: str, peak_rabi: float, theta: float) -> float:
    """Duration (width or sigma) giving the requested area at the given peak."""
    if shape not in SHAPES:
        raise DomainError(f"shape must be one of {SHAPES}, got {shape!r}")
    if peak_rabi <= 0:
        raise DomainError("peak rabi rate must be positive")
    if theta < 0:
        raise DomainError("area must be non-negative")
    if shape == SHAPE_SQUARE:
        return theta / peak_rabi
    return theta / (peak_rabi * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class RegimeSchedule:
    """Ordered pulses with the regime switch times.

    ``train`` is the (period, count) of the third-regime pulse train when
    one exists, else None.
    """

    pulses: tuple[tuple[float, Pulse], ...]
    tau1: float
    tau2: float
    end: float
    train: tuple[float, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not 0.0 < self.tau1 < self.tau2 <= self.end:
            raise DomainError("need 0 < tau1 < tau2 <= end")
        has_third = False
        prev_end = 0.0
        for start, pulse in self.pulses:
            lo, hi = start, start + pulse.window_length
            if start < prev_end - 1e-12:
                raise DomainError("pulse windows must not overlap")
            prev_end = hi
            if hi <= self.tau1 + 1e-12 and pulse.channel == CHANNEL_SIGMA_MINUS:
                continue
            if lo >= self.tau1 - 1e-12 and hi <= self.tau2 + 1e-12 and pulse.channel == CHANNEL_MICROWAVE:
                continue
            if lo >= self.tau2 - 1e-12 and hi <= self.end + 1e-12 and pulse.channel == CHANNEL_SIGMA_PLUS:
                has_third = True
                continue
            raise DomainError(
                f"pulse on {pulse.channel!r} at [{lo!r}, {hi!r}] lies outside its regime"
            )
        if self.tau2 >= self.end and has_third:
            raise DomainError("third-regime pulses need tau2 < end")

    def active_pulse(self, t: float) -> tuple[float, Pulse] | None:
        """Pulse whose window contains t; boundary instants go to the earlier pulse."""
        found = None
        for start, pulse in self.pulses:
            if start <= t <= start + pulse.window_length:
                if found is None:
                    found = (start, pulse)
                # Later window sharing this exact instant loses the tie.
        return found

    def max_generalized_rabi(self) -> float:
        return max(
            (math.hypot(p.peak_rabi, p.detuning) for _, p in self.pulses), default=0.0
        )

    def area_at(self, t: float) -> float:
        """Cumulative drive area delivered by time t."""
        return sum(pulse.area_by(t - start) for start, pulse in self.pulses)

    def total_realized_area(self) -> float:
        return sum(pulse.realized_area() for _, pulse in self.pulses)

    def time_at_area(self, phi: float) -> float:
        """Earliest time at which the cumulative area reaches ``phi``.

        Values within 0.1% above the total realized area snap to the end
        of the schedule (covers the tiny Gaussian truncation deficit).
        """
        if phi < 0:
            raise DomainError("area must be non-negative")
        if phi == 0.0:
            return 0.0
        total = self.total_realized_area()
        if phi > total:
            if phi <= total * 1.001 + 1e-12:
                return self.end
            raise DomainError(
                f"requested area {phi!r} exceeds the schedule total {total!r}"
            )
        acc = 0.0
        for start, pulse in self.pulses:
            realized = pulse.realized_area()
            if phi > acc + realized:
                acc += realized
                continue
            target = phi - acc
            if pulse.shape == SHAPE_SQUARE:
                return start + target / pulse.peak_rabi
            sigma = pulse.duration
            scale = pulse.peak_rabi * sigma * math.sqrt(math.pi / 2.0)
            val = target / scale - GAUSS_TRUNCATION_FACTOR
            val = min(max(val, -GAUSS_TRUNCATION_FACTOR), GAUSS_TRUNCATION_FACTOR)
            z = float(erfinv(val))
            return start + GAUSS_HALF_WIDTH * sigma + z * sigma * math.sqrt(2.0)
        return self.end


def build_cnot_schedule(
    phi1: float,
    phi2: float,
    n_flips: int,
    shape: str = SHAPE_SQUARE,
    peak_rabis: tuple[float, float, float] = (1.0, 1.0, 1.0),
    detunings: tuple[float, float, float] = (0.0, 0.0, 0.0),
    decay_times: tuple[float, ...] = (math.inf,),
    flip_area: float = math.pi / 2.0,
    train_period: float | None = None,
    zeeman_shift: bool = False,
) -> RegimeSchedule:
    """Build the full three-regime schedule.

    Regime I carries area ``phi1`` on the sigma-minus channel, regime II
    ``phi2`` on the microwave channel, and regime III ``n_flips``
    successive pulses of ``flip_area`` each on the sigma-plus channel
    (contiguous squares, or a Gaussian train at ``train_period``, default
    8 sigma between centers).  With ``zeeman_shift`` the microwave
    detuning is raised by its own Rabi rate.
    """
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        if not 0.0 < phi <= 2.0 * math.pi:
            raise DomainError(f"{name} must lie in (0, 2 pi], got {phi!r}")
    if n_flips < 0:
        raise DomainError("n_flips must be non-negative")
    if flip_area <= 0:
        raise DomainError("flip_area must be positive")

    om1, om2, om3 = peak_rabis
    d1, d2, d3 = detunings
    if zeeman_shift:
        d2 = d2 + om2

    p1 = Pulse(shape, CHANNEL_SIGMA_MINUS, om1, duration_for_area(shape, om1, phi1), d1)
    tau1 = p1.window_length
    p2 = Pulse(shape, CHANNEL_MICROWAVE, om2, duration_for_area(shape, om2, phi2), d2)
    tau2 = tau1 + p2.window_length

    pulses = [(0.0, p1), (tau1, p2)]
    train = None
    end = tau2
    if n_flips > 0:
        p3 = Pulse(shape, CHANNEL_SIGMA_PLUS, om3, duration_for_area(shape, om3, flip_area), d3)
        period = p3.window_length if train_period is None else train_period
        if period < p3.window_length - 1e-12:
            raise DomainError("train period shorter than the pulse window")
        for k in range(n_flips):
            pulses.append((tau2 + k * period, p3))
        end = tau2 + (n_flips - 1) * period + p3.window_length
        if shape == SHAPE_GAUSSIAN or train_period is not None:
            train = (period, n_flips)

    budget = min(decay_times)
    if end >= budget:
        warnings.warn(
            f"schedule length {end:.3g} exceeds the coherence budget {budget:.3g}",
            ValidityWarning,
            stacklevel=2,
        )
    return RegimeSchedule(pulses=tuple(pulses), tau1=tau1, tau2=tau2, end=end, train=train)


def stitch(
    regime_end: BlochVector,
    next_transition: tuple[int, int],
    mode: str = MODE_CONSISTENT,
    regime1_w_end: float | None = None,
    shared_population: float | None = None,
) -> RegimeInit:
    """Initial conditions for the next regime from the previous regime's end.

    Coherences are always dropped at the boundary (u, v reset to zero).
    Into regime II the new inversion is -(1 + w(tau1))/2: all population
    reaching the upper level of the first pair, none yet transferred.
    Into regime III consistent mode uses the actual transferred
    population -(rho22 at tau2), which needs the pair population
    ``shared_population`` of regime II; literal mode keeps the published
    constant -(1 + w(tau1))/4 and needs ``regime1_w_end``.
    """
    _require_mode(mode)
    next_transition = tuple(next_transition)
    if next_transition not in COUPLED_TRANSITIONS or next_transition == (0, 1):
        raise DomainError(f"next transition must be (1, 2) or (2, 3), got {next_transition}")
    if next_transition == (1, 2):
        if regime_end.transition != (0, 1):
            raise DomainError("stitch into (1, 2) expects a (0, 1) regime result")
        w_new = -(1.0 + regime_end.w) / 2.0
    elif mode == MODE_LITERAL:
        if regime1_w_end is None:
            raise DomainError("literal stitch into (2, 3) needs regime1_w_end")
        w_new = -(1.0 + regime1_w_end) / 4.0
    else:
        if regime_end.transition != (1, 2):
            raise DomainError("stitch into (2, 3) expects a (1, 2) regime result")
        if shared_population is None:
            raise DomainError("consistent stitch into (2, 3) needs shared_population")
        rho22 = (shared_population + regime_end.w) / 2.0
        w_new = -rho22
    w_new = min(0.0, max(-1.0, w_new))
    return RegimeInit(0.0, 0.0, w_new)
