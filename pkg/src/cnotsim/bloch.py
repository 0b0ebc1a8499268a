"""Closed-form transient solutions of the driven, damped two-level system.

The equations of motion for one driven transition are

    du/dt = -Delta * v - u / T2
    dv/dt = +Delta * u + Omega * w - v / T2
    dw/dt = -Omega * v - (w - w_eq) / T1

With T1 = T2 = T the general solution is a rotation at the generalized
Rabi rate beta = sqrt(Omega^2 + Delta^2), damped uniformly by exp(-t/T),
about the steady state set by the dimensionless source parameter xi.
:func:`general_solution` evaluates that form exactly.

The regime-specific convenience solutions come in two modes:

* ``"consistent"`` (default): the unique solution of the equations of
  motion for the regime's initial conditions.
* ``"paper-literal"``: the published closed forms evaluated verbatim,
  preserving their known defects (the regime-I w(t) carries a sign typo
  that yields w(0) = +1 instead of -1; the regime-II/III printed w(t)
  vanish at t = 0, contradicting their own initial inversions).  These
  are kept so the discrepancies can be shown, not hidden.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, ValidityWarning
from .states import BlochVector

MODE_CONSISTENT = "consistent"
MODE_LITERAL = "paper-literal"
MODES = (MODE_CONSISTENT, MODE_LITERAL)


@dataclass(frozen=True)
class TransitionParams:
    """Drive and relaxation parameters for one two-level transition.

    ``w_eq`` is the equilibrium inversion feeding the relaxation term; it
    is zero for every published scenario and only enters through xi.
    """

    rabi: float
    detuning: float = 0.0
    t1: float = math.inf
    t2: float = math.inf
    w_eq: float = 0.0

    def __post_init__(self):
        if self.rabi < 0:
            raise DomainError("rabi rate must be non-negative")
        if self.t1 <= 0 or self.t2 <= 0:
            raise DomainError("relaxation times must be positive")

    @property
    def is_strong_field(self) -> bool:
        """Whether Omega * min(T1, T2) > 1, required by the closed forms."""
        t = min(self.t1, self.t2)
        return math.isinf(t) or self.rabi * t > 1.0


@dataclass(frozen=True)
class RegimeInit:
    """Bloch components at the start of a regime."""

    u0: float
    v0: float
    w0: float

    def __post_init__(self):
        if abs(self.w0) > 1.0 + 1e-12:
            raise DomainError(f"|w0| must not exceed 1, got {self.w0!r}")


def beta(params: TransitionParams) -> float:
    """Generalized Rabi rate sqrt(Omega^2 + Delta^2)."""
    return math.hypot(params.rabi, params.detuning)


def xi(params: TransitionParams) -> float:
    """Dimensionless steady-state source, (Omega w_eq / T) / (Omega^2 + Delta^2 + 1/T^2).

    Uses T = T2 (the closed forms assume T1 = T2).  Vanishes whenever the
    equilibrium inversion or the drive vanishes.
    """
    if params.w_eq == 0.0 or params.rabi == 0.0:
        return 0.0
    t = params.t2
    inv_t = 0.0 if math.isinf(t) else 1.0 / t
    return (params.rabi * params.w_eq * inv_t) / (
        params.rabi**2 + params.detuning**2 + inv_t**2
    )


def _sin_bt_over_beta(b: float, t: float) -> float:
    """sin(beta t) / beta, finite in the beta -> 0 limit."""
    x = b * t
    if abs(x) < 1e-6:
        return t * (1.0 - x * x / 6.0)
    return math.sin(x) / b


def _cos_bt_minus_one_over_beta2(b: float, t: float) -> float:
    """(cos(beta t) - 1) / beta^2, finite in the beta -> 0 limit."""
    x = b * t
    if abs(x) < 1e-6:
        return -0.5 * t * t * (1.0 - x * x / 12.0)
    return (math.cos(x) - 1.0) / (b * b)


def _check_strong_field(params: TransitionParams) -> None:
    if not params.is_strong_field:
        warnings.warn(
            "closed-form solution evaluated outside its validity range "
            f"(Omega * min(T1, T2) = {params.rabi * min(params.t1, params.t2):.3g} <= 1)",
            ValidityWarning,
            stacklevel=3,
        )


def general_solution(
    params: TransitionParams,
    init: RegimeInit,
    t: float,
    transition: tuple[int, int] = (0, 1),
) -> BlochVector:
    """Damped-rotation solution for arbitrary initial conditions.

    Exact for T1 = T2; uses T = T2 and warns when the strong-field
    assumption is violated (the value is still returned).
    """
    _check_strong_field(params)
    if not math.isclose(params.t1, params.t2, rel_tol=1e-9):
        warnings.warn(
            "closed forms assume T1 = T2; using T = T2",
            ValidityWarning,
            stacklevel=2,
        )
    omega, delta = params.rabi, params.detuning
    big_t = params.t2
    inv_t = 0.0 if math.isinf(big_t) else 1.0 / big_t
    b = beta(params)
    x = xi(params)
    xt = 0.0 if x == 0.0 else x * big_t

    env = math.exp(-t * inv_t)
    cos_bt = math.cos(b * t)
    sob = _sin_bt_over_beta(b, t)
    com = _cos_bt_minus_one_over_beta2(b, t)
    # Shared bracket Delta*u0 + Omega*w0 - xi/T.
    k = delta * init.u0 + omega * init.w0 - x * inv_t

    u = env * (init.u0 - delta * (init.v0 - x) * sob + delta * k * com + delta * xt) - delta * xt
    v = env * ((init.v0 - x) * cos_bt + k * sob) + x
    w = (
        env * (init.w0 - params.w_eq - omega * (init.v0 - x) * sob + omega * k * com + omega * xt)
        + params.w_eq
        - omega * xt
    )
    return BlochVector(u=u, v=v, w=w, transition=transition)


def _regime_envelope(t: float, t2: float) -> float:
    return math.exp(-t / t2) if not math.isinf(t2) else 1.0


def regime1_solution(
    params: TransitionParams, t: float, mode: str = MODE_CONSISTENT
) -> BlochVector:
    """First-regime solution from (u, v, w)(0) = (0, 0, -1) with xi = 0.

    Literal mode keeps the published leading "+1" in w(t), which makes
    w(0) = +1; consistent mode carries the correct "-1".  u and v agree
    between modes.
    """
    _require_mode(mode)
    _check_strong_field(params)
    omega, b = params.rabi, beta(params)
    env = _regime_envelope(t, params.t2)
    com = _cos_bt_minus_one_over_beta2(b, t)
    u = -omega * params.detuning * com * env
    v = -omega * _sin_bt_over_beta(b, t) * env
    lead = 1.0 if mode == MODE_LITERAL else -1.0
    w = (lead - omega * omega * com) * env
    return BlochVector(u=u, v=v, w=w, transition=(0, 1))


def _printed_regime_form(
    w_init: float, b: float, t: float, t2: float, transition: tuple[int, int]
) -> BlochVector:
    """Published second/third-regime form; w(t) vanishes at t = 0 by construction."""
    env = _regime_envelope(t, t2)
    cos_bt = math.cos(b * t)
    sin_bt = math.sin(b * t)
    u = 0.5 * w_init * (cos_bt - 1.0) * env
    v = -w_init * sin_bt * env
    w = w_init * (0.5 * (1.0 - cos_bt) - sin_bt) * env
    return BlochVector(u=u, v=v, w=w, transition=transition)


def regime2_solution(
    w_prime_0: float,
    params: TransitionParams,
    t: float,
    mode: str = MODE_CONSISTENT,
) -> BlochVector:
    """Second-regime (microwave) solution from (0, 0, w_prime_0), xi = 0.

    Literal mode evaluates the published form, in which the detuning is
    replaced by Delta + Omega (the stated Zeeman shift) inside the
    generalized Rabi rate and the dephasing time is taken as given in
    ``params.t2``.  Consistent mode solves the equations of motion with
    the parameters exactly as given.
    """
    _require_mode(mode)
    if not -1.0 - 1e-12 <= w_prime_0 <= 1e-12:
        raise DomainError(f"w_prime_0 must lie in [-1, 0], got {w_prime_0!r}")
    if mode == MODE_LITERAL:
        b21 = math.hypot(params.rabi, params.detuning + params.rabi)
        return _printed_regime_form(w_prime_0, b21, t, params.t2, (1, 2))
    clean = TransitionParams(
        rabi=params.rabi, detuning=params.detuning, t1=params.t1, t2=params.t2, w_eq=0.0
    )
    return general_solution(clean, RegimeInit(0.0, 0.0, w_prime_0), t, transition=(1, 2))


def regime3_solution(
    w_dprime_0: float,
    params: TransitionParams,
    t: float,
    mode: str = MODE_CONSISTENT,
) -> BlochVector:
    """Third-regime (second optical channel) solution from (0, 0, w_dprime_0), xi = 0."""
    _require_mode(mode)
    if not -1.0 - 1e-12 <= w_dprime_0 <= 1e-12:
        raise DomainError(f"w_dprime_0 must lie in [-1, 0], got {w_dprime_0!r}")
    if mode == MODE_LITERAL:
        return _printed_regime_form(w_dprime_0, beta(params), t, params.t2, (2, 3))
    clean = TransitionParams(
        rabi=params.rabi, detuning=params.detuning, t1=params.t1, t2=params.t2, w_eq=0.0
    )
    return general_solution(clean, RegimeInit(0.0, 0.0, w_dprime_0), t, transition=(2, 3))


def bloch_rhs(b: BlochVector, params: TransitionParams) -> tuple[float, float, float]:
    """Right-hand side (du/dt, dv/dt, dw/dt) of the equations of motion."""
    inv_t1 = 0.0 if math.isinf(params.t1) else 1.0 / params.t1
    inv_t2 = 0.0 if math.isinf(params.t2) else 1.0 / params.t2
    du = -params.detuning * b.v - b.u * inv_t2
    dv = params.detuning * b.u + params.rabi * b.w - b.v * inv_t2
    dw = -params.rabi * b.v - (b.w - params.w_eq) * inv_t1
    return (du, dv, dw)


def _require_mode(mode: str) -> None:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
