import math

import numpy as np
import pytest

from cnotsim.bloch import (
    MODE_CONSISTENT,
    MODE_LITERAL,
    RegimeInit,
    TransitionParams,
    beta,
    bloch_rhs,
    general_solution,
    regime1_solution,
    regime2_solution,
    regime3_solution,
    xi,
)
from cnotsim.errors import DomainError, ValidityWarning
from cnotsim.states import BlochVector

UNDAMPED = dict(t1=math.inf, t2=math.inf)


# ---------------------------------------------------------------------------
# beta and xi
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "rabi,detuning,expected",
    [(3.0, 4.0, 5.0), (1.0, 0.0, 1.0), (0.0, 2.0, 2.0)],
)
def test_beta(rabi, detuning, expected):
    assert beta(TransitionParams(rabi, detuning, **UNDAMPED)) == expected


def test_xi_values():
    assert xi(TransitionParams(1.0, 0.5, t1=2.0, t2=2.0, w_eq=0.0)) == 0.0
    assert xi(TransitionParams(1.0, 0.0, t1=1.0, t2=1.0, w_eq=1.0)) == pytest.approx(0.5)
    assert xi(TransitionParams(0.0, 1.0, t1=3.0, t2=3.0, w_eq=0.7)) == 0.0


# ---------------------------------------------------------------------------
# general solution
# ---------------------------------------------------------------------------


def test_general_solution_reduces_to_initial_values():
    rng = np.random.default_rng(7)
    for _ in range(25):
        big_t = rng.uniform(30.0, 100.0)
        params = TransitionParams(
            rabi=rng.uniform(0.5, 3.0),
            detuning=rng.uniform(-2.0, 2.0),
            t1=big_t,
            t2=big_t,
            w_eq=rng.uniform(-1.0, 1.0),
        )
        init = RegimeInit(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1))
        b0 = general_solution(params, init, 0.0)
        assert b0.u == pytest.approx(init.u0, abs=1e-12)
        assert b0.v == pytest.approx(init.v0, abs=1e-12)
        assert b0.w == pytest.approx(init.w0, abs=1e-12)


def test_resonant_undamped_nutation():
    params = TransitionParams(rabi=2.0, detuning=0.0, **UNDAMPED)
    init = RegimeInit(0.0, 0.0, -1.0)
    for t in np.linspace(0.0, 10.0, 57):
        b = general_solution(params, init, float(t))
        assert b.u == pytest.approx(0.0, abs=1e-12)
        assert b.v == pytest.approx(-math.sin(2.0 * t), abs=1e-12)
        assert b.w == pytest.approx(-math.cos(2.0 * t), abs=1e-12)


@pytest.mark.filterwarnings("ignore::cnotsim.errors.ValidityWarning")
def test_pure_relaxation_limit():
    params = TransitionParams(rabi=0.0, detuning=0.0, t1=3.0, t2=3.0)
    init = RegimeInit(0.0, 0.0, -1.0)
    b = general_solution(params, init, 1.5)
    assert (b.u, b.v) == (0.0, 0.0)
    assert b.w == pytest.approx(-math.exp(-0.5), abs=1e-12)


def test_solution_satisfies_equations_of_motion():
    # Central finite difference of the closed form matches the stated
    # right-hand side to second order, at random parameter points.
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(200):
        om = rng.uniform(0.3, 3.0)
        big_t = rng.uniform(20.0, 80.0) / om
        params = TransitionParams(
            rabi=om,
            detuning=rng.uniform(-2.0, 2.0),
            t1=big_t,
            t2=big_t,
            w_eq=rng.uniform(-0.5, 0.5),
        )
        init = RegimeInit(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-1, 0))
        t = rng.uniform(0.1, 3.0)
        plus = general_solution(params, init, t + h).as_array()
        minus = general_solution(params, init, t - h).as_array()
        fd = (plus - minus) / (2.0 * h)
        here = general_solution(params, init, t)
        rhs = np.array(bloch_rhs(here, params))
        scale = beta(params) ** 3
        assert np.max(np.abs(fd - rhs)) < 10.0 * scale * h**2 + 1e-9


def test_undamped_norm_conserved_ten_periods():
    params = TransitionParams(rabi=1.0, detuning=0.0, **UNDAMPED)
    init = RegimeInit(0.0, 0.0, -1.0)
    for t in np.linspace(0.0, 10 * 2 * math.pi, 101):
        b = general_solution(params, init, float(t))
        assert b.norm == pytest.approx(1.0, abs=1e-9)


def test_damped_envelope_matches_undamped_solution():
    # On resonance with no source the damped solution is exactly the
    # undamped rotation scaled by exp(-t/T).
    om, big_t = 5.0, 40.0
    params = TransitionParams(rabi=om, detuning=0.0, t1=big_t, t2=big_t)
    init = RegimeInit(0.1, -0.2, -0.9)
    for t in np.linspace(0.0, 2 * math.pi / om, 31):
        b = general_solution(params, init, float(t))
        env = math.exp(-t / big_t)
        v_exact = env * (init.v0 * math.cos(om * t) + init.w0 * math.sin(om * t))
        w_exact = env * (init.w0 * math.cos(om * t) - init.v0 * math.sin(om * t))
        rel = 1.0 / (om * big_t)
        assert abs(b.v - v_exact) < rel
        assert abs(b.w - w_exact) < rel
        assert abs(b.u - env * init.u0) < rel


def test_norm_never_amplified_under_decay():
    rng = np.random.default_rng(3)
    for _ in range(50):
        om = rng.uniform(0.5, 2.0)
        big_t = rng.uniform(20.0, 90.0) / om
        params = TransitionParams(rabi=om, detuning=rng.uniform(-1, 1), t1=big_t, t2=big_t)
        init = RegimeInit(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.8, 0))
        start = general_solution(params, init, 0.0).norm
        for t in np.linspace(0.0, 3 * big_t, 40):
            assert general_solution(params, init, float(t)).norm**2 <= start**2 + 1e-9


def test_modes_share_the_decayed_steady_state():
    params = TransitionParams(rabi=1.0, detuning=0.3, t1=25.0, t2=25.0)
    t_late = 60 * 25.0
    for sol in (
        regime1_solution(params, t_late, MODE_CONSISTENT),
        regime1_solution(params, t_late, MODE_LITERAL),
        regime2_solution(-0.5, params, t_late, MODE_CONSISTENT),
        regime2_solution(-0.5, params, t_late, MODE_LITERAL),
    ):
        assert abs(sol.u) < 1e-12
        assert abs(sol.v) < 1e-12
        assert abs(sol.w) < 1e-12


def test_area_scaling_invariance():
    # Omega -> k Omega, t -> t/k, T -> k T leaves the solutions unchanged.
    rng = np.random.default_rng(19)
    for _ in range(20):
        k = rng.uniform(0.2, 5.0)
        om, big_t = 1.3, 50.0
        t = rng.uniform(0.1, 5.0)
        base = TransitionParams(om, 0.0, big_t, big_t)
        scaled = TransitionParams(k * om, 0.0, big_t / k, big_t / k)
        for fn, args in (
            (regime1_solution, ()),
            (regime2_solution, (-0.6,)),
            (regime3_solution, (-1 / 3,)),
        ):
            a = fn(*args, base, t, MODE_CONSISTENT)
            b = fn(*args, scaled, t / k, MODE_CONSISTENT)
            assert a.u == pytest.approx(b.u, abs=1e-12)
            assert a.v == pytest.approx(b.v, abs=1e-12)
            assert a.w == pytest.approx(b.w, abs=1e-12)


# ---------------------------------------------------------------------------
# regime solutions
# ---------------------------------------------------------------------------


def test_regime1_consistent_starts_inverted():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    b = regime1_solution(params, 0.0, MODE_CONSISTENT)
    assert (b.u, b.v, b.w) == (0.0, 0.0, -1.0)


def test_regime1_literal_sign_defect():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    assert regime1_solution(params, 0.0, MODE_LITERAL).w == 1.0


def test_regime1_pi_pulse_inverts():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    b = regime1_solution(params, math.pi, MODE_CONSISTENT)
    assert b.w == pytest.approx(1.0, abs=1e-12)
    assert (1.0 + b.w) / 2.0 == pytest.approx(1.0, abs=1e-12)


def test_regime1_third_area_populations():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    b = regime1_solution(params, math.pi / 3.0, MODE_CONSISTENT)
    assert (1.0 + b.w) / 2.0 == pytest.approx(math.sin(math.pi / 6) ** 2, abs=1e-12)


def test_regime2_initial_values():
    params = TransitionParams(1.0, 0.0, t1=30.0, t2=30.0)
    lit = regime2_solution(-0.5, params, 0.0, MODE_LITERAL)
    assert (lit.u, lit.v, lit.w) == (0.0, 0.0, 0.0)
    con = regime2_solution(-0.5, params, 0.0, MODE_CONSISTENT)
    assert (con.u, con.v, con.w) == (0.0, 0.0, -0.5)


def test_regime2_literal_uses_shifted_rate():
    params = TransitionParams(2.0, 0.0, **UNDAMPED)
    # Shifted generalized rate sqrt(Omega^2 + (Delta + Omega)^2) = 2*sqrt(2).
    b21 = 2.0 * math.sqrt(2.0)
    t = 0.4
    lit = regime2_solution(-1.0, params, t, MODE_LITERAL)
    assert lit.v == pytest.approx(math.sin(b21 * t), abs=1e-12)


def test_regime2_domain():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    with pytest.raises(DomainError):
        regime2_solution(0.5, params, 0.0)
    with pytest.raises(DomainError):
        regime2_solution(-1.5, params, 0.0)
    with pytest.raises(DomainError):
        regime2_solution(-0.5, params, 0.0, mode="other")


def test_regime3_initial_and_flip():
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    con = regime3_solution(-1 / 3, params, 0.0, MODE_CONSISTENT)
    assert (con.u, con.v, con.w) == (0.0, 0.0, -1 / 3)
    flipped = regime3_solution(-1 / 3, params, math.pi, MODE_CONSISTENT)
    assert flipped.w == pytest.approx(1 / 3, abs=1e-12)
    lit = regime3_solution(-1 / 3, params, 0.0, MODE_LITERAL)
    assert lit.w == 0.0


def test_half_pi_steps_flip_the_doublet():
    # Two quarter-turns take the inversion through zero to a full flip,
    # and every further half-pi of area flips it back.
    params = TransitionParams(1.0, 0.0, **UNDAMPED)
    w0 = -0.4
    w_vals = [regime3_solution(w0, params, k * math.pi / 2).w for k in range(5)]
    assert w_vals[0] == pytest.approx(w0, abs=1e-12)
    assert w_vals[1] == pytest.approx(0.0, abs=1e-12)
    assert w_vals[2] == pytest.approx(-w0, abs=1e-12)
    assert w_vals[4] == pytest.approx(w0, abs=1e-12)


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------


def test_rhs_equilibrium_fixed_point():
    params = TransitionParams(0.0, 0.7, t1=5.0, t2=5.0, w_eq=0.3)
    b = BlochVector(0.0, 0.0, 0.3, (0, 1))
    assert bloch_rhs(b, params) == (0.0, 0.0, 0.0)


def test_rhs_initial_nutation_slope():
    params = TransitionParams(2.0, 0.0, **UNDAMPED)
    b = BlochVector(0.0, 0.0, -1.0, (0, 1))
    assert bloch_rhs(b, params) == (0.0, -2.0, 0.0)


def test_rhs_pure_dephasing():
    params = TransitionParams(0.0, 0.0, t1=2.0, t2=4.0, w_eq=0.5)
    b = BlochVector(1.0, 0.0, 0.0, (0, 1))
    du, dv, dw = bloch_rhs(b, params)
    assert du == pytest.approx(-0.25)
    assert dv == 0.0
    assert dw == pytest.approx(0.25)


def test_strong_field_warning():
    params = TransitionParams(1.0, 0.0, t1=0.5, t2=0.5)
    with pytest.warns(ValidityWarning):
        general_solution(params, RegimeInit(0, 0, -1), 0.1)
