import math

import numpy as np
import pytest

from cnotsim.bloch import MODE_CONSISTENT, MODE_LITERAL, TransitionParams
from cnotsim.chain import (
    regime1_populations,
    regime2_populations,
    regime3_populations,
    run_chain,
)
from cnotsim.config import resolve_config
from cnotsim.gates import fidelity_vs_area
from cnotsim.liouville import DecayParams
from cnotsim.report import (
    build_discrepancy_report,
    first_equal_split_area,
    fit_axis_scale,
)

UNDAMPED = TransitionParams(1.0, 0.0)


def undamped_chain(mode=MODE_CONSISTENT, phi1=math.pi / 3, phi2=math.pi / 4):
    return run_chain(UNDAMPED, UNDAMPED, UNDAMPED, phi1, phi2, mode)


# ---------------------------------------------------------------------------
# chained regimes
# ---------------------------------------------------------------------------


def test_consistent_chain_third_area():
    res = undamped_chain()
    assert res.w_tau1 == pytest.approx(-0.5, abs=1e-12)  # -cos(pi/3)
    assert res.rho00_frozen == pytest.approx(0.75, abs=1e-12)
    assert res.w_prime_init == pytest.approx(-0.25, abs=1e-12)
    assert res.pair12_population == pytest.approx(0.25, abs=1e-12)
    # Regime II transfers sin^2(pi/8) of the pair.
    rho22 = res.pair12_population * math.sin(math.pi / 8) ** 2
    assert res.w_dprime_init == pytest.approx(-rho22, abs=1e-12)
    assert not res.w_prime_clamped


def test_literal_chain_clamps_unphysical_handoff():
    res = undamped_chain(MODE_LITERAL)
    # The printed first-regime w reaches 1.5 at area pi/3, so the implied
    # handoff inversion -1.25 is clamped into the physical range.
    assert res.w_tau1 == pytest.approx(1.5, abs=1e-12)
    assert res.w_prime_init == -1.0
    assert res.w_prime_clamped
    assert res.w_dprime_init == pytest.approx(-(1 + 1.5) / 4.0)


def test_full_transfer_chain():
    res = undamped_chain(phi1=math.pi, phi2=math.pi)
    assert res.w_tau1 == pytest.approx(1.0, abs=1e-12)
    assert res.w_prime_init == pytest.approx(-1.0, abs=1e-12)
    # A pi second regime about the tilted axis cannot exceed w' = 0 on
    # resonance at area pi it has fully transferred.
    assert res.w_prime_tau2 == pytest.approx(1.0, abs=1e-12)
    assert res.w_dprime_init == pytest.approx(-1.0, abs=1e-12)


def test_equal_split_exact_at_half_pi_even_with_decay():
    t = 40.0
    damped = TransitionParams(1.0, 0.0, t, t)
    res = run_chain(damped, damped, damped, math.pi / 3, math.pi / 2, MODE_CONSISTENT)
    rho11, rho22 = regime2_populations(
        damped,
        np.array([math.pi / 2]),
        res.w_prime_init,
        res.pair12_population,
        MODE_CONSISTENT,
    )
    assert rho11[0] == pytest.approx(rho22[0], abs=1e-12)


def test_regime_population_curves():
    thetas = np.linspace(0.0, 4 * math.pi, 97)
    r0, r1 = regime1_populations(UNDAMPED, thetas, MODE_CONSISTENT)
    np.testing.assert_allclose(r0 + r1, 1.0, atol=1e-12)
    np.testing.assert_allclose(r1, np.sin(thetas / 2) ** 2, atol=1e-9)
    res = undamped_chain()
    r11, r22 = regime2_populations(
        UNDAMPED, thetas, res.w_prime_init, res.pair12_population, MODE_CONSISTENT
    )
    np.testing.assert_allclose(r11 + r22, res.pair12_population, atol=1e-12)
    r22b, r33 = regime3_populations(
        UNDAMPED, thetas, res.w_dprime_init, res.pair23_population, MODE_CONSISTENT
    )
    np.testing.assert_allclose(r22b + r33, res.pair23_population, atol=1e-12)


# ---------------------------------------------------------------------------
# landmark fits
# ---------------------------------------------------------------------------


def test_fit_axis_scale_recovers_known_point():
    def evaluate(thetas):
        thetas = np.asarray(thetas)
        return np.stack([np.cos(thetas / 2) ** 2, np.sin(thetas / 2) ** 2], axis=1)

    scale, residual, values = fit_axis_scale(evaluate, math.pi / 3, (1 / 3, 2 / 3))
    theta_star = 2 * math.asin(math.sqrt(2 / 3))
    assert scale == pytest.approx(theta_star / (math.pi / 3), abs=1e-3)
    assert residual < 1e-4
    assert values[1] == pytest.approx(2 / 3, abs=1e-4)


def test_first_equal_split_area_resonant():
    cfg = resolve_config({"t2": 1e9})
    theta = first_equal_split_area(cfg, -0.25)
    assert theta == pytest.approx(math.pi / 2, abs=1e-9)


# ---------------------------------------------------------------------------
# discrepancy report
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def default_report():
    cfg = resolve_config({})
    decay = cfg.decay_params()
    fids = {}
    for env in ("square", "gaussian"):
        sched = cfg.build_schedule(env)
        fids[env] = fidelity_vs_area(sched, decay, cfg.dt, stride=10, envelope=env)
    return cfg, build_discrepancy_report(
        cfg, fid_square=fids["square"], fid_gaussian=fids["gaussian"]
    )


EXPECTED_IDS = {
    "regime1-area-third-split",
    "regime2-equal-split",
    "regime1-printed-w-at-0",
    "regime2-printed-w-at-0",
    "regime3-printed-w-at-0",
    "initialization-fidelity",
    "max-fidelity-square",
    "max-fidelity-gaussian",
    "bell-location",
    "area-axis-divisor",
}


def test_report_enumerates_every_landmark(default_report):
    _, entries = default_report
    ids = {e["id"] for e in entries}
    assert EXPECTED_IDS <= ids
    for entry in entries:
        assert entry["description"]
        assert entry["reported"] is not None
        assert entry["nearest_achievable"] is not None


def test_report_population_landmarks(default_report):
    _, entries = default_report
    by_id = {e["id"]: e for e in entries}
    r1 = by_id["regime1-area-third-split"]
    # Nearest achievable split is exact at the rescaled area; with the
    # stock decay the fit sits slightly above the undamped 1.8245.
    assert r1["best_fit_axis_scale"] == pytest.approx(1.8245, abs=0.01)
    assert r1["residual"] < 1e-3
    assert r1["computed"]["rho11"] == pytest.approx(0.25, abs=0.01)
    r2 = by_id["regime2-equal-split"]
    assert r2["best_fit_axis_scale"] == pytest.approx(2.0, abs=1e-6)
    assert r2["nearest_achievable"]["rho11"] == r2["nearest_achievable"]["rho22"]


def test_report_printed_form_deltas(default_report):
    _, entries = default_report
    by_id = {e["id"]: e for e in entries}
    assert by_id["regime1-printed-w-at-0"]["residual"] == pytest.approx(2.0, abs=1e-12)
    w_prime = by_id["regime2-printed-w-at-0"]["computed"]["w_prime_init"]
    assert by_id["regime2-printed-w-at-0"]["residual"] == pytest.approx(abs(w_prime))
    assert w_prime < 0


def test_report_fidelity_landmarks(default_report):
    _, entries = default_report
    by_id = {e["id"]: e for e in entries}
    init = by_id["initialization-fidelity"]
    assert init["nearest_achievable"]["F_squared_at_equal_thirds_state"] == pytest.approx(
        1 / 3, abs=1e-12
    )
    sq = by_id["max-fidelity-square"]
    assert 0.70 < sq["computed"]["max_F"] < 0.76
    bell = by_id["bell-location"]
    assert bell["best_fit_axis_scale"] == pytest.approx(2.0, abs=0.1)


def test_report_without_sweeps_skips_fidelity_entries():
    cfg = resolve_config({})
    entries = build_discrepancy_report(cfg)
    ids = {e["id"] for e in entries}
    assert "max-fidelity-square" not in ids
    assert "regime1-area-third-split" in ids
    assert "area-axis-divisor" in ids
