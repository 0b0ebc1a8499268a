"""Landmark comparison and the discrepancy report.

The reported landmark values (population splits, fidelity maxima,
printed transient values) are not all reachable from the equations of
motion under a single area calibration.  Instead of silently adopting
one reading, every figure command measures the gap: each entry below
records the reported value, the value the simulation actually gives at
the reported location, the nearest achievable value, and, where the gap
looks like an axis-calibration question, the best-fit scale factor that
maps the reported location onto the achievable one.
"""

from __future__ import annotations

import math

import numpy as np

from .bloch import MODE_CONSISTENT, MODE_LITERAL, regime1_solution, regime2_solution
from .chain import regime1_populations, regime2_populations, run_chain
from .config import ScenarioConfig
from .gates import FidelitySeries, bell_overlap
from .pulses import CHANNEL_MICROWAVE, CHANNEL_SIGMA_MINUS, CHANNEL_SIGMA_PLUS
from .states import DensityMatrix

EQUAL_THIRDS_STATE = DensityMatrix(np.diag([1 / 3, 1 / 3, 0.0, 1 / 3]).astype(complex))


def fit_axis_scale(evaluate, reported_area, targets, s_lo=0.05, s_hi=6.0, n=8192):
    """Scale s minimizing ||evaluate(s * reported_area) - targets||^2.

    ``evaluate`` maps an array of canonical areas to an (n, k) value
    array.  Deterministic: dense grid plus one parabolic refinement.
    """
    s_grid = np.linspace(s_lo, s_hi, n)
    vals = np.asarray(evaluate(s_grid * reported_area), dtype=float)
    resid = np.sum((vals - np.asarray(targets, dtype=float)) ** 2, axis=1)
    i = int(np.argmin(resid))
    s = float(s_grid[i])
    if 0 < i < n - 1:
        y0, y1, y2 = resid[i - 1], resid[i], resid[i + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom > 0:
            s = float(s_grid[i] + 0.5 * (y0 - y2) / denom * (s_grid[1] - s_grid[0]))
    best_vals = np.asarray(evaluate(np.array([s * reported_area])), dtype=float)[0]
    residual = float(np.sqrt(np.sum((best_vals - np.asarray(targets)) ** 2)))
    return s, residual, [float(v) for v in best_vals]


def first_equal_split_area(cfg: ScenarioConfig, w_prime_init: float) -> float:
    """First second-regime area at which the (1, 2) populations equalize.

    The populations are equal exactly where the inversion crosses zero;
    located by bisection on the consistent solution.
    """
    params = cfg.consistent_chain_params(CHANNEL_MICROWAVE)

    def inversion(theta: float) -> float:
        t = theta / params.rabi
        return regime2_solution(w_prime_init, params, t, MODE_CONSISTENT).w

    lo = 0.0
    hi = None
    grid = np.linspace(0.0, 4.0 * math.pi, 4097)[1:]
    f_lo = inversion(0.0)
    for theta in grid:
        f = inversion(float(theta))
        if f_lo < 0.0 and f >= 0.0:
            hi = float(theta)
            break
        lo, f_lo = float(theta), f
    if hi is None:
        return math.nan
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if inversion(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _entry(
    entry_id: str,
    description: str,
    reported,
    computed,
    nearest_achievable,
    best_fit_axis_scale=None,
    residual=None,
    note: str = "",
) -> dict:
    return {
        "id": entry_id,
        "description": description,
        "reported": reported,
        "computed": computed,
        "nearest_achievable": nearest_achievable,
        "best_fit_axis_scale": best_fit_axis_scale,
        "residual": residual,
        "note": note,
    }


def build_discrepancy_report(
    cfg: ScenarioConfig,
    fid_square: FidelitySeries | None = None,
    fid_gaussian: FidelitySeries | None = None,
) -> list[dict]:
    """Assemble every landmark entry; list order is fixed."""
    p01 = cfg.consistent_chain_params(CHANNEL_SIGMA_MINUS)
    chain_c = run_chain(
        p01,
        cfg.consistent_chain_params(CHANNEL_MICROWAVE),
        cfg.consistent_chain_params(CHANNEL_SIGMA_PLUS),
        cfg.phi1_canonical,
        cfg.phi2_canonical,
        MODE_CONSISTENT,
    )
    chain_l = run_chain(
        cfg.transition_params(CHANNEL_SIGMA_MINUS),
        cfg.transition_params(CHANNEL_MICROWAVE),
        cfg.transition_params(CHANNEL_SIGMA_PLUS),
        cfg.phi1_canonical,
        cfg.phi2_canonical,
        MODE_LITERAL,
    )
    entries = []

    # 1. First-regime population split at area pi/3.
    def eval_regime1(thetas):
        r0, r1 = regime1_populations(p01, np.asarray(thetas), MODE_CONSISTENT)
        return np.stack([r0, r1], axis=1)

    scale1, resid1, best1 = fit_axis_scale(eval_regime1, math.pi / 3.0, (1 / 3, 2 / 3))
    at_pi3 = eval_regime1(np.array([cfg.axis_scale * math.pi / 3.0]))[0]
    entries.append(
        _entry(
            "regime1-area-third-split",
            "first-regime area pi/3 reported to prepare populations (1/3, 2/3)",
            reported={"area": math.pi / 3.0, "rho00": 1 / 3, "rho11": 2 / 3},
            computed={"rho00": float(at_pi3[0]), "rho11": float(at_pi3[1])},
            nearest_achievable={"rho00": best1[0], "rho11": best1[1]},
            best_fit_axis_scale=scale1,
            residual=resid1,
            note="a resonant drive transfers sin^2(theta/2); 2/3 needs area "
            "2*asin(sqrt(2/3)) ~= 1.911 rad, not pi/3",
        )
    )

    # 2. Second-regime equal split at area pi/4.
    theta_split = first_equal_split_area(cfg, chain_c.w_prime_init)
    p12 = cfg.consistent_chain_params(CHANNEL_MICROWAVE)
    at_phi2 = regime2_populations(
        p12,
        np.array([cfg.phi2_canonical]),
        chain_c.w_prime_init,
        chain_c.pair12_population,
        MODE_CONSISTENT,
    )
    split_value = chain_c.pair12_population / 2.0
    entries.append(
        _entry(
            "regime2-equal-split",
            "second-regime area pi/4 reported to prepare equal populations 1/3 each",
            reported={"area": math.pi / 4.0, "rho11": 1 / 3, "rho22": 1 / 3},
            computed={"rho11": float(at_phi2[0][0]), "rho22": float(at_phi2[1][0])},
            nearest_achievable={
                "equal_split_area": theta_split,
                "rho11": split_value,
                "rho22": split_value,
            },
            best_fit_axis_scale=(
                theta_split / (math.pi / 4.0) if not math.isnan(theta_split) else None
            ),
            residual=abs(split_value - 1 / 3),
            note="populations equalize where the inversion crosses zero "
            "(area pi/2 on resonance); the equal value is half the population "
            "handed over by regime I",
        )
    )

    # 3-5. Printed transient values at t = 0.
    w0_literal = regime1_solution(p01, 0.0, MODE_LITERAL).w
    entries.append(
        _entry(
            "regime1-printed-w-at-0",
            "printed first-regime w(t) evaluates to +1 at t = 0 against the stated "
            "initial inversion -1",
            reported={"w_at_0": w0_literal},
            computed={"w_at_0_consistent": regime1_solution(p01, 0.0, MODE_CONSISTENT).w},
            nearest_achievable={"w_at_0": -1.0},
            residual=abs(w0_literal - (-1.0)),
            note="sign defect preserved verbatim in paper-literal mode",
        )
    )
    w2_literal = regime2_solution(
        chain_l.w_prime_init, cfg.transition_params(CHANNEL_MICROWAVE), 0.0, MODE_LITERAL
    ).w
    entries.append(
        _entry(
            "regime2-printed-w-at-0",
            "printed second-regime w(t) vanishes at t = 0 against its own initial "
            "inversion w'(0)",
            reported={"w_at_0": w2_literal},
            computed={"w_prime_init": chain_c.w_prime_init},
            nearest_achievable={"w_at_0": chain_c.w_prime_init},
            residual=abs(chain_c.w_prime_init - w2_literal),
            note="consistent mode integrates from (0, 0, w'(0)) instead",
        )
    )
    entries.append(
        _entry(
            "regime3-printed-w-at-0",
            "printed third-regime w(t) vanishes at t = 0 against its own initial "
            "inversion w''(0)",
            reported={"w_at_0": 0.0},
            computed={"w_dprime_init": chain_c.w_dprime_init},
            nearest_achievable={"w_at_0": chain_c.w_dprime_init},
            residual=abs(chain_c.w_dprime_init),
            note="same defect as the second regime",
        )
    )

    # 6-9. Fidelity landmarks, when a sweep is available.
    f2_equal_thirds = bell_overlap(EQUAL_THIRDS_STATE)
    if fid_square is not None or fid_gaussian is not None:
        series = fid_square if fid_square is not None else fid_gaussian
        phi0 = cfg.phi1_canonical + cfg.phi2_canonical
        f_at_init, f2_at_init = series.value_at(phi0)
        entries.append(
            _entry(
                "initialization-fidelity",
                "maximum fidelity after initialization reported as 33% at area "
                "pi/3 + pi/4",
                reported={"fidelity": 0.33},
                computed={"F": f_at_init, "F_squared": f2_at_init},
                nearest_achievable={
                    "F_squared_at_equal_thirds_state": f2_equal_thirds,
                    "F_at_equal_thirds_state": math.sqrt(f2_equal_thirds),
                },
                residual=abs(f2_at_init - 0.33),
                note="33% matches the squared overlap of an equal-thirds mixture "
                "(F^2 = 1/3), not its square root (~58%); both columns are emitted",
            )
        )
    if fid_square is not None:
        entries.append(
            _entry(
                "max-fidelity-square",
                "maximum fidelity with square pulses reported as 74%",
                reported={"fidelity": 0.74},
                computed={
                    "max_F": fid_square.max_fidelity,
                    "area_at_max": fid_square.area_at_max,
                    "max_F_squared": fid_square.max_fidelity_squared,
                },
                nearest_achievable={"max_F": fid_square.max_fidelity},
                residual=abs(fid_square.max_fidelity - 0.74),
                note="reachable only when inter-regime coherences are kept; the "
                "stitched closed forms drop them at every boundary",
            )
        )
    if fid_gaussian is not None:
        entries.append(
            _entry(
                "max-fidelity-gaussian",
                "maximum fidelity with gaussian pulses reported as 80%",
                reported={"fidelity": 0.80},
                computed={
                    "max_F": fid_gaussian.max_fidelity,
                    "area_at_max": fid_gaussian.area_at_max,
                    "max_F_squared": fid_gaussian.max_fidelity_squared,
                },
                nearest_achievable={"max_F": fid_gaussian.max_fidelity},
                residual=abs(fid_gaussian.max_fidelity - 0.80),
                note="a gaussian train spends ~3x the wall-clock time of square "
                "pulses for equal area, so it decays further here; probing "
                "axis_scale=2 (the calibration the population landmarks point to) "
                "lifts the undamped square maximum to ~0.79",
            )
        )
    if fid_square is not None or fid_gaussian is not None:
        series = fid_square if fid_square is not None else fid_gaussian
        phi0 = cfg.phi1_canonical + cfg.phi2_canonical
        tail = series.areas >= phi0
        if np.any(tail):
            idx = int(np.argmax(np.where(tail, series.fidelity, -1.0)))
            theta3_star = float(series.areas[idx] - phi0)
            entries.append(
                _entry(
                    "bell-location",
                    "third-regime area pi/2 reported to flip the doublet and reach "
                    "the Bell state",
                    reported={"third_regime_area": math.pi / 2.0},
                    computed={"area_of_max_F_past_init": theta3_star},
                    nearest_achievable={"third_regime_area": theta3_star},
                    best_fit_axis_scale=theta3_star / (math.pi / 2.0),
                    note="a full population flip of a resonant doublet takes area pi",
                )
            )

    # 10. Area-axis definition.
    entries.append(
        _entry(
            "area-axis-divisor",
            "the quoted area expression divides the phase beta*t by 2 pi, while the "
            "area theorem it accompanies integrates the bare Rabi rate",
            reported={"axis": "beta*t / (2 pi)"},
            computed={"axis": "integral of Omega(t) dt, radians"},
            nearest_achievable={"conversion_factor": 2.0 * math.pi},
            note="all emitted area columns are canonical radians; the axis_scale "
            "key lets alternative calibrations be probed",
        )
    )
    return entries
