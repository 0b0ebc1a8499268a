"""Scenario runner and figure-reproduction command line.

    simulate run --config <path> --out <dir> [--mode ...] [--strict]
    simulate figure <fig2|fig3|fig4|fig6|fig7> --out <dir> [--key=value ...]
    simulate validate --config <path>

Every command is deterministic: identical configuration produces
byte-identical output files.  Series land in CSV (with ``#``-prefixed
metadata lines carrying the effective config hash), tomograms in JSON,
and each report is also rendered to PNG unless ``render_plots`` is off.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 validity
guard tripped under --strict.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import chain as chain_mod
from . import plots, report
from .bloch import MODES, MODE_CONSISTENT
from .config import (
    FIELDS,
    ScenarioConfig,
    load_raw_config,
    parse_overrides,
    resolve_config,
)
from .errors import ConfigError, DomainError, NumericalFailureError, ValidityWarning
from .gates import cnot_truth_table, fidelity_vs_area, tomogram
from .liouville import integrate
from .pulses import CHANNEL_MICROWAVE, CHANNEL_SIGMA_MINUS, SHAPES
from .states import DensityMatrix

FIGURE_NAMES = ("fig2", "fig3", "fig4", "fig6", "fig7")
SNAPSHOT_LABELS = ("a", "b", "c", "d", "e", "f", "g", "h")
#: Canonical area of the truth-table drive: a full flip of the doublet.
TRUTH_TABLE_AREA = math.pi


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns, rows, metadata) -> Path:
    lines = [f"# {key}={_fmt(val)}" for key, val in metadata.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path: Path, payload) -> Path:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )
    return path


def _outdir(arg: str | None) -> Path:
    root = arg or os.environ.get("SIM_OUT_DIR") or "sim-out"
    out = Path(root)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(cfg: ScenarioConfig, **extra) -> dict:
    meta = {"config_sha256": cfg.config_hash(), "mode": cfg.mode}
    meta.update(extra)
    return meta


def snapshot_areas(cfg: ScenarioConfig) -> list[tuple[str, float]]:
    """Labeled tomogram snapshot areas: start, end of regime I, then the
    initialization point and successive half-pi steps of the third regime."""
    phi0 = cfg.phi1_canonical + cfg.phi2_canonical
    areas = [0.0, cfg.phi1_canonical]
    areas += [phi0 + k * cfg.flip_area_canonical for k in range(6)]
    return list(zip(SNAPSHOT_LABELS, areas))


def _available_snapshots(cfg, schedule) -> list[tuple[str, float]]:
    limit = schedule.total_realized_area() * 1.001 + 1e-12
    return [(label, phi) for label, phi in snapshot_areas(cfg) if phi <= limit]


# ---------------------------------------------------------------------------
# figure commands
# ---------------------------------------------------------------------------


def figure_fig2(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    thetas = np.linspace(0.0, 4.0 * math.pi, 1601)
    params = cfg.transition_params(CHANNEL_SIGMA_MINUS)
    rho00, rho11 = chain_mod.regime1_populations(params, thetas, cfg.mode)

    def eval_consistent(th):
        r0, r1 = chain_mod.regime1_populations(params, np.asarray(th), MODE_CONSISTENT)
        return np.stack([r0, r1], axis=1)

    scale, resid, _ = report.fit_axis_scale(eval_consistent, math.pi / 3.0, (1 / 3, 2 / 3))
    meta = _meta(
        cfg,
        landmark="area pi/3 -> populations (1/3, 2/3)",
        best_fit_axis_scale=scale,
        landmark_residual=resid,
    )
    files = [
        write_csv(
            outdir / "fig2.csv",
            ("area_rad", "rho00", "rho11"),
            zip(thetas, rho00, rho11),
            meta,
        )
    ]
    if cfg.render_plots:
        files.append(
            plots.plot_series(
                outdir / "fig2.png",
                thetas,
                {r"$\rho_{00}$": rho00, r"$\rho_{11}$": rho11},
                "pulse area (rad)",
                "population",
                "regime I populations",
            )
        )
    return files


def figure_fig3(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    result = _run_chain_for(cfg, cfg.mode)
    params12 = (
        cfg.consistent_chain_params(CHANNEL_MICROWAVE)
        if cfg.mode == MODE_CONSISTENT
        else cfg.transition_params(CHANNEL_MICROWAVE)
    )
    thetas = np.linspace(0.0, 4.0 * math.pi, 1601)
    rho11, rho22 = chain_mod.regime2_populations(
        params12, thetas, result.w_prime_init, result.pair12_population, cfg.mode
    )
    consistent = _run_chain_for(cfg, MODE_CONSISTENT)
    theta_split = report.first_equal_split_area(cfg, consistent.w_prime_init)
    meta = _meta(
        cfg,
        landmark="area pi/4 -> equal populations",
        equal_split_area_rad=theta_split,
        best_fit_axis_scale=theta_split / (math.pi / 4.0),
        equal_split_population=consistent.pair12_population / 2.0,
    )
    files = [
        write_csv(
            outdir / "fig3.csv",
            ("area_rad", "rho11", "rho22"),
            zip(thetas, rho11, rho22),
            meta,
        )
    ]
    if cfg.render_plots:
        files.append(
            plots.plot_series(
                outdir / "fig3.png",
                thetas,
                {r"$\rho_{11}$": rho11, r"$\rho_{22}$": rho22},
                "pulse area (rad)",
                "population",
                "regime II populations",
            )
        )
    return files


def figure_fig4(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    files = []
    panels = []
    decay = cfg.decay_params()
    for envelope in SHAPES:
        schedule = cfg.build_schedule(envelope)
        trace = integrate(
            DensityMatrix.ground(), schedule, decay, cfg.dt, stride=cfg.output_stride
        )
        pops = trace.populations
        files.append(
            write_csv(
                outdir / f"fig4_{envelope}.csv",
                ("area_rad", "rho00", "rho11", "rho22", "rho33"),
                (
                    (a, p[0], p[1], p[2], p[3])
                    for a, p in zip(trace.areas, pops)
                ),
                _meta(cfg, envelope=envelope),
            )
        )
        panels.append((f"{envelope} pulses", trace.areas, pops))
    if cfg.render_plots:
        files.append(
            plots.plot_population_panels(
                outdir / "fig4.png", panels, "cumulative pulse area (rad)"
            )
        )
    return files


def figure_fig6(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    schedule = cfg.build_schedule()
    decay = cfg.decay_params()
    labeled = []
    for label, phi in _available_snapshots(cfg, schedule):
        labeled.append((label, tomogram(schedule, decay, cfg.dt, phi)))
    payload = {
        "config_sha256": cfg.config_hash(),
        "mode": cfg.mode,
        "snapshots": [dict(label=label, **tomo.to_dict()) for label, tomo in labeled],
    }
    files = [write_json(outdir / "fig6.json", payload)]
    if cfg.render_plots:
        files.append(plots.plot_tomograms(outdir / "fig6.png", labeled))
    return files


def figure_fig7(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    files = []
    series_all = []
    reported = {"square": 0.74, "gaussian": 0.80}
    decay = cfg.decay_params()
    for envelope in SHAPES:
        schedule = cfg.build_schedule(envelope)
        series = fidelity_vs_area(
            schedule,
            decay,
            cfg.dt,
            stride=cfg.output_stride,
            envelope=envelope,
            area_from_phi0=cfg.fidelity_area_from_phi0,
        )
        series_all.append(series)
        meta = _meta(
            cfg,
            envelope=envelope,
            max_fidelity=series.max_fidelity,
            area_at_max=series.area_at_max,
            max_fidelity_squared=series.max_fidelity_squared,
            reported_max_fidelity=reported[envelope],
            residual=abs(series.max_fidelity - reported[envelope]),
        )
        files.append(
            write_csv(
                outdir / f"fig7_{envelope}.csv",
                ("area_rad", "fidelity", "fidelity_squared"),
                zip(series.areas, series.fidelity, series.fidelity_squared),
                meta,
            )
        )
    if cfg.render_plots:
        files.append(plots.plot_fidelity(outdir / "fig7.png", series_all))
    return files


FIGURE_COMMANDS = {
    "fig2": figure_fig2,
    "fig3": figure_fig3,
    "fig4": figure_fig4,
    "fig6": figure_fig6,
    "fig7": figure_fig7,
}


def _run_chain_for(cfg: ScenarioConfig, mode: str):
    if mode == MODE_CONSISTENT:
        params = [
            cfg.consistent_chain_params(ch)
            for ch in ("sigma_minus", "microwave", "sigma_plus")
        ]
    else:
        params = [
            cfg.transition_params(ch)
            for ch in ("sigma_minus", "microwave", "sigma_plus")
        ]
    return chain_mod.run_chain(
        params[0], params[1], params[2], cfg.phi1_canonical, cfg.phi2_canonical, mode
    )


# ---------------------------------------------------------------------------
# scenario runner
# ---------------------------------------------------------------------------


def run_scenario(cfg: ScenarioConfig, outdir: Path) -> list[Path]:
    """Full pipeline: trace, tomograms, fidelity, gate and discrepancy reports."""
    schedule = cfg.build_schedule()
    decay = cfg.decay_params()
    files = [write_json(outdir / "effective_config.json", cfg.effective_dict())]

    trace = integrate(
        DensityMatrix.ground(), schedule, decay, cfg.dt, stride=cfg.output_stride
    )
    pops = trace.populations
    coh = {pair: trace.coherence(*pair) for pair in ((0, 1), (1, 2), (2, 3))}
    files.append(
        write_csv(
            outdir / "trace.csv",
            (
                "t",
                "area_rad",
                "rho00",
                "rho11",
                "rho22",
                "rho33",
                "re_rho01",
                "im_rho01",
                "re_rho12",
                "im_rho12",
                "re_rho23",
                "im_rho23",
            ),
            (
                (
                    t,
                    a,
                    p[0],
                    p[1],
                    p[2],
                    p[3],
                    coh[(0, 1)][k].real,
                    coh[(0, 1)][k].imag,
                    coh[(1, 2)][k].real,
                    coh[(1, 2)][k].imag,
                    coh[(2, 3)][k].real,
                    coh[(2, 3)][k].imag,
                )
                for k, (t, a, p) in enumerate(zip(trace.times, trace.areas, pops))
            ),
            _meta(cfg, envelope=cfg.envelope),
        )
    )

    labeled = [
        (label, tomogram(schedule, decay, cfg.dt, phi))
        for label, phi in _available_snapshots(cfg, schedule)
    ]
    files.append(
        write_json(
            outdir / "tomograms.json",
            {
                "config_sha256": cfg.config_hash(),
                "mode": cfg.mode,
                "snapshots": [dict(label=lb, **tm.to_dict()) for lb, tm in labeled],
            },
        )
    )

    fid = {}
    for envelope in SHAPES:
        sched_env = schedule if envelope == cfg.envelope else cfg.build_schedule(envelope)
        fid[envelope] = fidelity_vs_area(
            sched_env,
            decay,
            cfg.dt,
            stride=cfg.output_stride,
            envelope=envelope,
            area_from_phi0=cfg.fidelity_area_from_phi0,
        )
    series = fid[cfg.envelope]
    files.append(
        write_csv(
            outdir / "fidelity.csv",
            ("area_rad", "fidelity", "fidelity_squared"),
            zip(series.areas, series.fidelity, series.fidelity_squared),
            _meta(
                cfg,
                envelope=cfg.envelope,
                max_fidelity=series.max_fidelity,
                area_at_max=series.area_at_max,
            ),
        )
    )

    gate_payload = {
        "config_sha256": cfg.config_hash(),
        "fidelity_maxima": {
            env: {
                "max_F": fid[env].max_fidelity,
                "area_at_max": fid[env].area_at_max,
                "max_F_squared": fid[env].max_fidelity_squared,
            }
            for env in SHAPES
        },
    }
    third_area = schedule.total_realized_area() - schedule.area_at(schedule.tau2)
    if third_area >= TRUTH_TABLE_AREA * 0.999:
        truth = cnot_truth_table(schedule, decay, cfg.dt, drive_area=TRUTH_TABLE_AREA)
        gate_payload["truth_table"] = truth.to_dict()
    else:
        gate_payload["truth_table"] = None
        gate_payload["truth_table_note"] = (
            "third regime carries less than the full-flip area pi"
        )
    files.append(write_json(outdir / "gate_report.json", gate_payload))

    entries = report.build_discrepancy_report(
        cfg, fid_square=fid["square"], fid_gaussian=fid["gaussian"]
    )
    files.append(
        write_json(
            outdir / "discrepancy_report.json",
            {"config_sha256": cfg.config_hash(), "entries": entries},
        )
    )

    if cfg.render_plots:
        files.append(plots.plot_trace(outdir / "trace.png", trace.times, trace.areas, pops))
        files.append(plots.plot_tomograms(outdir / "tomograms.png", labeled))
        files.append(
            plots.plot_fidelity(outdir / "fidelity.png", [fid["square"], fid["gaussian"]])
        )
    return files


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Deterministic four-level pulse-sequence simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a full scenario from a config file")
    p_run.add_argument("--config", required=True, help="path to the JSON config")
    p_run.add_argument("--out", default=None, help="output directory (default $SIM_OUT_DIR)")
    p_run.add_argument("--mode", choices=MODES, default=None)
    p_run.add_argument("--strict", action="store_true", help="validity warnings are fatal")

    p_fig = sub.add_parser("figure", help="reproduce one figure's data files")
    p_fig.add_argument("name", choices=FIGURE_NAMES)
    p_fig.add_argument("--config", default=None, help="optional base config file")
    p_fig.add_argument("--out", default=None)
    p_fig.add_argument("--strict", action="store_true")

    p_val = sub.add_parser("validate", help="check a config file and print the result")
    p_val.add_argument("--config", required=True)
    return parser


def _resolve(args, extra) -> tuple[ScenarioConfig, list]:
    raw, text = ({}, None)
    if getattr(args, "config", None):
        raw, text = load_raw_config(args.config)
    overrides = parse_overrides(extra)
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cfg = resolve_config(raw, overrides, text)
        cfg.build_schedule()
    validity = [w for w in caught if issubclass(w.category, ValidityWarning)]
    for w in validity:
        print(f"warning: {w.message}", file=sys.stderr)
    return cfg, validity


def main(argv=None) -> int:
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    if args.command != "figure" and extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        if args.command == "validate":
            cfg, _ = _resolve(args, [])
            print("config ok")
            print(json.dumps(cfg.effective_dict(), indent=2, sort_keys=True))
            return 0

        cfg, validity = _resolve(args, extra)
        if getattr(args, "strict", False) and validity:
            print("validity guard tripped under --strict", file=sys.stderr)
            return 4
        outdir = _outdir(args.out)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            if args.command == "run":
                files = run_scenario(cfg, outdir)
            else:
                files = FIGURE_COMMANDS[args.name](cfg, outdir)
        for path in files:
            print(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        trace = exc.partial_trace
        if trace is not None:
            partial = _outdir(getattr(args, "out", None)) / "partial_trace.csv"
            pops = trace.populations
            write_csv(
                partial,
                ("t", "area_rad", "rho00", "rho11", "rho22", "rho33"),
                (
                    (t, a, p[0], p[1], p[2], p[3])
                    for t, a, p in zip(trace.times, trace.areas, pops)
                ),
                {"partial": True},
            )
            print(f"wrote {partial}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
