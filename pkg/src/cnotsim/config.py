"""Scenario configuration: a flat, strictly validated key-value document.

Configs are JSON objects with scalar values only.  Unknown keys are
rejected with the line they appear on.  Area-valued keys accept either
radians or strings like ``"pi/3"`` or ``"2pi"``.  All defaults are
dimensionless and describe the stock scenario: unit Rabi rates, resonant
drives, Omega * T2 = 100, areas pi/3 and pi/4, five half-pi flips.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

from .bloch import MODES, MODE_CONSISTENT, TransitionParams
from .errors import ConfigError, ValidityWarning
from .liouville import DecayParams
from .pulses import (
    CHANNEL_MICROWAVE,
    CHANNEL_SIGMA_MINUS,
    CHANNEL_SIGMA_PLUS,
    SHAPES,
    RegimeSchedule,
    build_cnot_schedule,
)

#: Scenario-level guard: warn when Omega * T2 falls below this margin.
STRONG_FIELD_MARGIN = 10.0
#: Default resolution of the integrator, in steps per fastest period.
DEFAULT_STEPS_PER_PERIOD = 400

_AREA_RE = re.compile(r"^\s*([0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$", re.IGNORECASE)


def parse_area(value) -> float:
    """Radians from a number or a 'pi'-style string such as '2pi' or 'pi/3'."""
    if isinstance(value, bool):
        raise ConfigError(f"expected an area, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _AREA_RE.match(value)
        if m:
            coeff = float(m.group(1)) if m.group(1) else 1.0
            div = float(m.group(2)) if m.group(2) else 1.0
            return coeff * math.pi / div
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"cannot parse area {value!r}") from None
    raise ConfigError(f"expected an area, got {value!r}")


def _parse_float(value) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"cannot parse number {value!r}") from None
    raise ConfigError(f"expected a number, got {value!r}")


def _parse_opt_float(value) -> float | None:
    if value is None or (isinstance(value, str) and value.lower() in ("", "none", "null")):
        return None
    return _parse_float(value)


def _parse_int(value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"cannot parse integer {value!r}") from None
    raise ConfigError(f"expected an integer, got {value!r}")


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        low = value.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def _parse_enum(options):
    def parse(value):
        if value in options:
            return value
        raise ConfigError(f"expected one of {options}, got {value!r}")

    return parse


#: key -> (parser, default, doc).  Defaults are pre-parsed values.
FIELDS: dict[str, tuple] = {
    "level0": (_parse_float, 0.0, "bare angular frequency of level |0>"),
    "level1": (_parse_float, 100.0, "bare angular frequency of level |1>"),
    "level2": (_parse_float, 110.0, "bare angular frequency of level |2>"),
    "level3": (_parse_float, 5.0, "bare angular frequency of level |3>"),
    "omega01": (_parse_float, 1.0, "peak Rabi rate of the sigma-minus channel"),
    "omega12": (_parse_float, 1.0, "peak Rabi rate of the microwave channel"),
    "omega23": (_parse_float, 1.0, "peak Rabi rate of the sigma-plus channel"),
    "delta01": (_parse_float, 0.0, "detuning of the sigma-minus channel"),
    "delta12": (_parse_float, 0.0, "detuning of the microwave channel"),
    "delta23": (_parse_float, 0.0, "detuning of the sigma-plus channel"),
    "omega_t2": (_parse_float, 100.0, "dimensionless Omega*T2 used when t2 is unset"),
    "t1": (_parse_opt_float, None, "population relaxation time; defaults to t2"),
    "t2": (_parse_opt_float, None, "dephasing time; defaults to omega_t2/omega01"),
    "t2_prime": (_parse_opt_float, None, "microwave dephasing time; defaults to t2"),
    "envelope": (_parse_enum(SHAPES), "square", "pulse envelope shape"),
    "phi1": (parse_area, math.pi / 3.0, "first-regime area (axis units)"),
    "phi2": (parse_area, math.pi / 4.0, "second-regime area (axis units)"),
    "n_flips": (_parse_int, 5, "number of half-pi third-regime pulses"),
    "train_period": (_parse_opt_float, None, "third-regime pulse spacing; default 8 sigma"),
    "axis_scale": (_parse_float, 1.0, "canonical area per unit of the area axis"),
    "zeeman_shift": (_parse_bool, False, "shift the microwave detuning by its Rabi rate"),
    "w0_regime1": (_parse_float, 0.0, "equilibrium inversion of the (0,1) pair"),
    "dt": (_parse_opt_float, None, "integrator step; default period/400"),
    "output_stride": (_parse_int, 10, "record every n-th integrator step"),
    "mode": (_parse_enum(MODES), MODE_CONSISTENT, "closed-form evaluation mode"),
    "seedless": (_parse_bool, True, "must stay true; every run is deterministic"),
    "fidelity_area_from_phi0": (
        _parse_bool,
        False,
        "measure the fidelity area axis from the initialization point",
    ),
    "render_plots": (_parse_bool, True, "render png figures alongside the data files"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario parameters (no optional fields left unset)."""

    level0: float
    level1: float
    level2: float
    level3: float
    omega01: float
    omega12: float
    omega23: float
    delta01: float
    delta12: float
    delta23: float
    omega_t2: float
    t1: float
    t2: float
    t2_prime: float
    envelope: str
    phi1: float
    phi2: float
    n_flips: int
    train_period: float | None
    axis_scale: float
    zeeman_shift: bool
    w0_regime1: float
    dt: float
    output_stride: int
    mode: str
    seedless: bool
    fidelity_area_from_phi0: bool
    render_plots: bool

    # -- derived quantities -------------------------------------------------

    @property
    def phi1_canonical(self) -> float:
        return self.axis_scale * self.phi1

    @property
    def phi2_canonical(self) -> float:
        return self.axis_scale * self.phi2

    @property
    def flip_area_canonical(self) -> float:
        return self.axis_scale * math.pi / 2.0

    def peak_rabis(self) -> tuple[float, float, float]:
        return (self.omega01, self.omega12, self.omega23)

    def base_detunings(self) -> tuple[float, float, float]:
        return (self.delta01, self.delta12, self.delta23)

    def effective_detunings(self) -> tuple[float, float, float]:
        """Detunings as driven, including the optional microwave shift."""
        d12 = self.delta12 + (self.omega12 if self.zeeman_shift else 0.0)
        return (self.delta01, d12, self.delta23)

    def decay_params(self) -> DecayParams:
        decay = DecayParams.from_times(self.t1, self.t2)
        if self.t2_prime != self.t2:
            g = decay.gamma.copy()
            g[1, 2] = g[2, 1] = 1.0 / self.t2_prime if not math.isinf(self.t2_prime) else 0.0
            decay = DecayParams(g)
        return decay

    def transition_params(self, channel: str) -> TransitionParams:
        """Closed-form parameters for one channel (base detuning, no shift)."""
        if channel == CHANNEL_SIGMA_MINUS:
            return TransitionParams(
                self.omega01, self.delta01, self.t1, self.t2, self.w0_regime1
            )
        if channel == CHANNEL_MICROWAVE:
            return TransitionParams(self.omega12, self.delta12, self.t1, self.t2_prime)
        if channel == CHANNEL_SIGMA_PLUS:
            return TransitionParams(self.omega23, self.delta23, self.t1, self.t2)
        raise ConfigError(f"unknown channel {channel!r}")

    def consistent_chain_params(self, channel: str) -> TransitionParams:
        """Like :meth:`transition_params` but with the effective detunings."""
        base = self.transition_params(channel)
        if channel == CHANNEL_MICROWAVE and self.zeeman_shift:
            return TransitionParams(base.rabi, base.detuning + base.rabi, base.t1, base.t2)
        return base

    def build_schedule(self, envelope: str | None = None) -> RegimeSchedule:
        return build_cnot_schedule(
            phi1=self.phi1_canonical,
            phi2=self.phi2_canonical,
            n_flips=self.n_flips,
            shape=envelope or self.envelope,
            peak_rabis=self.peak_rabis(),
            detunings=self.base_detunings(),
            decay_times=(self.t2, self.t2_prime),
            flip_area=self.flip_area_canonical,
            train_period=self.train_period,
            zeeman_shift=self.zeeman_shift,
        )

    def effective_dict(self) -> dict:
        out = {}
        for key in FIELDS:
            out[key] = getattr(self, key)
        return out

    def config_hash(self) -> str:
        payload = json.dumps(self.effective_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return f" (line {lineno})"
    return ""


def load_raw_config(path: str | Path) -> tuple[dict, str]:
    """Read a config file; JSON errors are reported with their location."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a flat JSON object")
    return raw, text


def parse_overrides(pairs: list[str]) -> dict:
    """Parse CLI overrides of the form --key=value."""
    out = {}
    for pair in pairs:
        if not pair.startswith("--") or "=" not in pair:
            raise ConfigError(f"override {pair!r} must look like --key=value")
        key, _, value = pair[2:].partition("=")
        if key not in FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = value
    return out


def resolve_config(
    raw: dict | None = None,
    overrides: dict | None = None,
    source_text: str | None = None,
) -> ScenarioConfig:
    """Merge raw values over the defaults and fully resolve derived fields.

    Emits :class:`ValidityWarning` for configurations that break the
    modelling assumptions without being outright invalid.
    """
    raw = dict(raw or {})
    for key in raw:
        if key not in FIELDS:
            raise ConfigError(f"unknown config key {key!r}{_line_of(source_text, key)}")
    merged = {}
    for key, (parser, default, _) in FIELDS.items():
        if key in raw:
            try:
                merged[key] = parser(raw[key])
            except ConfigError as exc:
                raise ConfigError(f"config key {key!r}: {exc}{_line_of(source_text, key)}") from None
        else:
            merged[key] = default
    for key, value in (overrides or {}).items():
        parser = FIELDS[key][0]
        try:
            merged[key] = parser(value)
        except ConfigError as exc:
            raise ConfigError(f"override {key!r}: {exc}") from None

    _validate(merged)

    # Resolve the optional fields.
    if merged["t2"] is None:
        merged["t2"] = merged["omega_t2"] / merged["omega01"]
    if merged["t1"] is None:
        merged["t1"] = merged["t2"]
    if merged["t2_prime"] is None:
        merged["t2_prime"] = merged["t2"]
    if merged["dt"] is None:
        d12 = merged["delta12"] + (merged["omega12"] if merged["zeeman_shift"] else 0.0)
        beta_max = max(
            math.hypot(merged["omega01"], merged["delta01"]),
            math.hypot(merged["omega12"], d12),
            math.hypot(merged["omega23"], merged["delta23"]),
        )
        merged["dt"] = (2.0 * math.pi / beta_max) / DEFAULT_STEPS_PER_PERIOD

    cfg = ScenarioConfig(**merged)
    _guard(cfg)
    return cfg


def _validate(m: dict) -> None:
    if not (m["level1"] > m["level0"] and m["level2"] > m["level3"]):
        raise ConfigError("levels must satisfy level1 > level0 and level2 > level3")
    if m["level1"] == m["level2"]:
        raise ConfigError("levels must satisfy level1 != level2 (nonzero spin splitting)")
    for key in ("omega01", "omega12", "omega23", "omega_t2", "axis_scale"):
        if m[key] <= 0:
            raise ConfigError(f"config key {key!r} must be positive")
    for key in ("t1", "t2", "t2_prime", "dt", "train_period"):
        if m[key] is not None and m[key] <= 0:
            raise ConfigError(f"config key {key!r} must be positive when set")
    for key in ("phi1", "phi2"):
        if not 0.0 < m[key] <= 2.0 * math.pi:
            raise ConfigError(f"config key {key!r} must lie in (0, 2 pi]")
    if m["n_flips"] < 0:
        raise ConfigError("n_flips must be non-negative")
    if m["output_stride"] < 1:
        raise ConfigError("output_stride must be at least 1")
    if abs(m["w0_regime1"]) > 1.0:
        raise ConfigError("w0_regime1 must lie in [-1, 1]")
    if not m["seedless"]:
        raise ConfigError("seedless must stay true; there is no stochastic path")


def _guard(cfg: ScenarioConfig) -> None:
    worst = min(
        cfg.omega01 * cfg.t2, cfg.omega12 * cfg.t2_prime, cfg.omega23 * cfg.t2
    )
    if worst < STRONG_FIELD_MARGIN:
        warnings.warn(
            f"strong-field assumption is marginal: min Omega*T2 = {worst:.3g} "
            f"< {STRONG_FIELD_MARGIN:g}",
            ValidityWarning,
            stacklevel=3,
        )
