"""Gate verification: truth tables, tomograms and Bell-state fidelity.

The target Bell state is (|00> - i |11>) / sqrt(2).  With the level
encoding 0="00", 3="11" its overlap with a density matrix reduces to

    <Psi|rho|Psi> = (rho_00 + rho_33) / 2 + Im rho_03

and the fidelity is the square root of that overlap.  Both the root and
the square are reported everywhere, because the two disagree on which
published landmark values they can reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidStateError
from .liouville import DecayParams, integrate
from .pulses import RegimeSchedule
from .states import DensityMatrix, binary_label

BASIS_LABELS = ("00", "01", "10", "11")
IDEAL_CNOT = {"00": "00", "01": "01", "10": "11", "11": "10"}

_OVERLAP_FLOOR = -1e-9
_POPULATION_CLAMP = -1e-10


def bell_overlap(rho: DensityMatrix) -> float:
    """<Psi|rho|Psi> for the target Bell state; this is the squared fidelity."""
    m = rho.matrix
    val = float((m[0, 0].real + m[3, 3].real) / 2.0 + m[0, 3].imag)
    if val < _OVERLAP_FLOOR:
        raise InvalidStateError(f"Bell overlap {val!r} below {_OVERLAP_FLOOR}")
    return val


def bell_fidelity(rho: DensityMatrix) -> float:
    """sqrt(<Psi|rho|Psi>), clamped into [0, 1]."""
    return min(1.0, math.sqrt(max(0.0, bell_overlap(rho))))


def _clamped_populations(diag: np.ndarray) -> np.ndarray:
    if np.min(diag) < _POPULATION_CLAMP:
        raise InvalidStateError(f"population {np.min(diag)!r} below {_POPULATION_CLAMP}")
    return np.clip(diag, 0.0, None)


@dataclass(frozen=True)
class Tomogram:
    """Output populations per basis input; row i is the output diagonal for input i."""

    populations: np.ndarray
    pulse_area_tag: float

    def __post_init__(self):
        p = np.array(self.populations, dtype=float)
        if p.shape != (4, 4):
            raise DomainError(f"tomogram must be 4x4, got {p.shape}")
        if np.min(p) < -1e-12:
            raise InvalidStateError("tomogram entries must be non-negative")
        if np.max(p.sum(axis=1)) > 1.0 + 1e-9:
            raise InvalidStateError("tomogram rows must sum to at most one")
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)

    def to_dict(self) -> dict:
        return {
            "pulse_area_rad": self.pulse_area_tag,
            "input_labels": list(BASIS_LABELS),
            "output_labels": list(BASIS_LABELS),
            "populations": [[float(x) for x in row] for row in self.populations],
        }


@dataclass(frozen=True)
class TruthTable:
    """Dominant output per basis input, with the full distributions."""

    outcomes: tuple[tuple[str, str], ...]
    distributions: np.ndarray
    ties: tuple[str, ...]

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self.outcomes)

    @property
    def is_cnot(self) -> bool:
        return self.mapping == IDEAL_CNOT

    def to_dict(self) -> dict:
        return {
            "outcomes": self.mapping,
            "ideal": IDEAL_CNOT,
            "is_cnot": self.is_cnot,
            "ties": list(self.ties),
            "distributions": [[float(x) for x in row] for row in self.distributions],
        }


@dataclass(frozen=True)
class FidelitySeries:
    """Bell fidelity along a pulse-area sweep, for one envelope shape."""

    areas: np.ndarray
    fidelity: np.ndarray
    fidelity_squared: np.ndarray
    envelope: str

    def __post_init__(self):
        f = np.asarray(self.fidelity, dtype=float)
        if np.min(f) < 0.0 or np.max(f) > 1.0:
            raise InvalidStateError("fidelity must stay within [0, 1]")

    @property
    def max_fidelity(self) -> float:
        return float(np.max(self.fidelity))

    @property
    def area_at_max(self) -> float:
        return float(self.areas[int(np.argmax(self.fidelity))])

    @property
    def max_fidelity_squared(self) -> float:
        return float(np.max(self.fidelity_squared))

    @property
    def area_at_max_squared(self) -> float:
        return float(self.areas[int(np.argmax(self.fidelity_squared))])

    def value_at(self, area: float) -> tuple[float, float]:
        """(F, F^2) at the recorded sample nearest the requested area."""
        idx = int(np.argmin(np.abs(self.areas - area)))
        return float(self.fidelity[idx]), float(self.fidelity_squared[idx])


def _basis_inputs() -> list[tuple[str, DensityMatrix]]:
    return [(binary_label(k).binary, DensityMatrix.basis_state(k)) for k in range(4)]


def cnot_truth_table(
    schedule: RegimeSchedule,
    decay: DecayParams,
    dt: float,
    drive_area: float = math.pi,
) -> TruthTable:
    """Drive each basis input with the third-regime pulse and read the argmax.

    The drive covers ``drive_area`` of third-regime area starting at tau2
    (a full flip of the (2, 3) doublet at the default pi).  Ties within
    1e-9 are flagged and break toward the lower level index.
    """
    if drive_area <= 0:
        raise DomainError("drive_area must be positive")
    t0 = schedule.tau2
    t1 = schedule.time_at_area(schedule.area_at(t0) + drive_area)
    rows = []
    outcomes = []
    ties = []
    for label, rho0 in _basis_inputs():
        trace = integrate(rho0, schedule, decay, dt, stride=10**9, t_start=t0, t_stop=t1)
        diag = _clamped_populations(trace.populations[-1])
        rows.append(diag)
        order = np.sort(diag)[::-1]
        if order[0] - order[1] < 1e-9:
            ties.append(label)
        outcomes.append((label, binary_label(int(np.argmax(diag))).binary))
    return TruthTable(
        outcomes=tuple(outcomes), distributions=np.array(rows), ties=tuple(ties)
    )


def tomogram(
    schedule: RegimeSchedule, decay: DecayParams, dt: float, phi: float
) -> Tomogram:
    """Snapshot the four basis-input evolutions at cumulative area ``phi``."""
    t = schedule.time_at_area(phi)
    rows = []
    for _, rho0 in _basis_inputs():
        if t <= 0.0:
            rows.append(_clamped_populations(rho0.populations))
            continue
        trace = integrate(rho0, schedule, decay, dt, stride=10**9, t_stop=t)
        rows.append(_clamped_populations(trace.populations[-1]))
    return Tomogram(populations=np.array(rows), pulse_area_tag=phi)


def fidelity_vs_area(
    schedule: RegimeSchedule,
    decay: DecayParams,
    dt: float,
    stride: int = 10,
    rho0: DensityMatrix | None = None,
    envelope: str = "square",
    area_from_phi0: bool = False,
) -> FidelitySeries:
    """Bell fidelity along one integration of the full schedule.

    Starts from the ground state unless ``rho0`` is given.  With
    ``area_from_phi0`` the area axis is shifted so zero sits at the end
    of the second regime (the initialization point).
    """
    trace = integrate(rho0 or DensityMatrix.ground(), schedule, decay, dt, stride=stride)
    pops = trace.populations
    overlap = (pops[:, 0] + pops[:, 3]) / 2.0 + trace.states[:, 0, 3].imag
    if float(np.min(overlap)) < _OVERLAP_FLOOR:
        raise InvalidStateError("Bell overlap fell below tolerance along the sweep")
    f2 = np.clip(overlap, 0.0, None)
    f = np.minimum(1.0, np.sqrt(f2))
    areas = trace.areas.copy()
    if area_from_phi0:
        areas -= schedule.area_at(schedule.tau2)
    return FidelitySeries(
        areas=areas, fidelity=f, fidelity_squared=f2, envelope=envelope
    )


@dataclass(frozen=True)
class GateReport:
    """Bundle of the gate-level verification artifacts for one scenario."""

    truth_table: TruthTable
    tomograms: tuple[Tomogram, ...]
    fidelity: FidelitySeries
