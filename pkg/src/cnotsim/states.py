"""State representations for the four-level system.

Levels are indexed 0..3 and double as two-qubit basis states through the
fixed encoding 0="00", 1="01", 2="10", 3="11".  Only three transitions are
ever driven, each by its own channel: (0,1), (1,2) and (2,3).

Sign conventions (fixed once, validated by the oracle cross-checks):

    u = rho_ij + rho_ji          (= 2 Re rho_ij)
    v = i (rho_ji - rho_ij)      (= 2 Im rho_ij)
    w = rho_jj - rho_ii

for the ordered transition pair (i, j), i.e. w is the population of the
*destination* level minus the source level, so every regime starts at
negative w.  The ground-state doublet starts at w = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBlockError, DomainError, InvalidStateError

#: Transitions addressable by a drive channel, ordered (source, destination).
COUPLED_TRANSITIONS = ((0, 1), (1, 2), (2, 3))

HERMITICITY_TOL = 1e-12
POPULATION_TOL = 1e-12
TRACE_TOL = 1e-9

_LEVEL_TO_BITS = {0: "00", 1: "01", 2: "10", 3: "11"}
_BITS_TO_LEVEL = {bits: level for level, bits in _LEVEL_TO_BITS.items()}


@dataclass(frozen=True)
class LevelStructure:
    """Angular frequencies (rad/s) of the four bare levels."""

    omega: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.omega) != 4:
            raise DomainError("level structure needs exactly four frequencies")
        w = self.omega
        if not (w[1] > w[0] and w[2] > w[3]):
            raise DomainError(
                "conduction levels must lie above their valence partners "
                "(omega1 > omega0 and omega2 > omega3)"
            )
        if w[1] == w[2]:
            raise DomainError("spin splitting must be nonzero (omega1 != omega2)")

    def transition_frequency(self, i: int, j: int) -> float:
        """omega_jj - omega_ii for the ordered pair (i, j)."""
        return self.omega[j] - self.omega[i]

    def detuning(self, drive_frequency: float, i: int, j: int) -> float:
        """Drive frequency minus the (i, j) transition frequency."""
        return drive_frequency - self.transition_frequency(i, j)


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian density matrix; the central state object.

    The trace may fall below one: the decay model damps matrix elements
    directly and is deliberately not trace preserving.  Populations are
    reported as raw diagonals, never renormalized.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise DomainError(f"density matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise InvalidStateError("density matrix is not Hermitian within 1e-12")
        diag = np.diagonal(m)
        if np.max(np.abs(diag.imag)) > HERMITICITY_TOL:
            raise InvalidStateError("diagonal entries must be real")
        if np.min(diag.real) < -POPULATION_TOL:
            raise InvalidStateError("diagonal entries must be non-negative")
        if diag.real.sum() > 1.0 + TRACE_TOL:
            raise InvalidStateError("trace exceeds one beyond tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def basis_state(cls, level: int) -> "DensityMatrix":
        if level not in (0, 1, 2, 3):
            raise DomainError(f"level must be 0..3, got {level}")
        m = np.zeros((4, 4), dtype=complex)
        m[level, level] = 1.0
        return cls(m)

    @classmethod
    def ground(cls) -> "DensityMatrix":
        return cls.basis_state(0)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(4, dtype=complex) / 4.0)

    @property
    def populations(self) -> np.ndarray:
        return np.diagonal(self.matrix).real.copy()

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class BlochVector:
    """Real (u, v, w) components of one driven two-level transition."""

    u: float
    v: float
    w: float
    transition: tuple[int, int]

    def __post_init__(self):
        if tuple(self.transition) not in COUPLED_TRANSITIONS:
            raise DomainError(
                f"transition must be one of {COUPLED_TRANSITIONS}, got {self.transition}"
            )
        object.__setattr__(self, "transition", tuple(self.transition))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.u**2 + self.v**2 + self.w**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w], dtype=float)


@dataclass(frozen=True)
class TwoQubitLabel:
    """A level index together with its two-bit binary name."""

    decimal: int
    binary: str


def binary_label(level: int) -> TwoQubitLabel:
    """Map a level index to its two-qubit label (0->"00", ..., 3->"11")."""
    if level not in _LEVEL_TO_BITS:
        raise DomainError(f"level must be 0..3, got {level}")
    return TwoQubitLabel(decimal=level, binary=_LEVEL_TO_BITS[level])


def level_from_binary(bits: str) -> int:
    """Inverse of :func:`binary_label`."""
    if bits not in _BITS_TO_LEVEL:
        raise DomainError(f"binary label must be one of {sorted(_BITS_TO_LEVEL)}, got {bits!r}")
    return _BITS_TO_LEVEL[bits]


def bloch_from_density(rho: DensityMatrix, i: int, j: int) -> BlochVector:
    """Extract the Bloch vector of transition (i, j) from a density matrix."""
    if (i, j) not in COUPLED_TRANSITIONS:
        raise DomainError(f"({i}, {j}) is not a coupled transition")
    m = rho.matrix
    u = float(2.0 * m[i, j].real)
    v = float(2.0 * m[i, j].imag)
    w = float(m[j, j].real - m[i, i].real)
    return BlochVector(u=u, v=v, w=w, transition=(i, j))


def density_update_from_bloch(rho_prev: DensityMatrix, b: BlochVector) -> DensityMatrix:
    """Embed a Bloch vector back into the 2x2 block of its transition.

    The population shared by the active pair, S = rho_ii + rho_jj, is taken
    from ``rho_prev`` and held fixed; spectator populations and coherences
    are untouched.  A block with S <= 0 can only host the zero vector.
    """
    i, j = b.transition
    m = np.array(rho_prev.matrix, dtype=complex)
    s = float(m[i, i].real + m[j, j].real)
    if s <= 0.0:
        if abs(s) <= POPULATION_TOL and b.norm <= POPULATION_TOL:
            m[i, i] = 0.0
            m[j, j] = 0.0
            m[i, j] = 0.0
            m[j, i] = 0.0
            return DensityMatrix(m)
        raise DegenerateBlockError(
            f"transition ({i}, {j}) block holds no population (S = {s!r})"
        )
    m[i, i] = (s - b.w) / 2.0
    m[j, j] = (s + b.w) / 2.0
    m[i, j] = (b.u + 1j * b.v) / 2.0
    m[j, i] = (b.u - 1j * b.v) / 2.0
    return DensityMatrix(m)
