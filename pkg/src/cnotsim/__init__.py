"""Four-level spin-system pulse-sequence simulator with gate verification."""

from .bloch import (
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
from .config import ScenarioConfig, resolve_config
from .gates import (
    FidelitySeries,
    GateReport,
    Tomogram,
    TruthTable,
    bell_fidelity,
    bell_overlap,
    cnot_truth_table,
    fidelity_vs_area,
    tomogram,
)
from .liouville import (
    DecayParams,
    HamiltonianFrame,
    SimulationTrace,
    hamiltonian_at,
    integrate,
    liouville_rhs,
)
from .pulses import (
    Pulse,
    RegimeSchedule,
    build_cnot_schedule,
    duration_for_area,
    pulse_area,
    stitch,
)
from .states import (
    BlochVector,
    DensityMatrix,
    LevelStructure,
    TwoQubitLabel,
    binary_label,
    bloch_from_density,
    density_update_from_bloch,
    level_from_binary,
)

__version__ = "0.1.0"

__all__ = [
    "MODE_CONSISTENT",
    "MODE_LITERAL",
    "BlochVector",
    "DecayParams",
    "DensityMatrix",
    "FidelitySeries",
    "GateReport",
    "HamiltonianFrame",
    "LevelStructure",
    "Pulse",
    "RegimeInit",
    "RegimeSchedule",
    "ScenarioConfig",
    "SimulationTrace",
    "Tomogram",
    "TransitionParams",
    "TruthTable",
    "TwoQubitLabel",
    "bell_fidelity",
    "bell_overlap",
    "beta",
    "binary_label",
    "bloch_from_density",
    "bloch_rhs",
    "build_cnot_schedule",
    "cnot_truth_table",
    "density_update_from_bloch",
    "duration_for_area",
    "fidelity_vs_area",
    "general_solution",
    "hamiltonian_at",
    "integrate",
    "level_from_binary",
    "liouville_rhs",
    "pulse_area",
    "regime1_solution",
    "regime2_solution",
    "regime3_solution",
    "resolve_config",
    "stitch",
    "tomogram",
    "xi",
]
