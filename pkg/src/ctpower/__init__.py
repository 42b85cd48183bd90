"""Exact simulation and analysis of controlled teleportation over
three-qubit channels, centred on the controller's power: how much average
fidelity the receiver loses when the controller withholds cooperation.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    CorrectionMismatchError,
    DegenerateBasisError,
    DimensionError,
    MatchedFamiliesError,
    NormalizationError,
    RangeError,
)
from .qcore import (
    BELL_OUTCOMES,
    BellOutcome,
    DensityOperator,
    PureState,
    apply_gate,
    bell_state,
    equal_up_to_global_phase,
    fidelity_with_pure,
    make_qubit,
    partial_trace,
    pauli,
    project_single_qubit,
    project_two_qubit,
    tensor,
    to_density,
)
from .channels import (
    TANGLE_BOUND,
    ChannelSpec,
    GHZChannel,
    MSChannel,
    RawChannel,
    TangleReport,
    ThetaChannel,
    channel_from_config,
    channel_to_config,
    charlie_basis,
    ms_state,
    named_channel,
    realize,
    theta_channel,
    three_tangle,
)
from .protocol import (
    ArbitraryInput,
    CtBranch,
    CtRunResult,
    InputFamily,
    NcfResult,
    XYInput,
    XZInput,
    YZInput,
    bob_correction,
    controlled_teleport,
    input_state,
    ncf_batch,
    ncf_ms_closed,
    ncf_theta_closed,
    unconditioned_teleport,
)
from .analysis import (
    CLASSICAL_FIDELITY,
    CLASSICAL_POWER,
    AverageResult,
    Measure,
    MismatchReport,
    MismatchRow,
    PowerReport,
    avg_fidelity_ms_analytic,
    avg_fidelity_numeric,
    control_power,
    mismatch_ncf_closed,
    mismatch_report,
    mismatch_table,
    power_bound_check,
    power_report,
    power_table,
    sweep,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "CorrectionMismatchError",
    "DegenerateBasisError",
    "DimensionError",
    "MatchedFamiliesError",
    "NormalizationError",
    "RangeError",
    "BELL_OUTCOMES",
    "BellOutcome",
    "DensityOperator",
    "PureState",
    "apply_gate",
    "bell_state",
    "equal_up_to_global_phase",
    "fidelity_with_pure",
    "make_qubit",
    "partial_trace",
    "pauli",
    "project_single_qubit",
    "project_two_qubit",
    "tensor",
    "to_density",
    "TANGLE_BOUND",
    "ChannelSpec",
    "GHZChannel",
    "MSChannel",
    "RawChannel",
    "TangleReport",
    "ThetaChannel",
    "channel_from_config",
    "channel_to_config",
    "charlie_basis",
    "ms_state",
    "named_channel",
    "realize",
    "theta_channel",
    "three_tangle",
    "ArbitraryInput",
    "CtBranch",
    "CtRunResult",
    "InputFamily",
    "NcfResult",
    "XYInput",
    "XZInput",
    "YZInput",
    "bob_correction",
    "controlled_teleport",
    "input_state",
    "ncf_batch",
    "ncf_ms_closed",
    "ncf_theta_closed",
    "unconditioned_teleport",
    "CLASSICAL_FIDELITY",
    "CLASSICAL_POWER",
    "AverageResult",
    "Measure",
    "MismatchReport",
    "MismatchRow",
    "PowerReport",
    "avg_fidelity_ms_analytic",
    "avg_fidelity_numeric",
    "control_power",
    "mismatch_ncf_closed",
    "mismatch_report",
    "mismatch_table",
    "power_bound_check",
    "power_report",
    "power_table",
    "sweep",
]
