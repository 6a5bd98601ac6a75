"""Two-area grid frequency dynamics toolchain.

Simulation of step disturbances on an interconnected two-area system,
Nadir/RoCoF metrics, swarm-based parameter identification from recorded
frequency traces, and multi-year generation-mix scenario sweeps with
synchronous-condenser mitigation.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AreaModel,
    Disturbance,
    GenerationBlock,
    GovernorParams,
    ModelError,
    SystemBase,
    TechnologyKind,
    TieLine,
    TwoAreaSystem,
    build_system,
    system_to_config,
    validate_decomposition,
)
from .simulator import (  # noqa: F401
    FrequencyTrace,
    SimConfig,
    SimulationDivergedError,
    block_response,
    simulate,
)
from .metrics import MetricsReport, compute_report, nadir, rocof_sliding, steady_state  # noqa: F401
from .scenarios import (  # noqa: F401
    DispatchSnapshot,
    MitigationSpec,
    ReferenceAnchor,
    ScenarioTrajectory,
    apply_mitigation,
    apply_snapshot,
    scale_damping,
    scale_droop,
    scale_inertia,
    split_inertia,
    sweep,
)
from .estimation import (  # noqa: F401
    EstimationResult,
    ParamSpace,
    PsoConfig,
    RecordedEvent,
    allocate_droops,
    estimate_full,
    estimate_reduced,
    objective,
    penalized_cost,
    pso_optimize,
)
