"""dtsim: feasibility, cost, and policy-compliance simulation for
geographically distributed large-model training."""

__version__ = "0.1.0"

from .catalog import (
    Catalog,
    ChipSpec,
    NodeSpec,
    Precision,
    cluster_cost,
    default_catalog,
    h100_equivalents,
    lookup_preset,
    max_model_params,
)
from .efficiency import (
    CalibrationRow,
    DilocoConfig,
    EfficiencyBreakdown,
    EfficiencyParams,
    Mode,
    ScenarioMode,
    activation_penalty,
    calibrate_efficiency,
    compression_penalty,
    replica_penalty,
    sync_penalty,
    total_inefficiency,
)
from .errors import (
    DegenerateFitError,
    DtsimError,
    InfeasibleConfigError,
    InfeasibleTargetError,
    ScenarioParseError,
    UnboundedTimeError,
    UnknownPresetError,
    UnpricedNodeError,
)
from .network import (
    NetworkConditions,
    TrafficProfile,
    compute_bound_check,
    latency_ratio,
    step_time,
    sync_payload,
)
from .optimizer import (
    OptimalConfig,
    OptimizationRequest,
    SearchSpace,
    bandwidth_sweep,
    countermeasure_impact,
    min_cost_config,
)
from .policy import (
    ComplianceReport,
    PolicyRegime,
    builtin_regimes,
    compliance_report,
    model_threshold_violations,
    node_registrable,
    regime_by_name,
)
from .run_model import (
    GrowthRates,
    RunConfig,
    RunMetrics,
    expected_hardware_failures,
    max_training_time,
    simulate,
)
from .scaling import (
    ChinchillaParams,
    TrainedModel,
    chinchilla_optimal,
    loss,
    overtraining_ratio,
    quality_penalty,
    training_compute,
)
