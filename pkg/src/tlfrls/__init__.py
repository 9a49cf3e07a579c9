"""Two-layered forgetting RLS identification.

A directional-forgetting inner loop condenses the regressor stream into an
augmented pair ``(omega, M)``; an exponentially forgetting RLS outer loop
identifies the parameters from that pair. Baselines, an ARX plant simulator
and the experiment harness live alongside.
"""

from .acceptance import verify
from .bank import (
    ExcitationReport,
    InnerMode,
    RegressorBank,
    RegressorSample,
    consistency_residual,
    excitation_report,
    normalize,
    update,
    update_df,
    update_ef,
    update_none,
)
from .config import dump_config, parse_config
from .csvio import emit_csv, read_trace_csv
from .errors import NotPositiveDefinite, ParseError, ValidationError
from .estimators import (
    CLMemory,
    EstimatorState,
    GainConfig,
    dcl_step,
    dfcl_step,
    ef_rls_step,
    lyapunov_value,
    parameter_error,
    tlf_rls_step,
)
from .experiments import (
    ExperimentConfig,
    MethodSpec,
    RunResult,
    Trace,
    TraceRecord,
    compute_summary,
    default_config,
    run,
    run_case1,
    run_case2,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    condition_number,
    eigenvalues,
    max_eigenvalue,
    min_eigenvalue,
    numerical_rank,
    solve_spd,
    sym_matrix,
)
from .plant import (
    ChangeSchedule,
    InputSignal,
    PlantModel,
    SimHistory,
    arx_step,
    input_signal,
    paper_theta,
    schedule_theta,
    simulate,
)

__version__ = "0.1.0"
