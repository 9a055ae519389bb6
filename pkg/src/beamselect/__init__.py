"""Agent subset selection for distributed beamforming under Gaussian error.

Evaluates closed-form mean/variance of beamforming gain from per-agent
effective phase errors, selects minimum-variance subsets meeting an
expected-gain threshold (greedy, double-loop greedy, difference-of-submodular),
and validates everything against an exhaustive oracle and Monte Carlo
simulation.
"""

from .errors import (
    BeamselectError,
    ConvergenceError,
    DegenerateDistributionError,
    GeometryError,
    InfeasibleError,
    InputError,
    ModelError,
    ParseError,
    SizeError,
    ValidationError,
)
from .gain_model import (
    MAX_AGENTS,
    AgentGeometry,
    GainStats,
    PhaseStats,
    Scenario,
    as_gamma_vector,
    as_index_set,
    effective_error,
    expected_gain,
    gain_stats,
    gain_variance,
    max_expected_gain,
    summation_identity_residual,
    wrapped_normal_pdf,
)
from .instance_io import (
    ScenarioDocument,
    SweepRecord,
    SweepSpec,
    generate_instance,
    instance_seed,
    load_instance,
    load_results,
    load_scenario,
    save_instance,
    save_result,
    scenario_to_instance,
)
from .montecarlo import McReport, sample_total_phase, simulate_gain, validate_closed_forms
from .selection import (
    MAX_ORACLE_AGENTS,
    SMALL_ERROR_GAMMA_MAX,
    Diagnostics,
    Instance,
    SelectionResult,
    brute_force_oracle,
    check_feasible,
    double_loop_greedy,
    gain_tables,
    greedy,
    suboptimality_ratio,
)
from .submodular import (
    DSConfig,
    ModularFunction,
    SSPConfig,
    SSPTrace,
    difference_of_submodular,
    minimize_submodular_exact,
    modular_lower_bound,
    ssp,
)
from .sweeps import CellSummary, run_cell, run_sweep, soft_claim_violations, summarize

__version__ = "0.1.0"
