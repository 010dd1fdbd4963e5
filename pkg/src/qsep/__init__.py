"""qsep: a query-complexity laboratory.

Planted-substructure instance generators, certificate-aided and baseline
search algorithms, strict black-box query accounting, and a Monte Carlo
harness for measuring the query savings a structural hint buys.
"""

from qsep.oracle import (
    BudgetExceeded,
    Certificate,
    CountedOracle,
    FunctionInstance,
    GraphInstance,
    ModelMismatchError,
    StructureMeta,
    Witness,
    apply_permutation,
    read_certificate,
    read_instance,
    relabel,
    validate_witness,
    write_certificate,
    write_instance,
)
from qsep.generators import (
    CapacityError,
    FixedPointParams,
    ParameterError,
    PrimeShortageError,
    ScaleParams,
    gen_claw_graph,
    gen_collision_function,
    gen_fixedpoint_function,
    gen_star_graph,
    gen_starpath_graph,
    scale_table,
)
from qsep.adversary import AdversarySession, gen_online_claw_session
from qsep.detectors import (
    SearchOutcome,
    brute_force_find,
    collision_attempt_battery,
    cert_claw_search,
    cert_collision_search,
    cert_fixedpoint_search,
    cert_star_search,
    cert_starpath_search,
    corrupt_certificate,
    edge_wedge_search,
    multiscale_collision_search,
    path_k_search,
    uniform_probe_baseline,
)
from qsep.harness import (
    CertExpectation,
    SeparationPoint,
    SeparationReport,
    SlopeFit,
    TrialConfig,
    TrialStats,
    analytic_cert_expectation,
    exact_cert_expectation,
    meta_cert_expectation,
    read_trials_csv,
    run_trials,
    separation_experiment,
    slope_fit,
    write_report_json,
    write_trials_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AdversarySession",
    "BudgetExceeded",
    "CapacityError",
    "CertExpectation",
    "Certificate",
    "CountedOracle",
    "FixedPointParams",
    "FunctionInstance",
    "GraphInstance",
    "ModelMismatchError",
    "ParameterError",
    "PrimeShortageError",
    "ScaleParams",
    "SearchOutcome",
    "SeparationPoint",
    "SeparationReport",
    "SlopeFit",
    "StructureMeta",
    "TrialConfig",
    "TrialStats",
    "Witness",
    "analytic_cert_expectation",
    "apply_permutation",
    "brute_force_find",
    "cert_claw_search",
    "cert_collision_search",
    "cert_fixedpoint_search",
    "cert_star_search",
    "cert_starpath_search",
    "collision_attempt_battery",
    "corrupt_certificate",
    "edge_wedge_search",
    "exact_cert_expectation",
    "gen_claw_graph",
    "gen_collision_function",
    "gen_fixedpoint_function",
    "gen_online_claw_session",
    "gen_star_graph",
    "gen_starpath_graph",
    "meta_cert_expectation",
    "multiscale_collision_search",
    "path_k_search",
    "read_certificate",
    "read_instance",
    "read_trials_csv",
    "relabel",
    "run_trials",
    "scale_table",
    "separation_experiment",
    "slope_fit",
    "uniform_probe_baseline",
    "validate_witness",
    "write_certificate",
    "write_instance",
    "write_report_json",
    "write_trials_csv",
]
