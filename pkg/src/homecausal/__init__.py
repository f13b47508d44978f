"""homecausal: causal structure discovery and Bayesian-network inference
for simulated smart homes.

The toolkit learns a causal Bayesian network over Boolean household
variables by mixing observational data with selected do-interventions,
then answers predictive and diagnostic queries on the learned network.
"""
from ._kernels import backend_name
from .cbn import CausalBayesianNetwork, Cpt, augment_with_interventions, fit_mle, validate_cbn
from .discovery import (
    CandidateGraph,
    DiscoveryConfig,
    EdgeDiff,
    EdgeEvidence,
    EvidenceKind,
    ResolvedGraph,
    diff_graphs,
    influence_test,
    resolve_to_dag,
    run_discovery,
)
from .inference import (
    BeliefMap,
    MessageStore,
    enumerate_posterior,
    is_polytree,
    propagate,
)
from .model import (
    CausalDiagram,
    Intervention,
    Scm,
    Variable,
    VariableId,
    WorldState,
    check_acyclic,
    mutilate,
    topological_order,
)
from .simulator import (
    OBSERVATIONAL,
    Dataset,
    EnvironmentHandle,
    Regime,
    ScenarioConfig,
    SimulatedHome,
    build_scenario,
    default_scenario,
    four_rooms,
    sample_dataset,
    sample_state,
    sample_under_do,
)
from .stats import (
    CHI2_CRITICAL_1DF,
    ContingencyTable,
    TestOutcome,
    chi_squared,
    cond_independent,
    distributions_differ,
    tabulate,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefMap",
    "CHI2_CRITICAL_1DF",
    "CandidateGraph",
    "CausalBayesianNetwork",
    "CausalDiagram",
    "ContingencyTable",
    "Cpt",
    "Dataset",
    "DiscoveryConfig",
    "EdgeDiff",
    "EdgeEvidence",
    "EnvironmentHandle",
    "EvidenceKind",
    "Intervention",
    "MessageStore",
    "OBSERVATIONAL",
    "Regime",
    "ResolvedGraph",
    "ScenarioConfig",
    "Scm",
    "SimulatedHome",
    "TestOutcome",
    "Variable",
    "VariableId",
    "WorldState",
    "augment_with_interventions",
    "backend_name",
    "build_scenario",
    "check_acyclic",
    "chi_squared",
    "cond_independent",
    "default_scenario",
    "diff_graphs",
    "distributions_differ",
    "enumerate_posterior",
    "fit_mle",
    "four_rooms",
    "influence_test",
    "is_polytree",
    "mutilate",
    "propagate",
    "resolve_to_dag",
    "run_discovery",
    "sample_dataset",
    "sample_state",
    "sample_under_do",
    "tabulate",
    "topological_order",
    "validate_cbn",
]
