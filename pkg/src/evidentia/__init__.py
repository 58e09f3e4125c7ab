"""Belief updating and evidence acquisition on polytree networks.

Exact posterior computation by local message passing, a brute-force
enumeration cross-check, a cost-aware evidence-acquisition cycle, reusable
fixture networks, and a session service with CLI front ends.
"""

from .errors import (
    AlreadyObservedError,
    DuplicateEvidenceError,
    EvidentiaError,
    IndexOutOfRangeError,
    NoSuchEvidenceError,
    NoSuchNodeError,
    NoSuchSessionError,
    NoSuchSourceError,
    NotTerminatedError,
    NotValidatedError,
    NoUsableSourceError,
    ParseError,
    RevisionConflictError,
    TooLargeError,
    UnknownCaseError,
    UnknownFieldError,
    UnobservableFindingError,
    ZeroNormalizerError,
    ZeroProbabilityEvidenceError,
)
from .network import (
    Network,
    Node,
    NodeCategory,
    ValidationReport,
    ensure_validated,
    network_from_dict,
    network_to_dict,
    parent_config_index,
    parent_configs,
    parse_network,
    serialize_network,
    validate,
)
from .propagation import (
    BeliefState,
    Evidence,
    EvidenceKind,
    assert_evidence,
    beliefs,
    evidence_from_dict,
    initialize,
    retract_evidence,
)
from .enumeration import enumerate_posteriors
from .cycle import (
    AssessmentState,
    BeliefDelta,
    CommitmentReport,
    CycleConfig,
    Goal,
    GoalKind,
    HypothesisStatus,
    InformationSource,
    RankedSource,
    SortedFinding,
    Status,
    Termination,
    TerminationReason,
    check_termination,
    classify_hypotheses,
    compose_commitment,
    integrate,
    invoke_source,
    predictive_distribution,
    rank_sources,
    run_cycle,
    set_goals,
    sort_findings,
    start_session,
)
from .fixtures import (
    build_case,
    case_ids,
    random_polytree,
    sample_world,
    unit_cost_sources,
    world_executor,
    write_fixture_files,
)

__version__ = "0.1.0"
