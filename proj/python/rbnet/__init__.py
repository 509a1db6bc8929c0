"""Verification toolkit for reconfigurable broadcast networks."""

from rbnet._core import (
    ActionKind,
    Bound,
    CheckEntry,
    CommStep,
    Config,
    ConstraintPolicy,
    Error,
    Execution,
    InitialEdges,
    MinskyMachine,
    PetriNet,
    PetriReachability,
    PetriTransition,
    Protocol,
    ReconfStep,
    SaturationCertificate,
    SearchBudget,
    SearchResult,
    SearchStats,
    Transition,
    ValidationReport,
    Verdict,
    abstract_synchronizable,
    all_initial,
    all_target,
    analyze_topology,
    apply_step,
    backward_saturation,
    balanced_to_constrained_k1,
    bounded_marking_reachability,
    compile_to_petri,
    decide_coverability_unconstrained,
    decide_synchronization_unconstrained,
    distance,
    distance_strict,
    encode_minsky,
    export_net,
    forward_saturation,
    import_net,
    juxtapose,
    lift_one_to_k,
    load_trace,
    node_distance,
    potential_sequence,
    power,
    replay,
    replay_firing,
    search_synchronizing_execution,
    to_dot,
    to_f_constrained,
    to_id_constrained,
    to_one_locally_constrained,
    trace_from_json,
    trace_to_json,
    validate_execution,
    visits_target,
    weak_to_strong,
)

__all__ = [name for name in dir() if not name.startswith("_")]
