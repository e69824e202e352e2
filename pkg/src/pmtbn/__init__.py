"""Discrete Bayesian networks with a learned-vs-theory-structure harness.

The package builds and queries discrete Bayesian networks, learns
tree-augmented naive Bayes structures from data, ships a fixed
protection-motivation network plus an edge whitelist for auditing
learned graphs, and runs seeded synthetic-data studies comparing the
two modeling styles.
"""

from .core import (
    MISSING,
    Cpt,
    Dag,
    Dataset,
    NetworkModel,
    Schema,
    Variable,
    joint_probability,
    validate_dag,
)
from .errors import (
    CardinalityMismatchError,
    CycleError,
    DisconnectedError,
    DuplicateError,
    EmptyDataError,
    EmptyDatasetError,
    HeaderMismatchError,
    ImpossibleEvidenceError,
    IncompleteAssignmentError,
    MissingCptRowError,
    ParseError,
    PmtbnError,
    RowSumError,
    SeedFailureError,
    TooLargeError,
    UnknownNodeError,
    UnknownStateLabelError,
    VariableNotInScopeError,
)
from .formats import (
    Structure,
    emit_dataset,
    emit_model,
    emit_structure,
    parse_dataset,
    parse_model,
    parse_structure,
)
from .harness import (
    ComparisonReport,
    SeedResult,
    StudyConfig,
    evaluate_accuracy,
    generate_experiment_data,
    random_ground_truth,
    run_comparison,
)
from .inference import (
    Factor,
    ancestral_sample,
    brute_force_posterior,
    classify,
    factor_from_cpt,
    factor_marginalize,
    factor_product,
    factor_reduce,
    posterior,
    unit_factor,
)
from .kernels import BACKEND
from .learning import (
    WeightedPairGraph,
    conditional_mutual_information,
    estimate_cpts,
    learn_tan,
    max_spanning_tree,
    orient_tree,
    pairwise_cmi_graph,
    tan_dag,
)
from .pmt import (
    DEFAULT_CLASS,
    AuditReport,
    EdgeWhitelist,
    FlaggedEdge,
    audit_structure,
    default_pmt_structure,
    emit_whitelist,
    parse_whitelist,
)
from .rng import SplitMix64, derive_seeds, u64_stream, uniform_stream

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BACKEND",
    "CardinalityMismatchError",
    "ComparisonReport",
    "Cpt",
    "CycleError",
    "DEFAULT_CLASS",
    "Dag",
    "Dataset",
    "DisconnectedError",
    "DuplicateError",
    "EdgeWhitelist",
    "EmptyDataError",
    "EmptyDatasetError",
    "Factor",
    "FlaggedEdge",
    "HeaderMismatchError",
    "ImpossibleEvidenceError",
    "IncompleteAssignmentError",
    "MISSING",
    "MissingCptRowError",
    "NetworkModel",
    "ParseError",
    "PmtbnError",
    "RowSumError",
    "Schema",
    "SeedFailureError",
    "SeedResult",
    "SplitMix64",
    "Structure",
    "StudyConfig",
    "TooLargeError",
    "UnknownNodeError",
    "UnknownStateLabelError",
    "Variable",
    "VariableNotInScopeError",
    "WeightedPairGraph",
    "ancestral_sample",
    "audit_structure",
    "brute_force_posterior",
    "classify",
    "conditional_mutual_information",
    "default_pmt_structure",
    "derive_seeds",
    "emit_dataset",
    "emit_model",
    "emit_structure",
    "emit_whitelist",
    "estimate_cpts",
    "evaluate_accuracy",
    "factor_from_cpt",
    "factor_marginalize",
    "factor_product",
    "factor_reduce",
    "generate_experiment_data",
    "joint_probability",
    "learn_tan",
    "max_spanning_tree",
    "orient_tree",
    "pairwise_cmi_graph",
    "parse_dataset",
    "parse_model",
    "parse_structure",
    "parse_whitelist",
    "posterior",
    "random_ground_truth",
    "run_comparison",
    "tan_dag",
    "u64_stream",
    "uniform_stream",
    "unit_factor",
    "validate_dag",
]
