"""Feature-model verification toolkit.

Parse product-line feature diagrams from a small textual DSL, compile them to
propositional logic, and answer analysis queries: configuration validity,
decision propagation, conflict explanation, void/dead/core detection, product
counting and enumeration.
"""

from .analysis import (
    DEFAULT_COUNT_CAP,
    CheckResult,
    ModelTooLargeError,
    VoidModelError,
    analyze,
    check_full_configuration,
    core_features,
    count_products,
    dead_features,
    enumerate_products,
    is_void,
)
from .cnf import CnfClauseSet, parse_dimacs, to_cnf, to_dimacs
from .dsl import ParseError, ParseFailure, SourceSpan, parse_model, serialize_model, try_parse_model
from .logic import (
    EncodedModel,
    PropFormula,
    UndecidedFeatureError,
    encode_constraint,
    encode_group,
    encode_model,
    eval_formula,
    format_formula,
)
from .model import (
    AnalysisReport,
    ChildGroup,
    Configuration,
    ConflictReport,
    ConstraintKind,
    CrossTreeConstraint,
    Decision,
    Feature,
    FeatureId,
    FeatureModel,
    GroupKind,
    StructureDiagnostic,
    features_preorder,
    validate_structure,
)
from .propagate import Derivation, PropagationResult, propagate, reason_text
from .solve import OperationCancelled, SatResult, SolverBackend, sat

__version__ = "0.1.0"
