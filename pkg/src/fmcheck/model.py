"""In-memory representation of feature models, configurations and analysis results.

A feature model is a rooted tree of features. Each internal feature owns an
ordered list of child groups; a group relates the parent to its children with
one of six relationship kinds. Cross-tree constraints (requires/excludes) sit
beside the tree. All types here are immutable after construction and safe to
share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping

FeatureId = str

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


class GroupKind(Enum):
    """The six parent-child relationship kinds, keyed by their DSL keyword."""

    MANDATORY = "mandatory"
    OPTIONAL = "optional"
    ALTERNATIVE = "xor"
    OPTIONAL_ALTERNATIVE = "xor?"
    OR = "or"
    OPTIONAL_OR = "or?"

    @property
    def keyword(self) -> str:
        return self.value

    @property
    def is_choice(self) -> bool:
        """Choice groups (xor/or and optional variants) need >= 2 children."""
        return self not in (GroupKind.MANDATORY, GroupKind.OPTIONAL)

    @property
    def min_children(self) -> int:
        return 2 if self.is_choice else 1


@dataclass(frozen=True)
class ChildGroup:
    kind: GroupKind
    children: tuple["Feature", ...]


@dataclass(frozen=True)
class Feature:
    id: FeatureId
    display_name: str = ""
    groups: tuple[ChildGroup, ...] = ()

    def __post_init__(self) -> None:
        if not self.display_name:
            object.__setattr__(self, "display_name", self.id)

    @property
    def children(self) -> Iterator["Feature"]:
        for group in self.groups:
            yield from group.children


class ConstraintKind(Enum):
    REQUIRES = "requires"
    EXCLUDES = "excludes"


@dataclass(frozen=True)
class CrossTreeConstraint:
    kind: ConstraintKind
    source: FeatureId
    target: FeatureId

    def __str__(self) -> str:
        return f"{self.source} {self.kind.value} {self.target}"


@dataclass(frozen=True)
class FeatureModel:
    name: str
    root: Feature
    constraints: tuple[CrossTreeConstraint, ...] = ()

    @cached_property
    def features(self) -> tuple[Feature, ...]:
        """All features in preorder (parent first, declaration order)."""
        out: list[Feature] = []

        def walk(feature: Feature) -> None:
            out.append(feature)
            for group in feature.groups:
                for child in group.children:
                    walk(child)

        walk(self.root)
        return tuple(out)

    @cached_property
    def feature_ids(self) -> tuple[FeatureId, ...]:
        return tuple(f.id for f in self.features)

    @cached_property
    def by_id(self) -> Mapping[FeatureId, Feature]:
        return {f.id: f for f in self.features}

    @cached_property
    def parent_of(self) -> Mapping[FeatureId, FeatureId]:
        """Child id -> parent id (root absent)."""
        parents: dict[FeatureId, FeatureId] = {}
        for feature in self.features:
            for group in feature.groups:
                for child in group.children:
                    parents[child.id] = feature.id
        return parents

    def __contains__(self, feature_id: FeatureId) -> bool:
        return feature_id in self.by_id


def features_preorder(model: FeatureModel) -> list[FeatureId]:
    """Deterministic preorder traversal; fixes the variable order for CNF export."""
    return list(model.feature_ids)


# --- structural validation -------------------------------------------------

class DiagnosticCode(Enum):
    BAD_IDENTIFIER = "BadIdentifier"
    DUPLICATE_FEATURE = "DuplicateFeature"
    GROUP_TOO_SMALL = "GroupTooSmall"
    UNKNOWN_FEATURE = "UnknownFeature"
    SELF_REFERENCE = "SelfReference"
    SHARED_CHILD = "SharedChild"


@dataclass(frozen=True)
class StructureDiagnostic:
    code: DiagnosticCode
    features: tuple[FeatureId, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.code.value}: {self.message}"


def validate_structure(model: FeatureModel) -> list[StructureDiagnostic]:
    """Check every FeatureModel invariant; an empty result means the model is sound.

    Walks the raw object graph rather than the cached id maps so that duplicate
    ids and aliased nodes are reported instead of silently collapsed.
    """
    diags: list[StructureDiagnostic] = []
    seen_ids: set[FeatureId] = set()
    seen_objects: set[int] = set()

    def walk(feature: Feature) -> None:
        if id(feature) in seen_objects:
            # Aliased node: same object reachable twice breaks the tree shape.
            diags.append(StructureDiagnostic(
                DiagnosticCode.SHARED_CHILD, (feature.id,),
                f"feature '{feature.id}' appears in more than one place in the tree"))
            return
        seen_objects.add(id(feature))
        if not IDENT_RE.match(feature.id or ""):
            diags.append(StructureDiagnostic(
                DiagnosticCode.BAD_IDENTIFIER, (feature.id,),
                f"feature id {feature.id!r} is not a valid identifier"))
        if feature.id in seen_ids:
            diags.append(StructureDiagnostic(
                DiagnosticCode.DUPLICATE_FEATURE, (feature.id,),
                f"feature id '{feature.id}' declared more than once"))
        seen_ids.add(feature.id)
        for group in feature.groups:
            if len(group.children) < group.kind.min_children:
                diags.append(StructureDiagnostic(
                    DiagnosticCode.GROUP_TOO_SMALL, (feature.id,),
                    f"{group.kind.keyword} group under '{feature.id}' has "
                    f"{len(group.children)} child(ren), needs >= {group.kind.min_children}"))
            for child in group.children:
                walk(child)

    walk(model.root)

    for constraint in model.constraints:
        for endpoint in (constraint.source, constraint.target):
            if endpoint not in seen_ids:
                diags.append(StructureDiagnostic(
                    DiagnosticCode.UNKNOWN_FEATURE, (endpoint,),
                    f"constraint '{constraint}' references undeclared feature '{endpoint}'"))
        if constraint.source == constraint.target:
            diags.append(StructureDiagnostic(
                DiagnosticCode.SELF_REFERENCE, (constraint.source,),
                f"constraint '{constraint}' relates a feature to itself"))
    return diags


# --- configurations ---------------------------------------------------------

class Decision(Enum):
    SELECTED = "selected"
    DESELECTED = "deselected"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Configuration:
    """Tri-state assignment per feature; features absent from the map are Undecided."""

    decisions: Mapping[FeatureId, Decision] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # Normalize: explicit Undecided entries are the same as absence.
        cleaned = {fid: d for fid, d in self.decisions.items() if d is not Decision.UNDECIDED}
        object.__setattr__(self, "decisions", cleaned)

    @classmethod
    def from_signs(cls, selected: Iterable[FeatureId] = (),
                   deselected: Iterable[FeatureId] = ()) -> "Configuration":
        decisions = {fid: Decision.SELECTED for fid in selected}
        decisions.update({fid: Decision.DESELECTED for fid in deselected})
        return cls(decisions)

    def of(self, feature_id: FeatureId) -> Decision:
        return self.decisions.get(feature_id, Decision.UNDECIDED)

    def is_full(self, feature_ids: Iterable[FeatureId]) -> bool:
        return all(fid in self.decisions for fid in feature_ids)

    def undecided(self, feature_ids: Iterable[FeatureId]) -> list[FeatureId]:
        return [fid for fid in feature_ids if fid not in self.decisions]

    @property
    def selected(self) -> frozenset[FeatureId]:
        return frozenset(f for f, d in self.decisions.items() if d is Decision.SELECTED)

    @property
    def deselected(self) -> frozenset[FeatureId]:
        return frozenset(f for f, d in self.decisions.items() if d is Decision.DESELECTED)

    def with_decision(self, feature_id: FeatureId, decision: Decision) -> "Configuration":
        updated = dict(self.decisions)
        if decision is Decision.UNDECIDED:
            updated.pop(feature_id, None)
        else:
            updated[feature_id] = decision
        return Configuration(updated)

    def completed(self, feature_ids: Iterable[FeatureId]) -> "Configuration":
        """Close the configuration: every undecided feature becomes Deselected.

        Mirrors the validity convention that unselected variants take the value
        false when a product is checked.
        """
        decisions = dict(self.decisions)
        for fid in feature_ids:
            decisions.setdefault(fid, Decision.DESELECTED)
        return Configuration(decisions)


# --- analysis result types ---------------------------------------------------

@dataclass(frozen=True)
class GroupRef:
    """Reference to one child group, used in conjunct labels and cause chains."""
    parent: FeatureId
    kind: GroupKind

    def __str__(self) -> str:
        return f"{self.kind.keyword} group under {self.parent}"


@dataclass(frozen=True)
class RootRef:
    root: FeatureId

    def __str__(self) -> str:
        return f"root {self.root}"


# What a forced decision or a failing conjunct points back to.
ConjunctRef = RootRef | GroupRef | CrossTreeConstraint


@dataclass(frozen=True)
class CauseStep:
    via: ConjunctRef
    feature: FeatureId
    value: bool

    def __str__(self) -> str:
        sign = "+" if self.value else "-"
        return f"{sign}{self.feature} (via {self.via})"


@dataclass(frozen=True)
class ConflictReport:
    """A decision clash: `conflicting_feature` was forced to `forced_value`
    while already carrying the opposite value. `cause_chain` lists the
    propagation steps that led to the clash, in firing order."""

    conflicting_feature: FeatureId
    forced_value: bool
    cause_chain: tuple[CauseStep, ...]

    def __str__(self) -> str:
        steps = "; ".join(str(s) for s in self.cause_chain)
        sign = "+" if self.forced_value else "-"
        return (f"conflict on {self.conflicting_feature}: forced {sign} "
                f"against existing opposite decision [{steps}]")


@dataclass(frozen=True)
class AnalysisReport:
    void: bool
    dead_features: frozenset[FeatureId]
    core_features: frozenset[FeatureId]
    product_count: int | None = None
