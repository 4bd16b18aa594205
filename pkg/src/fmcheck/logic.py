"""Propositional encoding of feature models.

Each child group of the model becomes one conjunct relating the parent
variable to its children; each cross-tree constraint becomes one implication
conjunct; the root variable is asserted outright. The conjunction of all of
these is the model formula whose satisfying assignments are exactly the valid
products.

Group encodings (p = parent, c_i = children):

    mandatory       AND_i (c_i <-> p)
    optional        AND_i (c_i -> p)
    xor             ((OR_i c_i) <-> p) AND pairwise exclusions; the two-child
                    case is rendered with the exclusive-or connective,
                    ((c1 xor c2) <-> p) AND not(c1 and c2), which has the same
                    truth table
    xor?            AND_i (c_i -> p) AND pairwise exclusions
    or              (OR_i c_i) <-> p
    or?             AND_i (c_i -> p)

A deliberate consequence: in every satisfying assignment a child can only be
true when its parent is true, a parent of an alternative group selects exactly
one child, and a parent of an or group selects at least one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .model import (
    Configuration,
    ConjunctRef,
    ConstraintKind,
    CrossTreeConstraint,
    Decision,
    FeatureId,
    FeatureModel,
    GroupKind,
    GroupRef,
    RootRef,
)


# --- formula AST -------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    id: FeatureId


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    operand: "PropFormula"


@dataclass(frozen=True)
class And:
    operands: tuple["PropFormula", ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("And needs at least two operands")


@dataclass(frozen=True)
class Or:
    operands: tuple["PropFormula", ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("Or needs at least two operands")


@dataclass(frozen=True)
class Xor:
    left: "PropFormula"
    right: "PropFormula"


@dataclass(frozen=True)
class Implies:
    left: "PropFormula"
    right: "PropFormula"


@dataclass(frozen=True)
class Iff:
    left: "PropFormula"
    right: "PropFormula"


PropFormula = Var | Const | Not | And | Or | Xor | Implies | Iff


def conj(parts: Sequence[PropFormula]) -> PropFormula:
    """Conjunction helper that avoids a one-armed And."""
    if not parts:
        return Const(True)
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def variables(formula: PropFormula) -> set[FeatureId]:
    match formula:
        case Var(fid):
            return {fid}
        case Const():
            return set()
        case Not(op):
            return variables(op)
        case And(ops) | Or(ops):
            out: set[FeatureId] = set()
            for op in ops:
                out |= variables(op)
            return out
        case Xor(a, b) | Implies(a, b) | Iff(a, b):
            return variables(a) | variables(b)
    raise TypeError(f"not a formula: {formula!r}")


# --- evaluation --------------------------------------------------------------

class UndecidedFeatureError(Exception):
    """Raised when evaluation hits a variable with no Selected/Deselected value."""

    def __init__(self, feature_id: FeatureId):
        super().__init__(f"feature '{feature_id}' is undecided")
        self.feature_id = feature_id


def eval_formula(formula: PropFormula, assignment: Configuration) -> bool:
    """Truth-functional evaluation under a full configuration."""
    match formula:
        case Var(fid):
            decision = assignment.of(fid)
            if decision is Decision.UNDECIDED:
                raise UndecidedFeatureError(fid)
            return decision is Decision.SELECTED
        case Const(value):
            return value
        case Not(op):
            return not eval_formula(op, assignment)
        case And(ops):
            return all(eval_formula(op, assignment) for op in ops)
        case Or(ops):
            return any(eval_formula(op, assignment) for op in ops)
        case Xor(a, b):
            return eval_formula(a, assignment) != eval_formula(b, assignment)
        case Implies(a, b):
            return (not eval_formula(a, assignment)) or eval_formula(b, assignment)
        case Iff(a, b):
            return eval_formula(a, assignment) == eval_formula(b, assignment)
    raise TypeError(f"not a formula: {formula!r}")


# --- group and constraint encoders --------------------------------------------

def encode_group(parent: FeatureId, kind: GroupKind,
                 children: Sequence[FeatureId]) -> PropFormula:
    p = Var(parent)
    cs = [Var(c) for c in children]
    exclusions = [Not(And((a, b))) for a, b in combinations(cs, 2)]

    if kind is GroupKind.MANDATORY:
        return conj([Iff(c, p) for c in cs])
    if kind in (GroupKind.OPTIONAL, GroupKind.OPTIONAL_OR):
        return conj([Implies(c, p) for c in cs])
    if kind is GroupKind.OR:
        return Iff(Or(tuple(cs)), p)
    if kind is GroupKind.ALTERNATIVE:
        if len(cs) == 2:
            return And((Iff(Xor(cs[0], cs[1]), p), exclusions[0]))
        return conj([Iff(Or(tuple(cs)), p)] + exclusions)
    if kind is GroupKind.OPTIONAL_ALTERNATIVE:
        return conj([Implies(c, p) for c in cs] + exclusions)
    raise ValueError(f"unknown group kind: {kind!r}")


def encode_constraint(constraint: CrossTreeConstraint) -> PropFormula:
    source, target = Var(constraint.source), Var(constraint.target)
    if constraint.kind is ConstraintKind.REQUIRES:
        return Implies(source, target)
    return Implies(source, Not(target))


@dataclass(frozen=True)
class GroupConjunct:
    parent: FeatureId
    kind: GroupKind
    formula: PropFormula


@dataclass(frozen=True)
class DependencyConjunct:
    constraint: CrossTreeConstraint
    formula: PropFormula


@dataclass(frozen=True)
class Conjunct:
    """One conjunct of the model formula with a stable human-readable label."""
    label: str
    ref: ConjunctRef
    formula: PropFormula


@dataclass(frozen=True)
class EncodedModel:
    model: FeatureModel
    root_conjunct: PropFormula
    group_conjuncts: tuple[GroupConjunct, ...]
    dependency_conjuncts: tuple[DependencyConjunct, ...]

    @property
    def feature_ids(self) -> tuple[FeatureId, ...]:
        return self.model.feature_ids

    def conjuncts(self) -> Iterator[Conjunct]:
        yield Conjunct("root", RootRef(self.model.root.id), self.root_conjunct)
        for gc in self.group_conjuncts:
            yield Conjunct(f"G({gc.parent})", GroupRef(gc.parent, gc.kind), gc.formula)
        for dc in self.dependency_conjuncts:
            yield Conjunct(f"dep({dc.constraint})", dc.constraint, dc.formula)

    def formula(self) -> PropFormula:
        return conj([c.formula for c in self.conjuncts()])


def encode_model(model: FeatureModel) -> EncodedModel:
    """One conjunct per group plus one per dependency, root asserted true."""
    groups: list[GroupConjunct] = []
    for feature in model.features:
        for group in feature.groups:
            child_ids = [c.id for c in group.children]
            groups.append(GroupConjunct(
                feature.id, group.kind,
                encode_group(feature.id, group.kind, child_ids)))
    deps = tuple(DependencyConjunct(c, encode_constraint(c)) for c in model.constraints)
    return EncodedModel(model, Var(model.root.id), tuple(groups), deps)


# --- rendering ----------------------------------------------------------------

_UNICODE_OPS = {"not": "¬", "and": " ∧ ", "or": " ∨ ",
                "xor": " ⊕ ", "implies": " ⇒ ", "iff": " ⇔ ",
                "true": "⊤", "false": "⊥"}
_ASCII_OPS = {"not": "!", "and": " & ", "or": " | ",
              "xor": " ^ ", "implies": " -> ", "iff": " <-> ",
              "true": "true", "false": "false"}


def format_formula(formula: PropFormula, ascii_only: bool = False) -> str:
    """Render with the usual connective glyphs; compound operands get parentheses."""
    ops = _ASCII_OPS if ascii_only else _UNICODE_OPS

    def atomic(f: PropFormula) -> bool:
        # Negation binds tightest and parenthesizes its own compound operand,
        # so it never needs wrapping itself.
        return isinstance(f, (Var, Const, Not))

    def wrap(f: PropFormula) -> str:
        text = render(f)
        return text if atomic(f) else f"({text})"

    def render(f: PropFormula) -> str:
        match f:
            case Var(fid):
                return fid
            case Const(value):
                return ops["true"] if value else ops["false"]
            case Not(op):
                return ops["not"] + wrap(op)
            case And(operands):
                return ops["and"].join(wrap(op) for op in operands)
            case Or(operands):
                return ops["or"].join(wrap(op) for op in operands)
            case Xor(a, b):
                return wrap(a) + ops["xor"] + wrap(b)
            case Implies(a, b):
                return wrap(a) + ops["implies"] + wrap(b)
            case Iff(a, b):
                return wrap(a) + ops["iff"] + wrap(b)
        raise TypeError(f"not a formula: {f!r}")

    return render(formula)


def fold_constants(formula: PropFormula) -> PropFormula:
    """Constant folding; applied before CNF conversion to keep clause sets minimal."""
    match formula:
        case Var() | Const():
            return formula
        case Not(op):
            inner = fold_constants(op)
            if isinstance(inner, Const):
                return Const(not inner.value)
            return Not(inner)
        case And(ops):
            kept: list[PropFormula] = []
            for op in ops:
                folded = fold_constants(op)
                if isinstance(folded, Const):
                    if not folded.value:
                        return Const(False)
                    continue
                kept.append(folded)
            return conj(kept)
        case Or(ops):
            kept = []
            for op in ops:
                folded = fold_constants(op)
                if isinstance(folded, Const):
                    if folded.value:
                        return Const(True)
                    continue
                kept.append(folded)
            if not kept:
                return Const(False)
            if len(kept) == 1:
                return kept[0]
            return Or(tuple(kept))
        case Xor(a, b):
            left, right = fold_constants(a), fold_constants(b)
            if isinstance(left, Const) and isinstance(right, Const):
                return Const(left.value != right.value)
            if isinstance(left, Const):
                return Not(right) if left.value else right
            if isinstance(right, Const):
                return Not(left) if right.value else left
            return Xor(left, right)
        case Implies(a, b):
            left, right = fold_constants(a), fold_constants(b)
            if isinstance(left, Const):
                return right if left.value else Const(True)
            if isinstance(right, Const):
                return Const(True) if right.value else fold_constants(Not(left))
            return Implies(left, right)
        case Iff(a, b):
            left, right = fold_constants(a), fold_constants(b)
            if isinstance(left, Const) and isinstance(right, Const):
                return Const(left.value == right.value)
            if isinstance(left, Const):
                return right if left.value else fold_constants(Not(right))
            if isinstance(right, Const):
                return left if right.value else fold_constants(Not(left))
            return Iff(left, right)
    raise TypeError(f"not a formula: {formula!r}")
