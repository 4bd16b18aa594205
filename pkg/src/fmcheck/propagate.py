"""Decision propagation: unit propagation over the model clauses.

Only consequences actually forced by the current decisions are derived — the
engine does not search. That is enough to subsume the dependency rule
("selecting x selects whatever x requires"), parent/child forcing inside
groups, and the unconditional selection of the root. Completeness, when a
caller needs it, comes from a separate sat() call.

On a contradiction the result carries a ConflictReport whose cause chain
replays, in firing order, the propagation steps that produced the clash.
User decisions are never overwritten; a forced value that disagrees with one
is reported as a conflict instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .cnf import CnfClauseSet, to_cnf
from .logic import EncodedModel
from .model import (
    CauseStep,
    Configuration,
    ConflictReport,
    ConjunctRef,
    CrossTreeConstraint,
    Decision,
    FeatureId,
    GroupRef,
    RootRef,
)


@dataclass(frozen=True)
class Derivation:
    feature: FeatureId
    value: bool
    via: ConjunctRef
    premises: tuple[FeatureId, ...]


def reason_text(via: ConjunctRef) -> str:
    """Short human-readable tag for a forcing conjunct."""
    if isinstance(via, RootRef):
        return "root"
    if isinstance(via, GroupRef):
        return f"{via.kind.keyword} group under {via.parent}"
    if isinstance(via, CrossTreeConstraint):
        return f"{via.kind.value}: {via.source} -> {via.target}"
    return str(via)


@dataclass(frozen=True)
class PropagationResult:
    user: Configuration
    derivations: tuple[Derivation, ...]
    conflict: ConflictReport | None = None

    @property
    def ok(self) -> bool:
        return self.conflict is None

    @cached_property
    def forced(self) -> dict[FeatureId, bool]:
        return {d.feature: d.value for d in self.derivations}

    @cached_property
    def configuration(self) -> Configuration:
        """User decisions merged with everything propagation forced."""
        merged = dict(self.user.decisions)
        for derivation in self.derivations:
            merged[derivation.feature] = (
                Decision.SELECTED if derivation.value else Decision.DESELECTED)
        return Configuration(merged)


def propagate(encoded: EncodedModel, cfg: Configuration,
              cnf: CnfClauseSet | None = None) -> PropagationResult:
    if cnf is None:
        cnf = to_cnf(encoded)
    by_var = {num: fid for fid, num in cnf.variable_map.items()}
    feature_vars = set(by_var)

    assignment: dict[int, bool] = {}
    # var -> (trail index or None for aux/user, premise vars); absent for user decisions
    forced_by: dict[int, tuple[int | None, tuple[int, ...]]] = {}
    decided_at: dict[int, int] = {}  # var -> assignment sequence number
    trail: list[Derivation] = []
    seq = 0

    for fid in encoded.feature_ids:  # preorder, deterministic
        decision = cfg.of(fid)
        if decision is Decision.UNDECIDED:
            continue
        var = cnf.variable_map[fid]
        assignment[var] = decision is Decision.SELECTED
        decided_at[var] = seq
        seq += 1

    def ancestors(var: int) -> set[int]:
        """Indices of the trail steps the current value of `var` rests on."""
        if var not in forced_by:
            return set()  # user decision
        idx, premise_vars = forced_by[var]
        found = {idx} if idx is not None else set()
        for premise in premise_vars:
            found |= ancestors(premise)
        return found

    def premises_of(lits: list[int]) -> tuple[FeatureId, ...]:
        return tuple(by_var[abs(l)] for l in lits if abs(l) in feature_vars)

    def conflict_report(clause: tuple[int, ...], via: ConjunctRef) -> ConflictReport:
        # The falsified clause would have forced its latest-assigned literal
        # the other way; treat that literal as the clash point.
        pivot = max(clause, key=lambda lit: decided_at[abs(lit)])
        pivot_var = abs(pivot)
        others = [l for l in clause if l != pivot]
        involved = ancestors(pivot_var)
        for lit in others:
            involved |= ancestors(abs(lit))
        chain = [
            CauseStep(trail[i].via, trail[i].feature, trail[i].value)
            for i in sorted(involved)
        ]
        wanted = pivot > 0
        feature = by_var.get(pivot_var, f"aux{pivot_var}")
        chain.append(CauseStep(via, feature, wanted))
        return ConflictReport(feature, wanted, tuple(chain))

    while True:
        changed = False
        for clause, via in zip(cnf.clauses, cnf.origins):
            unassigned: int | None = None
            unassigned_count = 0
            satisfied = False
            for lit in clause:
                value = assignment.get(abs(lit))
                if value is None:
                    unassigned = lit
                    unassigned_count += 1
                elif value == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if unassigned_count == 0:
                return PropagationResult(cfg, tuple(trail), conflict_report(clause, via))
            if unassigned_count == 1:
                assert unassigned is not None
                var = abs(unassigned)
                assignment[var] = unassigned > 0
                decided_at[var] = seq
                seq += 1
                premise_vars = tuple(abs(l) for l in clause if l != unassigned)
                if var in feature_vars:
                    forced_by[var] = (len(trail), premise_vars)
                    trail.append(Derivation(
                        by_var[var], unassigned > 0, via,
                        premises_of([l for l in clause if l != unassigned])))
                else:
                    # Auxiliary variable: propagate through it, report nothing.
                    forced_by[var] = (None, premise_vars)
                changed = True
        if not changed:
            return PropagationResult(cfg, tuple(trail))
