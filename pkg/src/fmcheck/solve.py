"""Satisfiability backends.

Two deliberately different engines answer the same questions:

* BruteForce searches full feature assignments directly against the model's
  conjuncts (depth-first in preorder, deselected branch first), so it never
  touches the clause representation.
* Dpll runs the classic recursive procedure (unit propagation, preorder
  variable order, false branch first, no learning) over the CNF.

Agreement between the two is part of the test contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping, Sequence

from .cnf import CnfClauseSet, to_cnf
from .logic import (
    And,
    Const,
    EncodedModel,
    Iff,
    Implies,
    Not,
    Or,
    PropFormula,
    Var,
    Xor,
    variables,
)
from .model import Configuration, Decision, FeatureId


class SolverBackend(Enum):
    BRUTE_FORCE = "brute"
    DPLL = "dpll"
    AUTO = "auto"


AUTO_BRUTE_FORCE_LIMIT = 20


def resolve_backend(backend: SolverBackend, feature_count: int) -> SolverBackend:
    if backend is not SolverBackend.AUTO:
        return backend
    if feature_count <= AUTO_BRUTE_FORCE_LIMIT:
        return SolverBackend.BRUTE_FORCE
    return SolverBackend.DPLL


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    witness: Configuration | None = None


class OperationCancelled(RuntimeError):
    """Raised when a cooperative cancellation callback asked to stop."""


CancelFn = Callable[[], bool]
ProgressFn = Callable[[int, int], None]


def eval_with_bools(formula: PropFormula, values: Mapping[FeatureId, bool]) -> bool:
    """Plain-dict evaluation; the hot path of the brute-force engine."""
    match formula:
        case Var(fid):
            return values[fid]
        case Const(value):
            return value
        case Not(op):
            return not eval_with_bools(op, values)
        case And(ops):
            return all(eval_with_bools(op, values) for op in ops)
        case Or(ops):
            return any(eval_with_bools(op, values) for op in ops)
        case Xor(a, b):
            return eval_with_bools(a, values) != eval_with_bools(b, values)
        case Implies(a, b):
            return (not eval_with_bools(a, values)) or eval_with_bools(b, values)
        case Iff(a, b):
            return eval_with_bools(a, values) == eval_with_bools(b, values)
    raise TypeError(f"not a formula: {formula!r}")


def _assignment_to_configuration(values: Mapping[FeatureId, bool]) -> Configuration:
    return Configuration({
        fid: Decision.SELECTED if v else Decision.DESELECTED
        for fid, v in values.items()
    })


def iter_products(encoded: EncodedModel,
                  assumptions: Sequence[tuple[FeatureId, bool]] = (),
                  should_cancel: CancelFn | None = None) -> Iterator[dict[FeatureId, bool]]:
    """All satisfying full feature assignments, lexicographic in preorder
    order with deselected before selected. Exhaustive but pruned: each
    conjunct is checked as soon as its last variable gets a value."""
    order = list(encoded.feature_ids)
    index = {fid: i for i, fid in enumerate(order)}
    fixed = dict(assumptions)

    # Conjuncts bucketed by the traversal depth at which they become decidable.
    due: list[list[PropFormula]] = [[] for _ in order]
    for conjunct in encoded.conjuncts():
        conjunct_vars = variables(conjunct.formula)
        if not conjunct_vars:
            if not eval_with_bools(conjunct.formula, {}):
                return
            continue
        deepest = max(index[v] for v in conjunct_vars)
        due[deepest].append(conjunct.formula)

    values: dict[FeatureId, bool] = {}

    def descend(depth: int) -> Iterator[dict[FeatureId, bool]]:
        if should_cancel is not None and should_cancel():
            raise OperationCancelled()
        if depth == len(order):
            yield dict(values)
            return
        fid = order[depth]
        choices = (fixed[fid],) if fid in fixed else (False, True)
        for choice in choices:
            values[fid] = choice
            if all(eval_with_bools(f, values) for f in due[depth]):
                yield from descend(depth + 1)
        del values[fid]

    yield from descend(0)


def _brute_force_sat(encoded: EncodedModel,
                     assumptions: Sequence[tuple[FeatureId, bool]]) -> SatResult:
    for values in iter_products(encoded, assumptions):
        return SatResult(True, _assignment_to_configuration(values))
    return SatResult(False)


def _unit_propagate(clauses: Sequence[tuple[int, ...]],
                    assignment: dict[int, bool]) -> bool:
    """Propagate to fixpoint; False on a falsified clause."""
    changed = True
    while changed:
        changed = False
        for clause in clauses:
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
                return False
            if unassigned_count == 1:
                assert unassigned is not None
                assignment[abs(unassigned)] = unassigned > 0
                changed = True
    return True


def _dpll(clauses: Sequence[tuple[int, ...]], num_vars: int,
          assignment: dict[int, bool]) -> dict[int, bool] | None:
    if not _unit_propagate(clauses, assignment):
        return None
    branch_var = next((v for v in range(1, num_vars + 1) if v not in assignment), None)
    if branch_var is None:
        return assignment
    for value in (False, True):
        trial = dict(assignment)
        trial[branch_var] = value
        result = _dpll(clauses, num_vars, trial)
        if result is not None:
            return result
    return None


def dpll_clauses(clauses: Sequence[tuple[int, ...]] | Sequence[list[int]],
                 num_vars: int) -> dict[int, bool] | None:
    """Run the DPLL procedure on raw integer clauses (e.g. re-read DIMACS)."""
    normalized = [tuple(c) for c in clauses]
    return _dpll(normalized, num_vars, {})


def _dpll_sat(encoded: EncodedModel,
              assumptions: Sequence[tuple[FeatureId, bool]],
              cnf: CnfClauseSet | None) -> SatResult:
    if cnf is None:
        cnf = to_cnf(encoded)
    assignment = {cnf.variable_map[fid]: value for fid, value in assumptions}
    result = _dpll(cnf.clauses, cnf.num_vars, assignment)
    if result is None:
        return SatResult(False)
    values = {fid: result.get(num, False) for fid, num in cnf.variable_map.items()}
    return SatResult(True, _assignment_to_configuration(values))


def sat(encoded: EncodedModel,
        assumptions: Sequence[tuple[FeatureId, bool]] = (),
        backend: SolverBackend = SolverBackend.AUTO,
        cnf: CnfClauseSet | None = None) -> SatResult:
    """Decide model formula AND assumptions; on success the witness is a full
    feature configuration satisfying both."""
    for fid, _ in assumptions:
        if fid not in encoded.model.by_id:
            raise KeyError(f"unknown feature in assumptions: {fid!r}")
    concrete = resolve_backend(backend, len(encoded.feature_ids))
    if concrete is SolverBackend.BRUTE_FORCE:
        return _brute_force_sat(encoded, assumptions)
    return _dpll_sat(encoded, assumptions, cnf)
