"""Clause-set conversion and DIMACS export.

Feature variables are numbered 1..n in preorder; auxiliary variables (only
introduced when a conjunct is not one of the flat shapes the encoder
produces) are numbered above the feature range with full biconditional
definitions, so satisfying assignments projected onto the feature variables
are exactly the models of the source formula.

Every clause carries the reference of the conjunct it came from, which is
what lets unit propagation explain the decisions it forces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .logic import (
    And,
    Conjunct,
    Const,
    EncodedModel,
    Iff,
    Implies,
    Not,
    Or,
    PropFormula,
    Var,
    Xor,
    fold_constants,
)
from .model import ConjunctRef, FeatureId


@dataclass(frozen=True)
class CnfClauseSet:
    variable_map: Mapping[FeatureId, int]
    clauses: tuple[tuple[int, ...], ...]
    origins: tuple[ConjunctRef, ...]
    num_vars: int

    @property
    def num_features(self) -> int:
        return len(self.variable_map)


class _Converter:
    def __init__(self, variable_map: Mapping[FeatureId, int]):
        self.varmap = variable_map
        self.next_var = len(variable_map) + 1
        self.clauses: list[tuple[int, ...]] = []
        self.origins: list[ConjunctRef] = []
        self._memo: dict[PropFormula, int] = {}
        self._origin: ConjunctRef | None = None

    def emit(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))
        self.origins.append(self._origin)  # type: ignore[arg-type]

    def literal(self, f: PropFormula) -> int | None:
        if isinstance(f, Var):
            return self.varmap[f.id]
        if isinstance(f, Not):
            inner = self.literal(f.operand)
            return -inner if inner is not None else None
        return None

    def add_conjunct(self, conjunct: Conjunct) -> None:
        self._origin = conjunct.ref
        formula = fold_constants(conjunct.formula)
        if isinstance(formula, Const):
            if not formula.value:
                self.emit()  # empty clause: unsatisfiable
            return
        parts = formula.operands if isinstance(formula, And) else (formula,)
        for part in parts:
            self._clausify(part)

    def _clausify(self, f: PropFormula) -> None:
        """Direct clauses for the flat shapes; Tseitin fallback otherwise."""
        lit = self.literal(f)
        if lit is not None:
            self.emit(lit)
            return
        match f:
            case And(ops):
                for op in ops:
                    self._clausify(op)
                return
            case Or(ops):
                lits = [self.literal(op) for op in ops]
                if all(l is not None for l in lits):
                    self.emit(*lits)  # type: ignore[misc]
                    return
            case Not(And(ops)):
                lits = [self.literal(op) for op in ops]
                if all(l is not None for l in lits):
                    self.emit(*(-l for l in lits))  # type: ignore[operator]
                    return
            case Implies(a, b):
                la, lb = self.literal(a), self.literal(b)
                if la is not None and lb is not None:
                    self.emit(-la, lb)
                    return
            case Iff(a, b):
                la, lb = self.literal(a), self.literal(b)
                if la is not None and lb is not None:
                    self.emit(-la, lb)
                    self.emit(-lb, la)
                    return
                if isinstance(a, Or):
                    lits = [self.literal(op) for op in a.operands]
                    lp = self.literal(b)
                    if lp is not None and all(l is not None for l in lits):
                        for l in lits:
                            self.emit(-l, lp)  # type: ignore[operator]
                        self.emit(-lp, *lits)  # type: ignore[misc]
                        return
                if isinstance(a, Xor):
                    lx, ly = self.literal(a.left), self.literal(a.right)
                    lp = self.literal(b)
                    if lx is not None and ly is not None and lp is not None:
                        # (x xor y) -> p, both directions
                        self.emit(lx, -ly, lp)
                        self.emit(-lx, ly, lp)
                        self.emit(-lp, lx, ly)
                        self.emit(-lp, -lx, -ly)
                        return
        self.emit(self._define(f))

    def _define(self, f: PropFormula) -> int:
        """Tseitin: auxiliary variable biconditionally equal to the subformula."""
        lit = self.literal(f)
        if lit is not None:
            return lit
        if f in self._memo:
            return self._memo[f]
        match f:
            case Const(value):
                aux = self._fresh()
                self.emit(aux if value else -aux)
                result = aux
            case Not(op):
                result = -self._define(op)
            case And(ops):
                lits = [self._define(op) for op in ops]
                aux = self._fresh()
                for l in lits:
                    self.emit(-aux, l)
                self.emit(aux, *(-l for l in lits))
                result = aux
            case Or(ops):
                lits = [self._define(op) for op in ops]
                aux = self._fresh()
                for l in lits:
                    self.emit(aux, -l)
                self.emit(-aux, *lits)
                result = aux
            case Implies(a, b):
                result = self._define(Or((Not(a), b)))
            case Xor(a, b):
                la, lb = self._define(a), self._define(b)
                aux = self._fresh()
                self.emit(-aux, la, lb)
                self.emit(-aux, -la, -lb)
                self.emit(aux, la, -lb)
                self.emit(aux, -la, lb)
                result = aux
            case Iff(a, b):
                la, lb = self._define(a), self._define(b)
                aux = self._fresh()
                self.emit(-aux, -la, lb)
                self.emit(-aux, la, -lb)
                self.emit(aux, la, lb)
                self.emit(aux, -la, -lb)
                result = aux
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self._memo[f] = result
        return result

    def _fresh(self) -> int:
        var = self.next_var
        self.next_var += 1
        return var


def to_cnf(encoded: EncodedModel) -> CnfClauseSet:
    """Equisatisfiable clause set for the full model formula."""
    variable_map = {fid: i + 1 for i, fid in enumerate(encoded.feature_ids)}
    converter = _Converter(variable_map)
    for conjunct in encoded.conjuncts():
        converter.add_conjunct(conjunct)
    return CnfClauseSet(
        variable_map=variable_map,
        clauses=tuple(converter.clauses),
        origins=tuple(converter.origins),
        num_vars=converter.next_var - 1,
    )


def to_dimacs(cnf: CnfClauseSet) -> str:
    """Standard DIMACS text, byte-stable across runs.

    One `c map <int> <feature-id>` comment per feature variable, in preorder,
    ahead of the problem line.
    """
    lines = []
    for fid, num in sorted(cnf.variable_map.items(), key=lambda item: item[1]):
        lines.append(f"c map {num} {fid}")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        lines.append(" ".join([str(lit) for lit in clause] + ["0"]))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]], dict[int, str]]:
    """Minimal DIMACS reader: (variable count, clauses, comment variable map)."""
    num_vars = 0
    clauses: list[list[int]] = []
    comment_map: dict[int, str] = {}
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "map":
                comment_map[int(parts[2])] = parts[3]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"malformed problem line: {raw!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(pending)
    return num_vars, clauses, comment_map
