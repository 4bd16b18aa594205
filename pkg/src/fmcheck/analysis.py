"""Analysis operations over an encoded feature model.

Validity of a full configuration, void detection, dead and core features,
product counting and enumeration. Everything here is a pure function of the
immutable EncodedModel; the long-running scans take optional cancellation and
progress callbacks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .logic import Conjunct, EncodedModel, eval_formula
from .model import AnalysisReport, Configuration, Decision, FeatureId
from .solve import (
    CancelFn,
    OperationCancelled,
    ProgressFn,
    SatResult,
    SolverBackend,
    iter_products,
    sat,
)

DEFAULT_COUNT_CAP = 24
COUNT_CAP_ENV_VAR = "FMCHECK_COUNT_CAP"


class VoidModelError(Exception):
    """Dead/core queries are meaningless on a model with zero products."""


class ModelTooLargeError(Exception):
    def __init__(self, feature_count: int, cap: int):
        super().__init__(
            f"model has {feature_count} features, counting is capped at {cap} "
            f"(override with {COUNT_CAP_ENV_VAR})")
        self.feature_count = feature_count
        self.cap = cap


def count_cap_from_env(default: int = DEFAULT_COUNT_CAP) -> int:
    raw = os.environ.get(COUNT_CAP_ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass(frozen=True)
class ConjunctCheck:
    conjunct: Conjunct
    value: bool


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    checks: tuple[ConjunctCheck, ...]

    @property
    def failing(self) -> tuple[ConjunctCheck, ...]:
        return tuple(c for c in self.checks if not c.value)


def check_full_configuration(encoded: EncodedModel, cfg: Configuration) -> CheckResult:
    """Valid iff every conjunct (root, groups, dependencies) evaluates true."""
    from .logic import UndecidedFeatureError

    undecided = cfg.undecided(encoded.feature_ids)
    if undecided:
        raise UndecidedFeatureError(undecided[0])
    checks = tuple(
        ConjunctCheck(conjunct, eval_formula(conjunct.formula, cfg))
        for conjunct in encoded.conjuncts()
    )
    return CheckResult(all(c.value for c in checks), checks)


def is_void(encoded: EncodedModel,
            backend: SolverBackend = SolverBackend.AUTO) -> bool:
    return not sat(encoded, backend=backend).satisfiable


def dead_features(encoded: EncodedModel,
                  backend: SolverBackend = SolverBackend.AUTO,
                  should_cancel: CancelFn | None = None,
                  on_progress: ProgressFn | None = None) -> frozenset[FeatureId]:
    """Features that appear in no product: formula AND f is unsatisfiable."""
    return _feature_scan(encoded, backend, True, should_cancel, on_progress)


def core_features(encoded: EncodedModel,
                  backend: SolverBackend = SolverBackend.AUTO,
                  should_cancel: CancelFn | None = None,
                  on_progress: ProgressFn | None = None) -> frozenset[FeatureId]:
    """Features in every product: formula AND (not f) is unsatisfiable."""
    return _feature_scan(encoded, backend, False, should_cancel, on_progress)


def _feature_scan(encoded: EncodedModel, backend: SolverBackend, probe_value: bool,
                  should_cancel: CancelFn | None,
                  on_progress: ProgressFn | None) -> frozenset[FeatureId]:
    if is_void(encoded, backend):
        raise VoidModelError("model is void")
    found = []
    ids = encoded.feature_ids
    for i, fid in enumerate(ids):
        if should_cancel is not None and should_cancel():
            raise OperationCancelled()
        if not sat(encoded, [(fid, probe_value)], backend).satisfiable:
            found.append(fid)
        if on_progress is not None:
            on_progress(i + 1, len(ids))
    return frozenset(found)


def _check_cap(encoded: EncodedModel, cap: int) -> None:
    if len(encoded.feature_ids) > cap:
        raise ModelTooLargeError(len(encoded.feature_ids), cap)


def count_products(encoded: EncodedModel,
                   cap: int = DEFAULT_COUNT_CAP,
                   should_cancel: CancelFn | None = None,
                   on_progress: ProgressFn | None = None) -> int:
    """Number of full feature assignments satisfying the model formula.

    Exhaustive over the feature variables only, so no auxiliary-variable
    projection questions arise.
    """
    _check_cap(encoded, cap)
    count = 0
    for count, _ in enumerate(iter_products(encoded, should_cancel=should_cancel), 1):
        if on_progress is not None and count % 1024 == 0:
            on_progress(count, -1)
    return count


def enumerate_products(encoded: EncodedModel, limit: int,
                       cap: int = DEFAULT_COUNT_CAP,
                       should_cancel: CancelFn | None = None) -> list[Configuration]:
    """First `limit` products in lexicographic preorder order
    (deselected before selected)."""
    _check_cap(encoded, cap)
    products: list[Configuration] = []
    for values in iter_products(encoded, should_cancel=should_cancel):
        if len(products) >= limit:
            break
        products.append(Configuration({
            fid: Decision.SELECTED if v else Decision.DESELECTED
            for fid, v in values.items()
        }))
    return products


def analyze(encoded: EncodedModel,
            backend: SolverBackend = SolverBackend.AUTO,
            with_count: bool = False,
            cap: int = DEFAULT_COUNT_CAP,
            should_cancel: CancelFn | None = None,
            on_progress: ProgressFn | None = None) -> AnalysisReport:
    """Full report: void flag, dead and core features, optional product count.

    On a void model the dead/core sets are reported empty — "dead" is only
    meaningful against a non-empty product space.
    """
    if is_void(encoded, backend):
        return AnalysisReport(True, frozenset(), frozenset(),
                              0 if with_count else None)
    dead = dead_features(encoded, backend, should_cancel, on_progress)
    core = core_features(encoded, backend, should_cancel, on_progress)
    count = None
    if with_count:
        count = count_products(encoded, cap, should_cancel, on_progress)
    return AnalysisReport(False, dead, core, count)
