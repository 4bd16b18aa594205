import pytest

from fmcheck.analysis import (
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
from fmcheck.dsl import parse_model
from fmcheck.logic import UndecidedFeatureError, encode_model
from fmcheck.model import Configuration, CrossTreeConstraint, Decision, RootRef
from fmcheck.solve import OperationCancelled, SolverBackend

from conftest import load_corpus_model
from generators import seeded_models
from oracle import oracle_core, oracle_count, oracle_dead, oracle_products, oracle_void

# Product count of the partial CAD model, computed once by the exhaustive
# 2^14 oracle (test_count_cad_partial re-derives it) and frozen here.
CAD_PARTIAL_PRODUCT_COUNT = 56

ROOT_ONLY = encode_model(parse_model("model M feature Root"))
ROOT_PLUS_OPTIONAL = encode_model(parse_model("model M feature Root { optional { c } }"))


# --- full-configuration checking --------------------------------------------------

def test_valid_product_checks_out(cad_encoded, valid_product_config):
    result = check_full_configuration(cad_encoded, valid_product_config)
    assert result.valid
    assert result.failing == ()


def test_missing_dependency_targets_fail_both_dependency_conjuncts(
        cad_encoded, cad_partial, partial_selection_config):
    raw = partial_selection_config.completed(cad_partial.feature_ids)
    result = check_full_configuration(cad_encoded, raw)
    assert not result.valid
    failing_refs = {c.conjunct.ref for c in result.failing}
    assert set(cad_partial.constraints) <= failing_refs


def test_all_deselected_fails_at_the_root(cad_encoded, cad_partial):
    cfg = Configuration.from_signs(deselected=cad_partial.feature_ids)
    result = check_full_configuration(cad_encoded, cfg)
    assert not result.valid
    assert RootRef("CAD") in {c.conjunct.ref for c in result.failing}


def test_partial_configuration_is_rejected(cad_encoded):
    with pytest.raises(UndecidedFeatureError):
        check_full_configuration(cad_encoded, Configuration.from_signs(selected=["CAD"]))


# --- void ---------------------------------------------------------------------------

@pytest.mark.parametrize("backend", [SolverBackend.BRUTE_FORCE, SolverBackend.DPLL])
def test_void_detection(cad_encoded, void_encoded, backend):
    assert is_void(cad_encoded, backend) is False
    assert is_void(ROOT_ONLY, backend) is False
    assert is_void(void_encoded, backend) is True
    assert oracle_void(void_encoded) is True


# --- dead and core features -----------------------------------------------------------

def test_corpus_model_has_no_dead_features(cad_encoded):
    assert dead_features(cad_encoded) == frozenset()
    assert oracle_dead(cad_encoded) == frozenset()


def test_requires_into_an_alternative_sibling_kills_the_source(dead_feature_encoded):
    assert dead_features(dead_feature_encoded) == {"A"}
    assert oracle_dead(dead_feature_encoded) == {"A"}


def test_root_only_model_has_no_dead_features():
    assert dead_features(ROOT_ONLY) == frozenset()


def test_core_features_of_corpus_model(cad_encoded):
    assert core_features(cad_encoded) == {"CAD", "v1", "v2", "v3"}
    assert oracle_core(cad_encoded) == {"CAD", "v1", "v2", "v3"}


def test_core_of_tiny_models():
    assert core_features(ROOT_ONLY) == {"Root"}
    assert core_features(ROOT_PLUS_OPTIONAL) == {"Root"}


def test_dead_and_core_raise_on_void_models(void_encoded):
    with pytest.raises(VoidModelError):
        dead_features(void_encoded)
    with pytest.raises(VoidModelError):
        core_features(void_encoded)


# --- counting and enumeration -----------------------------------------------------------

def test_count_of_tiny_models():
    assert count_products(ROOT_ONLY) == 1
    assert count_products(ROOT_PLUS_OPTIONAL) == 2


def test_count_cad_partial_matches_the_frozen_oracle_constant(cad_encoded):
    assert oracle_count(cad_encoded) == CAD_PARTIAL_PRODUCT_COUNT
    assert count_products(cad_encoded) == CAD_PARTIAL_PRODUCT_COUNT


def test_count_respects_the_cap():
    wide = encode_model(load_corpus_model("wide"))
    with pytest.raises(ModelTooLargeError):
        count_products(wide)
    with pytest.raises(ModelTooLargeError):
        count_products(ROOT_PLUS_OPTIONAL, cap=1)


def test_enumerate_tiny_models():
    assert [p.decisions for p in enumerate_products(ROOT_ONLY, 10)] == [
        {"Root": Decision.SELECTED}]
    products = enumerate_products(ROOT_PLUS_OPTIONAL, 10)
    assert [(p.of("Root"), p.of("c")) for p in products] == [
        (Decision.SELECTED, Decision.DESELECTED),
        (Decision.SELECTED, Decision.SELECTED),
    ]


def test_enumerate_cad_prefix_is_valid_and_ordered(cad_encoded):
    first_three = enumerate_products(cad_encoded, 3)
    assert len(first_three) == 3
    for product in first_three:
        assert check_full_configuration(cad_encoded, product).valid
    assert first_three == oracle_products(cad_encoded)[:3]


def test_enumerate_respects_limit(cad_encoded):
    assert len(enumerate_products(cad_encoded, 5)) == 5
    assert len(enumerate_products(cad_encoded, 10_000)) == CAD_PARTIAL_PRODUCT_COUNT


# --- report assembly ----------------------------------------------------------------------

def test_analyze_report_on_corpus(cad_encoded):
    report = analyze(cad_encoded, with_count=True)
    assert not report.void
    assert report.dead_features == frozenset()
    assert report.core_features == {"CAD", "v1", "v2", "v3"}
    assert report.product_count == CAD_PARTIAL_PRODUCT_COUNT


def test_analyze_report_on_void_model(void_encoded):
    report = analyze(void_encoded, with_count=True)
    assert report.void
    assert report.dead_features == frozenset()
    assert report.core_features == frozenset()
    assert report.product_count == 0


def test_analyze_report_invariants_on_random_models():
    for model in seeded_models(30, max_features=8):
        encoded = encode_model(model)
        report = analyze(encoded, with_count=True)
        assert report.void == (report.product_count == 0)
        if not report.void:
            assert not (report.dead_features & report.core_features)
            assert report.dead_features == oracle_dead(encoded)
            assert report.core_features == oracle_core(encoded)
        assert report.product_count == oracle_count(encoded)


def test_dead_core_cross_checked_against_enumeration(cad_full_encoded):
    report = analyze(cad_full_encoded, backend=SolverBackend.DPLL)
    products = enumerate_products(cad_full_encoded, limit=1 << 22)
    for fid in report.dead_features:
        assert all(p.of(fid) is Decision.DESELECTED for p in products)
    for fid in report.core_features:
        assert all(p.of(fid) is Decision.SELECTED for p in products)


# --- cooperative cancellation and progress ---------------------------------------------------

def test_cancellation_interrupts_long_scans(cad_encoded):
    with pytest.raises(OperationCancelled):
        dead_features(cad_encoded, should_cancel=lambda: True)
    with pytest.raises(OperationCancelled):
        count_products(cad_encoded, should_cancel=lambda: True)


def test_progress_callback_reports_each_probe(cad_encoded):
    calls = []
    dead_features(cad_encoded, on_progress=lambda done, total: calls.append((done, total)))
    n = len(cad_encoded.feature_ids)
    assert calls == [(i + 1, n) for i in range(n)]
