from itertools import product as cartesian

from fmcheck.cnf import parse_dimacs, to_cnf, to_dimacs
from fmcheck.dsl import parse_model
from fmcheck.logic import (
    And,
    EncodedModel,
    GroupConjunct,
    Iff,
    Not,
    Or,
    Var,
    Xor,
    encode_model,
    eval_formula,
)
from fmcheck.model import GroupKind
from fmcheck.solve import dpll_clauses

from generators import seeded_models
from oracle import all_full_configs, oracle_products


def clause_models_projected(cnf, feature_ids):
    """Satisfying assignments of the clause set, projected to feature
    variables, by exhaustive enumeration over all variables."""
    found = set()
    for bits in cartesian((False, True), repeat=cnf.num_vars):
        values = {i + 1: bit for i, bit in enumerate(bits)}
        if all(any(values[abs(l)] == (l > 0) for l in clause) for clause in cnf.clauses):
            found.add(frozenset(
                fid for fid in feature_ids if values[cnf.variable_map[fid]]))
    return found


def formula_models(encoded):
    return {cfg.selected for cfg in oracle_products(encoded)}


def test_root_only_model_yields_single_unit_clause():
    encoded = encode_model(parse_model("model M feature Root"))
    cnf = to_cnf(encoded)
    assert dict(cnf.variable_map) == {"Root": 1}
    assert cnf.clauses == ((1,),)
    assert cnf.num_vars == 1


def test_mandatory_biconditional_gets_two_direct_clauses():
    encoded = encode_model(parse_model("model M feature p { mandatory { c } }"))
    cnf = to_cnf(encoded)
    # variables: p -> 1, c -> 2; conjuncts: root, then (c <-> p)
    assert cnf.clauses == ((1,), (-2, 1), (-1, 2))
    assert cnf.num_vars == 2


def test_no_auxiliaries_for_the_standard_group_shapes(cad_encoded):
    cnf = to_cnf(cad_encoded)
    assert cnf.num_vars == len(cad_encoded.feature_ids)


def test_every_clause_carries_its_originating_conjunct(cad_encoded):
    cnf = to_cnf(cad_encoded)
    assert len(cnf.origins) == len(cnf.clauses)
    refs = {c.ref for c in cad_encoded.conjuncts()}
    assert set(cnf.origins) <= refs


def test_cnf_models_match_formula_models_on_corpus(cad_encoded):
    cnf = to_cnf(cad_encoded)
    # No auxiliaries here, so project by checking the feature assignments directly.
    satisfying = set()
    for cfg in all_full_configs(cad_encoded.feature_ids):
        values = {cnf.variable_map[fid]: cfg.of(fid).value == "selected"
                  for fid in cad_encoded.feature_ids}
        if all(any(values[abs(l)] == (l > 0) for l in clause) for clause in cnf.clauses):
            satisfying.add(cfg.selected)
    assert satisfying == formula_models(cad_encoded)


def test_cnf_faithful_on_random_models():
    for model in seeded_models(30, max_features=9):
        encoded = encode_model(model)
        cnf = to_cnf(encoded)
        assert clause_models_projected(cnf, encoded.feature_ids) == formula_models(encoded)


def test_tseitin_fallback_is_projection_exact():
    """A hand-built nested conjunct has no flat clause shape, so auxiliary
    variables appear; projected models must still match exactly."""
    model = parse_model("model M feature r { optional { a b } }")
    nested = Or((And((Var("a"), Not(Var("b")))), And((Var("b"), Xor(Var("a"), Var("r"))))))
    encoded = EncodedModel(
        model, Var("r"),
        (GroupConjunct("r", GroupKind.OPTIONAL, nested),), ())
    cnf = to_cnf(encoded)
    assert cnf.num_vars > len(encoded.feature_ids)
    assert clause_models_projected(cnf, encoded.feature_ids) == formula_models(encoded)


# --- DIMACS ---------------------------------------------------------------------

def test_dimacs_root_only_is_byte_exact():
    encoded = encode_model(parse_model("model M feature Root"))
    assert to_dimacs(to_cnf(encoded)) == "c map 1 Root\np cnf 1 1\n1 0\n"


def test_dimacs_is_stable_across_runs(cad_encoded):
    assert to_dimacs(to_cnf(cad_encoded)) == to_dimacs(to_cnf(cad_encoded))


def test_dimacs_comment_map_lists_features_in_preorder(cad_encoded):
    text = to_dimacs(to_cnf(cad_encoded))
    map_lines = [l for l in text.splitlines() if l.startswith("c map")]
    assert [l.split()[3] for l in map_lines] == list(cad_encoded.feature_ids)


def test_dimacs_round_trip_preserves_satisfiability(cad_encoded):
    cnf = to_cnf(cad_encoded)
    num_vars, clauses, comment_map = parse_dimacs(to_dimacs(cnf))
    assert num_vars == cnf.num_vars
    assert [tuple(c) for c in clauses] == list(cnf.clauses)
    assert comment_map == {num: fid for fid, num in cnf.variable_map.items()}
    assert dpll_clauses(clauses, num_vars) is not None  # matches is_void == False


def test_dimacs_round_trip_detects_unsatisfiable(void_encoded):
    num_vars, clauses, _ = parse_dimacs(to_dimacs(to_cnf(void_encoded)))
    assert dpll_clauses(clauses, num_vars) is None
