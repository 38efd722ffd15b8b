import json
import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from mlopsrec import asset_path
from mlopsrec.dataset import DATA_TYPES, NATURES, FeatureView, LabelSets
from mlopsrec.evaluation import recall, score_predictions
from mlopsrec.rules import (
    DuplicateId, NoMatch, Rule, RuleError, RuleSet, dump_rules, extract_rules, load_rules, match_rule,
    predict_rule_based, read_rules,
)

from conftest import random_views

OUTPUTS = {"preprocessing_tools": ["opencv"], "model_tools": ["tensorflow"], "project_type": "classification",
           "evaluation_metrics": ["accuracy", "f1"]}


def rule_file(*rules):
    return json.dumps({"version": 1, "rules": list(rules)})


def rule(rid, nature="unstructured", dtype="image", **outputs):
    return {"id": rid, "condition": {"nature": nature, "type": dtype}, "outputs": {**OUTPUTS, **outputs}}


def test_load_one_rule():
    rs = load_rules(rule_file(rule("r1")))
    assert len(rs) == 1
    assert rs.rules[0].outputs.project_type == {"classification"}


def test_duplicate_id():
    with pytest.raises(DuplicateId):
        load_rules(rule_file(rule("r1"), rule("r1", dtype="video")))


def test_empty_output_set_rejected():
    with pytest.raises(RuleError, match=r"rules\[0\]\.outputs\.model_tools"):
        load_rules(rule_file(rule("r1", model_tools=[])))


def test_syntax_error_reports_location():
    with pytest.raises(RuleError, match="line 2"):
        load_rules('{"version": 1,\n "rules": [,]}')


def test_double_wildcard_rejected():
    with pytest.raises(RuleError, match="specific"):
        load_rules(rule_file(rule("r1", nature="*", dtype="*")))


def test_unknown_condition_value():
    with pytest.raises(RuleError, match="allowed"):
        load_rules(rule_file(rule("r1", dtype="audio")))


def test_sample_rules_cover_all_pairs():
    rs = read_rules(asset_path("sample_rules.json"))
    assert len(rs) == 12
    for pair in product(NATURES, DATA_TYPES):
        assert match_rule(pair, rs).covers(pair)


def test_dump_load_round_trip():
    rs = read_rules(asset_path("sample_rules.json"))
    assert load_rules(dump_rules(rs)) == rs


def test_match_exact_and_specificity():
    rs = load_rules(rule_file(rule("A", dtype="*"), rule("B")))
    assert match_rule(("unstructured", "image"), rs).id == "B"
    assert match_rule(("unstructured", "video"), rs).id == "A"
    with pytest.raises(NoMatch):
        match_rule(("structured", "image"), rs)
    with pytest.raises(NoMatch):
        match_rule(("structured", "image"), RuleSet(()))


def test_equal_specificity_uses_file_order():
    rs = load_rules(rule_file(rule("first", dtype="*"), rule("second", nature="*")))
    assert match_rule(("unstructured", "image"), rs).id == "first"


def test_predict_passes_outputs_through():
    rs = load_rules(rule_file(rule("r1")))
    pred = predict_rule_based(("unstructured", "image"), rs)
    assert pred.evaluation_metrics == {"accuracy", "f1"}
    assert predict_rule_based(("unstructured", "image"), rs) == pred


def two_image_records():
    base = dict(preprocessing_tools=frozenset({"opencv"}), project_type=frozenset({"classification"}),
                evaluation_metrics=frozenset({"accuracy"}))
    return [FeatureView(("unstructured", "image"), LabelSets(model_tools=frozenset({"tensorflow"}), **base)),
            FeatureView(("unstructured", "image"), LabelSets(model_tools=frozenset({"pytorch"}), **base))]


def test_extract_union():
    (r,) = extract_rules(two_image_records(), "union")
    assert r.outputs.model_tools == {"pytorch", "tensorflow"}
    assert (r.nature, r.data_type) == ("unstructured", "image")


def test_extract_majority_fallback_tie():
    # hand enumeration: each label in 1 of 2 records, none > 1/2, tie -> "pytorch" < "tensorflow"
    (r,) = extract_rules(two_image_records(), "majority")
    assert r.outputs.model_tools == {"pytorch"}
    assert r.outputs.preprocessing_tools == {"opencv"}


def test_extract_counts_pairs():
    rng = random.Random(3)
    views = random_views(rng, 40)
    assert len(extract_rules(views)) == len({v.inputs for v in views})
    with pytest.raises(ValueError):
        extract_rules([])


def test_extracted_rules_serialize():
    rs = extract_rules(random_views(random.Random(1), 30))
    assert load_rules(dump_rules(rs)).rules == rs.rules


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40))
def test_union_is_superset_and_majority_subset(seed, n):
    views = random_views(random.Random(seed), n)
    union, major = extract_rules(views, "union"), extract_rules(views, "majority")
    for v in views:
        u, m = predict_rule_based(v.inputs, union), predict_rule_based(v.inputs, major)
        for f, gold in v.outputs.items():
            assert gold <= u[f]
            assert m[f] <= u[f]
            assert m[f]
    gold = [v.outputs for v in views]
    assert recall(score_predictions(gold, [union.predict_inputs(v.inputs) for v in views])) == 1


def test_full_rule_set_is_total():
    rules = tuple(Rule(f"{a}-{b}", a, b, LabelSets(frozenset("x"), frozenset("y"), frozenset("z"), frozenset("w")))
                  for a, b in product(NATURES, DATA_TYPES))
    rs = RuleSet(rules)
    for pair in product(NATURES, DATA_TYPES):
        assert match_rule(pair, rs).id == f"{pair[0]}-{pair[1]}"
