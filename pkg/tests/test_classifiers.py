import random
import warnings
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from mlopsrec.classifiers import (
    KnnModel, TrainingMatrix, dumps_model, fit_forest, fit_knn, fit_tree, gini, hamming, loads_model,
    predict_forest, predict_knn, predict_tree, threshold_readout,
)
from mlopsrec.classifiers.tree import mean_gini
from mlopsrec.dataset import DATA_TYPES, NATURES, OUTPUT_FIELDS, FeatureView, LabelSets
from mlopsrec.encoding import encode, full_vocabulary

from conftest import groupby_oracle, random_labels, random_views

ALL_PAIRS = list(product(NATURES, DATA_TYPES))
VOCAB = full_vocabulary()


def matrix(views):
    return TrainingMatrix.from_views(views, VOCAB)


def ls(pre=(), model=(), ptype=(), metrics=()):
    return LabelSets(frozenset(pre), frozenset(model), frozenset(ptype), frozenset(metrics))


def test_gini_values():
    assert gini([4]) == 0
    assert gini([3, 3]) == 0.5
    assert gini([]) == 0
    same = [ls("a", "b", "c", "d")] * 3
    assert mean_gini(same) == 0


def test_single_record_tree():
    v = FeatureView(("structured", "numerical"), ls({"pandas", "numpy"}, {"scikit-learn"}, {"regression"}, {"rmse"}))
    model = fit_tree(matrix([v]))
    assert model.root.is_leaf
    assert model.predict(encode(v.inputs, VOCAB)) == v.outputs


def test_single_pair_tree_is_majority():
    rng = random.Random(11)
    views = random_views(rng, 9, pairs=[("unstructured", "image")])
    model = fit_tree(matrix(views))
    assert model.root.is_leaf
    assert model.predict_inputs(("unstructured", "image")) == groupby_oracle(views)[("unstructured", "image")]


def test_twelve_distinct_pairs_give_twelve_leaves():
    rng = random.Random(0)
    views = [FeatureView(p, ls({f"pre{i}"}, {f"m{i}"}, {f"t{i}"}, {f"e{i}"})) for i, p in enumerate(ALL_PAIRS)]
    rng.shuffle(views)
    model = fit_tree(matrix(views))
    leaves = list(model.root.leaves())
    assert len(leaves) == 12
    for v in views:
        assert model.predict_inputs(v.inputs) == v.outputs


def test_leaf_tables_count_records():
    views = random_views(random.Random(5), 40)
    model = fit_tree(matrix(views))
    for leaf in model.root.leaves():
        assert sum(leaf.table["project_type"].values()) == leaf.count
        for f in OUTPUT_FIELDS:
            assert all(0 < c <= leaf.count for c in leaf.table[f].values())
    assert sum(leaf.count for leaf in model.root.leaves()) == 40


def _no_repeated_feature(node, used=()):
    if node.is_leaf:
        return True
    return node.feature not in used and all(_no_repeated_feature(c, used + (node.feature,))
                                            for c in node.children.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 60))
def test_full_tree_matches_groupby_oracle(seed, n):
    views = random_views(random.Random(seed), n)
    model = fit_tree(matrix(views))
    assert _no_repeated_feature(model.root)
    for pair, expected in groupby_oracle(views).items():
        assert predict_tree(model, encode(pair, VOCAB)) == expected


def test_tree_readout_threshold_and_tie():
    # 4 records, "pandas" in 3 -> kept; a/b in 2 of 4 each -> fallback, tie -> "a"
    table = {"preprocessing_tools": {"pandas": 3, "numpy": 1}, "model_tools": {"a": 2, "b": 2},
             "project_type": {"x": 2, "y": 2}, "evaluation_metrics": {"m": 4}}
    out = threshold_readout(table, 4)
    assert out.preprocessing_tools == {"pandas"}
    assert out.model_tools == {"a"}
    assert out.project_type == {"x"}
    assert out.evaluation_metrics == {"m"}


def test_tree_leaf_with_two_disjoint_records():
    views = [FeatureView(("structured", "image"), ls({"a"}, {"k"}, {"c"}, {"m"})),
             FeatureView(("structured", "image"), ls({"b"}, {"k"}, {"c"}, {"m"}))]
    # neither label is in more than half the leaf: fallback, tie -> "a"
    assert fit_tree(matrix(views)).predict_inputs(("structured", "image")).preprocessing_tools == {"a"}


def test_tree_max_depth_and_min_leaf():
    views = random_views(random.Random(9), 50)
    stump = fit_tree(matrix(views), max_depth=0)
    assert stump.root.is_leaf
    assert fit_tree(matrix(views), max_depth=1).root.depth() <= 1
    big_leaves = fit_tree(matrix(views), min_leaf_size=6)
    assert all(leaf.count >= 6 for leaf in big_leaves.root.leaves())


def test_unseen_category_answered_by_internal_node():
    views = [FeatureView(("structured", "numerical"), ls({"a"}, {"k"}, {"c"}, {"m"})),
             FeatureView(("unstructured", "image"), ls({"b"}, {"j"}, {"d"}, {"n"}))]
    model = fit_tree(matrix(views))
    pred = model.predict_inputs(("semi_structured", "video"))
    assert pred == threshold_readout(model.root.table, 2)


def test_width_mismatch():
    model = fit_tree(matrix(random_views(random.Random(1), 5)))
    with pytest.raises(ValueError):
        model.predict((1, 0, 1))
    with pytest.raises(ValueError):
        fit_tree(matrix([]))


# --- forest ----------------------------------------------------------------

def test_forest_without_bootstrap_equals_tree():
    views = random_views(random.Random(2), 40)
    forest = fit_forest(matrix(views), n_trees=1, seed=0, bootstrap=False)
    tree = fit_tree(matrix(views))
    for p in ALL_PAIRS:
        assert predict_forest(forest, encode(p, VOCAB)) == tree.predict_inputs(p)


def test_forest_deterministic():
    views = random_views(random.Random(4), 50)
    a = fit_forest(matrix(views), n_trees=25, seed=3)
    b = fit_forest(matrix(views), n_trees=25, seed=3)
    assert [a.predict_inputs(p) for p in ALL_PAIRS] == [b.predict_inputs(p) for p in ALL_PAIRS]
    assert dumps_model(a) == dumps_model(b)
    assert a.tree_seeds() == list(range(3, 28))


def test_forest_of_repeated_record():
    v = FeatureView(("unstructured", "textual"), ls({"nltk"}, {"pytorch", "transformers"}, {"generation"}, {"bleu"}))
    for seed in (0, 1, 99):
        forest = fit_forest(matrix([v] * 7), n_trees=10, seed=seed)
        assert forest.predict_inputs(v.inputs) == v.outputs
        assert forest.n_trees == 10


class _Fixed:
    def __init__(self, out):
        self.out = out

    def predict(self, vector):
        return self.out


def _forest_of(*trees):
    forest = fit_forest(matrix(random_views(random.Random(0), 3)), n_trees=1, seed=0)
    forest.trees = [t if hasattr(t, "predict") else _Fixed(t) for t in trees]
    return forest


def test_forest_vote_majority():
    a = lambda s: ls(s, {"k"}, {"c"}, {"m"})  # noqa: E731
    forest = _forest_of(a({"a", "b"}), a({"a"}), a({"a", "c"}))
    assert forest.predict(encode(ALL_PAIRS[0], VOCAB)).preprocessing_tools == {"a"}


def test_forest_vote_fallback_tie():
    forest = _forest_of(ls({"a"}, {"k"}, {"x"}, {"m"}), ls({"b"}, {"k"}, {"y"}, {"m"}))
    out = forest.predict(encode(ALL_PAIRS[0], VOCAB))
    assert out.preprocessing_tools == {"a"}
    assert out.project_type == {"x"}


def test_forest_unanimous_equals_tree():
    views = random_views(random.Random(6), 20)
    tree = fit_tree(matrix(views))
    forest = _forest_of(*[tree] * 5)
    for p in ALL_PAIRS:
        assert forest.predict_inputs(p) == tree.predict_inputs(p)


def test_forest_bad_params():
    with pytest.raises(ValueError):
        fit_forest(matrix(random_views(random.Random(0), 3)), n_trees=0)
    with pytest.raises(ValueError):
        fit_forest(matrix(random_views(random.Random(0), 3)), max_features=3)


# --- knn -------------------------------------------------------------------

def test_hamming_on_one_hot():
    a = encode(("structured", "numerical"), VOCAB)
    assert hamming(a, encode(("structured", "image"), VOCAB)) == 2
    assert hamming(a, encode(("unstructured", "image"), VOCAB)) == 4
    assert {hamming(encode(p, VOCAB), encode(q, VOCAB)) for p in ALL_PAIRS for q in ALL_PAIRS} == {0, 2, 4}


def test_knn_nearest_duplicate():
    views = [FeatureView(p, random_labels(random.Random(i))) for i, p in enumerate(ALL_PAIRS)]
    model = fit_knn(matrix(views), k=1)
    for v in views:
        assert predict_knn(model, encode(v.inputs, VOCAB)) == v.outputs


def test_knn_two_of_three():
    pair = ("structured", "textual")
    views = [FeatureView(pair, ls({"p"}, {t}, {"c"}, {"m"})) for t in ("t", "t", "p")]
    model = fit_knn(matrix(views), k=3)
    assert model.predict_inputs(pair).model_tools == {"t"}


def test_knn_boundary_ties_use_store_order():
    near = ("structured", "textual")
    views = [FeatureView(("structured", "image"), ls({"x"}, {"x"}, {"x"}, {"x"})),
             FeatureView(("unstructured", "textual"), ls({"y"}, {"y"}, {"y"}, {"y"})),
             FeatureView(("structured", "video"), ls({"z"}, {"z"}, {"z"}, {"z"}))]
    model = fit_knn(matrix(views), k=1)
    assert model.neighbors(encode(near, VOCAB)) == [0]
    assert model.predict_inputs(near).model_tools == {"x"}


def test_knn_k_clamped_with_warning():
    views = random_views(random.Random(0), 3)
    with pytest.warns(UserWarning, match="exceeds"):
        model = fit_knn(matrix(views), k=10)
    assert model.k_clamped and model.effective_k == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not fit_knn(matrix(views), k=3).k_clamped
    with pytest.raises(ValueError):
        fit_knn(matrix(views), k=0)


# --- persistence -----------------------------------------------------------

@pytest.mark.parametrize("fit", [
    lambda m: fit_tree(m),
    lambda m: fit_tree(m, max_depth=1, min_leaf_size=2),
    lambda m: fit_forest(m, n_trees=7, seed=5),
    lambda m: fit_knn(m, k=3),
])
def test_save_load_reproduces_predictions(fit):
    views = random_views(random.Random(8), 30)
    model = fit(matrix(views))
    text = dumps_model(model, {"seed": 5})
    loaded = loads_model(text)
    assert type(loaded) is type(model)
    assert dumps_model(loaded, {"seed": 5}) == text
    for p in ALL_PAIRS:
        assert loaded.predict_inputs(p) == model.predict_inputs(p)


def test_knn_persists_k():
    model = fit_knn(matrix(random_views(random.Random(8), 10)), k=4)
    assert isinstance(loads_model(dumps_model(model)), KnnModel)
    assert loads_model(dumps_model(model)).k == 4
