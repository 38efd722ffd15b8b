"""Bagged forest of multi-output trees."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from ..dataset import LabelSets
from ..encoding import INPUT_FEATURES, Vocabulary, encode
from .base import TrainingMatrix, check_width, label_table, threshold_readout
from .tree import DecisionTreeModel, fit_tree


@dataclass
class RandomForestModel:
    trees: list[DecisionTreeModel]
    vocab: Vocabulary
    seed: int
    max_features: int
    bootstrap: bool = True

    name = "random_forest"

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def tree_seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.n_trees)]

    def predict(self, vector: Sequence[int]) -> LabelSets:
        """Labels predicted by more than half of the trees; ``project_type`` by plurality."""
        check_width(vector, self.vocab)
        votes = [t.predict(vector) for t in self.trees]
        return threshold_readout(label_table(votes), len(votes))

    def predict_inputs(self, inputs: tuple[str, str]) -> LabelSets:
        return self.predict(encode(inputs, self.vocab))

    def to_dict(self) -> dict:
        return {"seed": self.seed, "n_trees": self.n_trees, "max_features": self.max_features,
                "bootstrap": self.bootstrap, "tree_seeds": self.tree_seeds(),
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict, vocab: Vocabulary) -> "RandomForestModel":
        trees = [DecisionTreeModel.from_dict(t, vocab) for t in d["trees"]]
        if len(trees) != d["n_trees"]:
            raise ValueError("forest tree count does not match n_trees")
        return cls(trees, vocab, d["seed"], d["max_features"], d["bootstrap"])


def fit_forest(data: TrainingMatrix, n_trees: int = 100, seed: int = 0, *, max_depth: int | None = None,
               min_leaf_size: int = 1, max_features: int | None = None,
               bootstrap: bool = True) -> RandomForestModel:
    """Fit ``n_trees`` trees, tree ``i`` driven by ``random.Random(seed + i)``.

    Each tree draws its bootstrap sample (n draws with replacement) and then
    its feature subset (``max_features`` of the input features, default
    ceil(sqrt(F))) from its own generator, so trees can be fitted in any order.
    """
    if len(data) == 0:
        raise ValueError("cannot fit a forest on no records")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n_features = len(INPUT_FEATURES)
    if max_features is None:
        max_features = math.ceil(math.sqrt(n_features))
    if not 1 <= max_features <= n_features:
        raise ValueError(f"max_features must be in [1, {n_features}]")
    trees = [_fit_one(data, seed + i, max_depth, min_leaf_size, max_features, bootstrap)
             for i in range(n_trees)]
    return RandomForestModel(trees, data.vocab, seed, max_features, bootstrap)


def _fit_one(data, tree_seed, max_depth, min_leaf_size, max_features, bootstrap) -> DecisionTreeModel:
    rng = random.Random(tree_seed)
    n = len(data)
    if bootstrap:
        idx = [rng.randrange(n) for _ in range(n)]
        sample = TrainingMatrix(tuple(data.vectors[i] for i in idx), tuple(data.labels[i] for i in idx),
                                data.vocab)
    else:
        sample = data
    features = sorted(rng.sample(range(len(INPUT_FEATURES)), max_features))
    return fit_tree(sample, max_depth=max_depth, min_leaf_size=min_leaf_size, features=features)
