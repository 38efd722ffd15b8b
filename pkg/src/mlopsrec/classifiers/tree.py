"""Multi-output decision tree over the two categorical input features.

Internal nodes split multiway on one feature (data nature or data type).
Every node keeps the per-field label counts of its training records, so a
probe whose category was never seen below a node is answered by that node.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from ..dataset import OUTPUT_FIELDS, LabelSets
from ..encoding import INPUT_FEATURES, Vocabulary, decode, encode
from .base import TrainingMatrix, check_width, label_table, threshold_readout


def gini(counts: Sequence[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    return 1.0 - sum((c / total) ** 2 for c in counts)


def mean_gini(labels: Sequence[LabelSets]) -> float:
    """Mean over the four output fields of the Gini impurity of each field.

    A field's classes are the distinct label sets it takes across the records,
    so a node whose records agree on a field has impurity 0 for that field.
    """
    return sum(gini(list(Counter(ls[f] for ls in labels).values())) for f in OUTPUT_FIELDS) / len(OUTPUT_FIELDS)


@dataclass
class Node:
    count: int
    table: dict[str, dict[str, int]]
    feature: int | None = None
    children: dict[str, "Node"] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        d = {"count": self.count, "table": self.table}
        if not self.is_leaf:
            d["feature"] = INPUT_FEATURES[self.feature]
            d["children"] = {k: c.to_dict() for k, c in sorted(self.children.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Node":
        node = cls(d["count"], {f: dict(d["table"][f]) for f in OUTPUT_FIELDS})
        if "feature" in d:
            node.feature = INPUT_FEATURES.index(d["feature"])
            node.children = {k: cls.from_dict(c) for k, c in d["children"].items()}
        return node

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for _, child in sorted(self.children.items()):
                yield from child.leaves()

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children.values())


@dataclass
class DecisionTreeModel:
    root: Node
    vocab: Vocabulary
    max_depth: int | None = None
    min_leaf_size: int = 1
    features: tuple[int, ...] = (0, 1)

    name = "decision_tree"

    def route(self, inputs: tuple[str, str]) -> Node:
        node = self.root
        while not node.is_leaf and inputs[node.feature] in node.children:
            node = node.children[inputs[node.feature]]
        return node

    def predict(self, vector: Sequence[int]) -> LabelSets:
        check_width(vector, self.vocab)
        node = self.route(decode(vector, self.vocab))
        return threshold_readout(node.table, node.count)

    def predict_inputs(self, inputs: tuple[str, str]) -> LabelSets:
        return self.predict(encode(inputs, self.vocab))

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "min_leaf_size": self.min_leaf_size,
                "features": [INPUT_FEATURES[i] for i in self.features], "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, d: dict, vocab: Vocabulary) -> "DecisionTreeModel":
        return cls(Node.from_dict(d["root"]), vocab, d["max_depth"], d["min_leaf_size"],
                   tuple(INPUT_FEATURES.index(f) for f in d["features"]))


def fit_tree(data: TrainingMatrix, max_depth: int | None = None, min_leaf_size: int = 1,
             features: Sequence[int] = (0, 1)) -> DecisionTreeModel:
    """Grow a tree by recursive multiway splits.

    At each node the candidate feature with the lowest count-weighted mean Gini
    over its children wins (ties: lower feature index). Growth stops at
    ``max_depth``, when the records agree on all outputs, when no unused
    feature takes two or more values, or when a split would leave a child
    smaller than ``min_leaf_size``.
    """
    if len(data) == 0:
        raise ValueError("cannot fit a tree on no records")
    if min_leaf_size < 1:
        raise ValueError("min_leaf_size must be >= 1")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    rows = list(zip(data.categories(), data.labels))
    root = _grow(rows, tuple(sorted(features)), 0, max_depth, min_leaf_size)
    return DecisionTreeModel(root, data.vocab, max_depth, min_leaf_size, tuple(sorted(features)))


def _grow(rows, available, depth, max_depth, min_leaf_size) -> Node:
    labels = [ls for _, ls in rows]
    node = Node(len(rows), label_table(labels))
    if (max_depth is not None and depth >= max_depth) or len(set(labels)) <= 1:
        return node
    best = None
    for feat in available:
        groups: dict[str, list] = {}
        for row in rows:
            groups.setdefault(row[0][feat], []).append(row)
        if len(groups) < 2 or min(len(g) for g in groups.values()) < min_leaf_size:
            continue
        score = sum(len(g) * mean_gini([ls for _, ls in g]) for g in groups.values()) / len(rows)
        if best is None or score < best[0]:
            best = (score, feat, groups)
    if best is None:
        return node
    _, feat, groups = best
    rest = tuple(f for f in available if f != feat)
    node.feature = feat
    node.children = {value: _grow(g, rest, depth + 1, max_depth, min_leaf_size)
                     for value, g in sorted(groups.items())}
    return node
