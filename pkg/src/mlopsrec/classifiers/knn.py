"""k-nearest neighbours under Hamming distance on one-hot vectors."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from ..dataset import LabelSets
from ..encoding import Vocabulary, encode
from .base import TrainingMatrix, check_width, hamming, label_table, threshold_readout


@dataclass
class KnnModel:
    vectors: tuple[tuple[int, ...], ...]
    labels: tuple[LabelSets, ...]
    vocab: Vocabulary
    k: int = 5

    name = "knn"

    @property
    def effective_k(self) -> int:
        return min(self.k, len(self.vectors))

    @property
    def k_clamped(self) -> bool:
        return self.k > len(self.vectors)

    def neighbors(self, vector: Sequence[int]) -> list[int]:
        """Indices of the k nearest stored vectors; ties resolved by store order."""
        check_width(vector, self.vocab)
        order = sorted(range(len(self.vectors)), key=lambda i: (hamming(vector, self.vectors[i]), i))
        return order[:self.effective_k]

    def predict(self, vector: Sequence[int]) -> LabelSets:
        near = self.neighbors(vector)
        return threshold_readout(label_table(self.labels[i] for i in near), len(near))

    def predict_inputs(self, inputs: tuple[str, str]) -> LabelSets:
        return self.predict(encode(inputs, self.vocab))

    def to_dict(self) -> dict:
        return {"k": self.k, "vectors": [list(v) for v in self.vectors],
                "labels": [ls.to_dict() for ls in self.labels]}

    @classmethod
    def from_dict(cls, d: dict, vocab: Vocabulary) -> "KnnModel":
        return cls(tuple(tuple(v) for v in d["vectors"]), tuple(LabelSets.from_dict(x) for x in d["labels"]),
                   vocab, d["k"])


def fit_knn(data: TrainingMatrix, k: int = 5) -> KnnModel:
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(data) == 0:
        raise ValueError("cannot fit knn on no records")
    model = KnnModel(data.vectors, data.labels, data.vocab, k)
    if model.k_clamped:
        warnings.warn(f"k={k} exceeds the {len(data)} stored records; using k={model.effective_k}",
                      stacklevel=2)
    return model
