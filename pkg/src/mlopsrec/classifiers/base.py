"""Training data container and label readout shared by the learned models."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..dataset import OUTPUT_FIELDS, FeatureView, LabelSets
from ..encoding import Vocabulary, decode, encode

SINGLE_FIELDS = ("project_type",)


@dataclass(frozen=True)
class TrainingMatrix:
    vectors: tuple[tuple[int, ...], ...]
    labels: tuple[LabelSets, ...]
    vocab: Vocabulary

    def __post_init__(self):
        if len(self.vectors) != len(self.labels):
            raise ValueError("vectors and labels differ in length")
        for v in self.vectors:
            if len(v) != self.vocab.width:
                raise ValueError(f"vector width {len(v)} does not match vocabulary width {self.vocab.width}")

    def __len__(self) -> int:
        return len(self.vectors)

    @classmethod
    def from_views(cls, views: Iterable[FeatureView], vocab: Vocabulary) -> "TrainingMatrix":
        views = list(views)
        return cls(tuple(encode(v.inputs, vocab) for v in views), tuple(v.outputs for v in views), vocab)

    def categories(self) -> list[tuple[str, str]]:
        return [decode(v, self.vocab) for v in self.vectors]


def check_width(vector: Sequence[int], vocab: Vocabulary) -> None:
    if len(vector) != vocab.width:
        raise ValueError(f"vector width {len(vector)} does not match model vocabulary width {vocab.width}")


def label_table(labels: Iterable[LabelSets]) -> dict[str, dict[str, int]]:
    """Per output field, how many of the given records carry each label."""
    counts = {f: Counter() for f in OUTPUT_FIELDS}
    for ls in labels:
        for f in OUTPUT_FIELDS:
            counts[f].update(ls[f])
    return {f: dict(sorted(c.items())) for f, c in counts.items()}


def most_frequent(counts: Mapping[str, int]) -> str:
    """Highest count; ties go to the lexicographically smallest label."""
    return min(counts, key=lambda label: (-counts[label], label))


def threshold_readout(table: Mapping[str, Mapping[str, int]], n: int) -> LabelSets:
    """Per-field label readout from frequency counts over ``n`` records or voters.

    Set-valued fields keep labels with count > n/2 and fall back to the single
    most frequent label when that would leave them empty. ``project_type`` is
    the modal value.
    """
    out = {}
    for f in OUTPUT_FIELDS:
        counts = {k: c for k, c in table[f].items() if c > 0}
        if not counts:
            out[f] = frozenset()
        elif f in SINGLE_FIELDS:
            out[f] = frozenset([most_frequent(counts)])
        else:
            keep = frozenset(k for k, c in counts.items() if 2 * c > n)
            out[f] = keep or frozenset([most_frequent(counts)])
    return LabelSets(**out)


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x != y for x, y in zip(a, b))
