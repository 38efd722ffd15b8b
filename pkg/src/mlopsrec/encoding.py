"""One-hot encoding of the two input features and the seeded train/test split."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dataset import DATA_TYPES, NATURES, FeatureView

INPUT_FEATURES = ("data_nature", "data_type")
DEFAULT_RATIO = Fraction(8, 10)

FeatureVector = tuple  # tuple of 0/1 ints, one block per input feature


class UnknownCategory(ValueError):
    def __init__(self, feature: str, value: str, known: Sequence[str]):
        self.feature = feature
        self.value = value
        super().__init__(f"unknown {feature} {value!r}; vocabulary has: {', '.join(known) or '(none)'}")


@dataclass(frozen=True)
class Vocabulary:
    natures: tuple[str, ...]
    types: tuple[str, ...]

    @property
    def blocks(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.natures, self.types)

    @property
    def width(self) -> int:
        return len(self.natures) + len(self.types)

    def to_dict(self) -> dict:
        return {"data_nature": list(self.natures), "data_type": list(self.types)}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        natures, types = tuple(data["data_nature"]), tuple(data["data_type"])
        for block in (natures, types):
            if list(block) != sorted(set(block)):
                raise ValueError(f"vocabulary block must be sorted and unique: {block}")
        return cls(natures, types)


def full_vocabulary() -> Vocabulary:
    return Vocabulary(tuple(sorted(NATURES)), tuple(sorted(DATA_TYPES)))


def build_vocabulary(views: Iterable[FeatureView], cover_enums: bool = False) -> Vocabulary:
    """Sorted categories observed in ``views``.

    With ``cover_enums`` the closed input domains are always included, so any
    valid input stays encodable at prediction time.
    """
    views = list(views)
    if not views:
        raise ValueError("cannot build a vocabulary from no records")
    natures = {v.inputs[0] for v in views}
    types = {v.inputs[1] for v in views}
    if cover_enums:
        natures.update(NATURES)
        types.update(DATA_TYPES)
    return Vocabulary(tuple(sorted(natures)), tuple(sorted(types)))


def encode(inputs: tuple[str, str], vocab: Vocabulary) -> FeatureVector:
    bits = []
    for feature, value, block in zip(INPUT_FEATURES, inputs, vocab.blocks):
        if value not in block:
            raise UnknownCategory(feature, value, block)
        bits.extend(1 if c == value else 0 for c in block)
    return tuple(bits)


def decode(vector: Sequence[int], vocab: Vocabulary) -> tuple[str, str]:
    """Inverse of :func:`encode`; the vector must hold one set bit per block."""
    if len(vector) != vocab.width:
        raise ValueError(f"vector width {len(vector)} does not match vocabulary width {vocab.width}")
    out = []
    offset = 0
    for feature, block in zip(INPUT_FEATURES, vocab.blocks):
        chunk = vector[offset:offset + len(block)]
        hot = [i for i, b in enumerate(chunk) if b]
        if len(hot) != 1:
            raise ValueError(f"{feature} block is not one-hot: {tuple(chunk)}")
        out.append(block[hot[0]])
        offset += len(block)
    return (out[0], out[1])


@dataclass(frozen=True)
class SplitResult:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    ratio: Fraction


def split_train_test(n: int, ratio=DEFAULT_RATIO, seed: int = 0) -> SplitResult:
    """Shuffle ``range(n)`` with ``random.Random(seed)``; the first floor(ratio*n) go to train."""
    if n < 0:
        raise ValueError("n must be >= 0")
    ratio = Fraction(ratio).limit_denominator(10**6) if isinstance(ratio, float) else Fraction(ratio)
    if not 0 <= ratio <= 1:
        raise ValueError("ratio must lie in [0, 1]")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    cut = math.floor(ratio * n)
    return SplitResult(tuple(indices[:cut]), tuple(indices[cut:]), seed, ratio)
