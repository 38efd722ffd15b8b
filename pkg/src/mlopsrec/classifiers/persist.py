"""JSON persistence for fitted models."""

from __future__ import annotations

import json
from pathlib import Path

from ..encoding import Vocabulary
from .forest import RandomForestModel
from .knn import KnnModel
from .tree import DecisionTreeModel

MODEL_FORMAT_VERSION = 1
MODEL_KINDS = {
    "decision_tree": DecisionTreeModel,
    "random_forest": RandomForestModel,
    "knn": KnnModel,
}


class ModelFormatError(ValueError):
    pass


def dumps_model(model, meta: dict | None = None) -> str:
    """Serialize deterministically: sorted keys, no timestamps."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.name,
        "vocabulary": model.vocab.to_dict(),
        "model": model.to_dict(),
        "meta": meta or {},
    }
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def loads_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid model JSON at line {exc.lineno}: {exc.msg}") from None
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    vocab = Vocabulary.from_dict(doc["vocabulary"])
    return MODEL_KINDS[kind].from_dict(doc["model"], vocab)


def load_meta(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8")).get("meta", {})


def save_model(model, path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps_model(model, meta), encoding="utf-8")


def load_model(path):
    return loads_model(Path(path).read_text(encoding="utf-8"))
