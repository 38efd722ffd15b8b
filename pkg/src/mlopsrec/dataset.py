"""Project records: parsing, validation, filtering and synthetic generation.

A record describes one machine-learning project using the ten fields of the
data-collection form. Two of them (data nature, data type) are the inputs of
every recommender approach, four of them are the outputs to predict.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

CATEGORIES = ("ai", "non_ai")
NATURES = ("structured", "unstructured", "semi_structured")
DATA_TYPES = ("numerical", "textual", "image", "video")

FIELDNAMES = (
    "name",
    "description",
    "project_category",
    "data_nature",
    "data_type",
    "preprocessing_tools",
    "project_type",
    "technique",
    "evaluation_metrics",
    "model_tools",
)
SET_FIELDS = ("preprocessing_tools", "evaluation_metrics", "model_tools")
# output fields in the order they are reported everywhere
OUTPUT_FIELDS = ("preprocessing_tools", "model_tools", "project_type", "evaluation_metrics")


class DatasetError(ValueError):
    """Raised for malformed or invalid project records."""

    def __init__(self, message: str, row: int | None = None, field: str | None = None):
        self.detail = message
        self.row = row
        self.field = field
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def normalize_label(value: str) -> str:
    """Trim, case-fold and collapse internal whitespace."""
    return " ".join(value.strip().casefold().split())


def normalize_enum(value: str) -> str:
    return normalize_label(value).replace("-", "_").replace(" ", "_")


def split_labels(cell) -> frozenset[str]:
    """Split a multi-valued cell on commas/semicolons. Lists are accepted as-is."""
    if cell is None:
        return frozenset()
    if isinstance(cell, str):
        parts = cell.replace(";", ",").split(",")
    else:
        parts = list(cell)
    return frozenset(p for p in (normalize_label(str(x)) for x in parts) if p)


def check_enum(fieldname: str, value: str, allowed: Sequence[str]) -> str:
    value = normalize_enum(value)
    if value not in allowed:
        raise DatasetError(f"unknown {fieldname} {value!r}, allowed: {'|'.join(allowed)}",
                           field=fieldname)
    return value


@dataclass(frozen=True)
class LabelSets:
    """The four predicted/gold outputs, each as a set of labels.

    ``project_type`` is single-valued on records and for the learned models;
    it is still a set so that rules extracted by union may carry several.
    """

    preprocessing_tools: frozenset[str] = frozenset()
    model_tools: frozenset[str] = frozenset()
    project_type: frozenset[str] = frozenset()
    evaluation_metrics: frozenset[str] = frozenset()

    def __getitem__(self, name: str) -> frozenset[str]:
        if name not in OUTPUT_FIELDS:
            raise KeyError(name)
        return getattr(self, name)

    def items(self):
        return [(f, getattr(self, f)) for f in OUTPUT_FIELDS]

    def to_dict(self) -> dict:
        return {f: sorted(v) for f, v in self.items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LabelSets":
        return cls(**{f: split_labels(data.get(f, ())) for f in OUTPUT_FIELDS})


@dataclass(frozen=True)
class FeatureView:
    inputs: tuple[str, str]  # (data_nature, data_type)
    outputs: LabelSets


@dataclass(frozen=True)
class ProjectRecord:
    name: str
    description: str
    project_category: str
    data_nature: str
    data_type: str
    preprocessing_tools: frozenset[str] = field(default_factory=frozenset)
    project_type: str = ""
    technique: str = ""
    evaluation_metrics: frozenset[str] = field(default_factory=frozenset)
    model_tools: frozenset[str] = field(default_factory=frozenset)

    @property
    def is_ai(self) -> bool:
        return self.project_category == "ai"

    def to_row(self) -> dict[str, str]:
        row = {}
        for name in FIELDNAMES:
            value = getattr(self, name)
            row[name] = ";".join(sorted(value)) if name in SET_FIELDS else value
        return row


def make_record(raw: Mapping, row: int | None = None) -> ProjectRecord:
    """Build a validated, normalized record from a mapping of raw cell values."""
    missing = [k for k in FIELDNAMES if k not in raw]
    if missing:
        raise DatasetError(f"missing keys {missing}", row=row)
    values = {}
    try:
        values["project_category"] = check_enum("project_category", _text(raw, "project_category", row),
                                                CATEGORIES)
        values["data_nature"] = check_enum("data_nature", _text(raw, "data_nature", row), NATURES)
        values["data_type"] = check_enum("data_type", _text(raw, "data_type", row), DATA_TYPES)
    except DatasetError as exc:
        raise DatasetError(exc.detail, row=row, field=exc.field) from None
    values["name"] = _text(raw, "name", row).strip()
    values["description"] = _text(raw, "description", row).strip()
    values["project_type"] = normalize_label(_text(raw, "project_type", row))
    values["technique"] = normalize_label(_text(raw, "technique", row))
    for name in SET_FIELDS:
        cell = raw[name]
        if cell is not None and not isinstance(cell, (str, list, tuple)):
            raise DatasetError(f"expected string or list, got {type(cell).__name__}", row=row, field=name)
        values[name] = split_labels(cell)
    if values["project_category"] == "ai":
        for name in SET_FIELDS + ("project_type",):
            if not values[name]:
                raise DatasetError("empty value in an ai record", row=row, field=name)
    return ProjectRecord(**values)


def _text(raw: Mapping, name: str, row: int | None) -> str:
    value = raw[name]
    if value is None:
        return ""
    if not isinstance(value, str):
        raise DatasetError(f"expected string, got {type(value).__name__}", row=row, field=name)
    return value


def parse_records(source: TextIO | str, format: str = "csv") -> list[ProjectRecord]:
    """Parse CSV or JSON project records; row indices in errors are 0-based data rows."""
    text = source if isinstance(source, str) else source.read()
    if format == "csv":
        reader = csv.DictReader(io.StringIO(text))
        header = reader.fieldnames or []
        if [h.strip() for h in header] != list(FIELDNAMES):
            raise DatasetError(f"CSV header must be {','.join(FIELDNAMES)}, got {','.join(header)}")
        records = []
        for i, row in enumerate(reader):
            if None in row or any(v is None for v in row.values()):
                raise DatasetError("wrong number of cells", row=i)
            records.append(make_record({k.strip(): v for k, v in row.items()}, row=i))
        return records
    if format == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, list):
            raise DatasetError("JSON dataset must be an array of objects")
        records = []
        for i, obj in enumerate(data):
            if not isinstance(obj, dict):
                raise DatasetError("expected an object", row=i)
            records.append(make_record(obj, row=i))
        return records
    raise ValueError(f"unknown format {format!r}, expected csv or json")


def serialize_records(records: Iterable[ProjectRecord], format: str = "csv") -> str:
    rows = [r.to_row() for r in records]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELDNAMES, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if format == "json":
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown format {format!r}, expected csv or json")


def format_for_path(path: str) -> str:
    return "json" if str(path).lower().endswith(".json") else "csv"


def read_records(path) -> list[ProjectRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_records(fh, format_for_path(path))


def filter_ai(records: Iterable[ProjectRecord]) -> list[ProjectRecord]:
    return [r for r in records if r.project_category == "ai"]


def project_features(record: ProjectRecord) -> FeatureView:
    outputs = LabelSets(
        preprocessing_tools=record.preprocessing_tools,
        model_tools=record.model_tools,
        project_type=frozenset([record.project_type]) if record.project_type else frozenset(),
        evaluation_metrics=record.evaluation_metrics,
    )
    return FeatureView((record.data_nature, record.data_type), outputs)


# --- synthetic corpora -------------------------------------------------------

@dataclass(frozen=True)
class PairProfile:
    """Conditional output distributions for one (nature, type) input pair.

    Set-valued fields map label -> independent inclusion probability; if no
    label is drawn, one is picked with probability-proportional weights.
    ``project_type`` and ``technique`` map label -> categorical weight.
    """

    nature: str
    data_type: str
    weight: float
    preprocessing_tools: Mapping[str, float]
    model_tools: Mapping[str, float]
    evaluation_metrics: Mapping[str, float]
    project_type: Mapping[str, float]
    technique: Mapping[str, float] = field(default_factory=lambda: {"unspecified": 1.0})


@dataclass(frozen=True)
class SynthSpec:
    profiles: tuple[PairProfile, ...]

    @classmethod
    def from_dict(cls, data: Mapping) -> "SynthSpec":
        profiles = []
        for i, p in enumerate(data.get("profiles", [])):
            try:
                nature = check_enum("data_nature", p["nature"], NATURES)
                dtype = check_enum("data_type", p["type"], DATA_TYPES)
            except KeyError as exc:
                raise DatasetError(f"profile {i} missing {exc.args[0]!r}") from None
            outputs = p.get("outputs", {})
            kwargs = {k: _weights(outputs.get(k, {}), f"profiles[{i}].outputs.{k}")
                      for k in ("preprocessing_tools", "model_tools", "evaluation_metrics", "project_type")}
            if "technique" in outputs:
                kwargs["technique"] = _weights(outputs["technique"], f"profiles[{i}].outputs.technique")
            profiles.append(PairProfile(nature, dtype, float(p.get("weight", 1.0)), **kwargs))
        spec = cls(tuple(profiles))
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return {"profiles": [
            {"nature": p.nature, "type": p.data_type, "weight": p.weight,
             "outputs": {k: dict(sorted(getattr(p, k).items()))
                         for k in ("preprocessing_tools", "model_tools", "evaluation_metrics",
                                   "project_type", "technique")}}
            for p in self.profiles]}

    def validate(self) -> None:
        if not self.profiles:
            raise DatasetError("synthetic spec has no profiles")
        if any(p.weight < 0 for p in self.profiles) or not any(p.weight > 0 for p in self.profiles):
            raise DatasetError("profile weights must be non-negative with at least one positive")
        for p in self.profiles:
            for name in ("preprocessing_tools", "model_tools", "evaluation_metrics",
                         "project_type", "technique"):
                dist = getattr(p, name)
                if any(w < 0 for w in dist.values()) or not any(w > 0 for w in dist.values()):
                    raise DatasetError(
                        f"profile ({p.nature}, {p.data_type}) {name}: weights must be "
                        "non-negative with at least one positive")
                if name in SET_FIELDS and any(w > 1 for w in dist.values()):
                    raise DatasetError(
                        f"profile ({p.nature}, {p.data_type}) {name}: inclusion probabilities must be <= 1")


def _weights(raw, where: str) -> dict[str, float]:
    if not isinstance(raw, Mapping):
        raise DatasetError(f"{where}: expected an object of label -> weight")
    return {normalize_label(k): float(v) for k, v in raw.items()}


def load_synth_spec(path) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        return SynthSpec.from_dict(json.load(fh))


def synth_dataset(spec: SynthSpec, n: int, seed: int) -> list[ProjectRecord]:
    """Draw ``n`` ai records from ``spec`` with ``random.Random(seed)`` (MT19937).

    Labels are always visited in sorted order so output depends only on
    (spec, n, seed).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    spec.validate()
    rng = random.Random(seed)
    profiles = list(spec.profiles)
    weights = [p.weight for p in profiles]
    records = []
    for i in range(n):
        p = rng.choices(profiles, weights=weights)[0]
        sets = {name: _draw_set(rng, getattr(p, name)) for name in SET_FIELDS}
        records.append(ProjectRecord(
            name=f"synthetic-{i:04d}",
            description=f"synthetic {p.nature} {p.data_type} project",
            project_category="ai",
            data_nature=p.nature,
            data_type=p.data_type,
            project_type=_draw_one(rng, p.project_type),
            technique=_draw_one(rng, p.technique),
            **sets,
        ))
    return records


def _draw_one(rng: random.Random, dist: Mapping[str, float]) -> str:
    labels = sorted(dist)
    return rng.choices(labels, weights=[dist[x] for x in labels])[0]


def _draw_set(rng: random.Random, dist: Mapping[str, float]) -> frozenset[str]:
    labels = sorted(dist)
    chosen = frozenset(x for x in labels if rng.random() < dist[x])
    return chosen or frozenset([_draw_one(rng, dist)])
