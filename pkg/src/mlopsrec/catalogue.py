"""MLOps tool catalogue and the matching step that turns predictions into a toolchain."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Protocol

from .dataset import DATA_TYPES, NATURES, LabelSets, check_enum, normalize_label

PHASES = (
    "data_versioning",
    "pipeline_orchestration",
    "experiment_tracking",
    "model_registry",
    "deployment",
    "monitoring",
)
CATALOGUE_FORMAT_VERSION = 1
# predicted fields whose tools are checked against integration edges
MATCHED_FIELDS = ("preprocessing_tools", "model_tools")


class CatalogueError(ValueError):
    pass


class DuplicateName(CatalogueError):
    pass


@dataclass(frozen=True)
class ToolEntry:
    name: str
    phases: frozenset[str]
    integrates_with: frozenset[str]
    description: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "phases": [p for p in PHASES if p in self.phases],
             "integrates_with": sorted(self.integrates_with)}
        if self.description:
            d["description"] = self.description
        return d


@dataclass(frozen=True)
class ToolCatalogue:
    tools: tuple[ToolEntry, ...] = ()
    version: int = CATALOGUE_FORMAT_VERSION

    def __len__(self) -> int:
        return len(self.tools)

    def __iter__(self):
        return iter(self.tools)

    def to_dict(self) -> dict:
        return {"version": self.version, "tools": [t.to_dict() for t in self.tools]}


def load_catalogue(source: str) -> ToolCatalogue:
    """Parse and validate a JSON catalogue. Blank input yields an empty catalogue."""
    if not source.strip():
        warnings.warn("empty catalogue: no MLOps tools can be recommended", stacklevel=2)
        return ToolCatalogue()
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise CatalogueError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or not isinstance(data.get("tools"), list):
        raise CatalogueError("catalogue must be an object with a 'tools' array")
    version = data.get("version", CATALOGUE_FORMAT_VERSION)
    if version != CATALOGUE_FORMAT_VERSION:
        raise CatalogueError(f"unsupported catalogue version {version!r}")
    tools = []
    seen = set()
    for i, raw in enumerate(data["tools"]):
        entry = _parse_entry(raw, f"tools[{i}]")
        if entry.name in seen:
            raise DuplicateName(f"tools[{i}].name: duplicate tool name {entry.name!r}")
        seen.add(entry.name)
        tools.append(entry)
    if not tools:
        warnings.warn("empty catalogue: no MLOps tools can be recommended", stacklevel=2)
    return ToolCatalogue(tuple(tools), version)


def read_catalogue(path) -> ToolCatalogue:
    with open(path, encoding="utf-8") as fh:
        try:
            return load_catalogue(fh.read())
        except CatalogueError as exc:
            raise type(exc)(f"{path}: {exc}") from None


def _parse_entry(raw, where: str) -> ToolEntry:
    if not isinstance(raw, Mapping):
        raise CatalogueError(f"{where}: expected an object")
    name = raw.get("name")
    if not isinstance(name, str) or not normalize_label(name):
        raise CatalogueError(f"{where}.name: must be a non-empty string")
    phases = raw.get("phases")
    if not isinstance(phases, list) or not phases:
        raise CatalogueError(f"{where}.phases: must be a non-empty list")
    norm_phases = set()
    for j, p in enumerate(phases):
        p = normalize_label(str(p)).replace(" ", "_").replace("-", "_")
        if p not in PHASES:
            raise CatalogueError(f"{where}.phases[{j}]: unknown phase {p!r}, allowed: {'|'.join(PHASES)}")
        norm_phases.add(p)
    edges = raw.get("integrates_with", [])
    if not isinstance(edges, list) or not all(isinstance(e, str) for e in edges):
        raise CatalogueError(f"{where}.integrates_with: must be a list of strings")
    return ToolEntry(normalize_label(name), frozenset(norm_phases),
                     frozenset(normalize_label(e) for e in edges if normalize_label(e)),
                     str(raw.get("description", "")))


@dataclass(frozen=True)
class ToolMatch:
    entry: ToolEntry
    matched_via: frozenset[str]

    def to_dict(self) -> dict:
        d = self.entry.to_dict()
        d["matched_via"] = sorted(self.matched_via)
        return d


def predicted_tools(predicted: LabelSets) -> frozenset[str]:
    return frozenset(normalize_label(t) for f in MATCHED_FIELDS for t in predicted[f])


def match_mlops_tools(predicted: LabelSets, catalogue: ToolCatalogue) -> list[ToolMatch]:
    """Entries integrating with any predicted preprocessing/model tool.

    Ranked by number of matched tools (descending), then by name.
    """
    tools = predicted_tools(predicted)
    matches = [ToolMatch(e, e.integrates_with & tools) for e in catalogue if e.integrates_with & tools]
    return sorted(matches, key=lambda m: (-len(m.matched_via), m.entry.name))


class Predictor(Protocol):
    name: str

    def predict_inputs(self, inputs: tuple[str, str]) -> LabelSets: ...


@dataclass(frozen=True)
class Recommendation:
    inputs: tuple[str, str]
    approach: str
    predicted: LabelSets
    mlops_tools: tuple[ToolMatch, ...]
    uncovered: frozenset[str]
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "inputs": {"data_nature": self.inputs[0], "data_type": self.inputs[1]},
            "approach": self.approach,
            "predicted": self.predicted.to_dict(),
            "mlops_tools": [m.to_dict() for m in self.mlops_tools],
            "uncovered": sorted(self.uncovered),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        p = self.predicted
        lines = [
            f"inputs: data_nature={self.inputs[0]}, data_type={self.inputs[1]} (approach: {self.approach})",
            "predicted:",
            f"  preprocessing tools: {', '.join(sorted(p.preprocessing_tools)) or '-'}",
            f"  model tools:         {', '.join(sorted(p.model_tools)) or '-'}",
            f"  project type:        {', '.join(sorted(p.project_type)) or '-'}",
            f"  evaluation metrics:  {', '.join(sorted(p.evaluation_metrics)) or '-'}",
            "recommended MLOps tools:",
        ]
        if not self.mlops_tools:
            lines.append("  (none)")
        for m in self.mlops_tools:
            phases = ", ".join(ph for ph in PHASES if ph in m.entry.phases)
            lines.append(f"  {m.entry.name} [{phases}] via {', '.join(sorted(m.matched_via))}")
        if self.uncovered:
            lines.append(f"predicted tools with no catalogue coverage: {', '.join(sorted(self.uncovered))}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"


def recommend(inputs: tuple[str, str], predictor: Predictor, catalogue: ToolCatalogue) -> Recommendation:
    """Validate inputs, predict the four outputs, and match them against the catalogue."""
    inputs = (check_enum("data_nature", inputs[0], NATURES), check_enum("data_type", inputs[1], DATA_TYPES))
    predicted = predictor.predict_inputs(inputs)
    matches = match_mlops_tools(predicted, catalogue)
    covered = frozenset().union(*(m.matched_via for m in matches))
    notes = ("catalogue is empty",) if len(catalogue) == 0 else ()
    return Recommendation(inputs, predictor.name, predicted, tuple(matches),
                          predicted_tools(predicted) - covered, notes)
