"""Rule-based approach: (data nature, data type) conditions mapped to the four outputs."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dataset import DATA_TYPES, NATURES, OUTPUT_FIELDS, DatasetError, FeatureView, LabelSets, \
    check_enum, split_labels

WILDCARD = "*"
RULE_FORMAT_VERSION = 1


class RuleError(ValueError):
    """Invalid rule file or rule."""


class DuplicateId(RuleError):
    pass


class NoMatch(LookupError):
    def __init__(self, inputs):
        self.inputs = tuple(inputs)
        super().__init__(f"no applicable rule for data_nature={inputs[0]!r}, data_type={inputs[1]!r}")


@dataclass(frozen=True)
class Rule:
    id: str
    nature: str  # or WILDCARD
    data_type: str  # or WILDCARD
    outputs: LabelSets

    @property
    def specificity(self) -> int:
        return (self.nature != WILDCARD) + (self.data_type != WILDCARD)

    def covers(self, inputs: tuple[str, str]) -> bool:
        return self.nature in (WILDCARD, inputs[0]) and self.data_type in (WILDCARD, inputs[1])

    def to_dict(self) -> dict:
        outputs = self.outputs.to_dict()
        if len(self.outputs.project_type) == 1:
            outputs["project_type"] = next(iter(self.outputs.project_type))
        return {"id": self.id, "condition": {"nature": self.nature, "type": self.data_type},
                "outputs": outputs}


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    metadata: str = ""
    version: int = RULE_FORMAT_VERSION

    name = "rule_based"

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def predict_inputs(self, inputs: tuple[str, str]) -> LabelSets:
        return predict_rule_based(inputs, self)

    def to_dict(self) -> dict:
        return {"version": self.version, "metadata": self.metadata,
                "rules": [r.to_dict() for r in self.rules]}


def load_rules(source: str) -> RuleSet:
    """Parse and validate a JSON rule file."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise RuleError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or not isinstance(data.get("rules"), list):
        raise RuleError("rule file must be an object with a 'rules' array")
    version = data.get("version", RULE_FORMAT_VERSION)
    if version != RULE_FORMAT_VERSION:
        raise RuleError(f"unsupported rule file version {version!r}")
    rules = []
    seen = set()
    for i, raw in enumerate(data["rules"]):
        rule = _parse_rule(raw, f"rules[{i}]")
        if rule.id in seen:
            raise DuplicateId(f"rules[{i}].id: duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        rules.append(rule)
    return RuleSet(tuple(rules), str(data.get("metadata", "")), version)


def read_rules(path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        try:
            return load_rules(fh.read())
        except RuleError as exc:
            raise type(exc)(f"{path}: {exc}") from None


def dump_rules(ruleset: RuleSet) -> str:
    return json.dumps(ruleset.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _parse_rule(raw, where: str) -> Rule:
    if not isinstance(raw, Mapping):
        raise RuleError(f"{where}: expected an object")
    for key in ("id", "condition", "outputs"):
        if key not in raw:
            raise RuleError(f"{where}: missing {key!r}")
    rule_id = raw["id"]
    if not isinstance(rule_id, str) or not rule_id.strip():
        raise RuleError(f"{where}.id: must be a non-empty string")
    cond = raw["condition"]
    if not isinstance(cond, Mapping):
        raise RuleError(f"{where}.condition: expected an object")
    nature = _condition_value(cond.get("nature", WILDCARD), NATURES, "data_nature", f"{where}.condition.nature")
    dtype = _condition_value(cond.get("type", WILDCARD), DATA_TYPES, "data_type", f"{where}.condition.type")
    if nature == WILDCARD and dtype == WILDCARD:
        raise RuleError(f"{where}.condition: at least one of nature/type must be specific")
    outputs = raw["outputs"]
    if not isinstance(outputs, Mapping):
        raise RuleError(f"{where}.outputs: expected an object")
    values = {}
    for name in OUTPUT_FIELDS:
        cell = outputs.get(name)
        if not isinstance(cell, (str, list)):
            raise RuleError(f"{where}.outputs.{name}: missing or not a string/list")
        values[name] = split_labels(cell)
        if not values[name]:
            raise RuleError(f"{where}.outputs.{name}: must not be empty")
    return Rule(rule_id.strip(), nature, dtype, LabelSets(**values))


def _condition_value(value, allowed: Sequence[str], fieldname: str, where: str) -> str:
    if not isinstance(value, str):
        raise RuleError(f"{where}: expected a string")
    if value.strip() == WILDCARD:
        return WILDCARD
    try:
        return check_enum(fieldname, value, allowed)
    except DatasetError as exc:
        raise RuleError(f"{where}: {exc.detail}") from None


def extract_rules(views: Iterable[FeatureView], strategy: str = "union") -> RuleSet:
    """Derive one exact-condition rule per observed (nature, type) pair.

    ``union`` pools every label seen in the group. ``majority`` keeps labels
    present in more than half of the group's records; when none qualifies the
    single most frequent label is kept (ties go to the lexicographically first).
    ``project_type`` under ``majority`` is the modal value with the same tie-break.
    """
    if strategy not in ("union", "majority"):
        raise ValueError(f"unknown strategy {strategy!r}, expected union or majority")
    groups: dict[tuple[str, str], list[LabelSets]] = defaultdict(list)
    for v in views:
        groups[v.inputs].append(v.outputs)
    if not groups:
        raise ValueError("cannot extract rules from no records")
    rules = []
    for inputs in sorted(groups):
        group = groups[inputs]
        if strategy == "union":
            outputs = LabelSets(**{f: frozenset().union(*(g[f] for g in group)) for f in OUTPUT_FIELDS})
        else:
            outputs = LabelSets(**{f: _majority(g[f] for g in group) for f in OUTPUT_FIELDS})
        rules.append(Rule(f"{inputs[0]}__{inputs[1]}", inputs[0], inputs[1], outputs))
    return RuleSet(tuple(rules), f"extracted from {sum(map(len, groups.values()))} records, "
                                 f"strategy={strategy}")


def _majority(sets: Iterable[frozenset[str]]) -> frozenset[str]:
    sets = list(sets)
    counts = Counter(label for s in sets for label in s)
    keep = frozenset(label for label, c in counts.items() if 2 * c > len(sets))
    if keep or not counts:
        return keep
    return frozenset([min(counts, key=lambda label: (-counts[label], label))])


def match_rule(inputs: tuple[str, str], rules: RuleSet) -> Rule:
    """Most specific covering rule; equal specificity resolves to file order."""
    best = None
    for rule in rules:
        if rule.covers(inputs) and (best is None or rule.specificity > best.specificity):
            best = rule
    if best is None:
        raise NoMatch(inputs)
    return best


def predict_rule_based(inputs: tuple[str, str], rules: RuleSet) -> LabelSets:
    return match_rule(inputs, rules).outputs
