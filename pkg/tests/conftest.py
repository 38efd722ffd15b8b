import random

import pytest

from mlopsrec import asset_path
from mlopsrec.dataset import DATA_TYPES, NATURES, OUTPUT_FIELDS, FeatureView, LabelSets, load_synth_spec

_ACCEPTANCE_LINES = []

TOOL_POOL = ("keras", "numpy", "opencv", "pandas", "pytorch", "scikit-learn", "tensorflow")
METRIC_POOL = ("accuracy", "f1", "rmse")
TYPE_POOL = ("classification", "regression", "segmentation")


def random_labels(rng: random.Random) -> LabelSets:
    """Small pools so that ties and half-half splits happen often."""
    def pick(pool, hi):
        return frozenset(rng.sample(pool, rng.randint(1, hi)))
    return LabelSets(
        preprocessing_tools=pick(TOOL_POOL[:4], 3),
        model_tools=pick(TOOL_POOL[3:], 2),
        project_type=frozenset([rng.choice(TYPE_POOL)]),
        evaluation_metrics=pick(METRIC_POOL, 2),
    )


def random_views(rng: random.Random, n: int, pairs=None) -> list[FeatureView]:
    if pairs is None:
        all_pairs = [(a, b) for a in NATURES for b in DATA_TYPES]
        pairs = rng.sample(all_pairs, rng.randint(1, len(all_pairs)))
    return [FeatureView(rng.choice(pairs), random_labels(rng)) for _ in range(n)]


def groupby_oracle(views):
    """Brute force: per input pair, keep labels in more than half the group's records
    (single most frequent, smallest name on ties, if none); project_type = mode."""
    groups = {}
    for v in views:
        groups.setdefault(v.inputs, []).append(v.outputs)
    out = {}
    for pair, outs in groups.items():
        n = len(outs)
        pred = {}
        for f in OUTPUT_FIELDS:
            labels = sorted({x for o in outs for x in o[f]})
            freq = {x: sum(x in o[f] for o in outs) for x in labels}
            top = max(freq.values())
            first_top = [x for x in labels if freq[x] == top][0]
            if f == "project_type":
                pred[f] = frozenset([first_top])
            else:
                pred[f] = frozenset(x for x in labels if freq[x] * 2 > n) or frozenset([first_top])
        out[pair] = LabelSets(**pred)
    return out


@pytest.fixture
def noisy_spec():
    return load_synth_spec(asset_path("synth_noisy.json"))


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def record(label: str, ok: bool, detail: str = ""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
