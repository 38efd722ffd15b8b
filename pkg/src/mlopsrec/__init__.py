"""MLOps toolchain recommender: predict development tools from a project's data
context and map them onto integrating MLOps tools."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def asset_path(name: str) -> Path:
    """Path of a shipped data file (``sample_rules.json``, ``catalogue.json``, ``synth_noisy.json``)."""
    return Path(str(resources.files(__name__).joinpath("data", name)))
