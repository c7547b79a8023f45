"""Run configuration: every tunable threshold and cap in one place.

Values load from a TOML file and can be overridden by CLI flags.
Defaults: 5-hop paths, top-10 entity retrieval, community cap of 3.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


@dataclass
class PipelineConfig:
    title_type: str = "Title"
    top_k: int = 10
    max_hops: int = 5
    max_paths: int = 10
    theta_max: int = 3
    prune_q_min: float = 0.25
    prune_q_max: float = 0.75
    prune_ramp_edges: int = 400
    keyword_min_len: int = 4
    mock_target_types: tuple[str, ...] = ("Model", "Dataset", "Task")
    mock_embedding_dim: int = 32
    completion_relation_types: tuple[str, ...] = (
        "similar_to", "related_method", "related_task")
    max_in_flight: int = 4
    cache_dir: str | None = None
    # zero out latencies/wall times in the report so runs are byte-identical
    deterministic_report: bool = True

    @classmethod
    def from_toml(cls, path: str | Path) -> "PipelineConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("mock_target_types", "completion_relation_types"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)
