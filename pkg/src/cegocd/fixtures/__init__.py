"""Deterministic test corpus: toy graph, oracle-computed manifest, golden report."""

from pathlib import Path

FIXTURE_DIR = Path(__file__).parent
GRAPH_PATH = FIXTURE_DIR / "toy_kg.jsonl"
MANIFEST_PATH = FIXTURE_DIR / "manifest.json"
GOLDEN_REPORT_PATH = FIXTURE_DIR / "golden_report.json"

from .regenerate import (SCRIPTED_KEYWORDS, SCRIPTED_QUERY,  # noqa: E402
                         load_manifest, regenerate_manifest)

__all__ = ["FIXTURE_DIR", "GRAPH_PATH", "MANIFEST_PATH", "GOLDEN_REPORT_PATH",
           "SCRIPTED_QUERY", "SCRIPTED_KEYWORDS",
           "load_manifest", "regenerate_manifest"]
