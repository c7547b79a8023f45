"""Produces golden_report.json: the frozen run report for the scripted
fixture query under mock providers. Regenerate only after a deliberate
behavior change, together with the manifest."""
from __future__ import annotations

from pathlib import Path

from ..config import PipelineConfig
from ..kg import load_graph
from ..pipeline import answer
from ..providers import CallLedger, MockEmbeddingProvider, MockLLMProvider
from . import GOLDEN_REPORT_PATH, GRAPH_PATH, SCRIPTED_QUERY


def run_scripted_query() -> str:
    graph = load_graph(GRAPH_PATH)
    config = PipelineConfig()
    ledger = CallLedger(deterministic=True)
    llm = MockLLMProvider(target_types=config.mock_target_types, ledger=ledger,
                          keyword_min_len=config.keyword_min_len)
    embedder = MockEmbeddingProvider(dim=config.mock_embedding_dim, ledger=ledger)
    report = answer(SCRIPTED_QUERY, graph, llm, embedder, config, ledger=ledger)
    return report.to_json()


def write_golden(path: Path = GOLDEN_REPORT_PATH) -> None:
    path.write_text(run_scripted_query(), encoding="utf-8")


if __name__ == "__main__":
    write_golden()
    print(f"wrote {GOLDEN_REPORT_PATH}")
