"""Command-line entry point.

Exit codes: 0 success (including the no-evidence degradation), 2 usage
errors, 3 graph load failure, 4 empty keyword extraction, 5 provider
protocol violation, 6 provider transport failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import PipelineConfig
from .errors import (CegocdError, EmptyKeywordsError, ProtocolViolationError,
                     ProviderError)
from .kg import load_graph
from .pipeline import answer
from .providers import (CallLedger, MockEmbeddingProvider, MockLLMProvider,
                        providers_from_env)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GRAPH = 3
EXIT_NO_KEYWORDS = 4
EXIT_PROTOCOL = 5
EXIT_PROVIDER = 6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cegocd",
        description="Answer a query over an academic knowledge graph via "
                    "subgraph retrieval, optimization, and community detection.")
    parser.add_argument("--graph", required=True, help="path to the JSONL graph file")
    parser.add_argument("--query", required=True, help="the question to answer")
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--mock-providers", action="store_true",
                        help="use the deterministic offline providers")
    parser.add_argument("--out", help="write the JSON run report here (default stdout)")
    parser.add_argument("--emit-subgraph",
                        help="also write the refined weighted subgraph as JSON")
    parser.add_argument("--max-hops", type=int, help="override the path hop limit")
    parser.add_argument("--theta-max", type=int, help="override the community cap")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.config:
        try:
            config = PipelineConfig.from_toml(args.config)
        except (OSError, ValueError) as exc:
            print(f"cegocd: bad config: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        config = PipelineConfig()
    if args.max_hops is not None:
        config.max_hops = args.max_hops
    if args.theta_max is not None:
        config.theta_max = args.theta_max

    try:
        graph = load_graph(args.graph, title_type=config.title_type)
    except (OSError, CegocdError) as exc:
        print(f"cegocd: failed to load graph: {exc}", file=sys.stderr)
        return EXIT_GRAPH

    ledger = CallLedger(deterministic=config.deterministic_report)
    if args.mock_providers:
        llm = MockLLMProvider(target_types=config.mock_target_types,
                              ledger=ledger,
                              keyword_min_len=config.keyword_min_len)
        embedder = MockEmbeddingProvider(dim=config.mock_embedding_dim,
                                         ledger=ledger)
    else:
        try:
            llm, embedder = providers_from_env(ledger=ledger,
                                               cache_dir=config.cache_dir)
        except ProviderError as exc:
            print(f"cegocd: {exc}", file=sys.stderr)
            return EXIT_PROVIDER

    emit_target = {} if args.emit_subgraph else None
    try:
        report = answer(args.query, graph, llm, embedder, config,
                        ledger=ledger, emit_subgraph=emit_target)
    except EmptyKeywordsError as exc:
        print(f"cegocd: {exc}", file=sys.stderr)
        return EXIT_NO_KEYWORDS
    except ProtocolViolationError as exc:
        print(f"cegocd: provider protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except ProviderError as exc:
        print(f"cegocd: provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    payload = report.to_json()
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    if args.emit_subgraph:
        Path(args.emit_subgraph).write_text(
            json.dumps(emit_target, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
