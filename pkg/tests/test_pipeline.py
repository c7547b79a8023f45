import json

import pytest

from cegocd.cli import (EXIT_GRAPH, EXIT_NO_KEYWORDS, EXIT_OK, main)
from cegocd.config import PipelineConfig
from cegocd.fixtures import (GOLDEN_REPORT_PATH, GRAPH_PATH, SCRIPTED_QUERY)
from cegocd.pipeline import REPORT_SCHEMA, RunReport, answer
from cegocd.providers import (CallLedger, MockEmbeddingProvider,
                              MockLLMProvider)


def run_scripted(graph, **config_overrides):
    config = PipelineConfig(**config_overrides)
    ledger = CallLedger(deterministic=True)
    llm = MockLLMProvider(target_types=config.mock_target_types, ledger=ledger,
                          keyword_min_len=config.keyword_min_len)
    embedder = MockEmbeddingProvider(dim=config.mock_embedding_dim,
                                     ledger=ledger)
    return answer(SCRIPTED_QUERY, graph, llm, embedder, config, ledger=ledger)


class TestAnswer:
    def test_matches_committed_golden(self, graph):
        assert run_scripted(graph).to_json() == \
            GOLDEN_REPORT_PATH.read_text(encoding="utf-8")

    def test_two_runs_byte_identical(self, graph):
        assert run_scripted(graph).to_json() == run_scripted(graph).to_json()

    def test_refinement_metrics_direction(self, graph):
        m = run_scripted(graph).triple_metrics
        assert m["edges_after_prune"] < m["edges_before_prune"]
        assert m["edges_after_complete"] > m["edges_after_prune"]
        assert m["mean_semantic_after_prune"] >= m["mean_semantic_before_prune"]

    def test_community_cap_respected(self, graph):
        report = run_scripted(graph)
        assert 1 <= len(report.partition["communities"]) <= 3
        report1 = run_scripted(graph, theta_max=1)
        assert len(report1.partition["communities"]) == 1

    def test_no_evidence_query(self, graph):
        config = PipelineConfig()
        ledger = CallLedger(deterministic=True)
        llm = MockLLMProvider(target_types=config.mock_target_types,
                              ledger=ledger)
        embedder = MockEmbeddingProvider(ledger=ledger)
        report = answer("zzzz qqqq wwww", graph, llm, embedder, config,
                        ledger=ledger)
        assert report.no_evidence
        assert "No supporting evidence" in report.final_answer
        assert report.partition["communities"] == []

    def test_empty_after_prune_degrades_not_crashes(self, graph, monkeypatch):
        # a threshold above every weight makes pruning remove everything
        from cegocd import optimization
        monkeypatch.setattr(optimization, "adaptive_prune_threshold",
                            lambda *a, **kw: 2.0)
        report = run_scripted(graph)
        assert report.empty_after_prune
        assert not report.no_evidence
        assert report.completions == []
        assert report.partition["communities"]

    def test_unknown_target_types_dropped(self, graph):
        report = run_scripted(graph, mock_target_types=("Model", "Spaceship"))
        assert report.dropped_target_types == ["Spaceship"]
        assert "Spaceship" not in report.target_types

    def test_ledger_captured(self, graph):
        report = run_scripted(graph)
        assert report.provider_calls
        assert all(c["seconds"] == 0.0 for c in report.provider_calls)
        assert report.total_seconds == 0.0

    def test_emit_subgraph_payload(self, graph):
        config = PipelineConfig()
        ledger = CallLedger(deterministic=True)
        llm = MockLLMProvider(target_types=config.mock_target_types,
                              ledger=ledger)
        embedder = MockEmbeddingProvider(ledger=ledger)
        sink = {}
        answer(SCRIPTED_QUERY, graph, llm, embedder, config, ledger=ledger,
               emit_subgraph=sink)
        assert set(sink) == {"nodes", "edges", "prune_threshold"}
        node_set = set(sink["nodes"])
        for e in sink["edges"]:
            assert e["source"] in node_set and e["target"] in node_set
            assert e["weight"] == pytest.approx(e["semantic"] * e["type_weight"])


class TestRunReportSerialization:
    def test_round_trip_lossless(self, graph):
        report = run_scripted(graph)
        again = RunReport.from_json(report.to_json())
        assert again.to_json() == report.to_json()
        assert again == report

    def test_schema_tag_present_and_checked(self, graph):
        report = run_scripted(graph)
        data = json.loads(report.to_json())
        assert data["schema"] == REPORT_SCHEMA
        data["schema"] = "other/9"
        with pytest.raises(ValueError):
            RunReport.from_dict(data)


class TestCli:
    def test_scripted_run_writes_report(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
                     "--mock-providers", "--out", str(out)])
        assert code == EXIT_OK
        assert out.read_text(encoding="utf-8") == \
            GOLDEN_REPORT_PATH.read_text(encoding="utf-8")

    def test_missing_graph_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--query", "whatever"])
        assert exc.value.code == 2

    def test_unreadable_graph(self, tmp_path):
        code = main(["--graph", str(tmp_path / "missing.jsonl"),
                     "--query", "graph models", "--mock-providers"])
        assert code == EXIT_GRAPH

    def test_malformed_graph(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"kind": "mystery"}\n', encoding="utf-8")
        code = main(["--graph", str(bad), "--query", "graph models",
                     "--mock-providers"])
        assert code == EXIT_GRAPH

    def test_zero_keyword_query(self):
        code = main(["--graph", str(GRAPH_PATH), "--query", "a b c",
                     "--mock-providers"])
        assert code == EXIT_NO_KEYWORDS

    def test_emit_subgraph_file(self, tmp_path):
        out = tmp_path / "report.json"
        sub = tmp_path / "sub.json"
        code = main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
                     "--mock-providers", "--out", str(out),
                     "--emit-subgraph", str(sub)])
        assert code == EXIT_OK
        payload = json.loads(sub.read_text(encoding="utf-8"))
        assert payload["nodes"] and payload["edges"]

    def test_theta_max_override(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
                     "--mock-providers", "--theta-max", "1",
                     "--out", str(out)])
        assert code == EXIT_OK
        data = json.loads(out.read_text(encoding="utf-8"))
        assert len(data["partition"]["communities"]) == 1

    def test_max_hops_override_changes_retrieval(self, tmp_path):
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
              "--mock-providers", "--out", str(out1)])
        main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
              "--mock-providers", "--max-hops", "1", "--out", str(out2)])
        d1 = json.loads(out1.read_text(encoding="utf-8"))
        d2 = json.loads(out2.read_text(encoding="utf-8"))
        assert d2["retrieval"]["path_count"] < d1["retrieval"]["path_count"]

    def test_report_to_stdout_by_default(self, capsys):
        code = main(["--graph", str(GRAPH_PATH), "--query", SCRIPTED_QUERY,
                     "--mock-providers"])
        assert code == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["schema"] == REPORT_SCHEMA
