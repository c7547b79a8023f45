import json
import math

import httpx
import pytest

from cegocd.errors import (EmptyKeywordsError, ProtocolViolationError,
                           ProviderError)
from cegocd.index import ScoredEntity
from cegocd.kg import Entity
from cegocd.providers import (CallLedger, MockEmbeddingProvider,
                              MockLLMProvider, QueryContext,
                              RemoteEmbeddingProvider, RemoteLLMProvider)


def scored(eid, name, etype="Model", score=1.0):
    return ScoredEntity(Entity(id=eid, name=name, entity_type=etype), score)


def ctx(query="q", keywords=("graph",), target_types=("Model",)):
    return QueryContext(query=query, keywords=tuple(keywords),
                        target_types=tuple(target_types))


class TestMockLLM:
    def test_extract_keeps_long_tokens_in_order(self):
        llm = MockLLMProvider(target_types=("Model", "Dataset"))
        out = llm.extract_context("compare attention mechanisms across datasets")
        assert list(out.keywords) == \
            ["compare", "attention", "mechanisms", "across", "datasets"]
        assert out.target_types == ("Model", "Dataset")

    def test_short_tokens_only_raises(self):
        with pytest.raises(EmptyKeywordsError):
            MockLLMProvider().extract_context("a b c")

    def test_blank_query_raises(self):
        with pytest.raises(EmptyKeywordsError):
            MockLLMProvider().extract_context("   ")

    def test_filter_entities_keeps_token_overlap(self):
        llm = MockLLMProvider()
        out = llm.filter_entities(ctx(), {
            "attention": [scored("a", "Graph Attention Network"),
                          scored("b", "Convolutional Network")],
        })
        assert [s.entity.id for s in out["attention"]] == ["a"]

    def test_filter_entities_empty_group(self):
        assert MockLLMProvider().filter_entities(ctx(), {"kw": []}) == {"kw": []}

    def test_filter_relations_keeps_all(self):
        types = {"cites", "uses_model", "evaluates_on", "proposes_model", "addresses_task"}
        assert MockLLMProvider().filter_relations(ctx(), types) == types

    def test_type_weights_all_one_default_half(self):
        table = MockLLMProvider().assign_type_weights({"cites", "uses_model"})
        assert table.lookup("cites") == 1.0
        assert table.lookup("uses_model") == 1.0
        assert table.lookup("unlisted") == 0.5

    def test_type_weights_cached_across_queries(self):
        llm = MockLLMProvider()
        llm.assign_type_weights({"cites"})
        n_calls = len(llm.ledger.calls)
        llm.assign_type_weights({"cites"})
        assert len(llm.ledger.calls) == n_calls  # cache hit, no new call

    def test_judge_pair_two_shared_tokens(self):
        a = Entity(id="a", name="graph attention network", entity_type="Model")
        b = Entity(id="b", name="graph attention model", entity_type="Model")
        out = MockLLMProvider().judge_hidden_relation((a, b), ctx())
        assert out is not None and out[0] == "similar_to"

    def test_judge_pair_disjoint_names(self):
        a = Entity(id="a", name="transformer", entity_type="Model")
        b = Entity(id="b", name="decision tree", entity_type="Model")
        assert MockLLMProvider().judge_hidden_relation((a, b), ctx()) is None

    @pytest.mark.parametrize("n_lines", [1, 5, 20])
    def test_summarize_rule(self, n_lines):
        text = "\n".join([f"line{i}" for i in range(n_lines)])
        theme, answer = MockLLMProvider().summarize_community(text, ctx())
        assert theme == "line0"
        if n_lines == 1:
            assert answer == "line0"
        else:
            assert answer == "\n".join(f"line{i}" for i in range(1, min(n_lines, 6)))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_synthesize_concatenation(self, n):
        answers = [(f"t{i}", f"a{i}") for i in range(n)]
        out = MockLLMProvider().synthesize_final(answers, ctx())
        assert out == "\n\n".join(f"Theme: t{i}\na{i}" for i in range(n))

    def test_synthesize_empty_gives_no_evidence(self):
        out = MockLLMProvider().synthesize_final([], ctx())
        assert "No supporting evidence" in out

    def test_mock_is_pure(self):
        a = MockLLMProvider().extract_context("graph attention models")
        b = MockLLMProvider().extract_context("graph attention models")
        assert a == b


class TestMockEmbeddings:
    def test_same_text_identical_vectors(self):
        emb = MockEmbeddingProvider()
        v1, v2 = emb.embed(["transformer", "transformer"])
        assert v1 == v2

    def test_unit_norm(self):
        (vec,) = MockEmbeddingProvider().embed(["anything at all"])
        assert math.sqrt(sum(x * x for x in vec.values)) == pytest.approx(1.0, abs=1e-9)

    def test_dimension_uniform(self):
        vecs = MockEmbeddingProvider().embed(["a b", "c d", "e f"])
        assert {v.dim for v in vecs} == {32}

    def test_blank_text_rejected(self):
        with pytest.raises(ValueError):
            MockEmbeddingProvider().embed(["ok", "  "])


def transport_for(handler):
    return httpx.MockTransport(handler)


def remote_llm(handler, **kwargs):
    return RemoteLLMProvider("http://llm.test", transport=transport_for(handler),
                             **kwargs)


class TestRemoteLLM:
    def test_extract_echo_stub(self):
        def handler(request):
            assert request.url.path == "/extract"
            return httpx.Response(200, json={
                "keywords": ["alpha", "beta"], "target_types": ["Model"]})
        out = remote_llm(handler).extract_context("whatever question")
        assert list(out.keywords) == ["alpha", "beta"]
        assert out.target_types == ("Model",)

    def test_filter_entities_subset_passthrough(self):
        def handler(request):
            body = json.loads(request.content)
            return httpx.Response(200, json={"keep": body["candidates"][0:1] and
                                             [body["candidates"][0]["id"]]})
        out = remote_llm(handler).filter_entities(ctx(), {
            "kw": [scored("a", "x"), scored("b", "y")]})
        assert [s.entity.id for s in out["kw"]] == ["a"]

    def test_filter_entities_unknown_id_is_protocol_violation(self):
        def handler(request):
            return httpx.Response(200, json={"keep": ["invented"]})
        with pytest.raises(ProtocolViolationError):
            remote_llm(handler).filter_entities(ctx(), {"kw": [scored("a", "x")]})

    def test_filter_relations_drop_two_of_five(self):
        def handler(request):
            body = json.loads(request.content)
            return httpx.Response(200, json={"keep": body["candidate_types"][:3]})
        kept = remote_llm(handler).filter_relations(
            ctx(), {"r1", "r2", "r3", "r4", "r5"})
        assert len(kept) == 3

    def test_filter_relations_added_type_is_protocol_violation(self):
        def handler(request):
            return httpx.Response(200, json={"keep": ["r1", "rogue"]})
        with pytest.raises(ProtocolViolationError):
            remote_llm(handler).filter_relations(ctx(), {"r1"})

    def test_type_weights_custom_default(self):
        def handler(request):
            return httpx.Response(200, json={"weights": {"cites": 0.3},
                                             "default": 0.5})
        table = remote_llm(handler).assign_type_weights({"cites"})
        assert table.lookup("cites") == 0.3
        assert table.lookup("other") == 0.5

    def test_out_of_range_weight_clamped(self):
        def handler(request):
            return httpx.Response(200, json={"weights": {"cites": 1.7},
                                             "default": 0.5})
        table = remote_llm(handler).assign_type_weights({"cites"})
        assert table.lookup("cites") == 1.0

    def test_judge_pair_declining(self):
        def handler(request):
            return httpx.Response(200, json={"relation_type": None})
        a = Entity(id="a", name="x", entity_type="Model")
        b = Entity(id="b", name="y", entity_type="Model")
        assert remote_llm(handler).judge_hidden_relation((a, b), ctx()) is None

    def test_transport_failure_single_retry_then_error(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            raise httpx.ConnectError("down")
        with pytest.raises(ProviderError):
            remote_llm(handler).extract_context("query text")
        assert len(attempts) == 2

    def test_retry_succeeds_second_time(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            if len(attempts) == 1:
                raise httpx.ConnectError("blip")
            return httpx.Response(200, json={"keywords": ["kw"],
                                             "target_types": []})
        out = remote_llm(handler).extract_context("query text")
        assert list(out.keywords) == ["kw"]

    def test_disk_cache_avoids_second_request(self, tmp_path):
        hits = []

        def handler(request):
            hits.append(1)
            return httpx.Response(200, json={"keywords": ["kw"],
                                             "target_types": []})
        llm = remote_llm(handler, cache_dir=tmp_path)
        llm.extract_context("query text")
        llm2 = remote_llm(handler, cache_dir=tmp_path)
        llm2.extract_context("query text")
        assert len(hits) == 1


class TestRemoteEmbeddings:
    def test_passthrough_vectors(self):
        def handler(request):
            body = json.loads(request.content)
            return httpx.Response(200, json={
                "vectors": [[1.0, 0.0]] * len(body["texts"])})
        emb = RemoteEmbeddingProvider("http://emb.test",
                                      transport=transport_for(handler))
        vecs = emb.embed(["a", "b"])
        assert [v.values for v in vecs] == [(1.0, 0.0), (1.0, 0.0)]

    def test_dimension_drift_rejected(self):
        calls = []

        def handler(request):
            calls.append(1)
            dim = 2 if len(calls) == 1 else 3
            return httpx.Response(200, json={"vectors": [[0.0] * dim]})
        emb = RemoteEmbeddingProvider("http://emb.test",
                                      transport=transport_for(handler))
        emb.embed(["a"])
        with pytest.raises(ProviderError, match="drift"):
            emb.embed(["b"])


def test_ledger_records_every_call():
    ledger = CallLedger(deterministic=True)
    llm = MockLLMProvider(ledger=ledger)
    llm.extract_context("graph attention models")
    llm.filter_relations(ctx(), {"cites"})
    ops = [c.operation for c in ledger.calls]
    assert ops == ["extract_context", "filter_relations"]
    assert all(c.seconds == 0.0 for c in ledger.calls)
