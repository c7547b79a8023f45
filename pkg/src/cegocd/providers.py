"""Language-model and embedding backends.

Two implementations of each interface: a remote one speaking JSON over
HTTP POST, and a deterministic mock so the whole pipeline runs offline
and byte-reproducibly. All calls are validated structurally (filters may
only remove, never invent) and recorded in a call ledger for the run
report's cost accounting.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import httpx

from .errors import EmptyKeywordsError, ProtocolViolationError, ProviderError
from .index import ScoredEntity, tokenize
from .kg import Entity

logger = logging.getLogger(__name__)

#: closed vocabulary for relations proposed during completion
COMPLETION_RELATION_TYPES = ("similar_to", "related_method", "related_task")

NO_EVIDENCE_ANSWER = "No supporting evidence was found in the knowledge graph for this query."

MOCK_EMBEDDING_DIM = 32
MOCK_KEYWORD_MIN_LEN = 4


@dataclass(frozen=True)
class QueryContext:
    query: str
    keywords: tuple[str, ...]
    target_types: tuple[str, ...]


@dataclass
class TypeWeightTable:
    weights: dict[str, float]
    default_weight: float = 0.5

    def lookup(self, relation_type: str) -> float:
        return self.weights.get(relation_type, self.default_weight)


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass
class ProviderCall:
    operation: str
    tokens_in: int
    tokens_out: int
    seconds: float

    def to_dict(self) -> dict:
        return {"operation": self.operation, "tokens_in": self.tokens_in,
                "tokens_out": self.tokens_out, "seconds": self.seconds}


class CallLedger:
    """Thread-safe record of every provider invocation in a run."""

    def __init__(self, deterministic: bool = False):
        self.calls: list[ProviderCall] = []
        self.deterministic = deterministic
        self._lock = threading.Lock()

    def record(self, operation: str, payload_in: str, payload_out: str, seconds: float) -> None:
        # crude 4-chars-per-token estimate; good enough for cost reporting
        call = ProviderCall(operation, len(payload_in) // 4, len(payload_out) // 4,
                            0.0 if self.deterministic else seconds)
        with self._lock:
            self.calls.append(call)


def _clamp_weight(relation_type: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        clamped = min(1.0, max(0.0, value))
        logger.warning("weight %.3f for %r outside [0,1]; clamped to %.1f",
                       value, relation_type, clamped)
        return clamped
    return value


class LLMProvider:
    """Base language-model interface; subclasses implement the ``_do_*`` hooks.

    The public methods validate every response against the operation
    contract and append to the call ledger.
    """

    def __init__(self, ledger: Optional[CallLedger] = None):
        self.ledger = ledger or CallLedger()
        self._weight_cache: dict[str, float] = {}
        self._weight_default: Optional[float] = None

    def _timed(self, operation: str, payload_in, fn):
        start = time.perf_counter()
        result = fn()
        self.ledger.record(operation, json.dumps(payload_in, default=str),
                           json.dumps(result, default=str), time.perf_counter() - start)
        return result

    # -- public, validated operations ------------------------------------

    def extract_context(self, query: str) -> QueryContext:
        if not query.strip():
            raise EmptyKeywordsError("query is blank")
        keywords, target_types = self._timed(
            "extract_context", {"query": query}, lambda: self._do_extract(query))
        keywords = tuple(k for k in keywords if k.strip())
        if not keywords:
            raise EmptyKeywordsError(f"no keywords extracted from query {query!r}")
        return QueryContext(query=query, keywords=keywords,
                            target_types=tuple(target_types))

    def filter_entities(self, ctx: QueryContext,
                        candidates: dict[str, list[ScoredEntity]]) -> dict[str, list[ScoredEntity]]:
        result: dict[str, list[ScoredEntity]] = {}
        for keyword in candidates:
            group = candidates[keyword]
            if not group:
                result[keyword] = []
                continue
            keep_ids = self._timed(
                "filter_entities",
                {"keyword": keyword, "ids": [s.entity.id for s in group]},
                lambda kw=keyword, g=group: self._do_filter_entities(ctx, kw, g))
            offered = {s.entity.id for s in group}
            bogus = set(keep_ids) - offered
            if bogus:
                raise ProtocolViolationError(
                    f"filter_entities returned ids not offered: {sorted(bogus)}")
            keep = set(keep_ids)
            result[keyword] = [s for s in group if s.entity.id in keep]
        return result

    def filter_relations(self, ctx: QueryContext, candidate_types: set[str]) -> set[str]:
        if not candidate_types:
            return set()
        kept = set(self._timed(
            "filter_relations", {"types": sorted(candidate_types)},
            lambda: self._do_filter_relations(ctx, candidate_types)))
        bogus = kept - candidate_types
        if bogus:
            raise ProtocolViolationError(
                f"filter_relations returned types not offered: {sorted(bogus)}")
        return kept

    def assign_type_weights(self, types: set[str]) -> TypeWeightTable:
        missing = sorted(t for t in types if t not in self._weight_cache)
        if missing or self._weight_default is None:
            weights, default = self._timed(
                "assign_type_weights", {"types": missing},
                lambda: self._do_type_weights(missing))
            self._weight_default = _clamp_weight("<default>", default)
            for rel_type in missing:
                self._weight_cache[rel_type] = _clamp_weight(
                    rel_type, weights.get(rel_type, self._weight_default))
        return TypeWeightTable(
            weights={t: self._weight_cache[t] for t in types},
            default_weight=self._weight_default)

    def judge_hidden_relation(self, pair: tuple[Entity, Entity],
                              ctx: QueryContext) -> Optional[tuple[str, str]]:
        proposal = self._timed(
            "judge_hidden_relation", {"a": pair[0].id, "b": pair[1].id},
            lambda: self._do_judge_pair(pair, ctx))
        if proposal is None:
            return None
        rel_type, description = proposal
        if rel_type not in COMPLETION_RELATION_TYPES:
            raise ProtocolViolationError(
                f"judge_hidden_relation proposed unknown type {rel_type!r}")
        return rel_type, description

    def summarize_community(self, verbalization: str, ctx: QueryContext) -> tuple[str, str]:
        if not verbalization:
            raise ValueError("verbalization is empty")
        return self._timed("summarize_community", {"chars": len(verbalization)},
                           lambda: self._do_summarize(verbalization, ctx))

    def synthesize_final(self, community_answers: Sequence[tuple[str, str]],
                         ctx: QueryContext) -> str:
        if not community_answers:
            return NO_EVIDENCE_ANSWER
        return self._timed("synthesize_final", {"n": len(community_answers)},
                           lambda: self._do_synthesize(list(community_answers), ctx))

    # -- hooks ------------------------------------------------------------

    def _do_extract(self, query):
        raise NotImplementedError

    def _do_filter_entities(self, ctx, keyword, group):
        raise NotImplementedError

    def _do_filter_relations(self, ctx, candidate_types):
        raise NotImplementedError

    def _do_type_weights(self, types):
        raise NotImplementedError

    def _do_judge_pair(self, pair, ctx):
        raise NotImplementedError

    def _do_summarize(self, verbalization, ctx):
        raise NotImplementedError

    def _do_synthesize(self, community_answers, ctx):
        raise NotImplementedError


class EmbeddingProvider:
    """Base embedding interface; enforces uniform dimension within a run."""

    def __init__(self, ledger: Optional[CallLedger] = None):
        self.ledger = ledger or CallLedger()
        self._dim: Optional[int] = None

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        for text in texts:
            if not text.strip():
                raise ValueError("cannot embed blank text")
        if not texts:
            return []
        start = time.perf_counter()
        raw = self._do_embed(list(texts))
        self.ledger.record("embed", json.dumps(list(texts)),
                           f"{len(raw)} vectors", time.perf_counter() - start)
        if len(raw) != len(texts):
            raise ProviderError(f"embed returned {len(raw)} vectors for {len(texts)} texts")
        vectors = []
        for values in raw:
            vec = EmbeddingVector(tuple(float(v) for v in values))
            if any(v != v or v in (float("inf"), float("-inf")) for v in vec.values):
                raise ProviderError("embedding contains non-finite values")
            if self._dim is None:
                self._dim = vec.dim
            elif vec.dim != self._dim:
                raise ProviderError(
                    f"embedding dimension drift: got {vec.dim}, expected {self._dim}")
            vectors.append(vec)
        return vectors

    def _do_embed(self, texts):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# deterministic mocks


class MockLLMProvider(LLMProvider):
    """Pure-function stand-in for a language model.

    Every rule is a simple token heuristic, so outputs are identical
    across runs and platforms.
    """

    def __init__(self, target_types: Sequence[str] = ("Model", "Dataset", "Task"),
                 ledger: Optional[CallLedger] = None,
                 keyword_min_len: int = MOCK_KEYWORD_MIN_LEN):
        super().__init__(ledger)
        self.target_types = tuple(target_types)
        self.keyword_min_len = keyword_min_len

    def _do_extract(self, query):
        seen = []
        for tok in tokenize(query):
            if len(tok) >= self.keyword_min_len and tok not in seen:
                seen.append(tok)
        return seen, list(self.target_types)

    def _do_filter_entities(self, ctx, keyword, group):
        kw_tokens = set(tokenize(keyword))
        return [s.entity.id for s in group
                if kw_tokens & set(tokenize(s.entity.name))]

    def _do_filter_relations(self, ctx, candidate_types):
        return sorted(candidate_types)

    def _do_type_weights(self, types):
        return {t: 1.0 for t in types}, 0.5

    def _do_judge_pair(self, pair, ctx):
        a, b = pair
        shared = set(tokenize(a.name)) & set(tokenize(b.name))
        if len(shared) >= 2:
            description = (f"{a.name} and {b.name} share the terms "
                           + ", ".join(sorted(shared)))
            return "similar_to", description
        return None

    def _do_summarize(self, verbalization, ctx):
        lines = verbalization.splitlines()
        theme = lines[0]
        answer = "\n".join(lines[1:6]) if len(lines) > 1 else theme
        return theme, answer

    def _do_synthesize(self, community_answers, ctx):
        parts = [f"Theme: {theme}\n{answer}" for theme, answer in community_answers]
        return "\n\n".join(parts)


def mock_embedding_values(text: str, dim: int = MOCK_EMBEDDING_DIM) -> list[float]:
    """Hash-derived unit vector for ``text``; identical input, identical output.

    Coordinate i is the first 8 hex digits of sha256("text|i") mapped
    linearly onto [-1, 1], then the vector is L2-normalized.
    """
    raw = []
    for i in range(dim):
        digest = hashlib.sha256(f"{text}|{i}".encode("utf-8")).hexdigest()
        raw.append(int(digest[:8], 16) / 0xFFFFFFFF * 2.0 - 1.0)
    norm = sum(v * v for v in raw) ** 0.5
    return [v / norm for v in raw]


class MockEmbeddingProvider(EmbeddingProvider):
    def __init__(self, dim: int = MOCK_EMBEDDING_DIM, ledger: Optional[CallLedger] = None):
        super().__init__(ledger)
        self.mock_dim = dim

    def _do_embed(self, texts):
        return [mock_embedding_values(t, self.mock_dim) for t in texts]


# ---------------------------------------------------------------------------
# remote providers (JSON over HTTP POST, one endpoint per operation)


class _ResponseCache:
    """Disk cache keyed by sha256(operation + canonical JSON input)."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, operation: str, payload: dict) -> Path:
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(f"{operation}:{canonical}".encode()).hexdigest()
        return self.directory / f"{digest}.json"

    def get(self, operation: str, payload: dict) -> Optional[dict]:
        path = self._path(operation, payload)
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8"))
        return None

    def put(self, operation: str, payload: dict, response: dict) -> None:
        with self._lock:
            self._path(operation, payload).write_text(
                json.dumps(response, sort_keys=True), encoding="utf-8")


#: operations whose responses are worth caching across reruns
_CACHEABLE = {"extract", "filter_entities", "filter_relations", "type_weights"}


class _HttpBackend:
    def __init__(self, base_url: str, token: Optional[str] = None,
                 max_in_flight: int = 4, cache_dir: Optional[str | Path] = None,
                 transport: Optional[httpx.BaseTransport] = None,
                 timeout: float = 60.0):
        headers = {}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.client = httpx.Client(base_url=base_url, headers=headers,
                                   transport=transport, timeout=timeout)
        self.semaphore = threading.Semaphore(max_in_flight)
        self.cache = _ResponseCache(cache_dir) if cache_dir else None

    def post(self, operation: str, endpoint: str, payload: dict) -> dict:
        if self.cache and operation in _CACHEABLE:
            cached = self.cache.get(operation, payload)
            if cached is not None:
                return cached
        last_exc = None
        for _attempt in range(2):  # one retry, no backoff sophistication
            try:
                with self.semaphore:
                    response = self.client.post(endpoint, json=payload)
                response.raise_for_status()
                data = response.json()
                break
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last_exc = exc
        else:
            raise ProviderError(f"{operation} failed after retry: {last_exc}") from last_exc
        if self.cache and operation in _CACHEABLE:
            self.cache.put(operation, payload, data)
        return data


class RemoteLLMProvider(LLMProvider):
    """Talks to a language-model service over the documented wire protocol."""

    def __init__(self, base_url: str, token: Optional[str] = None,
                 max_in_flight: int = 4, cache_dir: Optional[str | Path] = None,
                 transport: Optional[httpx.BaseTransport] = None,
                 ledger: Optional[CallLedger] = None):
        super().__init__(ledger)
        self._http = _HttpBackend(base_url, token, max_in_flight, cache_dir, transport)

    def _do_extract(self, query):
        data = self._http.post("extract", "/extract", {"query": query})
        return list(data["keywords"]), list(data.get("target_types", []))

    def _do_filter_entities(self, ctx, keyword, group):
        data = self._http.post("filter_entities", "/filter_entities", {
            "query": ctx.query, "keyword": keyword,
            "candidates": [{"id": s.entity.id, "name": s.entity.name,
                            "type": s.entity.entity_type} for s in group],
        })
        return list(data["keep"])

    def _do_filter_relations(self, ctx, candidate_types):
        data = self._http.post("filter_relations", "/filter_relations", {
            "query": ctx.query, "candidate_types": sorted(candidate_types)})
        return list(data["keep"])

    def _do_type_weights(self, types):
        data = self._http.post("type_weights", "/type_weights", {"types": list(types)})
        return {k: float(v) for k, v in data.get("weights", {}).items()}, \
            float(data.get("default", 0.5))

    def _do_judge_pair(self, pair, ctx):
        a, b = pair
        data = self._http.post("judge_pair", "/judge_pair", {
            "query": ctx.query,
            "a": {"id": a.id, "name": a.name, "type": a.entity_type},
            "b": {"id": b.id, "name": b.name, "type": b.entity_type},
        })
        if not data.get("relation_type"):
            return None
        return data["relation_type"], data.get("description", "")

    def _do_summarize(self, verbalization, ctx):
        data = self._http.post("summarize", "/summarize", {
            "query": ctx.query, "verbalization": verbalization})
        return data["theme"], data["answer"]

    def _do_synthesize(self, community_answers, ctx):
        data = self._http.post("synthesize", "/synthesize", {
            "query": ctx.query,
            "community_answers": [{"theme": t, "answer": a} for t, a in community_answers],
        })
        return data["answer"]


class RemoteEmbeddingProvider(EmbeddingProvider):
    def __init__(self, base_url: str, token: Optional[str] = None,
                 max_in_flight: int = 4,
                 transport: Optional[httpx.BaseTransport] = None,
                 ledger: Optional[CallLedger] = None):
        super().__init__(ledger)
        self._http = _HttpBackend(base_url, token, max_in_flight, transport=transport)

    def _do_embed(self, texts):
        data = self._http.post("embed", "/embed", {"texts": texts})
        return data["vectors"]


def providers_from_env(ledger: Optional[CallLedger] = None,
                       cache_dir: Optional[str | Path] = None):
    """Build remote providers from CEGOCD_LLM_URL / CEGOCD_LLM_TOKEN / CEGOCD_EMBED_URL."""
    llm_url = os.environ.get("CEGOCD_LLM_URL")
    embed_url = os.environ.get("CEGOCD_EMBED_URL")
    if not llm_url or not embed_url:
        raise ProviderError(
            "CEGOCD_LLM_URL and CEGOCD_EMBED_URL must be set (or use mock providers)")
    token = os.environ.get("CEGOCD_LLM_TOKEN")
    llm = RemoteLLMProvider(llm_url, token=token, cache_dir=cache_dir, ledger=ledger)
    embedder = RemoteEmbeddingProvider(embed_url, token=token, ledger=ledger)
    return llm, embedder
