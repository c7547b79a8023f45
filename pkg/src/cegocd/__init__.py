"""Central-entity-guided subgraph retrieval, optimization, and community
detection for knowledge-graph question answering."""

from .config import PipelineConfig
from .kg import Entity, KnowledgeGraph, Relation, load_graph, save_graph
from .pipeline import RunReport, answer
from .providers import (CallLedger, MockEmbeddingProvider, MockLLMProvider,
                        QueryContext, RemoteEmbeddingProvider,
                        RemoteLLMProvider)

__all__ = [
    "Entity", "KnowledgeGraph", "Relation", "load_graph", "save_graph",
    "PipelineConfig", "RunReport", "answer", "QueryContext", "CallLedger",
    "MockLLMProvider", "MockEmbeddingProvider",
    "RemoteLLMProvider", "RemoteEmbeddingProvider",
]

__version__ = "0.1.0"
