"""Writes the toy knowledge graph fixture (toy_kg.jsonl).

Twelve papers with Model / Dataset / Task entities, hand-authored below.
Rerunning always produces the same file; the manifest oracles and the
test suite depend on this content, so edits here require regenerating
manifest.json and the golden report.
"""
from __future__ import annotations

import json
from pathlib import Path

FIXTURE_DIR = Path(__file__).parent
GRAPH_PATH = FIXTURE_DIR / "toy_kg.jsonl"

TITLES = [
    ("P01", "Graph Attention Networks for Node Classification"),
    ("P02", "Attention Transformers for Abstractive Text Summarization"),
    ("P03", "Benchmarking Citation Network Datasets"),
    ("P04", "Convolutional Graph Models for Link Prediction"),
    ("P05", "Self Attention Mechanisms in Sequence Labeling"),
    ("P06", "A Survey of Node Classification Methods"),
    ("P07", "Contrastive Pretraining for Graph Embeddings"),
    ("P08", "Recurrent Models for Neural Machine Translation"),
    ("P09", "Knowledge Graph Completion with Embedding Models"),
    ("P10", "Efficient Transformers for Long Documents"),
    ("P11", "Heterogeneous Graph Networks for Recommendation"),
    ("P12", "Prompt Methods for Large Language Models"),
]

MODELS = [
    ("M01", "Graph Attention Network", ["GAT"],
     "attention based message passing over graph neighborhoods"),
    ("M02", "Graph Convolutional Network", ["GCN"],
     "spectral convolution model for graphs"),
    ("M03", "Transformer", [],
     "self attention sequence model"),
    ("M04", "Self Attention Network", ["SAN"],
     "attention model for token labeling"),
    ("M05", "Long Short Term Memory", ["LSTM"],
     "recurrent network for sequences"),
    ("M06", "Translation Embedding Model", ["TransE"],
     "relational embedding for knowledge graphs"),
    ("M07", "Heterogeneous Graph Network", ["HGN"],
     "typed message passing for heterogeneous graphs"),
    ("M08", "Bidirectional Encoder Transformer", ["BERT"],
     "pretrained bidirectional text encoder"),
    ("M09", "Contrastive Graph Encoder", [],
     "graph encoder trained with contrastive objectives"),
    ("M10", "Pointer Generator Network", [],
     "copy mechanism for abstractive summarization"),
    ("M11", "Sparse Attention Transformer", [],
     "transformer with sparse attention patterns for long inputs"),
    ("M12", "Relational Graph Convolutional Network", ["RGCN"],
     "relation typed graph convolution"),
    ("M13", "Prompt Tuned Language Model", [],
     "frozen language model adapted with prompts"),
    ("M14", "Label Propagation", [],
     "classic diffusion baseline for node labels"),
    ("M15", "Variational Graph Autoencoder", ["VGAE"],
     "latent variable model for graph reconstruction"),
    ("M16", "Random Walk Embedding", ["DeepWalk"],
     "skip gram over truncated random walks"),
    ("M17", "Attention Pooling Network", [],
     "graph readout with attention pooling"),
    ("M18", "Convolutional Sequence Model", [],
     "convolutional encoder decoder for sequences"),
    ("M19", "Retrieval Augmented Generator", [],
     "generator conditioned on retrieved passages"),
    ("M20", "Masked Language Model", [],
     "token masking pretraining objective"),
    ("M21", "Graph Isomorphism Network", ["GIN"],
     "maximally expressive message passing"),
    ("M22", "Message Passing Network", ["MPNN"],
     "general neural message passing framework"),
]

DATASETS = [
    ("D01", "Cora Citation Network", [], "citation network of machine learning papers"),
    ("D02", "Citeseer Citation Network", [], "citation network benchmark"),
    ("D03", "Pubmed Citation Network", [], "biomedical citation network"),
    ("D04", "Wordnet Relations", ["WN18"], "lexical knowledge base triples"),
    ("D05", "News Summarization Corpus", ["CNN DailyMail"], "news articles with highlights"),
    ("D06", "Movielens Ratings", [], "user item rating data"),
    ("D07", "Penn Treebank", ["PTB"], "annotated English corpus"),
    ("D08", "Freebase Subset", ["FB15k"], "knowledge base completion benchmark"),
    ("D09", "Protein Interaction Graphs", ["PPI"], "multi graph protein data"),
    ("D10", "Long Document Benchmark", [], "long input summarization and QA"),
    ("D11", "Amazon Product Graph", [], "co purchase graph with product labels"),
    ("D12", "Reddit Discussion Graph", [], "post to post interaction graph"),
    ("D13", "Squad Question Answering", ["SQuAD"], "reading comprehension benchmark"),
    ("D14", "WikiText Language Corpus", [], "long form language modeling data"),
    ("D15", "Open Graph Benchmark", ["OGB"], "large scale graph learning suite"),
]

TASKS = [
    ("T01", "Node Classification", [], "predict labels of graph nodes"),
    ("T02", "Link Prediction", [], "predict missing edges"),
    ("T03", "Text Summarization", [], "condense documents into summaries"),
    ("T04", "Sequence Labeling", [], "tag each token in a sequence"),
    ("T05", "Machine Translation", [], "translate between languages"),
    ("T06", "Knowledge Graph Completion", [], "infer missing triples"),
    ("T07", "Recommendation", [], "rank items for users"),
    ("T08", "Graph Representation Learning", [], "learn node and graph embeddings"),
    ("T09", "Question Answering", [], "answer questions over text"),
    ("T10", "Language Modeling", [], "predict the next token"),
    ("T11", "Graph Clustering", [], "group similar nodes together"),
    ("T12", "Graph Classification", [], "predict labels for whole graphs"),
]

# (source, relation_type, target)
EDGES = [
    # P01: graph attention for node classification
    ("P01", "proposes_model", "M01"),
    ("P01", "uses_model", "M02"),
    ("P01", "evaluates_on", "D01"),
    ("P01", "evaluates_on", "D02"),
    ("P01", "evaluates_on", "D03"),
    ("P01", "addresses_task", "T01"),
    ("P01", "cites", "P04"),
    ("P01", "cites", "P03"),
    # P02: transformers for summarization
    ("P02", "proposes_model", "M10"),
    ("P02", "uses_model", "M03"),
    ("P02", "evaluates_on", "D05"),
    ("P02", "addresses_task", "T03"),
    ("P02", "cites", "P08"),
    ("P02", "cites", "P10"),
    # P03: citation dataset benchmark
    ("P03", "evaluates_on", "D01"),
    ("P03", "evaluates_on", "D02"),
    ("P03", "evaluates_on", "D03"),
    ("P03", "addresses_task", "T01"),
    ("P03", "uses_model", "M02"),
    ("P03", "uses_model", "M14"),
    # P04: graph convolution for link prediction
    ("P04", "proposes_model", "M02"),
    ("P04", "evaluates_on", "D01"),
    ("P04", "evaluates_on", "D09"),
    ("P04", "addresses_task", "T02"),
    ("P04", "cites", "P03"),
    # P05: self attention sequence labeling
    ("P05", "proposes_model", "M04"),
    ("P05", "uses_model", "M05"),
    ("P05", "evaluates_on", "D07"),
    ("P05", "addresses_task", "T04"),
    ("P05", "cites", "P08"),
    # P06: node classification survey
    ("P06", "addresses_task", "T01"),
    ("P06", "uses_model", "M01"),
    ("P06", "uses_model", "M02"),
    ("P06", "uses_model", "M14"),
    ("P06", "evaluates_on", "D01"),
    ("P06", "evaluates_on", "D02"),
    ("P06", "cites", "P01"),
    ("P06", "cites", "P04"),
    ("P06", "cites", "P03"),
    # P07: contrastive graph pretraining
    ("P07", "proposes_model", "M09"),
    ("P07", "uses_model", "M01"),
    ("P07", "evaluates_on", "D09"),
    ("P07", "evaluates_on", "D01"),
    ("P07", "addresses_task", "T08"),
    ("P07", "addresses_task", "T01"),
    ("P07", "cites", "P01"),
    # P08: recurrent machine translation
    ("P08", "proposes_model", "M05"),
    ("P08", "evaluates_on", "D07"),
    ("P08", "addresses_task", "T05"),
    # P09: knowledge graph completion
    ("P09", "proposes_model", "M06"),
    ("P09", "uses_model", "M12"),
    ("P09", "evaluates_on", "D04"),
    ("P09", "evaluates_on", "D08"),
    ("P09", "addresses_task", "T06"),
    ("P09", "addresses_task", "T02"),
    ("P09", "cites", "P04"),
    # P10: efficient transformers
    ("P10", "proposes_model", "M11"),
    ("P10", "uses_model", "M03"),
    ("P10", "uses_model", "M08"),
    ("P10", "evaluates_on", "D10"),
    ("P10", "addresses_task", "T03"),
    ("P10", "addresses_task", "T09"),
    ("P10", "cites", "P02"),
    # P11: heterogeneous graphs for recommendation
    ("P11", "proposes_model", "M07"),
    ("P11", "uses_model", "M01"),
    ("P11", "evaluates_on", "D06"),
    ("P11", "addresses_task", "T07"),
    ("P11", "cites", "P01"),
    ("P11", "cites", "P04"),
    # P12: prompting large language models
    ("P12", "proposes_model", "M13"),
    ("P12", "uses_model", "M08"),
    ("P12", "evaluates_on", "D10"),
    ("P12", "addresses_task", "T09"),
    ("P12", "cites", "P10"),
    # model-model comparisons
    ("M01", "compares_with", "M02"),
    ("M01", "compares_with", "M14"),
    ("M02", "compares_with", "M14"),
    ("M04", "compares_with", "M05"),
    ("M03", "compares_with", "M05"),
    ("M11", "compares_with", "M03"),
    ("M06", "compares_with", "M12"),
    ("M07", "compares_with", "M02"),
    ("M09", "compares_with", "M01"),
    ("M10", "compares_with", "M03"),
    # model-task edges
    ("M01", "addresses_task", "T01"),
    ("M02", "addresses_task", "T01"),
    ("M02", "addresses_task", "T02"),
    ("M03", "addresses_task", "T03"),
    ("M04", "addresses_task", "T04"),
    ("M05", "addresses_task", "T05"),
    ("M06", "addresses_task", "T06"),
    ("M07", "addresses_task", "T07"),
    ("M08", "addresses_task", "T09"),
    ("M09", "addresses_task", "T08"),
    ("M11", "addresses_task", "T03"),
    ("M12", "addresses_task", "T06"),
    ("M13", "addresses_task", "T09"),
    ("M14", "addresses_task", "T01"),
    # model-dataset evaluation edges
    ("M01", "evaluates_on", "D01"),
    ("M01", "evaluates_on", "D02"),
    ("M02", "evaluates_on", "D01"),
    ("M02", "evaluates_on", "D03"),
    ("M04", "evaluates_on", "D07"),
    ("M06", "evaluates_on", "D04"),
    ("M09", "evaluates_on", "D09"),
    ("M11", "evaluates_on", "D10"),
    ("M14", "evaluates_on", "D02"),
    # later-wave graph learning entities hang off existing papers
    ("P07", "uses_model", "M15"),
    ("P07", "uses_model", "M16"),
    ("P07", "evaluates_on", "D12"),
    ("P07", "evaluates_on", "D15"),
    ("P04", "uses_model", "M15"),
    ("P04", "uses_model", "M21"),
    ("P04", "evaluates_on", "D15"),
    ("P06", "uses_model", "M16"),
    ("P06", "evaluates_on", "D11"),
    ("P06", "evaluates_on", "D12"),
    ("P10", "uses_model", "M20"),
    ("P10", "evaluates_on", "D13"),
    ("P10", "evaluates_on", "D14"),
    ("P12", "uses_model", "M19"),
    ("P12", "evaluates_on", "D13"),
    ("P08", "uses_model", "M18"),
    ("P11", "uses_model", "M22"),
    ("P11", "evaluates_on", "D11"),
    ("M15", "addresses_task", "T02"),
    ("M15", "compares_with", "M02"),
    ("M16", "addresses_task", "T08"),
    ("M16", "compares_with", "M09"),
    ("M16", "evaluates_on", "D12"),
    ("M17", "addresses_task", "T12"),
    ("M17", "compares_with", "M01"),
    ("M18", "addresses_task", "T05"),
    ("M18", "compares_with", "M05"),
    ("M19", "addresses_task", "T09"),
    ("M19", "evaluates_on", "D13"),
    ("M20", "addresses_task", "T10"),
    ("M20", "evaluates_on", "D14"),
    ("M20", "compares_with", "M08"),
    ("M21", "addresses_task", "T12"),
    ("M21", "compares_with", "M22"),
    ("M21", "evaluates_on", "D15"),
    ("M22", "addresses_task", "T08"),
    ("M09", "addresses_task", "T11"),
    ("M16", "addresses_task", "T11"),
    # bridges between the graph-learning and sequence-modeling clusters
    ("P05", "cites", "P01"),
    ("M04", "compares_with", "M01"),
]


def entity_line(eid, name, etype, aliases=(), description=""):
    return {"kind": "entity", "id": eid, "name": name, "type": etype,
            "description": description, "aliases": list(aliases)}


def write_fixture(path: Path = GRAPH_PATH) -> None:
    lines = []
    for eid, name in TITLES:
        lines.append(entity_line(eid, name, "Title"))
    for eid, name, aliases, desc in MODELS:
        lines.append(entity_line(eid, name, "Model", aliases, desc))
    for eid, name, aliases, desc in DATASETS:
        lines.append(entity_line(eid, name, "Dataset", aliases, desc))
    for eid, name, aliases, desc in TASKS:
        lines.append(entity_line(eid, name, "Task", aliases, desc))
    for src, rel, dst in EDGES:
        lines.append({"kind": "relation", "source": src, "target": dst, "type": rel})
    with open(path, "w", encoding="utf-8") as fh:
        for obj in lines:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    write_fixture()
    print(f"wrote {GRAPH_PATH}")
