import pytest

from cegocd.fixtures import GRAPH_PATH, load_manifest
from cegocd.kg import load_graph


@pytest.fixture(scope="session")
def graph():
    return load_graph(GRAPH_PATH)


@pytest.fixture(scope="session")
def manifest():
    return load_manifest()


def manifest_value(manifest, key):
    return manifest[key]["value"]
