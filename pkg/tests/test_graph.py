from __future__ import annotations

import numpy as np
import pytest

from vlf.graph import FEATURE_DIM, CodeGraph, build_graph, featurize_node, sample_neighbors
from vlf.uast import Language, parse_to_uast


def _graph_of(src: bytes, language=Language.PYTHON) -> CodeGraph:
    return build_graph(parse_to_uast(src, language))


class TestFeaturizeNode:
    def test_one_hot_category_block(self):
        doc = parse_to_uast(b"x = 1\n", Language.PYTHON)
        for node in doc.nodes:
            vec = featurize_node(node, depth=2, total_bytes=6)
            block = vec[:47]
            assert block.sum() == 1.0
            assert block[int(node.universal_category)] == 1.0

    def test_empty_text_token_block_zero(self):
        doc = parse_to_uast(b"x = 1\n", Language.PYTHON)
        root = doc.root  # non-leaf => empty text
        vec = featurize_node(root, depth=0, total_bytes=6)
        assert not vec[111:623].any()

    def test_deterministic(self):
        doc = parse_to_uast(b"value = compute(1, 2)\n", Language.PYTHON)
        for node in doc.nodes:
            a = featurize_node(node, 1, 100)
            b = featurize_node(node, 1, 100)
            assert np.array_equal(a, b)

    def test_structural_scalars(self):
        doc = parse_to_uast(b"x = 1\n", Language.PYTHON)
        node = doc.nodes[1]
        vec = featurize_node(node, depth=3, total_bytes=6)
        assert vec[623] == pytest.approx(np.log1p(3))
        assert vec[624] == pytest.approx(np.log1p(node.span.length()))
        assert vec[625] == pytest.approx(np.log1p(len(node.children)))
        assert 0.0 <= vec[626] <= 1.0
        assert not vec[627:].any()


class TestBuildGraph:
    def test_single_node_doc(self):
        graph = _graph_of(b"")
        assert graph.num_nodes == 1
        assert graph.edges == []

    def test_edge_count_tree_property(self, corpus_docs):
        for _, doc in corpus_docs[:20]:
            graph = build_graph(doc)
            assert len(graph.edges) == 2 * (doc.node_count - 1)

    def test_both_directions_present(self):
        graph = _graph_of(b"x = 1\n")
        edge_set = set(graph.edges)
        for src, dst in graph.edges:
            assert (dst, src) in edge_set

    def test_features_shape(self):
        graph = _graph_of(b"def f():\n    return 1\n")
        assert graph.features.shape == (graph.num_nodes, FEATURE_DIM)


class TestSampleNeighbors:
    def _star(self, leaves: int) -> CodeGraph:
        edges = []
        for leaf in range(1, leaves + 1):
            edges.append((0, leaf))
            edges.append((leaf, 0))
        feats = np.zeros((leaves + 1, FEATURE_DIM))
        return CodeGraph(num_nodes=leaves + 1, features=feats, edges=edges,
                         node_doc_index=list(range(leaves + 1)))

    def test_full_take_below_cap(self):
        graph = self._star(3)
        out = sample_neighbors(graph, 0, k=10)
        assert list(out) == [1, 2, 3]

    def test_seeded_sample_above_cap(self):
        graph = self._star(25)
        a = sample_neighbors(graph, 0, k=10, seed=7)
        b = sample_neighbors(graph, 0, k=10, seed=7)
        assert len(a) == 10
        assert len(set(a.tolist())) == 10
        assert np.array_equal(a, b)
        c = sample_neighbors(graph, 0, k=10, seed=8)
        assert not np.array_equal(a, c)

    def test_inference_takes_smallest(self):
        graph = self._star(25)
        out = sample_neighbors(graph, 0, k=10, seed=None)
        assert list(out) == list(range(1, 11))

    def test_isolated_node(self):
        feats = np.zeros((2, FEATURE_DIM))
        graph = CodeGraph(num_nodes=2, features=feats, edges=[], node_doc_index=[0, 1])
        assert len(sample_neighbors(graph, 0)) == 0
