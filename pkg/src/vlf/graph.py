"""Featured code graphs over uAST documents.

Node features are deterministic (768-dim): a one-hot category block, signed
feature hashes of the native kind and of whitespace-split leaf text, and four
structural scalars. All hashing is multiply-shift over fixed 64-bit constants
so features are stable across runs and platforms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .uast.taxonomy import CATEGORY_COUNT
from .uast.types import UastDocument, UastNode

FEATURE_DIM = 768

_KIND_BINS = 64
_KIND_OFFSET = CATEGORY_COUNT  # 47
_TEXT_BINS = 512
_TEXT_OFFSET = _KIND_OFFSET + _KIND_BINS  # 111
_SCALAR_OFFSET = _TEXT_OFFSET + _TEXT_BINS  # 623

# Fixed multiply-shift constants (64-bit golden-ratio and Weyl increments).
_MS_BIN = 0x9E3779B97F4A7C15
_MS_SIGN = 0xBF58476D1CE4E5B9


def _hash64(text: str) -> int:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _bin_and_sign(text: str, bins: int) -> tuple[int, float]:
    x = _hash64(text)
    bucket = ((x * _MS_BIN) & 0xFFFFFFFFFFFFFFFF) % bins
    sign = 1.0 if ((x * _MS_SIGN) >> 63) & 1 == 0 else -1.0
    return bucket, sign


def featurize_node(node: UastNode, depth: int, total_bytes: int = 0) -> np.ndarray:
    vec = np.zeros(FEATURE_DIM, dtype=np.float64)
    vec[int(node.universal_category)] = 1.0
    bucket, sign = _bin_and_sign(node.native_type, _KIND_BINS)
    vec[_KIND_OFFSET + bucket] = sign
    for token in node.text.split():
        bucket, sign = _bin_and_sign(token, _TEXT_BINS)
        vec[_TEXT_OFFSET + bucket] += sign
    vec[_SCALAR_OFFSET] = np.log1p(depth)
    vec[_SCALAR_OFFSET + 1] = np.log1p(node.span.length())
    vec[_SCALAR_OFFSET + 2] = np.log1p(len(node.children))
    vec[_SCALAR_OFFSET + 3] = node.span.start_byte / max(1, total_bytes)
    return vec


@dataclass
class CodeGraph:
    num_nodes: int
    features: np.ndarray  # (num_nodes, FEATURE_DIM)
    edges: list[tuple[int, int]]  # both directions of each parent-child link
    node_doc_index: list[int]
    _in_neighbors: list[np.ndarray] = field(default_factory=list, repr=False)

    def in_neighbors(self, node: int) -> np.ndarray:
        if not self._in_neighbors:
            self._build_adjacency()
        return self._in_neighbors[node]

    def _build_adjacency(self) -> None:
        buckets: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for src, dst in self.edges:
            buckets[dst].append(src)
        self._in_neighbors = [np.array(sorted(b), dtype=np.int64) for b in buckets]


def build_graph(doc: UastDocument) -> CodeGraph:
    n = doc.node_count
    total_bytes = doc.root.span.end_byte if n else 0
    depths = np.zeros(n, dtype=np.int64)
    for node in doc.nodes:
        if node.parent is not None:
            depths[node.index] = depths[node.parent] + 1
    features = np.empty((n, FEATURE_DIM), dtype=np.float64)
    for node in doc.nodes:
        features[node.index] = featurize_node(node, int(depths[node.index]), total_bytes)
    edges: list[tuple[int, int]] = []
    for node in doc.nodes:
        if node.parent is not None:
            edges.append((node.parent, node.index))
            edges.append((node.index, node.parent))
    return CodeGraph(num_nodes=n, features=features, edges=edges, node_doc_index=list(range(n)))


def sample_neighbors(
    graph: CodeGraph, node: int, k: int = 10, seed: int | None = None
) -> np.ndarray:
    """Sampled in-neighborhood S(node), capped at k.

    Full in-neighborhoods (sorted) when in-degree <= k. Above the cap, a
    seeded draw without replacement; with no seed (inference) the k
    smallest-index neighbors are used so evaluation is deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    neigh = graph.in_neighbors(node)
    if len(neigh) <= k:
        return neigh
    if seed is None:
        return neigh[:k]  # in_neighbors is sorted ascending
    rng = np.random.default_rng((seed, node))
    picked = rng.choice(neigh, size=k, replace=False)
    return np.sort(picked)
