"""Two-layer mean-aggregation GraphSAGE encoder with hand-written backward.

Layer form: h'_v = ReLU(BN(W_self h_v + W_neigh mean_{u in S(v)} h_u + b)),
where S(v) is the sampled in-neighborhood (empty -> zero vector). Graph
embedding is the mean over node embeddings after layer 2. Neighborhoods are
sampled once per forward pass and shared by both layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch
from .graph import FEATURE_DIM, CodeGraph, sample_neighbors

HIDDEN_DIM = 256
EMBED_DIM = 128
NEIGHBOR_CAP = 10


@dataclass
class BatchNormState:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    eps: float = 1e-5
    training: bool = False

    @classmethod
    def initial(cls, dim: int) -> "BatchNormState":
        return cls(
            gamma=np.ones(dim), beta=np.zeros(dim),
            running_mean=np.zeros(dim), running_var=np.ones(dim),
        )


@dataclass
class SageLayer:
    w_self: np.ndarray
    w_neigh: np.ndarray
    bias: np.ndarray
    bn: BatchNormState


@dataclass
class SageParams:
    layer1: SageLayer
    layer2: SageLayer

    def check_shapes(self) -> None:
        expect = [
            (self.layer1.w_self, (HIDDEN_DIM, FEATURE_DIM)),
            (self.layer1.w_neigh, (HIDDEN_DIM, FEATURE_DIM)),
            (self.layer1.bias, (HIDDEN_DIM,)),
            (self.layer2.w_self, (EMBED_DIM, HIDDEN_DIM)),
            (self.layer2.w_neigh, (EMBED_DIM, HIDDEN_DIM)),
            (self.layer2.bias, (EMBED_DIM,)),
        ]
        for arr, shape in expect:
            if arr.shape != shape:
                raise ShapeMismatch(f"expected {shape}, got {arr.shape}")


@dataclass(frozen=True)
class GraphEmbedding:
    vector: np.ndarray  # (EMBED_DIM,)


def xavier_uniform(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_out, fan_in))


def init_params(seed: int) -> SageParams:
    rng = np.random.default_rng(seed)
    l1 = SageLayer(
        w_self=xavier_uniform(rng, HIDDEN_DIM, FEATURE_DIM),
        w_neigh=xavier_uniform(rng, HIDDEN_DIM, FEATURE_DIM),
        bias=np.zeros(HIDDEN_DIM),
        bn=BatchNormState.initial(HIDDEN_DIM),
    )
    l2 = SageLayer(
        w_self=xavier_uniform(rng, EMBED_DIM, HIDDEN_DIM),
        w_neigh=xavier_uniform(rng, EMBED_DIM, HIDDEN_DIM),
        bias=np.zeros(EMBED_DIM),
        bn=BatchNormState.initial(EMBED_DIM),
    )
    return SageParams(layer1=l1, layer2=l2)


@dataclass
class _Neighborhood:
    flat: np.ndarray  # concatenated sampled neighbor indices, node order
    starts: np.ndarray  # segment start per node
    counts: np.ndarray  # segment length per node


def _sample_all(graph: CodeGraph, mode: str, seed: int | None) -> _Neighborhood:
    lists = [
        sample_neighbors(graph, v, NEIGHBOR_CAP, seed if mode == "train" else None)
        for v in range(graph.num_nodes)
    ]
    counts = np.array([len(x) for x in lists], dtype=np.int64)
    flat = np.concatenate(lists) if lists and counts.sum() else np.empty(0, dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1])) if len(counts) else np.empty(0, dtype=np.int64)
    return _Neighborhood(flat=flat, starts=starts, counts=counts)


def _mean_aggregate(h: np.ndarray, nb: _Neighborhood) -> np.ndarray:
    out = np.zeros((len(nb.counts), h.shape[1]), dtype=np.float64)
    nz = nb.counts > 0
    if nb.flat.size:
        sums = np.add.reduceat(h[nb.flat], nb.starts[nz], axis=0)
        out[nz] = sums / nb.counts[nz, None]
    return out


def _scatter_mean_grad(d_agg: np.ndarray, nb: _Neighborhood, n_src: int, dim: int) -> np.ndarray:
    dh = np.zeros((n_src, dim), dtype=np.float64)
    nz = nb.counts > 0
    if nb.flat.size:
        weighted = d_agg[nz] / nb.counts[nz, None]
        np.add.at(dh, nb.flat, np.repeat(weighted, nb.counts[nz], axis=0))
    return dh


@dataclass
class _LayerCache:
    h_in: np.ndarray
    agg: np.ndarray
    xhat: np.ndarray
    inv_std: np.ndarray
    relu_mask: np.ndarray
    training_bn: bool
    batch_mean: np.ndarray | None = None
    batch_var: np.ndarray | None = None


@dataclass
class SageCache:
    neighborhood: _Neighborhood
    layer1: _LayerCache
    layer2: _LayerCache
    z: np.ndarray  # final node embeddings


def _layer_forward(
    h: np.ndarray, nb: _Neighborhood, layer: SageLayer, training: bool
) -> tuple[np.ndarray, _LayerCache]:
    agg = _mean_aggregate(h, nb)
    pre = h @ layer.w_self.T + agg @ layer.w_neigh.T + layer.bias
    bn = layer.bn
    batch_mean = batch_var = None
    if training:
        mu = pre.mean(axis=0)
        var = pre.var(axis=0)  # biased, matching normalization
        batch_mean, batch_var = mu, var
    else:
        mu = bn.running_mean
        var = bn.running_var
    inv_std = 1.0 / np.sqrt(var + bn.eps)
    xhat = (pre - mu) * inv_std
    bn_out = bn.gamma * xhat + bn.beta
    out = np.maximum(bn_out, 0.0)
    cache = _LayerCache(
        h_in=h, agg=agg, xhat=xhat, inv_std=inv_std,
        relu_mask=bn_out > 0, training_bn=training,
        batch_mean=batch_mean, batch_var=batch_var,
    )
    return out, cache


def update_running_stats(params: SageParams, caches: list["SageCache"]) -> None:
    """One EMA update per training step from the step's per-graph statistics."""
    for layer, pick in ((params.layer1, lambda c: c.layer1), (params.layer2, lambda c: c.layer2)):
        means = [pick(c).batch_mean for c in caches if pick(c).batch_mean is not None]
        variances = [pick(c).batch_var for c in caches if pick(c).batch_var is not None]
        if not means:
            continue
        bn = layer.bn
        step_mean = np.mean(means, axis=0)
        step_var = np.mean(variances, axis=0)
        bn.running_mean = (1 - bn.momentum) * bn.running_mean + bn.momentum * step_mean
        bn.running_var = (1 - bn.momentum) * bn.running_var + bn.momentum * step_var


def sage_forward(
    graph: CodeGraph,
    params: SageParams,
    mode: str = "eval",
    seed: int | None = None,
    update_running: bool = True,
) -> tuple[np.ndarray, np.ndarray, SageCache]:
    """Returns (graph_embedding, node_embeddings, cache)."""
    params.check_shapes()
    training = mode == "train"
    nb = _sample_all(graph, mode, seed)
    x = graph.features
    if x.shape != (graph.num_nodes, FEATURE_DIM):
        raise ShapeMismatch(f"features shape {x.shape}")
    h1, c1 = _layer_forward(x, nb, params.layer1, training)
    z, c2 = _layer_forward(h1, nb, params.layer2, training)
    h_g = z.mean(axis=0)
    cache = SageCache(neighborhood=nb, layer1=c1, layer2=c2, z=z)
    if training and update_running:
        update_running_stats(params, [cache])
    return h_g, z, cache


def encode_graph(
    graph: CodeGraph, params: SageParams, mode: str = "eval", seed: int | None = None
) -> tuple[GraphEmbedding, np.ndarray]:
    h_g, z, _ = sage_forward(graph, params, mode, seed)
    return GraphEmbedding(vector=h_g), z


def _layer_backward(
    d_out: np.ndarray, cache: _LayerCache, layer: SageLayer, nb: _Neighborhood
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    bn = layer.bn
    d_bn_out = d_out * cache.relu_mask
    d_gamma = (d_bn_out * cache.xhat).sum(axis=0)
    d_beta = d_bn_out.sum(axis=0)
    d_xhat = d_bn_out * bn.gamma
    if cache.training_bn:
        n = d_out.shape[0]
        d_pre = (cache.inv_std / n) * (
            n * d_xhat - d_xhat.sum(axis=0) - cache.xhat * (d_xhat * cache.xhat).sum(axis=0)
        )
    else:
        d_pre = d_xhat * cache.inv_std
    grads = {
        "w_self": d_pre.T @ cache.h_in,
        "w_neigh": d_pre.T @ cache.agg,
        "bias": d_pre.sum(axis=0),
        "bn.gamma": d_gamma,
        "bn.beta": d_beta,
    }
    d_h = d_pre @ layer.w_self
    d_agg = d_pre @ layer.w_neigh
    d_h += _scatter_mean_grad(d_agg, nb, cache.h_in.shape[0], cache.h_in.shape[1])
    return d_h, grads


def sage_backward(
    cache: SageCache, params: SageParams, d_hg: np.ndarray, d_z: np.ndarray | None = None
) -> dict[str, np.ndarray]:
    """Gradients of all sage parameters given upstream gradients.

    d_hg flows through the mean pooling; d_z is an optional direct gradient
    on per-node embeddings (used by the Laplacian term).
    """
    n = cache.z.shape[0]
    d_z_total = np.tile(d_hg / n, (n, 1))
    if d_z is not None:
        d_z_total = d_z_total + d_z
    d_h1, g2 = _layer_backward(d_z_total, cache.layer2, params.layer2, cache.neighborhood)
    _, g1 = _layer_backward(d_h1, cache.layer1, params.layer1, cache.neighborhood)
    out = {}
    for name, grad in g1.items():
        out[f"sage.layer1.{name}"] = grad
    for name, grad in g2.items():
        out[f"sage.layer2.{name}"] = grad
    return out


def named_sage_parameters(params: SageParams) -> dict[str, np.ndarray]:
    return {
        "sage.layer1.w_self": params.layer1.w_self,
        "sage.layer1.w_neigh": params.layer1.w_neigh,
        "sage.layer1.bias": params.layer1.bias,
        "sage.layer1.bn.gamma": params.layer1.bn.gamma,
        "sage.layer1.bn.beta": params.layer1.bn.beta,
        "sage.layer2.w_self": params.layer2.w_self,
        "sage.layer2.w_neigh": params.layer2.w_neigh,
        "sage.layer2.bias": params.layer2.bias,
        "sage.layer2.bn.gamma": params.layer2.bn.gamma,
        "sage.layer2.bn.beta": params.layer2.bn.beta,
    }
