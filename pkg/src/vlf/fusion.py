"""Hybrid fusion detector: shared-space projection, two-way gating, classifier.

Both branch embeddings are L2-normalized, projected through
LayerNorm(ReLU(W x + b)) into a shared 128-dim space, mixed by a softmax
gate over two learned scores, and classified by an affine softmax head.
All forward passes cache what the hand-written backward needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedder import SEMANTIC_DIM, EmbedderConfig, embed_source
from .errors import ShapeMismatch
from .graph import CodeGraph, build_graph
from .sage import (
    EMBED_DIM,
    SageCache,
    SageParams,
    init_params as init_sage_params,
    named_sage_parameters,
    sage_forward,
    xavier_uniform,
)
from .uast.parse import parse_to_uast
from .uast.types import Language

LN_EPS = 1e-5


@dataclass
class ProjectionParams:
    w_g: np.ndarray  # (128, 128)
    b_g: np.ndarray
    w_l: np.ndarray  # (128, 1536)
    b_l: np.ndarray
    ln_g_gamma: np.ndarray
    ln_g_beta: np.ndarray
    ln_l_gamma: np.ndarray
    ln_l_beta: np.ndarray


@dataclass
class GateParams:
    w_g: np.ndarray  # (128,)
    b_g: np.ndarray  # (1,)
    w_l: np.ndarray
    b_l: np.ndarray


@dataclass
class ClassifierParams:
    w: np.ndarray  # (2, 128); row 1 is the vulnerable logit
    b: np.ndarray


@dataclass
class FusionModel:
    sage: SageParams
    proj: ProjectionParams
    gate: GateParams
    clf: ClassifierParams
    embedder_cfg: EmbedderConfig

    def named_parameters(self) -> dict[str, np.ndarray]:
        out = dict(named_sage_parameters(self.sage))
        out.update({
            "proj.w_g": self.proj.w_g, "proj.b_g": self.proj.b_g,
            "proj.w_l": self.proj.w_l, "proj.b_l": self.proj.b_l,
            "proj.ln_g_gamma": self.proj.ln_g_gamma, "proj.ln_g_beta": self.proj.ln_g_beta,
            "proj.ln_l_gamma": self.proj.ln_l_gamma, "proj.ln_l_beta": self.proj.ln_l_beta,
            "gate.w_g": self.gate.w_g, "gate.b_g": self.gate.b_g,
            "gate.w_l": self.gate.w_l, "gate.b_l": self.gate.b_l,
            "clf.w": self.clf.w, "clf.b": self.clf.b,
        })
        return out


@dataclass(frozen=True)
class DetectionResult:
    flag: int
    prob_vulnerable: float
    alpha_g: float
    alpha_l: float
    fused: np.ndarray


@dataclass(frozen=True)
class ExplanationRecord:
    alpha_g: float
    alpha_l: float
    dominant: str
    flag: int
    prob: float

    def to_json(self) -> dict:
        return {
            "alpha_g": self.alpha_g, "alpha_l": self.alpha_l,
            "dominant": self.dominant, "flag": self.flag, "prob": self.prob,
        }


@dataclass
class FusionSample:
    """Pre-featurized training sample."""
    graph: CodeGraph
    semantic: np.ndarray  # raw 1536-dim embedding
    label: int
    sample_id: str = ""


def init_model(seed: int, embedder_cfg: EmbedderConfig | None = None) -> FusionModel:
    rng = np.random.default_rng((seed, 1))
    proj = ProjectionParams(
        w_g=xavier_uniform(rng, EMBED_DIM, EMBED_DIM),
        b_g=np.zeros(EMBED_DIM),
        w_l=xavier_uniform(rng, EMBED_DIM, SEMANTIC_DIM),
        b_l=np.zeros(EMBED_DIM),
        ln_g_gamma=np.ones(EMBED_DIM), ln_g_beta=np.zeros(EMBED_DIM),
        ln_l_gamma=np.ones(EMBED_DIM), ln_l_beta=np.zeros(EMBED_DIM),
    )
    gate = GateParams(
        w_g=xavier_uniform(rng, 1, EMBED_DIM)[0], b_g=np.zeros(1),
        w_l=xavier_uniform(rng, 1, EMBED_DIM)[0], b_l=np.zeros(1),
    )
    clf = ClassifierParams(w=xavier_uniform(rng, 2, EMBED_DIM), b=np.zeros(2))
    return FusionModel(
        sage=init_sage_params(seed),
        proj=proj,
        gate=gate,
        clf=clf,
        embedder_cfg=embedder_cfg or EmbedderConfig(),
    )


# --- primitive ops ---

def l2_normalize(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.zeros_like(v)
    return v / norm


def _l2_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(m, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    return m / safe[:, None], norms


def _l2_rows_backward(d_out: np.ndarray, normed: np.ndarray, norms: np.ndarray) -> np.ndarray:
    safe = np.where(norms == 0.0, 1.0, norms)
    dot = (d_out * normed).sum(axis=1, keepdims=True)
    grad = (d_out - normed * dot) / safe[:, None]
    grad[norms == 0.0] = 0.0
    return grad


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class _BranchCache:
    x_in: np.ndarray
    relu: np.ndarray  # post-ReLU pre-LN activations
    xhat: np.ndarray
    inv_std: np.ndarray


def _project_branch(
    x: np.ndarray, w: np.ndarray, b: np.ndarray, gamma: np.ndarray, beta: np.ndarray
) -> tuple[np.ndarray, _BranchCache]:
    pre = x @ w.T + b
    relu = np.maximum(pre, 0.0)
    mu = relu.mean(axis=1, keepdims=True)
    var = relu.var(axis=1)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (relu - mu) * inv_std[:, None]
    out = gamma * xhat + beta
    return out, _BranchCache(x_in=x, relu=relu, xhat=xhat, inv_std=inv_std)


def _project_branch_backward(
    d_out: np.ndarray, cache: _BranchCache, w: np.ndarray, gamma: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Returns (d_x, d_w, d_b, d_gamma, d_beta)."""
    d_gamma = (d_out * cache.xhat).sum(axis=0)
    d_beta = d_out.sum(axis=0)
    d_xhat = d_out * gamma
    d_feats = cache.xhat.shape[1]
    inv = cache.inv_std[:, None]
    d_relu = (inv / d_feats) * (
        d_feats * d_xhat
        - d_xhat.sum(axis=1, keepdims=True)
        - cache.xhat * (d_xhat * cache.xhat).sum(axis=1, keepdims=True)
    )
    d_pre = d_relu * (cache.relu > 0)
    d_w = d_pre.T @ cache.x_in
    d_b = d_pre.sum(axis=0)
    d_x = d_pre @ w
    return d_x, d_w, d_b, d_gamma, d_beta


def project(h_g: np.ndarray, h_l: np.ndarray, proj: ProjectionParams) -> tuple[np.ndarray, np.ndarray]:
    """Single-sample shared-space projection of the two L2-normalized inputs."""
    if h_g.shape != (EMBED_DIM,) or h_l.shape != (SEMANTIC_DIM,):
        raise ShapeMismatch(f"got {h_g.shape}, {h_l.shape}")
    g_hat, _ = _project_branch(h_g[None, :], proj.w_g, proj.b_g, proj.ln_g_gamma, proj.ln_g_beta)
    l_hat, _ = _project_branch(h_l[None, :], proj.w_l, proj.b_l, proj.ln_l_gamma, proj.ln_l_beta)
    return g_hat[0], l_hat[0]


def gate_and_fuse(
    g_hat: np.ndarray,
    l_hat: np.ndarray,
    gate: GateParams,
    force_alpha_g: float | None = None,
) -> tuple[float, float, np.ndarray]:
    if force_alpha_g is not None:
        alpha_g = float(force_alpha_g)
        alpha_l = 1.0 - alpha_g
    else:
        s_g = float(g_hat @ gate.w_g + gate.b_g[0])
        s_l = float(l_hat @ gate.w_l + gate.b_l[0])
        m = max(s_g, s_l)
        e_g, e_l = np.exp(s_g - m), np.exp(s_l - m)
        alpha_g = float(e_g / (e_g + e_l))
        alpha_l = 1.0 - alpha_g
    fused = alpha_g * g_hat + alpha_l * l_hat
    return alpha_g, alpha_l, fused


def classify(fused: np.ndarray, clf: ClassifierParams) -> tuple[float, int]:
    logits = clf.w @ fused + clf.b
    probs = _softmax_rows(logits[None, :])[0]
    prob_vulnerable = float(probs[1])
    flag = 1 if prob_vulnerable >= 0.5 else 0
    return prob_vulnerable, flag


def explain(result: DetectionResult) -> ExplanationRecord:
    dominant = "structural" if result.alpha_g >= result.alpha_l else "semantic"
    return ExplanationRecord(
        alpha_g=result.alpha_g, alpha_l=result.alpha_l,
        dominant=dominant, flag=result.flag, prob=result.prob_vulnerable,
    )


def detect(source: bytes, language: Language, model: FusionModel) -> DetectionResult:
    doc = parse_to_uast(source, language)
    graph = build_graph(doc)
    h_g, _, _ = sage_forward(graph, model.sage, mode="eval")
    h_l = embed_source(source.decode("utf-8"), model.embedder_cfg).vector
    return detect_from_features(graph_embedding=h_g, semantic=h_l, model=model)


def detect_from_features(
    graph_embedding: np.ndarray, semantic: np.ndarray, model: FusionModel
) -> DetectionResult:
    g_norm = l2_normalize(graph_embedding)
    l_norm = l2_normalize(semantic)
    g_hat, l_hat = project(g_norm, l_norm, model.proj)
    alpha_g, alpha_l, fused = gate_and_fuse(g_hat, l_hat, model.gate)
    prob, flag = classify(fused, model.clf)
    return DetectionResult(flag=flag, prob_vulnerable=prob, alpha_g=alpha_g, alpha_l=alpha_l, fused=fused)


# --- batched forward/backward used by the composite loss ---

@dataclass
class BatchCache:
    samples: list[FusionSample]
    sage_caches: list[SageCache]
    hg_raw: np.ndarray  # (N, 128)
    hg_norms: np.ndarray
    g_norm: np.ndarray
    hl_norms: np.ndarray
    l_norm: np.ndarray
    g_branch: _BranchCache
    l_branch: _BranchCache
    g_hat: np.ndarray
    l_hat: np.ndarray
    alphas: np.ndarray  # (N, 2)
    fused: np.ndarray
    logits: np.ndarray
    probs: np.ndarray


def batch_forward(
    samples: list[FusionSample], model: FusionModel, mode: str = "eval", seed: int | None = None
) -> BatchCache:
    sage_caches = []
    hg_rows = []
    for i, sample in enumerate(samples):
        sample_seed = None if seed is None else seed + 7919 * i
        h_g, _, cache = sage_forward(
            sample.graph, model.sage, mode=mode, seed=sample_seed, update_running=False
        )
        sage_caches.append(cache)
        hg_rows.append(h_g)
    if mode == "train":
        from .sage import update_running_stats

        update_running_stats(model.sage, sage_caches)
    hg_raw = np.stack(hg_rows)
    g_norm, hg_norms = _l2_rows(hg_raw)
    hl_raw = np.stack([s.semantic for s in samples])
    l_norm, hl_norms = _l2_rows(hl_raw)

    g_hat, g_branch = _project_branch(g_norm, model.proj.w_g, model.proj.b_g, model.proj.ln_g_gamma, model.proj.ln_g_beta)
    l_hat, l_branch = _project_branch(l_norm, model.proj.w_l, model.proj.b_l, model.proj.ln_l_gamma, model.proj.ln_l_beta)

    s_g = g_hat @ model.gate.w_g + model.gate.b_g
    s_l = l_hat @ model.gate.w_l + model.gate.b_l
    alphas = _softmax_rows(np.stack([s_g, s_l], axis=1))
    fused = alphas[:, 0:1] * g_hat + alphas[:, 1:2] * l_hat
    logits = fused @ model.clf.w.T + model.clf.b
    probs = _softmax_rows(logits)
    return BatchCache(
        samples=samples, sage_caches=sage_caches,
        hg_raw=hg_raw, hg_norms=hg_norms, g_norm=g_norm,
        hl_norms=hl_norms, l_norm=l_norm,
        g_branch=g_branch, l_branch=l_branch,
        g_hat=g_hat, l_hat=l_hat,
        alphas=alphas, fused=fused, logits=logits, probs=probs,
    )


def batch_backward(
    cache: BatchCache,
    model: FusionModel,
    d_fused: np.ndarray,
    d_g_hat_extra: np.ndarray,
    d_l_hat_extra: np.ndarray,
    d_z_per_sample: list[np.ndarray | None],
) -> dict[str, np.ndarray]:
    """Backpropagate classifier-level gradients down to every parameter."""
    grads: dict[str, np.ndarray] = {}

    # gating
    d_alpha_g = (d_fused * cache.g_hat).sum(axis=1)
    d_alpha_l = (d_fused * cache.l_hat).sum(axis=1)
    a_g = cache.alphas[:, 0]
    a_l = cache.alphas[:, 1]
    d_sg = a_g * a_l * (d_alpha_g - d_alpha_l)
    d_g_hat = cache.alphas[:, 0:1] * d_fused + d_sg[:, None] * model.gate.w_g + d_g_hat_extra
    d_l_hat = cache.alphas[:, 1:2] * d_fused - d_sg[:, None] * model.gate.w_l + d_l_hat_extra
    grads["gate.w_g"] = cache.g_hat.T @ d_sg
    grads["gate.w_l"] = cache.l_hat.T @ (-d_sg)
    grads["gate.b_g"] = np.array([d_sg.sum()])
    grads["gate.b_l"] = np.array([-d_sg.sum()])

    # projections
    d_g_norm, d_wg, d_bg, d_gg, d_gb = _project_branch_backward(
        d_g_hat, cache.g_branch, model.proj.w_g, model.proj.ln_g_gamma
    )
    d_l_norm, d_wl, d_bl, d_lg, d_lb = _project_branch_backward(
        d_l_hat, cache.l_branch, model.proj.w_l, model.proj.ln_l_gamma
    )
    grads.update({
        "proj.w_g": d_wg, "proj.b_g": d_bg,
        "proj.ln_g_gamma": d_gg, "proj.ln_g_beta": d_gb,
        "proj.w_l": d_wl, "proj.b_l": d_bl,
        "proj.ln_l_gamma": d_lg, "proj.ln_l_beta": d_lb,
    })

    # L2 normalization back to raw graph embeddings (semantic side has no params)
    d_hg_raw = _l2_rows_backward(d_g_norm, cache.g_norm, cache.hg_norms)

    from .sage import sage_backward  # local import to avoid cycle at module load

    sage_grads: dict[str, np.ndarray] = {}
    for i, sample_cache in enumerate(cache.sage_caches):
        g = sage_backward(sample_cache, model.sage, d_hg_raw[i], d_z_per_sample[i])
        for name, grad in g.items():
            if name in sage_grads:
                sage_grads[name] += grad
            else:
                sage_grads[name] = grad.copy()
    grads.update(sage_grads)
    return grads
