"""Composite training loss: cross-entropy + InfoNCE alignment + Laplacian smoothing.

InfoNCE is the symmetric in-batch form over re-normalized projected pairs:
s_ij = g_i . l_j / tau, loss = (1/2N) sum_i [-log softmax_row(s)_ii
- log softmax_col(s)_ii]. The Laplacian term averages, per graph, the squared
differences of final node embeddings across every directed edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch
from .fusion import BatchCache, FusionModel, FusionSample, _l2_rows, _l2_rows_backward, _softmax_rows, batch_backward, batch_forward


@dataclass
class LossBreakdown:
    total: float
    ce: float
    nce: float
    lap: float

    def to_json(self) -> dict:
        return {"total": self.total, "ce": self.ce, "nce": self.nce, "lap": self.lap}


def _cross_entropy(probs: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    n = len(labels)
    picked = np.clip(probs[np.arange(n), labels], 1e-300, None)
    loss = float(-np.log(picked).mean())
    d_logits = probs.copy()
    d_logits[np.arange(n), labels] -= 1.0
    d_logits /= n
    return loss, d_logits


def _info_nce(g_hat: np.ndarray, l_hat: np.ndarray, tau: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Returns (loss, d_g_hat, d_l_hat) for the unscaled InfoNCE term."""
    n = g_hat.shape[0]
    gn, g_norms = _l2_rows(g_hat)
    ln, l_norms = _l2_rows(l_hat)
    sims = gn @ ln.T / tau
    p_row = _softmax_rows(sims)
    p_col = _softmax_rows(sims.T).T
    diag = np.arange(n)
    loss = float(
        (-np.log(np.clip(p_row[diag, diag], 1e-300, None))
         - np.log(np.clip(p_col[diag, diag], 1e-300, None))).sum() / (2 * n)
    )
    eye = np.eye(n)
    d_sims = ((p_row - eye) + (p_col - eye)) / (2 * n)
    d_gn = d_sims @ ln / tau
    d_ln = d_sims.T @ gn / tau
    d_g = _l2_rows_backward(d_gn, gn, g_norms)
    d_l = _l2_rows_backward(d_ln, ln, l_norms)
    return loss, d_g, d_l


def _laplacian(samples: list[FusionSample], caches) -> tuple[float, list[np.ndarray | None]]:
    """Mean over graphs of the edge-wise squared-difference energy."""
    total = 0.0
    grads: list[np.ndarray | None] = []
    b = len(samples)
    for sample, cache in zip(samples, caches):
        edges = sample.graph.edges
        z = cache.z
        if not edges:
            grads.append(None)
            continue
        src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
        dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
        diff = z[src] - z[dst]
        energy = float((diff * diff).sum() / len(edges))
        total += energy
        dz = np.zeros_like(z)
        scale = 2.0 / (len(edges) * b)
        np.add.at(dz, src, scale * diff)
        np.add.at(dz, dst, -scale * diff)
        grads.append(dz)
    return total / b, grads


def composite_loss(
    batch: list[FusionSample],
    model: FusionModel,
    cfg,
    mode: str = "train",
    seed: int | None = None,
    with_grads: bool = True,
) -> tuple[LossBreakdown, dict[str, np.ndarray] | None, BatchCache]:
    if not batch:
        raise EmptyBatch("composite loss requires a non-empty batch")
    labels = np.array([s.label for s in batch], dtype=np.int64)
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")

    cache = batch_forward(batch, model, mode=mode, seed=seed)
    ce, d_logits = _cross_entropy(cache.probs, labels)
    nce, d_g_nce, d_l_nce = _info_nce(cache.g_hat, cache.l_hat, cfg.tau)
    lap, d_z_list = _laplacian(batch, cache.sage_caches)
    total = ce + cfg.lambda_nce * nce + cfg.lambda_lap * lap
    breakdown = LossBreakdown(total=total, ce=ce, nce=nce, lap=lap)
    if not with_grads:
        return breakdown, None, cache

    d_fused = d_logits @ model.clf.w
    grads = batch_backward(
        cache,
        model,
        d_fused=d_fused,
        d_g_hat_extra=cfg.lambda_nce * d_g_nce,
        d_l_hat_extra=cfg.lambda_nce * d_l_nce,
        d_z_per_sample=[None if dz is None else cfg.lambda_lap * dz for dz in d_z_list],
    )
    grads["clf.w"] = d_logits.T @ cache.fused
    grads["clf.b"] = d_logits.sum(axis=0)
    return breakdown, grads, cache
