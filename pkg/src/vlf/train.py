"""Training: AdamW with decoupled decay, F1 early stopping, gradient checks.

Weight decay applies only to weight matrices and scoring weights, never to
biases or normalization affine parameters. Training is single-threaded and
bitwise reproducible per seed.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embedder import EmbedderConfig
from .errors import DegenerateDataset, LengthMismatch
from .fusion import FusionModel, FusionSample, batch_forward, init_model
from .losses import composite_loss

CHECKPOINT_FORMAT = "vlf-checkpoint"
CHECKPOINT_VERSION = 1

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    lr: float = 1e-3
    weight_decay: float = 1e-4
    batch_size: int = 64
    tau: float = 0.07
    lambda_nce: float = 0.1
    lambda_lap: float = 0.01
    patience_epochs: int = 5
    max_epochs: int = 30
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("lr", "weight_decay", "batch_size", "tau", "lambda_nce", "lambda_lap", "max_epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.patience_epochs < 1:
            raise ValueError("patience_epochs must be >= 1")

    def to_json(self) -> dict:
        return {
            "lr": self.lr, "weight_decay": self.weight_decay, "batch_size": self.batch_size,
            "tau": self.tau, "lambda_nce": self.lambda_nce, "lambda_lap": self.lambda_lap,
            "patience_epochs": self.patience_epochs, "max_epochs": self.max_epochs, "seed": self.seed,
        }


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def _decayed(name: str) -> bool:
    return name.split(".")[-1].startswith("w")


def adamw_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
    t: int,
) -> None:
    """In-place decoupled-weight-decay Adam update at step t >= 1."""
    assert t >= 1
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m = state.m[name]
        v = state.v[name]
        m *= _ADAM_BETA1
        m += (1 - _ADAM_BETA1) * g
        v *= _ADAM_BETA2
        v += (1 - _ADAM_BETA2) * g * g
        m_hat = m / (1 - _ADAM_BETA1**t)
        v_hat = v / (1 - _ADAM_BETA2**t)
        p -= cfg.lr * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        if _decayed(name):
            p -= cfg.lr * cfg.weight_decay * p


class EarlyStopper:
    """Keep the best validation F1; stop after `patience` epochs without improvement."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = -np.inf
        self.best_epoch = 0
        self.since_best = 0

    def update(self, epoch: int, f1: float) -> bool:
        """Record this epoch's score; returns True when training should stop."""
        if f1 > self.best:
            self.best = f1
            self.best_epoch = epoch
            self.since_best = 0
            return False
        self.since_best += 1
        return self.since_best >= self.patience


def evaluate_metrics(predictions, labels) -> dict[str, float]:
    preds = list(predictions)
    labs = list(labels)
    if len(preds) != len(labs):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(labs)} labels")
    tp = sum(1 for p, y in zip(preds, labs) if p == 1 and y == 1)
    fp = sum(1 for p, y in zip(preds, labs) if p == 1 and y == 0)
    fn = sum(1 for p, y in zip(preds, labs) if p == 0 and y == 1)
    correct = sum(1 for p, y in zip(preds, labs) if p == y)
    accuracy = correct / len(labs) if labs else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}


@dataclass
class TrainingData:
    train: list[FusionSample]
    val: list[FusionSample]


def predict_batch(samples: list[FusionSample], model: FusionModel) -> list[int]:
    cache = batch_forward(samples, model, mode="eval")
    return [1 if p >= 0.5 else 0 for p in cache.probs[:, 1]]


def _snapshot(model: FusionModel) -> FusionModel:
    return copy.deepcopy(model)


def train(data: TrainingData, cfg: TrainConfig) -> tuple[FusionModel, list[dict]]:
    for split_name, split in (("train", data.train), ("val", data.val)):
        labels = {s.label for s in split}
        if labels != {0, 1}:
            raise DegenerateDataset(f"{split_name} split must contain both classes, has {labels}")

    model = init_model(cfg.seed)
    state = AdamState()
    stopper = EarlyStopper(cfg.patience_epochs)
    history: list[dict] = []
    best_model = _snapshot(model)
    step = 0

    for epoch in range(1, cfg.max_epochs + 1):
        rng = np.random.default_rng((cfg.seed, epoch))
        perm = rng.permutation(len(data.train))
        losses = []
        for start in range(0, len(perm), cfg.batch_size):
            batch = [data.train[i] for i in perm[start : start + cfg.batch_size]]
            sample_seed = cfg.seed * 1_000_003 + epoch * 1009 + start
            breakdown, grads, _ = composite_loss(batch, model, cfg, mode="train", seed=sample_seed)
            step += 1
            adamw_step(model.named_parameters(), grads, state, cfg, step)
            losses.append(breakdown.total)

        val_preds = predict_batch(data.val, model)
        metrics = evaluate_metrics(val_preds, [s.label for s in data.val])
        history.append({
            "epoch": epoch,
            "train_loss": float(np.mean(losses)),
            "val_f1": metrics["f1"],
            "val_accuracy": metrics["accuracy"],
        })
        improved_before = stopper.best
        should_stop = stopper.update(epoch, metrics["f1"])
        if metrics["f1"] > improved_before:
            best_model = _snapshot(model)
        if should_stop:
            break

    return best_model, history


# --- gradient verification ---

def grad_check(
    model: FusionModel,
    samples: list[FusionSample],
    cfg: TrainConfig,
    h: float = 1e-5,
    coords_per_group: int = 8,
    corrupt_param: str | None = None,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Runs in eval-statistics mode so batch norm uses fixed running statistics
    and the loss is a smooth function of the parameters being perturbed.
    """
    def loss_value() -> float:
        breakdown, _, _ = composite_loss(samples, model, cfg, mode="eval", with_grads=False)
        return breakdown.total

    _, grads, _ = composite_loss(samples, model, cfg, mode="eval", with_grads=True)
    assert grads is not None
    if corrupt_param is not None:
        grads[corrupt_param] = grads[corrupt_param] + 0.05

    rng = np.random.default_rng(seed)
    max_rel = 0.0
    for name, param in model.named_parameters().items():
        grad = grads.get(name)
        if grad is None:
            continue
        flat = param.reshape(-1)
        gflat = np.asarray(grad).reshape(-1)
        n_coords = min(coords_per_group, flat.size)
        idx = rng.choice(flat.size, size=n_coords, replace=False)
        for j in idx:
            original = flat[j]
            flat[j] = original + h
            up = loss_value()
            flat[j] = original - h
            down = loss_value()
            flat[j] = original
            numeric = (up - down) / (2 * h)
            analytic = gflat[j]
            rel = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
            max_rel = max(max_rel, rel)
    return max_rel


# --- checkpointing ---

def save_model(model: FusionModel, path: str | Path) -> None:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "embedder": model.embedder_cfg.to_json(),
        "params": {k: v.tolist() for k, v in model.named_parameters().items()},
        "bn_state": {
            "layer1": {
                "running_mean": model.sage.layer1.bn.running_mean.tolist(),
                "running_var": model.sage.layer1.bn.running_var.tolist(),
            },
            "layer2": {
                "running_mean": model.sage.layer2.bn.running_mean.tolist(),
                "running_var": model.sage.layer2.bn.running_var.tolist(),
            },
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> FusionModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    model = init_model(0, EmbedderConfig.from_json(payload["embedder"]))
    params = model.named_parameters()
    for name, values in payload["params"].items():
        arr = np.asarray(values, dtype=np.float64)
        if params[name].shape != arr.shape:
            raise ValueError(f"checkpoint shape mismatch for {name}")
        params[name][...] = arr
    bn = payload["bn_state"]
    model.sage.layer1.bn.running_mean = np.asarray(bn["layer1"]["running_mean"])
    model.sage.layer1.bn.running_var = np.asarray(bn["layer1"]["running_var"])
    model.sage.layer2.bn.running_mean = np.asarray(bn["layer2"]["running_mean"])
    model.sage.layer2.bn.running_var = np.asarray(bn["layer2"]["running_var"])
    return model
