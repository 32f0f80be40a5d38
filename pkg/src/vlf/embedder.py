"""Semantic source embeddings behind a pluggable provider.

The stub provider is a deterministic stand-in for a code-LLM embedding
branch: hash-seeded uniform vectors plus a fixed bonus on dimension 0 when
the text contains a known sink keyword, giving synthetic experiments a
learnable semantic signal. The remote provider speaks a minimal HTTP JSON
contract so a real embedding server can be plugged in unchanged.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ProviderUnavailable

SEMANTIC_DIM = 1536

ENV_EMBED_ENDPOINT = "VLF_EMBED_ENDPOINT"

# Keywords that mark a potentially dangerous sink reachable from raw text.
SINK_MARKERS = (
    "execute(", "executemany(", "executeQuery(", "executeUpdate(",
    "system(", "popen(", "exec(", "eval(",
    "strcpy(", "strcat(", "sprintf(", "gets(",
    "pickle.loads(", "yaml.load(", "readObject(",
)

_BYTES_PER_TOKEN = 4


@dataclass
class EmbedderConfig:
    provider: str = "stub"  # "stub" | "remote"
    seed: int = 0
    endpoint: str = ""
    max_tokens: int = 4096
    window_overlap_fraction: float = 0.25
    dim: int = SEMANTIC_DIM
    concurrency_limit: int = 4

    def __post_init__(self) -> None:
        if not 0 <= self.window_overlap_fraction < 1:
            raise ValueError("window overlap must be in [0, 1)")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def resolved_endpoint(self) -> str:
        return os.environ.get(ENV_EMBED_ENDPOINT, "") or self.endpoint

    def to_json(self) -> dict:
        return {
            "provider": self.provider,
            "seed": self.seed,
            "endpoint": self.endpoint,
            "max_tokens": self.max_tokens,
            "window_overlap_fraction": self.window_overlap_fraction,
            "dim": self.dim,
            "concurrency_limit": self.concurrency_limit,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EmbedderConfig":
        return cls(**obj)


@dataclass(frozen=True)
class SemanticEmbedding:
    vector: np.ndarray


def approx_token_count(text: str) -> int:
    return math.ceil(len(text.encode("utf-8")) / _BYTES_PER_TOKEN)


def stub_embed(text: str, seed: int, dim: int = SEMANTIC_DIM) -> np.ndarray:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]
    rng = np.random.default_rng([seed] + words)
    vec = rng.uniform(-1.0, 1.0, size=dim)
    if any(marker in text for marker in SINK_MARKERS):
        vec[0] += 0.5
    return vec


def _remote_embed(text: str, cfg: EmbedderConfig) -> np.ndarray:
    endpoint = cfg.resolved_endpoint()
    if not endpoint:
        raise ProviderUnavailable("remote provider configured without an endpoint")
    body = json.dumps({"text": text}).encode("utf-8")
    req = urllib.request.Request(
        endpoint.rstrip("/") + "/embed",
        data=body,
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            if resp.status != 200:
                raise ProviderUnavailable(f"embed endpoint returned {resp.status}")
            payload = json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
        raise ProviderUnavailable(f"embed endpoint unreachable: {exc}") from exc
    vec = np.asarray(payload.get("embedding", []), dtype=np.float64)
    if vec.shape != (cfg.dim,):
        raise DimensionMismatch(f"provider returned shape {vec.shape}, expected ({cfg.dim},)")
    return vec


def _provider_call(text: str, cfg: EmbedderConfig) -> np.ndarray:
    if cfg.provider == "stub":
        vec = stub_embed(text, cfg.seed, cfg.dim)
    elif cfg.provider == "remote":
        vec = _remote_embed(text, cfg)
    else:
        raise ProviderUnavailable(f"unknown provider {cfg.provider!r}")
    if vec.shape != (cfg.dim,):
        raise DimensionMismatch(f"provider returned shape {vec.shape}, expected ({cfg.dim},)")
    return vec


def split_windows(text: str, cfg: EmbedderConfig) -> list[str]:
    """Byte-budget windows with the configured overlap; whole text if short."""
    if approx_token_count(text) <= cfg.max_tokens:
        return [text]
    raw = text.encode("utf-8")
    window = cfg.max_tokens * _BYTES_PER_TOKEN
    step = max(1, int(window * (1 - cfg.window_overlap_fraction)))
    out = []
    i = 0
    while True:
        out.append(raw[i : i + window].decode("utf-8", "replace"))
        if i + window >= len(raw):
            break
        i += step
    return out


def embed_source(text: str, cfg: EmbedderConfig) -> SemanticEmbedding:
    windows = split_windows(text, cfg)
    vecs = [_provider_call(w, cfg) for w in windows]
    return SemanticEmbedding(vector=np.mean(vecs, axis=0))
