from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from vlf.embedder import (
    SEMANTIC_DIM,
    EmbedderConfig,
    approx_token_count,
    embed_source,
    split_windows,
    stub_embed,
)
from vlf.errors import DimensionMismatch, ProviderUnavailable


class TestApproxTokenCount:
    def test_empty(self):
        assert approx_token_count("") == 0

    def test_exact_division(self):
        assert approx_token_count("a" * 4096) == 1024

    def test_ceiling(self):
        assert approx_token_count("a" * 4097) == 1025

    def test_monotone(self):
        counts = [approx_token_count("x" * n) for n in range(0, 64, 3)]
        assert counts == sorted(counts)


class TestStubEmbed:
    def test_deterministic(self):
        a = stub_embed("def f(): pass", seed=3)
        b = stub_embed("def f(): pass", seed=3)
        assert np.array_equal(a, b)
        assert a.shape == (SEMANTIC_DIM,)

    def test_one_byte_difference_changes_vector(self):
        a = stub_embed("abcdef", seed=1)
        b = stub_embed("abcdeg", seed=1)
        assert not np.array_equal(a, b)

    def test_marker_bonus_on_dim0(self):
        base = "command = build()\nrun(command)\n"
        with_sink = "command = build()\nos.system(command)\n"
        a = stub_embed(base, seed=5)
        b = stub_embed(with_sink, seed=5)
        assert not np.array_equal(a, b)  # different text, different draw
        # same text with and without the marker isolates the +0.5 rule
        plain = stub_embed("x" * 30, seed=5)
        rigged = np.array(plain)
        rigged[0] += 0.5
        marked = stub_embed("x" * 30, seed=5, dim=SEMANTIC_DIM)
        assert np.array_equal(plain, marked)  # no marker in text
        spiked = stub_embed("x" * 30 + " system(", seed=5)
        assert spiked[0] != plain[0]

    def test_range(self):
        vec = stub_embed("no sink here", seed=0)
        assert (np.abs(vec) <= 1.0).all()


class TestWindows:
    def test_short_text_single_window(self):
        cfg = EmbedderConfig(seed=1)
        assert split_windows("short text", cfg) == ["short text"]

    def test_windowed_mean(self):
        cfg = EmbedderConfig(seed=2, max_tokens=8, window_overlap_fraction=0.0)
        text = "a" * 64  # 16 tokens -> two 32-byte windows
        windows = split_windows(text, cfg)
        assert len(windows) == 2
        expected = np.mean([stub_embed(w, 2) for w in windows], axis=0)
        got = embed_source(text, cfg).vector
        assert np.abs(got - expected).max() < 1e-12

    def test_overlap_fraction(self):
        cfg = EmbedderConfig(seed=2, max_tokens=8, window_overlap_fraction=0.25)
        text = "ab" * 40
        windows = split_windows(text, cfg)
        assert len(windows) >= 3
        # step = 24 bytes for a 32-byte window at 25% overlap
        assert windows[0][24:32] == windows[1][:8]

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            EmbedderConfig(window_overlap_fraction=1.0)
        with pytest.raises(ValueError):
            EmbedderConfig(max_tokens=0)


class _EmbedHandler(BaseHTTPRequestHandler):
    status = 200
    dim = SEMANTIC_DIM

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        json.loads(self.rfile.read(length))
        if self.status != 200:
            self.send_response(self.status)
            self.end_headers()
            return
        body = json.dumps({"embedding": [0.25] * self.dim}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def embed_server():
    server = HTTPServer(("127.0.0.1", 0), _EmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()


class TestRemoteProvider:
    def test_round_trip(self, embed_server):
        _EmbedHandler.status = 200
        _EmbedHandler.dim = SEMANTIC_DIM
        cfg = EmbedderConfig(provider="remote", endpoint=f"http://127.0.0.1:{embed_server.server_port}")
        vec = embed_source("hello", cfg).vector
        assert vec.shape == (SEMANTIC_DIM,)
        assert vec[0] == pytest.approx(0.25)

    def test_non_200_is_provider_unavailable(self, embed_server):
        _EmbedHandler.status = 503
        cfg = EmbedderConfig(provider="remote", endpoint=f"http://127.0.0.1:{embed_server.server_port}")
        with pytest.raises(ProviderUnavailable):
            embed_source("hello", cfg)
        _EmbedHandler.status = 200

    def test_wrong_dimension(self, embed_server):
        _EmbedHandler.dim = 12
        cfg = EmbedderConfig(provider="remote", endpoint=f"http://127.0.0.1:{embed_server.server_port}")
        with pytest.raises(DimensionMismatch):
            embed_source("hello", cfg)
        _EmbedHandler.dim = SEMANTIC_DIM

    def test_unreachable_endpoint(self):
        cfg = EmbedderConfig(provider="remote", endpoint="http://127.0.0.1:1")
        with pytest.raises(ProviderUnavailable):
            embed_source("hello", cfg)

    def test_env_override(self, embed_server, monkeypatch):
        _EmbedHandler.status = 200
        _EmbedHandler.dim = SEMANTIC_DIM
        monkeypatch.setenv("VLF_EMBED_ENDPOINT", f"http://127.0.0.1:{embed_server.server_port}")
        cfg = EmbedderConfig(provider="remote", endpoint="http://127.0.0.1:1")
        vec = embed_source("hello", cfg).vector
        assert vec[0] == pytest.approx(0.25)
