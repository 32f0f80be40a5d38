"""Sandbox command assembly and execution drivers.

The container driver shells out to the configured runtime with a bit-exact
argument vector; the mock driver returns scripted results keyed by
(sample_id, payload_id) so the full protocol is testable hermetically.
"""

from __future__ import annotations

import json
import os
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..errors import DriverUnavailable, SpawnFailure
from .harness import EVENT_PREFIX, HarnessBundle
from .types import GIB, MIB, STREAM_CAP_BYTES, ExecutionResult, SandboxSpec

ENV_CONTAINER_BIN = "VLF_CONTAINER_BIN"


def _format_memory(limit: int) -> str:
    if limit % GIB == 0:
        return f"{limit // GIB}g"
    return f"{max(1, limit // MIB)}m"


def assemble_sandbox_command(spec: SandboxSpec, bundle: HarnessBundle, workdir: str) -> list[str]:
    return [
        "run",
        "--rm",
        "--network=none",
        f"--memory={_format_memory(spec.memory_limit)}",
        f"--cpus={spec.cpu_quota}",
        "--read-only",
        "-v",
        f"{workdir}:/work:ro",
        "--tmpfs",
        f"/tmp:size={spec.tmpfs_size // MIB}m",
        f"--pids-limit={spec.pid_limit}",
        "--security-opt",
        "no-new-privileges",
        spec.image,
        *bundle.entry_command,
    ]


def parse_events(stdout: bytes, stderr: bytes) -> list[dict]:
    events: list[dict] = []
    for line in stdout.splitlines():
        text = line.decode("utf-8", "replace")
        if text.startswith(EVENT_PREFIX):
            try:
                body = json.loads(text[len(EVENT_PREFIX):])
            except json.JSONDecodeError:
                continue
            if isinstance(body, dict):
                body["type"] = "harness_event"
                events.append(body)
    err_text = stderr.decode("utf-8", "replace")
    for line in err_text.splitlines():
        if "ERROR: AddressSanitizer:" in line:
            kind = line.split("ERROR: AddressSanitizer:", 1)[1].strip().split()[0] if line.split("ERROR: AddressSanitizer:", 1)[1].strip() else "unknown"
            events.append({"type": "sanitizer_report", "tool": "AddressSanitizer", "kind": kind, "detail": line.strip()[:400]})
        elif "ERROR: LeakSanitizer:" in line:
            events.append({"type": "sanitizer_report", "tool": "LeakSanitizer", "kind": "leak", "detail": line.strip()[:400]})
        elif "runtime error:" in line:
            events.append({"type": "sanitizer_report", "tool": "UndefinedBehaviorSanitizer", "kind": "runtime-error", "detail": line.strip()[:400]})
    return events


@dataclass
class ExecutionRequest:
    sample_id: str
    payload_id: str
    bundle: HarnessBundle
    spec: SandboxSpec
    timeout_s: int
    workdir: str = ""


class ContainerDriver:
    """Runs harness bundles inside the configured container runtime."""

    def __init__(self, binary: str | None = None, workroot: str | Path = "/tmp/vlf-sandbox"):
        self.binary = binary or os.environ.get(ENV_CONTAINER_BIN, "") or "docker"
        self.workroot = Path(workroot)

    def available(self) -> bool:
        try:
            probe = subprocess.run(
                [self.binary, "info"], capture_output=True, timeout=10, check=False
            )
            return probe.returncode == 0
        except (FileNotFoundError, subprocess.TimeoutExpired, OSError):
            return False

    def execute(self, request: ExecutionRequest) -> ExecutionResult:
        workdir = Path(request.workdir) if request.workdir else (
            self.workroot / request.sample_id / request.payload_id
        )
        workdir.mkdir(parents=True, exist_ok=True)
        for name, data in request.bundle.files.items():
            (workdir / name).write_bytes(data)
        argv = [self.binary] + assemble_sandbox_command(request.spec, request.bundle, str(workdir))
        started = time.monotonic()
        try:
            proc = subprocess.run(
                argv, capture_output=True, timeout=request.timeout_s, check=False
            )
            stdout, stderr = proc.stdout, proc.stderr
            exit_code: Optional[int] = proc.returncode
            timed_out = False
        except subprocess.TimeoutExpired as exc:
            stdout = exc.stdout or b""
            stderr = exc.stderr or b""
            exit_code = None
            timed_out = True
        except FileNotFoundError as exc:
            raise DriverUnavailable(f"container binary {self.binary!r} not found") from exc
        except OSError as exc:
            raise SpawnFailure(f"failed to spawn sandbox: {exc}") from exc
        wall_ms = int((time.monotonic() - started) * 1000)
        return ExecutionResult(
            exit_code=exit_code,
            timed_out=timed_out,
            stdout=stdout[:STREAM_CAP_BYTES],
            stderr=stderr[:STREAM_CAP_BYTES],
            events=parse_events(stdout[:STREAM_CAP_BYTES], stderr[:STREAM_CAP_BYTES]),
            wall_time_ms=wall_ms,
        )


@dataclass
class MockResult:
    exit_code: Optional[int] = 0
    timed_out: bool = False
    stdout: bytes = b""
    stderr: bytes = b""
    events: list[dict] = field(default_factory=list)
    wall_time_ms: int = 50


class MockSandboxDriver:
    """Scripted driver keyed by (sample_id, payload_id).

    Unscripted keys return a clean neutral execution. Every call is recorded
    in order, which the protocol tests use for early-stop accounting.
    """

    def __init__(self, script: dict[tuple[str, str], MockResult] | None = None,
                 default: MockResult | None = None,
                 dynamic: Callable[[ExecutionRequest], MockResult] | None = None):
        self.script = dict(script or {})
        self.default = default or MockResult()
        self.dynamic = dynamic
        self.calls: list[tuple[str, str]] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "MockSandboxDriver":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        script = {}
        for key, value in payload.items():
            sample_id, _, payload_id = key.partition("|")
            script[(sample_id, payload_id)] = MockResult(
                exit_code=value.get("exit_code", 0),
                timed_out=value.get("timed_out", False),
                stdout=value.get("stdout", "").encode("utf-8"),
                stderr=value.get("stderr", "").encode("utf-8"),
                events=value.get("events", []),
                wall_time_ms=value.get("wall_time_ms", 50),
            )
        return cls(script=script)

    def available(self) -> bool:
        return True

    def execute(self, request: ExecutionRequest) -> ExecutionResult:
        self.calls.append((request.sample_id, request.payload_id))
        scripted = self.script.get((request.sample_id, request.payload_id))
        if scripted is None and self.dynamic is not None:
            scripted = self.dynamic(request)
        if scripted is None:
            scripted = self.default
        events = list(scripted.events)
        if not events and (scripted.stdout or scripted.stderr):
            events = parse_events(scripted.stdout, scripted.stderr)
        return ExecutionResult(
            exit_code=scripted.exit_code,
            timed_out=scripted.timed_out,
            stdout=scripted.stdout,
            stderr=scripted.stderr,
            events=events,
            wall_time_ms=scripted.wall_time_ms,
        )
