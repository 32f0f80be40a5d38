"""Domain types for execution-grounded validation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from ..uast.types import Language, UastDocument

STREAM_CAP_BYTES = 245_760  # 240 KB

GIB = 1024**3
MIB = 1024**2

MAX_HYPOTHESES_FLAGGED = 5
MAX_HYPOTHESES_UNFLAGGED = 1
PAYLOADS_FLAGGED = (3, 5)
PAYLOADS_UNFLAGGED = (1, 2)
BUDGET_MS_FLAGGED = 60_000
BUDGET_MS_UNFLAGGED = 15_000


class VulnClass(enum.Enum):
    SQL_INJECTION = "SqlInjection"
    COMMAND_INJECTION = "CommandInjection"
    PATH_TRAVERSAL = "PathTraversal"
    INSECURE_DESERIALIZATION = "InsecureDeserialization"
    MEMORY_CORRUPTION = "MemoryCorruption"
    OTHER = "Other"


class EvidenceClass(enum.Enum):
    CONFIRMING = "Confirming"
    SUGGESTIVE = "Suggestive"
    NEUTRAL = "Neutral"


class EvidenceSource(enum.Enum):
    SANITIZER_REPORT = "SanitizerReport"
    HARNESS_EVENT = "HarnessEvent"
    EXIT_BEHAVIOR = "ExitBehavior"


class VerdictKind(enum.Enum):
    EXPLOITED = "Exploited"
    NOT_EXPLOITED = "NotExploited"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Payload:
    id: str
    data: str
    marker: str

    def to_json(self) -> dict:
        return {"id": self.id, "data": self.data, "marker": self.marker}


@dataclass
class ExploitHypothesis:
    vuln_class: VulnClass
    attack_vector: str
    payloads: list[Payload]
    preconditions: list[str]
    attempt_index: int
    family: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.attempt_index <= MAX_HYPOTHESES_FLAGGED:
            raise ValueError(f"attempt_index {self.attempt_index} out of range")

    def to_json(self) -> dict:
        return {
            "vuln_class": self.vuln_class.value,
            "attack_vector": self.attack_vector,
            "payloads": [p.to_json() for p in self.payloads],
            "preconditions": self.preconditions,
            "attempt_index": self.attempt_index,
            "family": self.family,
        }


@dataclass
class SandboxSpec:
    image: str
    memory_limit: int = 1 * GIB
    cpu_quota: float = 0.9
    network: str = "none"
    mount_mode: str = "read-only"
    tmpfs_size: int = 256 * MIB
    pid_limit: int = 256
    no_new_privileges: bool = True
    harness_timeout_s: int = 35

    def __post_init__(self) -> None:
        if self.network != "none":
            raise ValueError("sandbox network must be none")
        if not 30 <= self.harness_timeout_s <= 45:
            raise ValueError("harness_timeout_s must be within [30, 45]")
        for name in ("memory_limit", "tmpfs_size", "pid_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def for_language(cls, language: Language) -> "SandboxSpec":
        images = {
            Language.PYTHON: "vlf/sandbox-python:1",
            Language.JAVA: "vlf/sandbox-java:1",
            Language.CPP: "vlf/sandbox-cpp:1",
        }
        memory = 2 * GIB if language is Language.JAVA else 1 * GIB
        return cls(image=images[language], memory_limit=memory)


@dataclass
class ExecutionResult:
    exit_code: Optional[int]
    timed_out: bool
    stdout: bytes
    stderr: bytes
    events: list[dict]
    wall_time_ms: int

    def __post_init__(self) -> None:
        self.stdout = self.stdout[:STREAM_CAP_BYTES]
        self.stderr = self.stderr[:STREAM_CAP_BYTES]
        if self.timed_out:
            self.exit_code = None

    def to_json(self) -> dict:
        return {
            "exit_code": self.exit_code,
            "timed_out": self.timed_out,
            "stdout_len": len(self.stdout),
            "stderr_len": len(self.stderr),
            "events": self.events,
            "wall_time_ms": self.wall_time_ms,
        }


@dataclass(frozen=True)
class EvidenceItem:
    evidence_class: EvidenceClass
    description: str
    source: EvidenceSource
    payload_id: str

    def to_json(self) -> dict:
        return {
            "class": self.evidence_class.value,
            "description": self.description,
            "source": self.source.value,
            "payload_id": self.payload_id,
        }


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    confirming_count: int
    suggestive_count: int

    @classmethod
    def from_counts(cls, confirming: int, suggestive: int) -> "Verdict":
        if confirming >= 1:
            kind = VerdictKind.EXPLOITED
        elif suggestive >= 1:
            kind = VerdictKind.INCONCLUSIVE
        else:
            kind = VerdictKind.NOT_EXPLOITED
        return cls(kind=kind, confirming_count=confirming, suggestive_count=suggestive)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "confirming_count": self.confirming_count,
            "suggestive_count": self.suggestive_count,
        }


@dataclass
class PayloadExecution:
    payload: Payload
    result: Optional[ExecutionResult]
    evidence: list[EvidenceItem]

    def to_json(self) -> dict:
        return {
            "payload": self.payload.to_json(),
            "result": self.result.to_json() if self.result else None,
            "evidence": [e.to_json() for e in self.evidence],
        }


@dataclass
class HypothesisRecord:
    hypothesis: Optional[ExploitHypothesis]
    executions: list[PayloadExecution] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "hypothesis": self.hypothesis.to_json() if self.hypothesis else None,
            "executions": [e.to_json() for e in self.executions],
            "note": self.note,
        }


@dataclass
class ValidationTrace:
    sample_id: str
    flag_in: int
    hypotheses: list[HypothesisRecord] = field(default_factory=list)
    verdict: Verdict = field(default_factory=lambda: Verdict.from_counts(0, 0))
    total_wall_ms: int = 0
    stopped_early: bool = False

    def all_evidence(self) -> list[EvidenceItem]:
        return [e for h in self.hypotheses for ex in h.executions for e in ex.evidence]

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "flag_in": self.flag_in,
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "verdict": self.verdict.to_json(),
            "total_wall_ms": self.total_wall_ms,
            "stopped_early": self.stopped_early,
        }


@dataclass
class ValidationSample:
    """Input to the validation stage."""
    sample_id: str
    source: str
    language: Language
    doc: UastDocument
    flag: int
    prior_trace: Optional[ValidationTrace] = None
