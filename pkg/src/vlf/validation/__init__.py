"""Execution-grounded validation: planning, harnesses, sandboxing, verdicts."""

from .evidence import classify_evidence
from .harness import HarnessBundle, generate_harness
from .orchestrator import validate_sample
from .planner import RemotePlanner, RulePlanner, find_sinks
from .sandbox import (
    ContainerDriver,
    ExecutionRequest,
    MockResult,
    MockSandboxDriver,
    assemble_sandbox_command,
    parse_events,
)
from .types import (
    EvidenceClass,
    EvidenceItem,
    EvidenceSource,
    ExecutionResult,
    ExploitHypothesis,
    HypothesisRecord,
    Payload,
    PayloadExecution,
    SandboxSpec,
    ValidationSample,
    ValidationTrace,
    Verdict,
    VerdictKind,
    VulnClass,
)

__all__ = [
    "ContainerDriver",
    "EvidenceClass",
    "EvidenceItem",
    "EvidenceSource",
    "ExecutionRequest",
    "ExecutionResult",
    "ExploitHypothesis",
    "HarnessBundle",
    "HypothesisRecord",
    "MockResult",
    "MockSandboxDriver",
    "Payload",
    "PayloadExecution",
    "RemotePlanner",
    "RulePlanner",
    "SandboxSpec",
    "ValidationSample",
    "ValidationTrace",
    "Verdict",
    "VerdictKind",
    "VulnClass",
    "assemble_sandbox_command",
    "classify_evidence",
    "find_sinks",
    "generate_harness",
    "parse_events",
    "validate_sample",
]
