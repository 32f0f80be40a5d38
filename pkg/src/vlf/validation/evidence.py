"""Deterministic evidence classification over sandbox observations.

Confirming requires a concrete artifact: a sanitizer report matching a
memory-class hypothesis, a harness event showing the payload marker inside
the intercepted sink argument, or an intercepted file open resolving outside
the permitted root with the marker in the path. Suggestive covers abnormal
exits that echo a payload fragment without sink evidence; everything else is
a single Neutral observation.
"""

from __future__ import annotations

import posixpath

from .types import (
    EvidenceClass,
    EvidenceItem,
    EvidenceSource,
    ExecutionResult,
    ExploitHypothesis,
    Payload,
    VulnClass,
)

PERMITTED_ROOT = "/work"

_SINK_EVENTS: dict[VulnClass, frozenset[str]] = {
    VulnClass.SQL_INJECTION: frozenset({"execute", "executemany", "executescript", "jdbc_execute"}),
    VulnClass.COMMAND_INJECTION: frozenset({"system", "popen", "subprocess"}),
    VulnClass.INSECURE_DESERIALIZATION: frozenset(
        {"pickle.loads", "pickle.load", "yaml.load", "system", "popen", "subprocess"}
    ),
    VulnClass.MEMORY_CORRUPTION: frozenset(),
    VulnClass.PATH_TRAVERSAL: frozenset(),  # handled by the path rule
    VulnClass.OTHER: frozenset(),
}

_FILE_SINKS = frozenset({"open", "fopen"})


def _escapes_root(path: str) -> bool:
    if path.startswith("/"):
        normalized = posixpath.normpath(path)
        return not (normalized == PERMITTED_ROOT or normalized.startswith(PERMITTED_ROOT + "/"))
    normalized = posixpath.normpath(posixpath.join(PERMITTED_ROOT, path))
    return not (normalized == PERMITTED_ROOT or normalized.startswith(PERMITTED_ROOT + "/"))


def classify_evidence(
    result: ExecutionResult, hypothesis: ExploitHypothesis, payload: Payload
) -> list[EvidenceItem]:
    items: list[EvidenceItem] = []
    vuln_class = hypothesis.vuln_class

    for event in result.events:
        etype = event.get("type", "harness_event")
        if etype == "sanitizer_report":
            if vuln_class is VulnClass.MEMORY_CORRUPTION:
                items.append(EvidenceItem(
                    evidence_class=EvidenceClass.CONFIRMING,
                    description=f"{event.get('tool', 'sanitizer')} report: {event.get('kind', 'unknown')} ({event.get('detail', '')[:160]})",
                    source=EvidenceSource.SANITIZER_REPORT,
                    payload_id=payload.id,
                ))
            continue
        sink = str(event.get("sink", ""))
        arg = str(event.get("arg", ""))
        if sink == "subprocess" and arg.lstrip().startswith("["):
            # argv-vector invocation: the payload stays one argument, the
            # shell never interprets it, so reaching this sink proves nothing
            continue
        if sink in _SINK_EVENTS.get(vuln_class, frozenset()) and payload.marker in arg:
            items.append(EvidenceItem(
                evidence_class=EvidenceClass.CONFIRMING,
                description=f"payload marker reached sink `{sink}`: {arg[:160]}",
                source=EvidenceSource.HARNESS_EVENT,
                payload_id=payload.id,
            ))
        elif sink in _FILE_SINKS and payload.marker in arg and _escapes_root(arg):
            items.append(EvidenceItem(
                evidence_class=EvidenceClass.CONFIRMING,
                description=f"file open escaped permitted root: {arg[:160]}",
                source=EvidenceSource.HARNESS_EVENT,
                payload_id=payload.id,
            ))

    if items:
        return items

    err_text = result.stderr.decode("utf-8", "replace") + result.stdout.decode("utf-8", "replace")
    abnormal = (result.exit_code is not None and result.exit_code != 0) or (
        "Traceback" in err_text or "Exception" in err_text
    )
    fragment = payload.marker if payload.marker in err_text else (
        payload.data[:12] if payload.data[:12] and payload.data[:12] in err_text else ""
    )
    if abnormal and fragment:
        return [EvidenceItem(
            evidence_class=EvidenceClass.SUGGESTIVE,
            description=f"abnormal exit (code {result.exit_code}) echoed payload fragment {fragment[:40]!r}",
            source=EvidenceSource.EXIT_BEHAVIOR,
            payload_id=payload.id,
        )]

    description = "timeout without events" if result.timed_out else "no sink evidence observed"
    return [EvidenceItem(
        evidence_class=EvidenceClass.NEUTRAL,
        description=description,
        source=EvidenceSource.EXIT_BEHAVIOR,
        payload_id=payload.id,
    )]
