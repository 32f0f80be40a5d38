"""Plan-execute-verify loop converting detector flags into verdicts.

Asymmetric protocol: flagged samples get up to five hypotheses, 3-5 payloads
each under a 60-second per-hypothesis wall budget; unflagged samples get one
hypothesis with 1-2 generic payloads under 15 seconds total. Execution stops
immediately at the first Confirming item. Planner exhaustion and harness
failures are recorded in the trace, never raised.
"""

from __future__ import annotations

import math

from ..errors import NoHypothesis, PlannerUnavailable, TemplateError, UnsupportedVector
from .evidence import classify_evidence
from .harness import generate_harness
from .sandbox import ExecutionRequest
from .types import (
    BUDGET_MS_FLAGGED,
    BUDGET_MS_UNFLAGGED,
    MAX_HYPOTHESES_FLAGGED,
    MAX_HYPOTHESES_UNFLAGGED,
    PAYLOADS_FLAGGED,
    PAYLOADS_UNFLAGGED,
    EvidenceClass,
    EvidenceItem,
    EvidenceSource,
    HypothesisRecord,
    PayloadExecution,
    SandboxSpec,
    ValidationSample,
    ValidationTrace,
    Verdict,
)


def _neutral_item(payload_id: str, description: str) -> EvidenceItem:
    return EvidenceItem(
        evidence_class=EvidenceClass.NEUTRAL,
        description=description,
        source=EvidenceSource.EXIT_BEHAVIOR,
        payload_id=payload_id,
    )


def validate_sample(
    sample: ValidationSample,
    flag: int,
    planner,
    driver,
    spec: SandboxSpec | None = None,
) -> ValidationTrace:
    spec = spec or SandboxSpec.for_language(sample.language)
    if flag == 1:
        max_hypotheses = MAX_HYPOTHESES_FLAGGED
        budget_ms = BUDGET_MS_FLAGGED
        payload_cap = PAYLOADS_FLAGGED[1]
    else:
        max_hypotheses = MAX_HYPOTHESES_UNFLAGGED
        budget_ms = BUDGET_MS_UNFLAGGED
        payload_cap = PAYLOADS_UNFLAGGED[1]

    trace = ValidationTrace(sample_id=sample.sample_id, flag_in=flag)
    confirming = 0
    suggestive = 0

    for _ in range(max_hypotheses):
        sample.prior_trace = trace
        try:
            hypothesis = planner.plan(sample)
        except NoHypothesis as exc:
            record = HypothesisRecord(hypothesis=None, note=str(exc))
            record.executions.append(
                PayloadExecution(
                    payload=_no_payload(),
                    result=None,
                    evidence=[_neutral_item("none", f"planner found no hypothesis: {exc}")],
                )
            )
            trace.hypotheses.append(record)
            break
        except PlannerUnavailable as exc:
            record = HypothesisRecord(hypothesis=None, note=f"planner unavailable: {exc}")
            trace.hypotheses.append(record)
            break

        record = HypothesisRecord(hypothesis=hypothesis)
        trace.hypotheses.append(record)
        spent_ms = 0
        for payload in hypothesis.payloads[:payload_cap]:
            remaining = budget_ms - spent_ms
            if remaining <= 0:
                break
            timeout_s = min(spec.harness_timeout_s, max(1, math.ceil(remaining / 1000)))
            try:
                bundle = generate_harness(sample, hypothesis, payload)
            except (UnsupportedVector, TemplateError) as exc:
                record.executions.append(PayloadExecution(
                    payload=payload, result=None,
                    evidence=[_neutral_item(payload.id, f"harness generation failed: {exc}")],
                ))
                continue
            result = driver.execute(ExecutionRequest(
                sample_id=sample.sample_id,
                payload_id=payload.id,
                bundle=bundle,
                spec=spec,
                timeout_s=timeout_s,
            ))
            evidence = classify_evidence(result, hypothesis, payload)
            record.executions.append(PayloadExecution(payload=payload, result=result, evidence=evidence))
            spent_ms += result.wall_time_ms
            trace.total_wall_ms += result.wall_time_ms
            confirming += sum(1 for e in evidence if e.evidence_class is EvidenceClass.CONFIRMING)
            suggestive += sum(1 for e in evidence if e.evidence_class is EvidenceClass.SUGGESTIVE)
            if confirming:
                trace.stopped_early = True
                break
        if confirming:
            break

    sample.prior_trace = None
    trace.verdict = Verdict.from_counts(confirming, suggestive)
    return trace


def _no_payload():
    from .types import Payload

    return Payload(id="none", data="", marker="VLF_MARK_none")
