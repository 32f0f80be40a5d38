from __future__ import annotations

from vlf.validation import EvidenceClass, EvidenceSource, classify_evidence
from vlf.validation.types import ExecutionResult, ExploitHypothesis, Payload, VulnClass


def _payload(marker: str = "VLF_MARK_test1234") -> Payload:
    return Payload(id="h1p1", data=f"' OR 1=1 --{marker}", marker=marker)


def _hypothesis(vuln_class: VulnClass) -> ExploitHypothesis:
    return ExploitHypothesis(
        vuln_class=vuln_class, attack_vector="argv",
        payloads=[_payload()], preconditions=[], attempt_index=1,
    )


def _result(events=None, exit_code=0, stderr=b"", stdout=b"", timed_out=False) -> ExecutionResult:
    return ExecutionResult(
        exit_code=exit_code, timed_out=timed_out, stdout=stdout, stderr=stderr,
        events=events or [], wall_time_ms=40,
    )


class TestConfirmingRules:
    def test_marker_reaching_sql_sink(self):
        payload = _payload()
        result = _result(events=[{
            "type": "harness_event", "sink": "execute",
            "arg": f"SELECT * FROM t WHERE id = '' OR 1=1 --{payload.marker}'",
        }])
        items = classify_evidence(result, _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert [i.evidence_class for i in items] == [EvidenceClass.CONFIRMING]
        assert items[0].source is EvidenceSource.HARNESS_EVENT
        assert items[0].payload_id == payload.id

    def test_sanitizer_report_for_memory_class(self):
        payload = Payload(id="h1p2", data="A" * 128, marker="VLF_MARK_mem")
        result = _result(
            events=[{"type": "sanitizer_report", "tool": "AddressSanitizer",
                     "kind": "stack-buffer-overflow", "detail": "ERROR: AddressSanitizer: stack-buffer-overflow"}],
            exit_code=1,
        )
        items = classify_evidence(result, _hypothesis(VulnClass.MEMORY_CORRUPTION), payload)
        assert items[0].evidence_class is EvidenceClass.CONFIRMING
        assert items[0].source is EvidenceSource.SANITIZER_REPORT

    def test_sanitizer_report_ignored_for_injection_class(self):
        payload = _payload()
        result = _result(events=[{"type": "sanitizer_report", "tool": "AddressSanitizer", "kind": "heap-overflow"}])
        items = classify_evidence(result, _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.NEUTRAL

    def test_file_open_escaping_root(self):
        marker = "VLF_MARK_path1"
        payload = Payload(id="h1p1", data=f"../../../../etc/{marker}", marker=marker)
        result = _result(events=[{
            "type": "harness_event", "sink": "open", "arg": f"data/../../../../etc/{marker}",
        }])
        items = classify_evidence(result, _hypothesis(VulnClass.PATH_TRAVERSAL), payload)
        assert items[0].evidence_class is EvidenceClass.CONFIRMING

    def test_file_open_inside_root_not_confirming(self):
        marker = "VLF_MARK_path2"
        payload = Payload(id="h1p1", data=f"notes/{marker}", marker=marker)
        result = _result(events=[{"type": "harness_event", "sink": "open", "arg": f"notes/{marker}"}])
        items = classify_evidence(result, _hypothesis(VulnClass.PATH_TRAVERSAL), payload)
        assert items[0].evidence_class is EvidenceClass.NEUTRAL

    def test_vector_subprocess_not_confirming(self):
        marker = "VLF_MARK_cmd42"
        payload = Payload(id="h1p1", data=f"; echo {marker}", marker=marker)
        result = _result(events=[{
            "type": "harness_event", "sink": "subprocess",
            "arg": f"['ping', '-c', '1', '; echo {marker}']",
        }])
        items = classify_evidence(result, _hypothesis(VulnClass.COMMAND_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.NEUTRAL

    def test_shell_string_subprocess_confirms(self):
        marker = "VLF_MARK_cmd43"
        payload = Payload(id="h1p1", data=f"; echo {marker}", marker=marker)
        result = _result(events=[{
            "type": "harness_event", "sink": "system", "arg": f"ping -c 1 ; echo {marker}",
        }])
        items = classify_evidence(result, _hypothesis(VulnClass.COMMAND_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.CONFIRMING


class TestSuggestiveAndNeutral:
    def test_exception_with_payload_fragment(self):
        payload = _payload()
        result = _result(
            exit_code=1,
            stderr=f"Traceback (most recent call last):\n  boom near {payload.marker}\n".encode(),
        )
        items = classify_evidence(result, _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.SUGGESTIVE
        assert items[0].source is EvidenceSource.EXIT_BEHAVIOR

    def test_abnormal_exit_without_fragment_is_neutral(self):
        payload = _payload()
        result = _result(exit_code=2, stderr=b"generic failure, nothing echoed")
        items = classify_evidence(result, _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.NEUTRAL

    def test_clean_exit_single_neutral(self):
        payload = _payload()
        items = classify_evidence(_result(), _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert len(items) == 1
        assert items[0].evidence_class is EvidenceClass.NEUTRAL

    def test_timeout_neutral_description(self):
        payload = _payload()
        result = _result(timed_out=True, exit_code=None)
        items = classify_evidence(result, _hypothesis(VulnClass.SQL_INJECTION), payload)
        assert items[0].evidence_class is EvidenceClass.NEUTRAL
        assert "timeout" in items[0].description
