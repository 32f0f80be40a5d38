from __future__ import annotations

import numpy as np
import pytest

from vlf.errors import GateViolation, OverlappingEdits, SyntaxRejected, UnpatchableClass
from vlf.fusion import init_model
from vlf.repair import (
    PatchEdit,
    RepairPrompt,
    SpanEdit,
    TemplatePatchGenerator,
    apply_patch,
    build_repair_prompt,
    differential_analysis,
    generate_patch,
    repair_sample,
)
from vlf.uast import Language, parse_to_uast
from vlf.validation import MockResult, MockSandboxDriver, RulePlanner, ValidationSample, validate_sample
from vlf.validation.types import (
    EvidenceClass,
    EvidenceItem,
    EvidenceSource,
    ExecutionResult,
    ExploitHypothesis,
    HypothesisRecord,
    Payload,
    PayloadExecution,
    ValidationTrace,
    Verdict,
    VulnClass,
)

SQL_SRC = '''import sqlite3
import sys


def fetch(cur, user_id):
    query = "SELECT email FROM users WHERE id = '" + user_id + "'"
    cur.execute(query)
    return cur.fetchall()


if __name__ == "__main__":
    db = sqlite3.connect(":memory:")
    print(fetch(db.cursor(), sys.argv[1]))
'''

CMD_SRC = '''import os
import sys


def probe(host):
    command = "ping -c 1 " + host
    return os.system(command)


if __name__ == "__main__":
    print(probe(sys.argv[1]))
'''

PATH_SRC = '''import os
import sys


def read_entry(name):
    target = "data/" + name
    fh = open(target)
    data = fh.read()
    fh.close()
    return data


if __name__ == "__main__":
    print(read_entry(sys.argv[1]))
'''

DESER_SRC = '''import pickle
import sys


def restore(blob):
    data = blob.encode("latin-1")
    return pickle.loads(data)


if __name__ == "__main__":
    print(repr(restore(sys.argv[1])))
'''

JAVA_CMD_SRC = '''public class Target {
    static int probe(String host) throws Exception {
        Process proc = Runtime.getRuntime().exec("ping -c 1 " + host);
        return proc.waitFor();
    }

    public static void main(String[] args) throws Exception {
        System.out.println(probe(args[0]));
    }
}
'''


def make_sample(source: str, language: Language = Language.PYTHON) -> ValidationSample:
    doc = parse_to_uast(source.encode(), language)
    return ValidationSample(sample_id="r1", source=source, language=language, doc=doc, flag=1)


def exploited_trace(sample: ValidationSample, vuln_class: VulnClass) -> ValidationTrace:
    payload = Payload(id="h1p1", data="' OR 1=1 --VLF_MARK_fix1", marker="VLF_MARK_fix1")
    hypothesis = ExploitHypothesis(
        vuln_class=vuln_class, attack_vector="argv",
        payloads=[payload], preconditions=[], attempt_index=1,
    )
    item = EvidenceItem(
        evidence_class=EvidenceClass.CONFIRMING,
        description="payload marker reached sink `execute`",
        source=EvidenceSource.HARNESS_EVENT,
        payload_id=payload.id,
    )
    execution = PayloadExecution(
        payload=payload,
        result=ExecutionResult(exit_code=0, timed_out=False, stdout=b"", stderr=b"", events=[], wall_time_ms=10),
        evidence=[item],
    )
    trace = ValidationTrace(sample_id=sample.sample_id, flag_in=1)
    trace.hypotheses.append(HypothesisRecord(hypothesis=hypothesis, executions=[execution]))
    trace.verdict = Verdict.from_counts(1, 0)
    trace.stopped_early = True
    return trace


def not_exploited_trace(sample: ValidationSample) -> ValidationTrace:
    trace = ValidationTrace(sample_id=sample.sample_id, flag_in=1)
    trace.verdict = Verdict.from_counts(0, 0)
    return trace


class TestBuildRepairPrompt:
    def test_extracts_confirming_payload(self):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.SQL_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        assert prompt.exploit_payload.id == "h1p1"
        assert "execute" in prompt.observed_behavior
        assert prompt.prior_attempts == []

    def test_prior_attempts_carried(self):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.SQL_INJECTION)
        patch = PatchEdit(edits=[SpanEdit(0, 0, "x")])
        prompt = build_repair_prompt(sample, trace, prior=[(patch, "rejected")])
        assert len(prompt.prior_attempts) == 1

    def test_gate_on_not_exploited(self):
        sample = make_sample(SQL_SRC)
        with pytest.raises(GateViolation):
            build_repair_prompt(sample, not_exploited_trace(sample), prior=[])


class TestApplyPatch:
    def test_empty_patch_is_identity(self):
        patched, doc = apply_patch(SQL_SRC, PatchEdit(edits=[]), Language.PYTHON)
        assert patched == SQL_SRC
        assert not doc.has_errors

    def test_equal_length_replacement(self):
        src = "x = 1\n"
        patched, _ = apply_patch(src, PatchEdit(edits=[SpanEdit(4, 5, "2")]), Language.PYTHON)
        assert patched == "x = 2\n"

    def test_syntax_rejection(self):
        src = "def f():\n    return 1\n"
        bad = PatchEdit(edits=[SpanEdit(0, len(src.encode()), "def f(:")])
        with pytest.raises(SyntaxRejected):
            apply_patch(src, bad, Language.PYTHON)

    def test_overlapping_edits_rejected(self):
        with pytest.raises(OverlappingEdits):
            apply_patch("abcdef", PatchEdit(edits=[SpanEdit(0, 3, "x"), SpanEdit(2, 4, "y")]), Language.PYTHON)

    def test_out_of_bounds_rejected(self):
        with pytest.raises(OverlappingEdits):
            apply_patch("ab", PatchEdit(edits=[SpanEdit(0, 99, "x")]), Language.PYTHON)

    def test_locality(self):
        src = SQL_SRC
        patch = PatchEdit(edits=[SpanEdit(10, 13, "xyz")])
        patched, _ = apply_patch(src, patch, Language.PYTHON)
        raw, new = src.encode(), patched.encode()
        assert raw[:10] == new[:10]
        assert raw[13:] == new[13:]


class TestTemplateGenerator:
    def test_sql_parameterization(self):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.SQL_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, _ = apply_patch(SQL_SRC, patch, Language.PYTHON)
        assert "WHERE id = ?" in patched
        assert "cur.execute(query, (user_id,))" in patched
        assert '+ user_id +' not in patched

    def test_command_vectorization(self):
        sample = make_sample(CMD_SRC)
        trace = exploited_trace(sample, VulnClass.COMMAND_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, _ = apply_patch(CMD_SRC, patch, Language.PYTHON)
        assert "subprocess.run(command, check=False)" in patched
        assert '["ping", "-c", "1", host]' in patched
        assert "import subprocess" in patched
        assert "os.system(command)" not in patched

    def test_path_guard_insertion(self):
        sample = make_sample(PATH_SRC)
        trace = exploited_trace(sample, VulnClass.PATH_TRAVERSAL)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, doc = apply_patch(PATH_SRC, patch, Language.PYTHON)
        assert "os.path.realpath" in patched
        assert "safe_path" in patched
        assert "raise ValueError" in patched
        assert not doc.has_errors

    def test_deserialization_allowlist(self):
        sample = make_sample(DESER_SRC)
        trace = exploited_trace(sample, VulnClass.INSECURE_DESERIALIZATION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, doc = apply_patch(DESER_SRC, patch, Language.PYTHON)
        assert "_AllowlistUnpickler" in patched
        assert "_safe_loads(data)" in patched
        assert "pickle.loads(data)" not in patched
        assert not doc.has_errors

    def test_java_command_vectorization(self):
        sample = make_sample(JAVA_CMD_SRC, Language.JAVA)
        trace = exploited_trace(sample, VulnClass.COMMAND_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, doc = apply_patch(JAVA_CMD_SRC, patch, Language.JAVA)
        assert 'new ProcessBuilder("ping", "-c", "1", host).start()' in patched
        assert not doc.has_errors

    def test_unpatchable_class(self):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.OTHER)
        prompt = build_repair_prompt(sample, trace, prior=[])
        with pytest.raises(UnpatchableClass):
            generate_patch(prompt, TemplatePatchGenerator())

    def test_deterministic(self):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.SQL_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        a = generate_patch(prompt, TemplatePatchGenerator())
        b = generate_patch(prompt, TemplatePatchGenerator())
        assert a.to_json() == b.to_json()


class TestDifferentialAnalysis:
    def test_identity_patch_passes(self):
        doc = parse_to_uast(SQL_SRC.encode(), Language.PYTHON)
        result = differential_analysis(doc, doc, PatchEdit(edits=[]))
        assert result.passed

    def test_in_span_edit_passes(self):
        sample = make_sample(CMD_SRC)
        trace = exploited_trace(sample, VulnClass.COMMAND_INJECTION)
        prompt = build_repair_prompt(sample, trace, prior=[])
        patch = generate_patch(prompt, TemplatePatchGenerator())
        patched, patched_doc = apply_patch(CMD_SRC, patch, Language.PYTHON)
        original_doc = parse_to_uast(CMD_SRC.encode(), Language.PYTHON)
        result = differential_analysis(original_doc, patched_doc, patch)
        assert result.passed, result.out_of_span_changes

    def test_out_of_span_rename_fails(self):
        original_doc = parse_to_uast(CMD_SRC.encode(), Language.PYTHON)
        patch = PatchEdit(edits=[SpanEdit(31, 35, "scan")])  # claims to touch only `probe`
        mutated = CMD_SRC.replace("def probe", "def scan").replace("print(probe", "print(scan")
        mutated_doc = parse_to_uast(mutated.encode(), Language.PYTHON)
        result = differential_analysis(original_doc, mutated_doc, patch)
        assert not result.passed
        assert result.out_of_span_changes


class _FlagModel:
    """detect() stub wiring: always reports the given flags in order."""


class TestRepairLoop:
    @pytest.fixture(scope="class")
    def always_safe_model(self):
        # zero classifier biased hard toward "safe"
        model = init_model(77)
        model.clf.w[...] = 0.0
        model.clf.b[...] = np.array([20.0, -20.0])
        return model

    @pytest.fixture(scope="class")
    def always_vuln_model(self):
        model = init_model(78)
        model.clf.w[...] = 0.0
        model.clf.b[...] = np.array([-20.0, 20.0])
        return model

    def test_success_on_first_iteration(self, always_safe_model):
        sample = make_sample(CMD_SRC)
        trace = exploited_trace(sample, VulnClass.COMMAND_INJECTION)
        outcome = repair_sample(sample, trace, always_safe_model, TemplatePatchGenerator())
        assert outcome.kind == "Success"
        assert outcome.iterations_used == 1
        assert outcome.final_detection.flag == 0
        assert "subprocess.run" in outcome.patched_source

    def test_never_converges_when_detector_always_flags(self, always_vuln_model):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.SQL_INJECTION)
        outcome = repair_sample(sample, trace, always_vuln_model, TemplatePatchGenerator())
        assert outcome.kind == "NonConvergent"
        assert 1 <= outcome.iterations_used <= 5
        assert len(outcome.trace.attempts) == outcome.iterations_used
        for attempt in outcome.trace.attempts:
            assert attempt.rejection_reason or attempt.re_detect_flag is not None
        assert outcome.trace.persistent_indicators

    def test_gate_violation(self, always_safe_model):
        sample = make_sample(SQL_SRC)
        with pytest.raises(GateViolation):
            repair_sample(sample, not_exploited_trace(sample), always_safe_model, TemplatePatchGenerator())

    def test_gate_fuzz_never_generates_for_non_exploited(self, always_safe_model):
        rng = np.random.default_rng(0)

        class CountingGenerator(TemplatePatchGenerator):
            calls = 0

            def generate(self, prompt):
                CountingGenerator.calls += 1
                return super().generate(prompt)

        generator = CountingGenerator()
        sample = make_sample(SQL_SRC)
        violations = 0
        for _ in range(250):
            confirming = int(rng.integers(0, 2))
            suggestive = int(rng.integers(0, 3))
            trace = ValidationTrace(sample_id="f", flag_in=1)
            trace.verdict = Verdict.from_counts(confirming, suggestive)
            if confirming:
                trace.hypotheses = exploited_trace(sample, VulnClass.SQL_INJECTION).hypotheses
            before = CountingGenerator.calls
            try:
                repair_sample(sample, trace, always_safe_model, generator)
                if trace.verdict.kind.value != "Exploited":
                    violations += 1
            except GateViolation:
                if CountingGenerator.calls != before:
                    violations += 1
        assert violations == 0

    def test_unpatchable_breaks_with_complete_trace(self, always_vuln_model):
        sample = make_sample(SQL_SRC)
        trace = exploited_trace(sample, VulnClass.OTHER)
        outcome = repair_sample(sample, trace, always_vuln_model, TemplatePatchGenerator())
        assert outcome.kind == "NonConvergent"
        assert len(outcome.trace.attempts) == 1
        assert "no rewrite template" in outcome.trace.attempts[0].rejection_reason \
            or "sink found" in outcome.trace.attempts[0].rejection_reason
