from __future__ import annotations

import itertools

import numpy as np
import pytest

from vlf.uast import Language, parse_to_uast
from vlf.validation import (
    MockResult,
    MockSandboxDriver,
    RulePlanner,
    ValidationSample,
    VerdictKind,
    validate_sample,
)
from vlf.validation.types import EvidenceClass

VULNERABLE_SQL = '''import sqlite3
import sys

def fetch(db, user_id):
    cur = db.cursor()
    query = "SELECT email FROM users WHERE id = '" + user_id + "'"
    cur.execute(query)
    return cur.fetchall()

if __name__ == "__main__":
    conn = sqlite3.connect(":memory:")
    fetch(conn, sys.argv[1])
'''

SINKLESS = '''import sys

def tally(values):
    total = 0
    for item in values:
        total += item
    return total

if __name__ == "__main__":
    print(tally([int(x) for x in sys.argv[1:]]))
'''


def make_sample(source: str, sample_id: str = "s1", flag: int = 1) -> ValidationSample:
    doc = parse_to_uast(source.encode(), Language.PYTHON)
    return ValidationSample(sample_id=sample_id, source=source, language=Language.PYTHON, doc=doc, flag=flag)


def confirming_event(planner: RulePlanner, sample: ValidationSample, attempt: int, payload_pos: int) -> dict:
    """Script the event a real sandbox would emit for the given payload."""
    from vlf.validation.types import HypothesisRecord, ValidationTrace

    probe = make_sample(sample.source, sample.sample_id, sample.flag)
    planner_probe = RulePlanner(seed=planner.seed)
    trace = ValidationTrace(sample_id=sample.sample_id, flag_in=sample.flag)
    hyp = None
    for _ in range(attempt):
        probe.prior_trace = trace
        hyp = planner_probe.plan(probe)
        trace.hypotheses.append(HypothesisRecord(hypothesis=hyp))
    payload = hyp.payloads[payload_pos]
    return {
        "type": "harness_event",
        "sink": "execute",
        "arg": f"SELECT ... {payload.data}",
    }


class TestEarlyStop:
    def test_confirm_on_second_payload_stops_at_two_executions(self):
        sample = make_sample(VULNERABLE_SQL)
        planner = RulePlanner(seed=5)
        event = confirming_event(planner, sample, attempt=1, payload_pos=1)
        driver = MockSandboxDriver(script={("s1", "h1p2"): MockResult(events=[event])})
        trace = validate_sample(sample, 1, planner, driver)
        assert trace.verdict.kind is VerdictKind.EXPLOITED
        assert len(driver.calls) == 2
        assert trace.stopped_early
        confirm_count = sum(
            1 for item in trace.all_evidence() if item.evidence_class is EvidenceClass.CONFIRMING
        )
        assert trace.verdict.confirming_count == confirm_count >= 1

    def test_exhaustive_early_stop_positions(self):
        # confirming at hypothesis h, payload p => exactly (h-1)*3 + p executions
        for h, p in itertools.product(range(1, 6), range(1, 4)):
            sample = make_sample(VULNERABLE_SQL)
            planner = RulePlanner(seed=9)
            event = confirming_event(planner, sample, attempt=h, payload_pos=p - 1)
            driver = MockSandboxDriver(script={("s1", f"h{h}p{p}"): MockResult(events=[event])})
            trace = validate_sample(sample, 1, planner, driver)
            assert trace.verdict.kind is VerdictKind.EXPLOITED, (h, p)
            assert len(driver.calls) == (h - 1) * 3 + p, (h, p)
            assert driver.calls[-1] == ("s1", f"h{h}p{p}")


class TestBudgets:
    def test_flag1_all_neutral_exhausts_protocol(self):
        sample = make_sample(VULNERABLE_SQL)
        driver = MockSandboxDriver()
        trace = validate_sample(sample, 1, RulePlanner(seed=1), driver)
        assert trace.verdict.kind is VerdictKind.NOT_EXPLOITED
        assert len(trace.hypotheses) == 5
        assert all(1 <= len(h.executions) <= 5 for h in trace.hypotheses)
        assert len(driver.calls) == 15  # 5 hypotheses x 3 payloads
        assert not trace.stopped_early

    def test_flag0_limited_probing(self):
        sample = make_sample(VULNERABLE_SQL, flag=0)
        driver = MockSandboxDriver()
        trace = validate_sample(sample, 0, RulePlanner(seed=1), driver)
        assert len(trace.hypotheses) == 1
        assert 1 <= len(trace.hypotheses[0].executions) <= 2
        assert trace.verdict.kind is VerdictKind.NOT_EXPLOITED

    def test_wall_budget_caps_hypothesis(self):
        # each execution burns 25s: only 3 payloads fit a 60s budget, and the
        # third starts with <=10s remaining
        sample = make_sample(VULNERABLE_SQL)
        driver = MockSandboxDriver(default=MockResult(wall_time_ms=25_000))
        trace = validate_sample(sample, 1, RulePlanner(seed=2), driver)
        for record in trace.hypotheses:
            assert len(record.executions) <= 3
        assert trace.total_wall_ms <= 5 * (60_000 + 25_000)

    def test_flag0_budget(self):
        sample = make_sample(VULNERABLE_SQL, flag=0)
        driver = MockSandboxDriver(default=MockResult(wall_time_ms=14_000))
        trace = validate_sample(sample, 0, RulePlanner(seed=2), driver)
        assert len(driver.calls) == 2  # second starts with 1s remaining
        assert trace.total_wall_ms <= 15_000 + 14_000


class TestVerdicts:
    def test_suggestive_only_inconclusive(self):
        sample = make_sample(VULNERABLE_SQL, flag=0)
        planner = RulePlanner(seed=3)
        # abnormal exit echoing the payload marker
        probe = make_sample(VULNERABLE_SQL, flag=0)
        hyp = RulePlanner(seed=3).plan(probe)
        marker = hyp.payloads[0].marker
        driver = MockSandboxDriver(default=MockResult(
            exit_code=1, stderr=f"Traceback ... {marker}".encode()
        ))
        trace = validate_sample(sample, 0, planner, driver)
        assert trace.verdict.kind is VerdictKind.INCONCLUSIVE
        assert trace.verdict.confirming_count == 0
        assert trace.verdict.suggestive_count >= 1

    def test_no_sinks_records_neutral_attempt(self):
        sample = make_sample(SINKLESS)
        driver = MockSandboxDriver()
        trace = validate_sample(sample, 1, RulePlanner(seed=1), driver)
        assert trace.verdict.kind is VerdictKind.NOT_EXPLOITED
        assert len(trace.hypotheses) == 1
        assert trace.hypotheses[0].hypothesis is None
        assert len(driver.calls) == 0

    def test_verdict_soundness_over_scripted_combinations(self):
        # every combination of evidence kinds across two executions
        kinds = ["confirm", "suggest", "neutral"]
        planner_seed = 7
        for combo in itertools.product(kinds, repeat=2):
            sample = make_sample(VULNERABLE_SQL)
            probe = make_sample(VULNERABLE_SQL)
            hyp = RulePlanner(seed=planner_seed).plan(probe)
            script = {}
            for pos, kind in enumerate(combo):
                payload = hyp.payloads[pos]
                key = ("s1", payload.id)
                if kind == "confirm":
                    script[key] = MockResult(events=[{
                        "type": "harness_event", "sink": "execute",
                        "arg": f"q {payload.data}",
                    }])
                elif kind == "suggest":
                    script[key] = MockResult(exit_code=1, stderr=f"Traceback {payload.marker}".encode())
                else:
                    script[key] = MockResult()
            driver = MockSandboxDriver(script=script)
            trace = validate_sample(sample, 1, RulePlanner(seed=planner_seed), driver)
            items = trace.all_evidence()
            confirming = sum(1 for i in items if i.evidence_class is EvidenceClass.CONFIRMING)
            assert (trace.verdict.kind is VerdictKind.EXPLOITED) == (confirming >= 1), combo
            if confirming:
                first_confirm_pos = combo.index("confirm")
                assert len(driver.calls) == first_confirm_pos + 1, combo


class TestDeterminism:
    def test_identical_traces_under_fixed_seed(self):
        for flag in (0, 1):
            t1 = validate_sample(make_sample(VULNERABLE_SQL, flag=flag), flag, RulePlanner(seed=4), MockSandboxDriver())
            t2 = validate_sample(make_sample(VULNERABLE_SQL, flag=flag), flag, RulePlanner(seed=4), MockSandboxDriver())
            assert t1.to_json() == t2.to_json()


class TestStreamCap:
    def test_no_stored_stream_exceeds_cap(self):
        sample = make_sample(VULNERABLE_SQL)
        driver = MockSandboxDriver(default=MockResult(stdout=b"z" * 500_000, stderr=b"w" * 500_000))
        trace = validate_sample(sample, 1, RulePlanner(seed=1), driver)
        for record in trace.hypotheses:
            for execution in record.executions:
                if execution.result:
                    assert len(execution.result.stdout) <= 245_760
                    assert len(execution.result.stderr) <= 245_760
