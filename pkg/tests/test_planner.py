from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from vlf.errors import NoHypothesis, PlannerUnavailable
from vlf.uast import Language, parse_to_uast
from vlf.validation import RulePlanner, RemotePlanner, ValidationSample, find_sinks
from vlf.validation.types import HypothesisRecord, ValidationTrace, VulnClass

SQL_SRC = '''import sqlite3
import sys

def fetch(cur, user_id):
    query = "SELECT email FROM users WHERE id = '" + user_id + "'"
    cur.execute(query)
    return cur.fetchall()
'''

CMD_SRC = '''import os
import sys

def probe(host):
    return os.system("ping -c 1 " + host)
'''

CPP_MEM_SRC = '''#include <cstring>

void copy(const char *input) {
    char buf[16];
    strcpy(buf, input);
}
'''

NO_SINK = "def add(a, b):\n    return a + b\n"


def make_sample(source: str, language=Language.PYTHON, flag=1) -> ValidationSample:
    doc = parse_to_uast(source.encode(), language)
    return ValidationSample(sample_id="p1", source=source, language=language, doc=doc, flag=flag)


class TestFindSinks:
    def test_sql_sink_with_assignment_taint(self):
        hits = find_sinks(make_sample(SQL_SRC))
        sql = [h for h in hits if h.vuln_class is VulnClass.SQL_INJECTION]
        assert sql
        assert any(h.tainted for h in sql)

    def test_direct_concat_taint(self):
        hits = find_sinks(make_sample(CMD_SRC))
        assert any(h.vuln_class is VulnClass.COMMAND_INJECTION and h.tainted for h in hits)

    def test_cpp_memory_sink(self):
        hits = find_sinks(make_sample(CPP_MEM_SRC, Language.CPP))
        assert any(h.vuln_class is VulnClass.MEMORY_CORRUPTION for h in hits)

    def test_no_sinks(self):
        assert find_sinks(make_sample(NO_SINK)) == []


class TestRulePlanner:
    def test_sql_hypothesis_with_classic_payload(self):
        hyp = RulePlanner(seed=5).plan(make_sample(SQL_SRC))
        assert hyp.vuln_class is VulnClass.SQL_INJECTION
        assert any("' OR '1'='1' --" in p.data for p in hyp.payloads)
        assert hyp.attempt_index == 1
        assert 3 <= len(hyp.payloads) <= 5
        assert all(p.marker and p.marker in p.data for p in hyp.payloads)

    def test_flag0_generic_payload_budget(self):
        hyp = RulePlanner(seed=5).plan(make_sample(SQL_SRC, flag=0))
        assert 1 <= len(hyp.payloads) <= 2

    def test_no_hypothesis_on_sinkless_source(self):
        with pytest.raises(NoHypothesis):
            RulePlanner(seed=5).plan(make_sample(NO_SINK))

    def test_refinement_switches_family(self):
        planner = RulePlanner(seed=5)
        sample = make_sample(SQL_SRC)
        first = planner.plan(sample)
        trace = ValidationTrace(sample_id="p1", flag_in=1)
        trace.hypotheses.append(HypothesisRecord(hypothesis=first))
        sample.prior_trace = trace
        second = planner.plan(sample)
        assert second.attempt_index == 2
        assert second.family != first.family
        assert first.payloads[0].marker != second.payloads[0].marker

    def test_deterministic_per_seed(self):
        a = RulePlanner(seed=9).plan(make_sample(SQL_SRC))
        b = RulePlanner(seed=9).plan(make_sample(SQL_SRC))
        assert a.to_json() == b.to_json()


class _PlanHandler(BaseHTTPRequestHandler):
    status = 200

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        request = json.loads(self.rfile.read(length))
        assert "language" in request and "source" in request and "flag" in request
        if self.status != 200:
            self.send_response(self.status)
            self.end_headers()
            return
        body = json.dumps({
            "vuln_class": "SqlInjection",
            "attack_vector": "argv",
            "payloads": [{"id": "h1p1", "data": "' OR 1=1 --VLF_MARK_remote1", "marker": "VLF_MARK_remote1"}],
            "preconditions": [],
            "attempt_index": 1,
            "family": "remote",
        }).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def plan_server():
    server = HTTPServer(("127.0.0.1", 0), _PlanHandler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield server
    server.shutdown()


class TestRemotePlanner:
    def test_round_trip(self, plan_server):
        _PlanHandler.status = 200
        planner = RemotePlanner(f"http://127.0.0.1:{plan_server.server_port}")
        hyp = planner.plan(make_sample(SQL_SRC))
        assert hyp.vuln_class is VulnClass.SQL_INJECTION
        assert hyp.payloads[0].marker == "VLF_MARK_remote1"

    def test_non_200(self, plan_server):
        _PlanHandler.status = 500
        planner = RemotePlanner(f"http://127.0.0.1:{plan_server.server_port}")
        with pytest.raises(PlannerUnavailable):
            planner.plan(make_sample(SQL_SRC))
        _PlanHandler.status = 200

    def test_unreachable(self):
        planner = RemotePlanner("http://127.0.0.1:1")
        with pytest.raises(PlannerUnavailable):
            planner.plan(make_sample(SQL_SRC))
