from __future__ import annotations

import pytest

from vlf.uast import Language
from vlf.validation import (
    ExecutionRequest,
    ExecutionResult,
    MockResult,
    MockSandboxDriver,
    SandboxSpec,
    assemble_sandbox_command,
    parse_events,
)
from vlf.validation.harness import HarnessBundle

GOLDEN_PYTHON_ARGV = [
    "run", "--rm", "--network=none", "--memory=1g", "--cpus=0.9", "--read-only",
    "-v", "/runs/s1:/work:ro", "--tmpfs", "/tmp:size=256m", "--pids-limit=256",
    "--security-opt", "no-new-privileges", "vlf/sandbox-python:1",
    "python3", "/work/harness.py",
]


def _bundle(entry: list[str]) -> HarnessBundle:
    return HarnessBundle(files={}, entry_command=entry)


class TestAssembleSandboxCommand:
    def test_python_golden_argv(self):
        spec = SandboxSpec.for_language(Language.PYTHON)
        argv = assemble_sandbox_command(spec, _bundle(["python3", "/work/harness.py"]), "/runs/s1")
        assert argv == GOLDEN_PYTHON_ARGV

    def test_java_memory_2g(self):
        spec = SandboxSpec.for_language(Language.JAVA)
        argv = assemble_sandbox_command(spec, _bundle(["java", "Harness"]), "/runs/s2")
        assert "--memory=2g" in argv

    def test_mandatory_isolation_flags(self):
        for language in Language:
            spec = SandboxSpec.for_language(language)
            argv = assemble_sandbox_command(spec, _bundle(["run-me"]), "/runs/x")
            assert "--network=none" in argv
            assert "--cpus=0.9" in argv
            assert "--pids-limit=256" in argv
            assert "--read-only" in argv
            joined = " ".join(argv)
            assert "--security-opt no-new-privileges" in joined
            assert "--tmpfs /tmp:size=256m" in joined

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SandboxSpec(image="x", network="bridge")
        with pytest.raises(ValueError):
            SandboxSpec(image="x", harness_timeout_s=10)


class TestExecutionResult:
    def test_stream_truncation(self):
        result = ExecutionResult(
            exit_code=0, timed_out=False,
            stdout=b"x" * 1_000_000, stderr=b"y" * 300_000,
            events=[], wall_time_ms=5,
        )
        assert len(result.stdout) == 245_760
        assert len(result.stderr) == 245_760

    def test_timeout_clears_exit_code(self):
        result = ExecutionResult(
            exit_code=137, timed_out=True, stdout=b"", stderr=b"", events=[], wall_time_ms=1
        )
        assert result.exit_code is None


class TestParseEvents:
    def test_harness_event_lines(self):
        out = b'noise\nVLF_EVENT {"sink": "execute", "arg": "SELECT 1", "ts": 1.0}\n'
        events = parse_events(out, b"")
        assert len(events) == 1
        assert events[0]["sink"] == "execute"
        assert events[0]["type"] == "harness_event"

    def test_asan_report(self):
        err = b"==1==ERROR: AddressSanitizer: stack-buffer-overflow on address 0x7f\n"
        events = parse_events(b"", err)
        assert events[0]["type"] == "sanitizer_report"
        assert events[0]["kind"] == "stack-buffer-overflow"

    def test_ubsan_report(self):
        err = b"target.cpp:12:7: runtime error: signed integer overflow\n"
        events = parse_events(b"", err)
        assert events[0]["tool"] == "UndefinedBehaviorSanitizer"

    def test_malformed_event_skipped(self):
        events = parse_events(b"VLF_EVENT {broken json\n", b"")
        assert events == []


class TestMockDriver:
    def test_scripted_and_default(self):
        driver = MockSandboxDriver(script={("s", "p1"): MockResult(exit_code=3)})
        spec = SandboxSpec.for_language(Language.PYTHON)
        req1 = ExecutionRequest("s", "p1", _bundle(["x"]), spec, 30)
        req2 = ExecutionRequest("s", "p2", _bundle(["x"]), spec, 30)
        assert driver.execute(req1).exit_code == 3
        assert driver.execute(req2).exit_code == 0  # default clean run
        assert driver.calls == [("s", "p1"), ("s", "p2")]

    def test_from_file(self, tmp_path):
        path = tmp_path / "script.json"
        path.write_text('{"s|p1": {"exit_code": 7, "stderr": "boom"}}')
        driver = MockSandboxDriver.from_file(path)
        spec = SandboxSpec.for_language(Language.PYTHON)
        result = driver.execute(ExecutionRequest("s", "p1", _bundle(["x"]), spec, 30))
        assert result.exit_code == 7
        assert result.stderr == b"boom"
