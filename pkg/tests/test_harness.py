from __future__ import annotations

import pytest

from vlf.errors import UnsupportedVector
from vlf.uast import Language, parse_to_uast
from vlf.validation import RulePlanner, ValidationSample, generate_harness
from vlf.validation.types import ExploitHypothesis, Payload, VulnClass


def _sample(source: str, language: Language) -> ValidationSample:
    doc = parse_to_uast(source.encode(), language)
    return ValidationSample(sample_id="h", source=source, language=language, doc=doc, flag=1)


PY_SRC = 'import os\nimport sys\n\nos.system("ping " + sys.argv[1])\n'
CPP_SRC = '#include <cstring>\n\nint main(int argc, char **argv) {\n    char b[8];\n    strcpy(b, argv[1]);\n    return 0;\n}\n'
JAVA_SRC = 'public class Probe {\n    public static void main(String[] args) throws Exception {\n        Runtime.getRuntime().exec("ping " + args[0]);\n    }\n}\n'


def _hypothesis(vuln_class: VulnClass, vector: str = "argv") -> ExploitHypothesis:
    return ExploitHypothesis(
        vuln_class=vuln_class, attack_vector=vector,
        payloads=[Payload(id="h1p1", data="; echo VLF_MARK_x", marker="VLF_MARK_x")],
        preconditions=[], attempt_index=1,
    )


class TestPythonHarness:
    def test_payload_and_interceptors_present(self):
        sample = _sample(PY_SRC, Language.PYTHON)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION)
        bundle = generate_harness(sample, hyp, hyp.payloads[0])
        harness = bundle.files["harness.py"].decode()
        assert "; echo VLF_MARK_x" in harness
        assert "builtins.open = _open" in harness
        assert "os.system = _system" in harness
        assert "sqlite3.connect = _connect" in harness
        assert bundle.files["target.py"].decode() == PY_SRC
        assert bundle.entry_command == ["python3", "/work/harness.py"]
        assert bundle.compile_command is None

    def test_harness_is_valid_python(self):
        sample = _sample(PY_SRC, Language.PYTHON)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION)
        payload = Payload(id="p", data="tricky ' \" \\ {payload} \n end", marker="VLF_MARK_y")
        bundle = generate_harness(sample, hyp, payload)
        compile(bundle.files["harness.py"].decode(), "harness.py", "exec")

    def test_deterministic_bundle(self):
        sample = _sample(PY_SRC, Language.PYTHON)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION)
        a = generate_harness(sample, hyp, hyp.payloads[0])
        b = generate_harness(sample, hyp, hyp.payloads[0])
        assert a.files == b.files
        assert a.entry_command == b.entry_command

    def test_stdin_vector(self):
        sample = _sample(PY_SRC, Language.PYTHON)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION, vector="stdin")
        bundle = generate_harness(sample, hyp, hyp.payloads[0])
        assert 'VECTOR = \'stdin\'' in bundle.files["harness.py"].decode()

    def test_unsupported_vector(self):
        sample = _sample(PY_SRC, Language.PYTHON)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION)
        hyp.attack_vector = "environment"
        with pytest.raises(UnsupportedVector):
            generate_harness(sample, hyp, hyp.payloads[0])


class TestCppHarness:
    def test_sanitizer_flags_in_compile_command(self):
        sample = _sample(CPP_SRC, Language.CPP)
        hyp = _hypothesis(VulnClass.MEMORY_CORRUPTION)
        bundle = generate_harness(sample, hyp, hyp.payloads[0])
        assert bundle.compile_command is not None
        assert any("-fsanitize=address" in part for part in bundle.compile_command)
        joined = " ".join(bundle.entry_command)
        assert "-fsanitize=address,undefined" in joined
        assert "target_bin" in joined

    def test_payload_shell_quoted(self):
        sample = _sample(CPP_SRC, Language.CPP)
        hyp = _hypothesis(VulnClass.MEMORY_CORRUPTION)
        payload = Payload(id="p", data="a'; rm -rf $HOME'", marker="VLF_MARK_z")
        bundle = generate_harness(sample, hyp, payload)
        joined = " ".join(bundle.entry_command)
        assert "rm -rf $HOME" in joined  # content present
        assert "'a'\"'\"'; rm -rf $HOME'\"'\"''" in joined  # but quoted inert


class TestJavaHarness:
    def test_wrapper_invokes_detected_class(self):
        sample = _sample(JAVA_SRC, Language.JAVA)
        hyp = _hypothesis(VulnClass.COMMAND_INJECTION)
        bundle = generate_harness(sample, hyp, hyp.payloads[0])
        assert "Probe.java" in bundle.files
        harness = bundle.files["Harness.java"].decode()
        assert "Probe.main(" in harness
        assert "VLF_EVENT" in harness
        assert bundle.compile_command is not None
