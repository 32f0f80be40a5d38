"""Language-specific instrumented harness generation.

Python harnesses monkeypatch the sensitive surfaces (open, os.system,
subprocess, pickle, sqlite3 cursors) to emit one `VLF_EVENT {json}` line per
intercepted call before delegating to the real implementation. C++ harnesses
compile the target with address/undefined sanitizers and drive it with the
payload. The Java harness is wrapper plumbing only: it logs entry/exit events
around main; bytecode weaving is out of scope.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass
from typing import Optional

from ..errors import TemplateError, UnsupportedVector
from ..uast.types import Language
from .types import ExploitHypothesis, Payload, ValidationSample

EVENT_PREFIX = "VLF_EVENT "

_SUPPORTED_VECTORS = ("argv", "stdin")


@dataclass(frozen=True)
class HarnessBundle:
    files: dict[str, bytes]
    entry_command: list[str]
    compile_command: Optional[list[str]] = None


_PY_HARNESS = '''\
"""Instrumented driver: logs sink calls, then runs the target with the payload."""
import builtins, json, os, pickle, runpy, sqlite3, subprocess, sys, time, traceback

PAYLOAD = {payload!r}
VECTOR = {vector!r}
TARGET = "/work/target.py"


def _emit(sink, arg):
    try:
        rendered = arg if isinstance(arg, str) else repr(arg)
    except Exception:
        rendered = "<unprintable>"
    print("VLF_EVENT " + json.dumps({{"sink": sink, "arg": rendered[:2000], "ts": time.time()}}), flush=True)


_real_open = builtins.open
def _open(file, *args, **kwargs):
    _emit("open", file)
    return _real_open(file, *args, **kwargs)
builtins.open = _open

_real_system = os.system
def _system(cmd):
    _emit("system", cmd)
    return _real_system(cmd)
os.system = _system

_real_popen = os.popen
def _popen(cmd, *args, **kwargs):
    _emit("popen", cmd)
    return _real_popen(cmd, *args, **kwargs)
os.popen = _popen

_real_sp_popen = subprocess.Popen
class _Popen(_real_sp_popen):
    def __init__(self, cmd, *args, **kwargs):
        _emit("subprocess", cmd)
        super().__init__(cmd, *args, **kwargs)
subprocess.Popen = _Popen

_real_loads = pickle.loads
def _loads(data, *args, **kwargs):
    _emit("pickle.loads", data)
    return _real_loads(data, *args, **kwargs)
pickle.loads = _loads

_real_pickle_load = pickle.load
def _pickle_load(fh, *args, **kwargs):
    _emit("pickle.load", getattr(fh, "name", "<stream>"))
    return _real_pickle_load(fh, *args, **kwargs)
pickle.load = _pickle_load


class _CursorProxy:
    def __init__(self, cursor):
        self._cursor = cursor

    def execute(self, query, *args, **kwargs):
        _emit("execute", query)
        return self._cursor.execute(query, *args, **kwargs)

    def executemany(self, query, *args, **kwargs):
        _emit("executemany", query)
        return self._cursor.executemany(query, *args, **kwargs)

    def executescript(self, script, *args, **kwargs):
        _emit("executescript", script)
        return self._cursor.executescript(script, *args, **kwargs)

    def __getattr__(self, name):
        return getattr(self._cursor, name)

    def __iter__(self):
        return iter(self._cursor)


class _ConnProxy:
    def __init__(self, conn):
        self._conn = conn

    def cursor(self, *args, **kwargs):
        return _CursorProxy(self._conn.cursor(*args, **kwargs))

    def execute(self, query, *args, **kwargs):
        _emit("execute", query)
        return self._conn.execute(query, *args, **kwargs)

    def __getattr__(self, name):
        return getattr(self._conn, name)


_real_connect = sqlite3.connect
def _connect(*args, **kwargs):
    return _ConnProxy(_real_connect(*args, **kwargs))
sqlite3.connect = _connect


def main():
    if VECTOR == "argv":
        sys.argv = [TARGET, PAYLOAD]
    else:
        import io
        sys.stdin = io.StringIO(PAYLOAD + "\\n")
        sys.argv = [TARGET]
    try:
        runpy.run_path(TARGET, run_name="__main__")
    except SystemExit:
        raise
    except BaseException:
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
'''

_JAVA_HARNESS = """\
public class Harness {{
    public static void main(String[] args) throws Exception {{
        System.out.println("VLF_EVENT " + "{{\\"sink\\": \\"jvm_start\\", \\"arg\\": {arg_json}, \\"ts\\": 0}}");
        {target_class}.main(new String[] {{ {payload_literal} }});
        System.out.println("VLF_EVENT " + "{{\\"sink\\": \\"jvm_exit\\", \\"arg\\": \\"ok\\", \\"ts\\": 0}}");
    }}
}}
"""


def _java_string_literal(value: str) -> str:
    escaped = (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def _detect_java_class(source: str) -> str:
    match = re.search(r"\bclass\s+(\w+)", source)
    if not match:
        raise TemplateError("no class declaration found in Java sample")
    return match.group(1)


def generate_harness(
    sample: ValidationSample, hypothesis: ExploitHypothesis, payload: Payload
) -> HarnessBundle:
    if hypothesis.attack_vector not in _SUPPORTED_VECTORS:
        raise UnsupportedVector(f"vector {hypothesis.attack_vector!r} not supported")
    if sample.language is Language.PYTHON:
        harness = _PY_HARNESS.format(payload=payload.data, vector=hypothesis.attack_vector)
        return HarnessBundle(
            files={"target.py": sample.source.encode("utf-8"), "harness.py": harness.encode("utf-8")},
            entry_command=["python3", "/work/harness.py"],
        )
    if sample.language is Language.CPP:
        compile_command = [
            "g++", "-fsanitize=address,undefined", "-fno-omit-frame-pointer",
            "-g", "-O1", "/work/target.cpp", "-o", "/tmp/target_bin",
        ]
        if hypothesis.attack_vector == "argv":
            run = f"/tmp/target_bin {shlex.quote(payload.data)}"
        else:
            run = f"printf '%s' {shlex.quote(payload.data)} | /tmp/target_bin"
        entry = ["sh", "-c", " ".join(shlex.quote(p) for p in compile_command) + " && " + run]
        return HarnessBundle(
            files={"target.cpp": sample.source.encode("utf-8")},
            entry_command=entry,
            compile_command=compile_command,
        )
    if sample.language is Language.JAVA:
        target_class = _detect_java_class(sample.source)
        harness = _JAVA_HARNESS.format(
            target_class=target_class,
            payload_literal=_java_string_literal(payload.data),
            arg_json=_java_string_literal(payload.data[:64]).replace('"', '\\"'),
        )
        compile_command = ["javac", "-d", "/tmp", f"/tmp/src/{target_class}.java", "/tmp/src/Harness.java"]
        prep = (
            "mkdir -p /tmp/src && cp /work/*.java /tmp/src/ && "
            + " ".join(shlex.quote(p) for p in compile_command)
            + " && cd /tmp && java Harness"
        )
        if hypothesis.attack_vector == "stdin":
            prep = prep.replace("java Harness", f"printf '%s' {shlex.quote(payload.data)} | java Harness")
        return HarnessBundle(
            files={
                f"{target_class}.java": sample.source.encode("utf-8"),
                "Harness.java": harness.encode("utf-8"),
            },
            entry_command=["sh", "-c", prep],
            compile_command=compile_command,
        )
    raise TemplateError(f"unsupported language {sample.language}")
