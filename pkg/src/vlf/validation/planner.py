"""Exploit hypothesis planners.

The rule planner scans the uAST for known sink calls and taint-shaped
arguments, then draws class-specific payload families. Refinement cycles
through families across attempts with fresh markers. The remote planner
forwards the same inputs over HTTP for an LLM-backed implementation.
"""

from __future__ import annotations

import hashlib
import json
import string
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from ..errors import NoHypothesis, PlannerUnavailable
from ..uast.document import node_at, node_source
from ..uast.taxonomy import UniversalCategory
from ..uast.types import Language
from .types import (
    PAYLOADS_FLAGGED,
    PAYLOADS_UNFLAGGED,
    ExploitHypothesis,
    Payload,
    ValidationSample,
    VulnClass,
)

# Sink tables: pattern -> matched against the callee text of CALL and
# OBJECT_CREATION nodes. A leading '.' means suffix match on a method chain.
_SINKS: dict[Language, dict[VulnClass, tuple[str, ...]]] = {
    Language.PYTHON: {
        VulnClass.SQL_INJECTION: (".execute", ".executemany", ".executescript"),
        VulnClass.COMMAND_INJECTION: ("os.system", "os.popen", "subprocess.call", "subprocess.run", "subprocess.Popen", "subprocess.check_output"),
        VulnClass.INSECURE_DESERIALIZATION: ("pickle.loads", "pickle.load", "yaml.load", "marshal.loads"),
        VulnClass.PATH_TRAVERSAL: ("open", "io.open", "os.open"),
    },
    Language.JAVA: {
        VulnClass.SQL_INJECTION: (".executeQuery", ".executeUpdate", ".execute"),
        VulnClass.COMMAND_INJECTION: (".exec",),
        VulnClass.INSECURE_DESERIALIZATION: (".readObject",),
        VulnClass.PATH_TRAVERSAL: ("new FileInputStream", "new FileReader", "Files.newInputStream"),
    },
    Language.CPP: {
        VulnClass.SQL_INJECTION: ("mysql_query", "sqlite3_exec"),
        VulnClass.COMMAND_INJECTION: ("system", "popen", "execl", "execlp"),
        VulnClass.MEMORY_CORRUPTION: ("strcpy", "strcat", "sprintf", "gets"),
        VulnClass.PATH_TRAVERSAL: ("fopen", ".open"),
    },
}

_TAINT_HINTS = ("+", "%", ".format(", 'f"', "f'", "concat", "<<")

# Payload families per class; {m} is replaced with the run marker.
_FAMILIES: dict[VulnClass, list[tuple[str, list[str]]]] = {
    VulnClass.SQL_INJECTION: [
        ("quote-or", ["' OR '1'='1' --{m}", "' OR 1=1 --{m}", "\" OR \"1\"=\"1\" --{m}"]),
        ("union-select", ["' UNION SELECT null --{m}", "'; SELECT 1 --{m}", "' OR 'a'='a' --{m}"]),
    ],
    VulnClass.COMMAND_INJECTION: [
        ("separator", ["; echo {m}", "&& echo {m}", "| echo {m}"]),
        ("subshell", ["$(echo {m})", "`echo {m}`", "; printf '%s' {m}"]),
    ],
    VulnClass.PATH_TRAVERSAL: [
        ("dotdot", ["../../../../tmp/{m}", "../../../../../etc/{m}", "../../{m}/cfg"]),
        ("absolute", ["/etc/{m}", "/tmp/{m}/x", "/proc/self/{m}"]),
    ],
    VulnClass.INSECURE_DESERIALIZATION: [
        ("pickle-reduce", [
            "cos\nsystem\n(S'echo {m}'\ntR.",
            "cposix\nsystem\n(S'echo {m}'\ntR.",
            "c__builtin__\neval\n(S'print(\"{m}\")'\ntR.",
        ]),
        ("yaml-object", [
            "!!python/object/apply:os.system ['echo {m}']",
            "!!python/object/apply:subprocess.check_output [['echo', '{m}']]",
            "!!python/name:os.system {m}",
        ]),
    ],
    VulnClass.MEMORY_CORRUPTION: [
        ("overflow", ["{aaa128}{m}", "{aaa512}{m}", "{aaa2048}{m}"]),
        ("format-string", ["%n%n%n%n{m}", "%s%s%s%s%s{m}", "%x%x%x%x{m}"]),
    ],
    VulnClass.OTHER: [
        ("generic", ["{m}", "'\"<>&;{m}"]),
    ],
}

_CLASS_ORDER = [
    VulnClass.SQL_INJECTION,
    VulnClass.COMMAND_INJECTION,
    VulnClass.PATH_TRAVERSAL,
    VulnClass.INSECURE_DESERIALIZATION,
    VulnClass.MEMORY_CORRUPTION,
]


@dataclass(frozen=True)
class SinkHit:
    vuln_class: VulnClass
    callee: str
    node_index: int
    tainted: bool


def _callee_text(sample: ValidationSample, node_index: int) -> tuple[str, str]:
    """Returns (callee text, argument text) for a call-like node."""
    node = node_at(sample.doc, node_index)
    arg_start = node.span.end_byte
    arg_text = ""
    for child_index in node.children:
        child = node_at(sample.doc, child_index)
        if child.native_type == "argument_list":
            arg_start = child.span.start_byte
            arg_text = node_source(sample.doc, sample.source.encode("utf-8"), child_index)
            break
    raw = sample.source.encode("utf-8")[node.span.start_byte : arg_start]
    return raw.decode("utf-8", "replace").strip(), arg_text


def _matches(callee: str, pattern: str) -> bool:
    if pattern.startswith("."):
        return callee.endswith(pattern)
    if pattern.startswith("new "):
        return callee.replace("  ", " ").startswith(pattern)
    return callee == pattern or callee.endswith("::" + pattern) or callee.endswith("." + pattern)


def _concat_assignments(sample: ValidationSample) -> set[str]:
    """Names assigned (or declared) from expressions showing taint hints."""
    names: set[str] = set()
    doc = sample.doc
    raw = sample.source.encode("utf-8")
    assigned = list(doc.category_index.get(UniversalCategory.VARIABLE_ASSIGNMENT, ()))
    assigned += list(doc.category_index.get(UniversalCategory.VARIABLE_DECLARATION, ()))
    for idx in assigned:
        node = node_at(doc, idx)
        eq_pos = None
        name = None
        for child_index in node.children:
            child = node_at(doc, child_index)
            if child.native_type == "identifier" and eq_pos is None:
                name = child.text
            if child.native_type == "=":
                eq_pos = child.span.end_byte
                break
        if name is None or eq_pos is None:
            continue
        value = raw[eq_pos : node.span.end_byte].decode("utf-8", "replace")
        if any(h in value for h in _TAINT_HINTS):
            names.add(name)
    return names


def _arg_identifiers(sample: ValidationSample, call_index: int) -> set[str]:
    doc = sample.doc
    node = node_at(doc, call_index)
    args_index = next(
        (c for c in node.children if node_at(doc, c).native_type == "argument_list"), None
    )
    if args_index is None:
        return set()
    names: set[str] = set()
    stack = list(node_at(doc, args_index).children)
    while stack:
        idx = stack.pop()
        child = node_at(doc, idx)
        if child.native_type == "identifier":
            names.add(child.text)
        stack.extend(child.children)
    return names


def find_sinks(sample: ValidationSample) -> list[SinkHit]:
    tables = _SINKS[sample.language]
    tainted_names = _concat_assignments(sample)
    hits: list[SinkHit] = []
    call_nodes = list(sample.doc.category_index.get(UniversalCategory.CALL, ()))
    call_nodes += list(sample.doc.category_index.get(UniversalCategory.OBJECT_CREATION, ()))
    for idx in sorted(call_nodes):
        callee, args = _callee_text(sample, idx)
        for vuln_class, patterns in tables.items():
            if any(_matches(callee, p) for p in patterns):
                tainted = any(h in args for h in _TAINT_HINTS) or bool(
                    _arg_identifiers(sample, idx) & tainted_names
                )
                hits.append(SinkHit(vuln_class=vuln_class, callee=callee, node_index=idx, tainted=tainted))
                break
    return hits


def _marker(seed: int, sample_id: str, attempt: int) -> str:
    digest = hashlib.sha256(f"{seed}:{sample_id}:{attempt}".encode()).digest()
    rng = np.random.default_rng(list(digest[:8]))
    alphabet = string.ascii_lowercase + string.digits
    suffix = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), size=8))
    return f"VLF_MARK_{suffix}"


def _render_payload(template: str, marker: str) -> str:
    body = template.replace("{aaa128}", "A" * 128)
    body = body.replace("{aaa512}", "A" * 512)
    body = body.replace("{aaa2048}", "A" * 2048)
    return body.replace("{m}", marker)


class RulePlanner:
    """Deterministic sink-table planner with family-cycling refinement."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def plan(self, sample: ValidationSample) -> ExploitHypothesis:
        hits = find_sinks(sample)
        if not hits:
            raise NoHypothesis(f"no sink pattern found in {sample.sample_id}")
        tainted = [h for h in hits if h.tainted]
        chosen = (tainted or hits)[0]
        # prefer class-table order when several distinct classes are hit
        classes_hit = {h.vuln_class for h in (tainted or hits)}
        for cls in _CLASS_ORDER:
            if cls in classes_hit:
                candidates = [h for h in (tainted or hits) if h.vuln_class is cls]
                chosen = candidates[0]
                break

        attempt = 1 + (len(sample.prior_trace.hypotheses) if sample.prior_trace else 0)
        families = _FAMILIES[chosen.vuln_class]
        family_name, templates = families[(attempt - 1) % len(families)]
        marker = _marker(self.seed, sample.sample_id, attempt)
        low, high = PAYLOADS_FLAGGED if sample.flag == 1 else PAYLOADS_UNFLAGGED
        selected = templates[:high]
        payloads = [
            Payload(id=f"h{attempt}p{k + 1}", data=_render_payload(t, marker), marker=marker)
            for k, t in enumerate(selected)
        ]
        return ExploitHypothesis(
            vuln_class=chosen.vuln_class,
            attack_vector="argv",
            payloads=payloads,
            preconditions=[f"sink `{chosen.callee}` reachable from process arguments"],
            attempt_index=attempt,
            family=family_name,
        )


class RemotePlanner:
    """HTTP planner: POST <url>/plan, non-200 -> PlannerUnavailable."""

    def __init__(self, url: str):
        if not url:
            raise PlannerUnavailable("remote planner configured without a URL")
        self.url = url.rstrip("/")

    def plan(self, sample: ValidationSample) -> ExploitHypothesis:
        prior = []
        if sample.prior_trace:
            for rec in sample.prior_trace.hypotheses:
                if rec.hypothesis:
                    prior.append({
                        "vuln_class": rec.hypothesis.vuln_class.value,
                        "family": rec.hypothesis.family,
                        "payload_ids": [p.id for p in rec.hypothesis.payloads],
                    })
        body = json.dumps({
            "language": sample.language.value,
            "source": sample.source,
            "flag": sample.flag,
            "prior": prior,
        }).encode("utf-8")
        req = urllib.request.Request(
            self.url + "/plan", data=body,
            headers={"Content-Type": "application/json"}, method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=30) as resp:
                if resp.status != 200:
                    raise PlannerUnavailable(f"planner returned {resp.status}")
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise PlannerUnavailable(f"planner unreachable: {exc}") from exc
        try:
            return ExploitHypothesis(
                vuln_class=VulnClass(payload["vuln_class"]),
                attack_vector=payload["attack_vector"],
                payloads=[Payload(**p) for p in payload["payloads"]],
                preconditions=list(payload.get("preconditions", [])),
                attempt_index=int(payload["attempt_index"]),
                family=payload.get("family", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PlannerUnavailable(f"planner returned malformed hypothesis: {exc}") from exc
