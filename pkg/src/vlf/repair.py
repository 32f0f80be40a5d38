"""Validation-gated iterative repair with span-based patches.

Patches are ordered, non-overlapping byte-span edits validated by re-parsing;
differential analysis then confirms that nothing outside the edit regions
changed structurally. A repair loop runs at most five iterations, re-detects
after each applied patch, and emits a full diagnostic trace when it fails to
converge. The hard gate: nothing here runs without an Exploited verdict.
"""

from __future__ import annotations

import json
import shlex
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    GateViolation,
    GeneratorUnavailable,
    OverlappingEdits,
    SyntaxRejected,
    UnpatchableClass,
)
from .fusion import DetectionResult, ExplanationRecord, FusionModel, detect, explain
from .uast.document import node_at
from .uast.parse import parse_to_uast
from .uast.types import Language, UastDocument
from .validation.planner import find_sinks
from .validation.types import (
    Payload,
    ValidationSample,
    ValidationTrace,
    VerdictKind,
    VulnClass,
)

MAX_REPAIR_ITERATIONS = 5

REMOTE_SAMPLING = {"temperature": 0.2, "top_p": 0.9}


@dataclass(frozen=True)
class SpanEdit:
    start_byte: int
    end_byte: int
    replacement: str

    def to_json(self) -> dict:
        return {"start_byte": self.start_byte, "end_byte": self.end_byte, "replacement": self.replacement}


@dataclass
class PatchEdit:
    edits: list[SpanEdit]

    def validate(self, source_len: int) -> None:
        prev_end = 0
        for i, edit in enumerate(self.edits):
            if edit.start_byte > edit.end_byte:
                raise OverlappingEdits(f"edit {i} has start > end")
            if edit.start_byte < prev_end:
                raise OverlappingEdits(f"edit {i} overlaps or is unsorted")
            if edit.end_byte > source_len:
                raise OverlappingEdits(f"edit {i} exceeds source bounds")
            prev_end = max(prev_end, edit.end_byte) if edit.end_byte > edit.start_byte else edit.start_byte
        # zero-width inserts at the same point as a following edit start are fine;
        # genuine range overlap is rejected above

    def to_json(self) -> dict:
        return {"edits": [e.to_json() for e in self.edits]}

    @classmethod
    def from_json(cls, obj: dict) -> "PatchEdit":
        return cls(edits=[SpanEdit(int(e["start_byte"]), int(e["end_byte"]), str(e["replacement"])) for e in obj["edits"]])


@dataclass
class RepairPrompt:
    source: str
    language: Language
    vuln_class: VulnClass
    exploit_payload: Payload
    observed_behavior: str
    prior_attempts: list[tuple[PatchEdit | None, str]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "language": self.language.value,
            "vuln_class": self.vuln_class.value,
            "exploit_payload": self.exploit_payload.to_json(),
            "observed_behavior": self.observed_behavior,
            "prior_attempts": [
                {"patch": p.to_json() if p else None, "rejection_reason": r}
                for p, r in self.prior_attempts
            ],
        }


@dataclass
class AttemptRecord:
    patch: Optional[PatchEdit]
    applied: bool
    rejection_reason: Optional[str]
    re_detect_flag: Optional[int]
    explanation: Optional[ExplanationRecord]

    def to_json(self) -> dict:
        return {
            "patch": self.patch.to_json() if self.patch else None,
            "applied": self.applied,
            "rejection_reason": self.rejection_reason,
            "re_detect_flag": self.re_detect_flag,
            "explanation": self.explanation.to_json() if self.explanation else None,
        }


@dataclass
class DiagnosticTrace:
    attempts: list[AttemptRecord]
    persistent_indicators: list[str]

    def to_json(self) -> dict:
        return {
            "attempts": [a.to_json() for a in self.attempts],
            "persistent_indicators": self.persistent_indicators,
        }


@dataclass
class RepairOutcome:
    kind: str  # "Success" | "NonConvergent"
    patched_source: Optional[str] = None
    iterations_used: int = 0
    final_detection: Optional[DetectionResult] = None
    trace: Optional[DiagnosticTrace] = None

    @property
    def succeeded(self) -> bool:
        return self.kind == "Success"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "iterations_used": self.iterations_used,
            "patched_source": self.patched_source,
            "final_flag": self.final_detection.flag if self.final_detection else None,
            "trace": self.trace.to_json() if self.trace else None,
        }


# --- prompt construction ---

def build_repair_prompt(
    sample: ValidationSample,
    verdict_trace: ValidationTrace,
    prior: list[tuple[PatchEdit | None, str]],
) -> RepairPrompt:
    if verdict_trace.verdict.kind is not VerdictKind.EXPLOITED:
        raise GateViolation(f"repair prompt requested for verdict {verdict_trace.verdict.kind.value}")
    for record in verdict_trace.hypotheses:
        for execution in record.executions:
            for item in execution.evidence:
                if item.evidence_class.value == "Confirming":
                    return RepairPrompt(
                        source=sample.source,
                        language=sample.language,
                        vuln_class=record.hypothesis.vuln_class if record.hypothesis else VulnClass.OTHER,
                        exploit_payload=execution.payload,
                        observed_behavior=item.description,
                        prior_attempts=list(prior),
                    )
    raise GateViolation("Exploited verdict without a Confirming item; trace is inconsistent")


# --- template patch generator ---

def _string_inner(text: str) -> str:
    body = text.lstrip("rbufRBUF")
    if len(body) >= 6 and body[:3] in ('"""', "'''") and body.endswith(body[:3]):
        return body[3:-3]
    if len(body) >= 2 and body[0] in "\"'" and body[-1] == body[0]:
        return body[1:-1]
    return body


def _node_text(doc: UastDocument, source: bytes, index: int) -> str:
    span = node_at(doc, index).span
    return source[span.start_byte : span.end_byte].decode("utf-8", "replace")


_STRING_KINDS = {"string", "concatenated_string", "string_literal"}
_CONCAT_KINDS = {"binary_operator", "binary_expression"}


def _concat_parts(doc: UastDocument, source: bytes, index: int) -> list[tuple[str, str]]:
    """Flatten a `+` concatenation into [("lit", inner) | ("expr", text)]."""
    node = node_at(doc, index)
    if node.native_type in _CONCAT_KINDS:
        operands = [c for c in node.children if node_at(doc, c).native_type not in ("+", "(", ")")]
        has_plus = any(node_at(doc, c).native_type == "+" for c in node.children)
        if has_plus and len(operands) == 2:
            return _concat_parts(doc, source, operands[0]) + _concat_parts(doc, source, operands[1])
    if node.native_type in _STRING_KINDS:
        return [("lit", _string_inner(_node_text(doc, source, index)))]
    return [("expr", _node_text(doc, source, index))]


def _parameterized_query(parts: list[tuple[str, str]]) -> tuple[str, list[str]]:
    """Replace spliced expressions with `?`, trimming surrounding SQL quotes."""
    exprs = [text for kind, text in parts if kind == "expr"]
    pieces: list[str] = []
    strip_leading_quote = False
    for kind, text in parts:
        if kind == "lit":
            if strip_leading_quote and text[:1] in ("'", '"'):
                text = text[1:]
            strip_leading_quote = False
            pieces.append(text)
        else:
            if pieces and pieces[-1][-1:] in ("'", '"'):
                pieces[-1] = pieces[-1][:-1]
            pieces.append("?")
            strip_leading_quote = True
    return "".join(pieces), exprs


def _call_pieces(doc: UastDocument, index: int) -> tuple[int | None, int | None, list[int]]:
    """Returns (callee_index, argument_list_index, argument_expr_indices)."""
    node = node_at(doc, index)
    callee = None
    args_index = None
    for child in node.children:
        if node_at(doc, child).native_type == "argument_list":
            args_index = child
            break
        callee = child
    arg_exprs: list[int] = []
    if args_index is not None:
        for child in node_at(doc, args_index).children:
            kind = node_at(doc, child).native_type
            if kind not in ("(", ")", ","):
                arg_exprs.append(child)
    return callee, args_index, arg_exprs


def _import_block_end(doc: UastDocument, source: bytes) -> int:
    """Byte offset just past the leading run of top-level imports."""
    end = 0
    for child in doc.root.children:
        node = node_at(doc, child)
        if node.native_type in ("import_statement", "import_from_statement", "import_declaration",
                                "preproc_include", "comment"):
            line_end = source.find(b"\n", node.span.end_byte)
            end = (line_end + 1) if line_end != -1 else len(source)
            continue
        break
    return end


def _needs_import(source: str, module: str) -> bool:
    return f"import {module}" not in source


def _statement_of(doc: UastDocument, index: int) -> int:
    node = node_at(doc, index)
    while node.parent is not None and node_at(doc, node.parent).native_type not in ("block", "module"):
        node = node_at(doc, node.parent)
    return node.index


def _line_start(source: bytes, offset: int) -> int:
    nl = source.rfind(b"\n", 0, offset)
    return nl + 1


_DESER_HELPER = '''

class _AllowlistUnpickler(pickle.Unpickler):
    _ALLOWED = {("builtins", "dict"), ("builtins", "list"), ("builtins", "str"), ("builtins", "int")}

    def find_class(self, module, name):
        if (module, name) not in self._ALLOWED:
            raise pickle.UnpicklingError("blocked type: %s.%s" % (module, name))
        return super().find_class(module, name)


def _safe_loads(data):
    return _AllowlistUnpickler(io.BytesIO(data)).load()

'''


class TemplatePatchGenerator:
    """Class-specific deterministic rewrites at the flagged sink span."""

    def generate(self, prompt: RepairPrompt) -> PatchEdit:
        doc = parse_to_uast(prompt.source.encode("utf-8"), prompt.language)
        source = prompt.source.encode("utf-8")
        sample = ValidationSample(
            sample_id="repair", source=prompt.source, language=prompt.language, doc=doc, flag=1
        )
        hits = [h for h in find_sinks(sample) if h.vuln_class is prompt.vuln_class]
        if not hits:
            raise UnpatchableClass(f"no {prompt.vuln_class.value} sink found to rewrite")
        # one sink per patch; the loop re-prompts on the patched source, so the
        # first tainted (else first) occurrence always makes progress
        tainted = [h for h in hits if h.tainted]
        hit = (tainted or hits)[0]

        if prompt.language is Language.PYTHON:
            if prompt.vuln_class is VulnClass.SQL_INJECTION:
                return self._py_sql(doc, source, hit.node_index)
            if prompt.vuln_class is VulnClass.COMMAND_INJECTION:
                return self._py_command(doc, source, hit.node_index, prompt.source)
            if prompt.vuln_class is VulnClass.PATH_TRAVERSAL:
                return self._py_path(doc, source, hit.node_index, prompt.source)
            if prompt.vuln_class is VulnClass.INSECURE_DESERIALIZATION:
                return self._py_deserialization(doc, source, hit.node_index, prompt.source)
        if prompt.language is Language.JAVA and prompt.vuln_class is VulnClass.COMMAND_INJECTION:
            return self._java_command(doc, source, hit.node_index)
        raise UnpatchableClass(
            f"no rewrite template for {prompt.vuln_class.value} in {prompt.language.value}"
        )

    # SqlInjection -> parameterized query form
    def _py_sql(self, doc: UastDocument, source: bytes, call_index: int) -> PatchEdit:
        _, args_index, arg_exprs = _call_pieces(doc, call_index)
        if args_index is None or not arg_exprs:
            raise UnpatchableClass("sql sink call has no argument to rewrite")
        arg = arg_exprs[0]
        arg_node = node_at(doc, arg)
        if arg_node.native_type in _CONCAT_KINDS:
            parts = _concat_parts(doc, source, arg)
            query, exprs = _parameterized_query(parts)
            if not exprs:
                raise UnpatchableClass("sql argument is constant; nothing to parameterize")
            params = ", ".join(exprs) + ("," if len(exprs) == 1 else "")
            span = node_at(doc, args_index).span
            return PatchEdit(edits=[SpanEdit(span.start_byte, span.end_byte, f'("{query}", ({params}))')])
        if arg_node.native_type == "identifier":
            name = arg_node.text
            assignment = self._find_concat_assignment(doc, source, name)
            if assignment is None:
                raise UnpatchableClass(f"no concatenated assignment found for `{name}`")
            value_index, parts = assignment
            query, exprs = _parameterized_query(parts)
            if not exprs:
                raise UnpatchableClass("query assignment is constant; nothing to parameterize")
            params = ", ".join(exprs) + ("," if len(exprs) == 1 else "")
            value_span = node_at(doc, value_index).span
            args_span = node_at(doc, args_index).span
            edits = sorted(
                [
                    SpanEdit(value_span.start_byte, value_span.end_byte, f'"{query}"'),
                    SpanEdit(args_span.start_byte, args_span.end_byte, f"({name}, ({params}))"),
                ],
                key=lambda e: e.start_byte,
            )
            return PatchEdit(edits=edits)
        raise UnpatchableClass("sql argument shape not covered by the parameterization template")

    def _find_concat_assignment(
        self, doc: UastDocument, source: bytes, name: str
    ) -> tuple[int, list[tuple[str, str]]] | None:
        from .uast.taxonomy import UniversalCategory

        for idx in doc.category_index.get(UniversalCategory.VARIABLE_ASSIGNMENT, ()):
            node = node_at(doc, idx)
            if node.native_type != "assignment" or not node.children:
                continue
            target = node_at(doc, node.children[0])
            if target.native_type != "identifier" or target.text != name:
                continue
            value_index = None
            saw_eq = False
            for child in node.children:
                kind = node_at(doc, child).native_type
                if kind == "=":
                    saw_eq = True
                    continue
                if saw_eq:
                    value_index = child
                    break
            if value_index is None:
                continue
            parts = _concat_parts(doc, source, value_index)
            if any(kind == "expr" for kind, _ in parts) and any(kind == "lit" for kind, _ in parts):
                return value_index, parts
        return None

    # CommandInjection -> argument-vector invocation
    def _py_command(self, doc: UastDocument, source: bytes, call_index: int, text: str) -> PatchEdit:
        _, _, arg_exprs = _call_pieces(doc, call_index)
        if not arg_exprs:
            raise UnpatchableClass("command sink call has no argument")
        call_span = node_at(doc, call_index).span
        arg_node = node_at(doc, arg_exprs[0])
        edits: list[SpanEdit] = []
        if arg_node.native_type == "identifier":
            name = arg_node.text
            assignment = self._find_concat_assignment(doc, source, name)
            if assignment is None:
                raise UnpatchableClass(f"no concatenated assignment found for `{name}`")
            value_index, parts = assignment
            elements = self._elements_from_parts(parts)
            value_span = node_at(doc, value_index).span
            edits.append(SpanEdit(value_span.start_byte, value_span.end_byte, f"[{', '.join(elements)}]"))
            edits.append(SpanEdit(
                call_span.start_byte, call_span.end_byte,
                f"subprocess.run({name}, check=False).returncode",
            ))
        else:
            elements = self._vector_elements(doc, source, arg_exprs[0])
            edits.append(SpanEdit(
                call_span.start_byte, call_span.end_byte,
                f"subprocess.run([{', '.join(elements)}], check=False).returncode",
            ))
        if _needs_import(text, "subprocess"):
            insert_at = _import_block_end(doc, source)
            edits.insert(0, SpanEdit(insert_at, insert_at, "import subprocess\n"))
        return PatchEdit(edits=sorted(edits, key=lambda e: e.start_byte))

    def _vector_elements(self, doc: UastDocument, source: bytes, arg_index: int) -> list[str]:
        return self._elements_from_parts(_concat_parts(doc, source, arg_index))

    def _elements_from_parts(self, parts: list[tuple[str, str]]) -> list[str]:
        elements: list[str] = []
        for kind, text in parts:
            if kind == "lit":
                elements.extend(json.dumps(tok) for tok in shlex.split(text))
            else:
                elements.append(text)
        if not elements:
            raise UnpatchableClass("command argument is empty")
        return elements

    # PathTraversal -> canonicalize-and-prefix-check guard before the open
    def _py_path(self, doc: UastDocument, source: bytes, call_index: int, text: str) -> PatchEdit:
        _, _, arg_exprs = _call_pieces(doc, call_index)
        if not arg_exprs:
            raise UnpatchableClass("open call has no path argument")
        arg_node = node_at(doc, arg_exprs[0])
        arg_text = _node_text(doc, source, arg_exprs[0])
        stmt = _statement_of(doc, call_index)
        stmt_start = node_at(doc, stmt).span.start_byte
        line_start = _line_start(source, stmt_start)
        indent = source[line_start:stmt_start].decode("utf-8", "replace")
        guard = (
            f"{indent}_base_dir = os.path.realpath(os.curdir)\n"
            f"{indent}safe_path = os.path.realpath(os.path.join(_base_dir, {arg_text}))\n"
            f"{indent}if not safe_path.startswith(_base_dir + os.sep):\n"
            f'{indent}    raise ValueError("path escapes permitted root")\n'
        )
        edits = [
            SpanEdit(line_start, line_start, guard),
            SpanEdit(arg_node.span.start_byte, arg_node.span.end_byte, "safe_path"),
        ]
        if _needs_import(text, "os"):
            insert_at = _import_block_end(doc, source)
            edits.insert(0, SpanEdit(insert_at, insert_at, "import os\n"))
        return PatchEdit(edits=sorted(edits, key=lambda e: e.start_byte))

    # InsecureDeserialization -> allow-list guard
    def _py_deserialization(self, doc: UastDocument, source: bytes, call_index: int, text: str) -> PatchEdit:
        callee, _, _ = _call_pieces(doc, call_index)
        if callee is None:
            raise UnpatchableClass("deserialization sink callee not found")
        callee_span = node_at(doc, callee).span
        insert_at = _import_block_end(doc, source)
        edits = [
            SpanEdit(insert_at, insert_at, _DESER_HELPER.lstrip("\n")),
            SpanEdit(callee_span.start_byte, callee_span.end_byte, "_safe_loads"),
        ]
        if _needs_import(text, "io"):
            edits.insert(0, SpanEdit(insert_at, insert_at, "import io\n"))
        return PatchEdit(edits=sorted(edits, key=lambda e: (e.start_byte, e.end_byte)))

    # Java CommandInjection -> ProcessBuilder argument vector
    def _java_command(self, doc: UastDocument, source: bytes, call_index: int) -> PatchEdit:
        _, _, arg_exprs = _call_pieces(doc, call_index)
        if not arg_exprs:
            raise UnpatchableClass("exec call has no argument")
        elements = self._vector_elements(doc, source, arg_exprs[0])
        call_span = node_at(doc, call_index).span
        return PatchEdit(edits=[SpanEdit(
            call_span.start_byte, call_span.end_byte,
            f"new ProcessBuilder({', '.join(elements)}).start()",
        )])


class RemotePatchGenerator:
    """HTTP generator: POST <url>/patch with the prompt and sampling params."""

    def __init__(self, url: str):
        if not url:
            raise GeneratorUnavailable("remote generator configured without a URL")
        self.url = url.rstrip("/")

    def generate(self, prompt: RepairPrompt) -> PatchEdit:
        body = dict(prompt.to_json())
        body.update(REMOTE_SAMPLING)
        req = urllib.request.Request(
            self.url + "/patch",
            data=json.dumps(body).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=60) as resp:
                if resp.status != 200:
                    raise GeneratorUnavailable(f"patch endpoint returned {resp.status}")
                payload = json.loads(resp.read().decode("utf-8"))
            return PatchEdit.from_json(payload)
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise GeneratorUnavailable(f"patch endpoint failed: {exc}") from exc


def generate_patch(prompt: RepairPrompt, generator) -> PatchEdit:
    return generator.generate(prompt)


# --- application and verification ---

def apply_patch(source: str, patch: PatchEdit, language: Language) -> tuple[str, UastDocument]:
    raw = source.encode("utf-8")
    patch.validate(len(raw))
    out = raw
    for edit in reversed(patch.edits):
        out = out[: edit.start_byte] + edit.replacement.encode("utf-8") + out[edit.end_byte :]
    patched = out.decode("utf-8")
    doc = parse_to_uast(out, language)
    if doc.has_errors:
        raise SyntaxRejected("patched source re-parsed with error-recovery nodes")
    return patched, doc


@dataclass
class DifferentialResult:
    passed: bool
    out_of_span_changes: list[str]


def differential_analysis(
    original_doc: UastDocument, patched_doc: UastDocument, patch: PatchEdit
) -> DifferentialResult:
    edits = patch.edits
    original_regions = [(e.start_byte, e.end_byte) for e in edits if e.end_byte > e.start_byte]
    patched_regions = []
    shift = 0  # cumulative byte delta from edits strictly before the current one
    for e in edits:
        start = e.start_byte + shift
        length = len(e.replacement.encode("utf-8"))
        if length > 0:
            patched_regions.append((start, start + length))
        shift += length - (e.end_byte - e.start_byte)

    def overlaps(sb: int, eb: int, regions: list[tuple[int, int]]) -> bool:
        return any(sb < rend and rstart < eb for rstart, rend in regions)

    def sequence(doc: UastDocument, regions: list[tuple[int, int]]) -> list[tuple[str, str, str, int]]:
        out = []
        for node in doc.nodes:
            if overlaps(node.span.start_byte, node.span.end_byte, regions):
                continue
            out.append((node.universal_category.name, node.native_type, node.text, node.index))
        return out

    orig_seq = sequence(original_doc, original_regions)
    patch_seq = sequence(patched_doc, patched_regions)
    changes: list[str] = []
    for (ocat, okind, otext, oindex), (pcat, pkind, ptext, pindex) in zip(orig_seq, patch_seq):
        if (ocat, okind, otext) != (pcat, pkind, ptext):
            changes.append(
                f"node {oindex} ({okind} {otext[:24]!r}) became node {pindex} ({pkind} {ptext[:24]!r})"
            )
            if len(changes) >= 8:
                break
    if len(orig_seq) != len(patch_seq) and not changes:
        changes.append(
            f"structural count changed outside edit regions: {len(orig_seq)} -> {len(patch_seq)} nodes"
        )
    return DifferentialResult(passed=not changes, out_of_span_changes=changes)


# --- the loop ---

def repair_sample(
    sample: ValidationSample,
    verdict_trace: ValidationTrace,
    model: FusionModel,
    generator,
) -> RepairOutcome:
    if verdict_trace.verdict.kind is not VerdictKind.EXPLOITED:
        raise GateViolation(
            f"repair requires an Exploited verdict, got {verdict_trace.verdict.kind.value}"
        )
    attempts: list[AttemptRecord] = []
    prior: list[tuple[PatchEdit | None, str]] = []
    # the loop iterates on the latest accepted patch; rejected patches leave
    # the working source unchanged
    working = sample.source
    working_doc = parse_to_uast(working.encode("utf-8"), sample.language)
    working_sample = sample

    for iteration in range(1, MAX_REPAIR_ITERATIONS + 1):
        prompt = build_repair_prompt(working_sample, verdict_trace, prior)
        try:
            patch = generate_patch(prompt, generator)
        except (UnpatchableClass, GeneratorUnavailable) as exc:
            attempts.append(AttemptRecord(
                patch=None, applied=False, rejection_reason=str(exc),
                re_detect_flag=None, explanation=None,
            ))
            break  # deterministic generators fail identically; retrying is pointless
        try:
            patched, patched_doc = apply_patch(working, patch, sample.language)
        except (OverlappingEdits, SyntaxRejected) as exc:
            attempts.append(AttemptRecord(
                patch=patch, applied=False, rejection_reason=str(exc),
                re_detect_flag=None, explanation=None,
            ))
            prior.append((patch, str(exc)))
            continue
        diff = differential_analysis(working_doc, patched_doc, patch)
        if not diff.passed:
            reason = "differential analysis failed: " + "; ".join(diff.out_of_span_changes[:3])
            attempts.append(AttemptRecord(
                patch=patch, applied=True, rejection_reason=reason,
                re_detect_flag=None, explanation=None,
            ))
            prior.append((patch, reason))
            continue
        working = patched
        working_doc = patched_doc
        working_sample = ValidationSample(
            sample_id=sample.sample_id, source=working, language=sample.language,
            doc=working_doc, flag=1,
        )
        result = detect(patched.encode("utf-8"), sample.language, model)
        record = explain(result)
        attempts.append(AttemptRecord(
            patch=patch, applied=True, rejection_reason=None,
            re_detect_flag=result.flag, explanation=record,
        ))
        if result.flag == 0:
            return RepairOutcome(
                kind="Success",
                patched_source=patched,
                iterations_used=iteration,
                final_detection=result,
            )
        prior.append((patch, f"re-detection still flags (prob {result.prob_vulnerable:.3f})"))

    indicators = _persistent_indicators(sample, working if working != sample.source else None, model)
    return RepairOutcome(
        kind="NonConvergent",
        iterations_used=len(attempts),
        trace=DiagnosticTrace(attempts=attempts, persistent_indicators=indicators),
    )


def _persistent_indicators(
    sample: ValidationSample, last_patched: str | None, model: FusionModel
) -> list[str]:
    source = last_patched if last_patched is not None else sample.source
    indicators: list[str] = []
    try:
        result = detect(source.encode("utf-8"), sample.language, model)
        record = explain(result)
        indicators.append(
            f"detector flag {result.flag} (prob {result.prob_vulnerable:.3f}, dominant {record.dominant})"
        )
        doc = parse_to_uast(source.encode("utf-8"), sample.language)
        probe = ValidationSample(
            sample_id=sample.sample_id, source=source, language=sample.language, doc=doc, flag=1
        )
        for hit in find_sinks(probe):
            indicators.append(f"sink `{hit.callee}` still present ({hit.vuln_class.value})")
    except Exception as exc:  # indicators are best-effort diagnostics
        indicators.append(f"indicator collection failed: {exc}")
    return indicators
