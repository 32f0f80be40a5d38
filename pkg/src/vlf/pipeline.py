"""Closed-lifecycle runner: detect -> validate -> (gated) repair, with
append-only run persistence and labeled-report metrics.

The gate is structural: repair_sample requires an Exploited ValidationTrace,
and this runner only constructs repair calls for such traces.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .embedder import EmbedderConfig
from .errors import ConfigError, MissingLabels
from .fusion import FusionModel, detect
from .repair import RemotePatchGenerator, TemplatePatchGenerator, repair_sample
from .train import load_model
from .uast.document import content_hash, serialize_document
from .uast.parse import detect_language, parse_to_uast
from .validation.orchestrator import validate_sample
from .validation.planner import RemotePlanner, RulePlanner
from .validation.sandbox import ContainerDriver, MockSandboxDriver
from .validation.types import ValidationSample, VerdictKind


@dataclass
class LifecycleConfig:
    model_path: str
    run_dir: str
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    planner_kind: str = "rule"  # "rule" | "remote"
    planner_url: str = ""
    planner_seed: int = 0
    driver_kind: str = "mock"  # "container" | "mock"
    mock_script_path: str = ""
    generator_kind: str = "template"  # "template" | "remote"
    generator_url: str = ""
    flag0_probe_policy: str = "all"  # "all" | "none" | "fraction"
    flag0_probe_fraction: float = 1.0
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.flag0_probe_policy not in ("all", "none", "fraction"):
            raise ConfigError(f"unknown probe policy {self.flag0_probe_policy!r}")
        if not 0.0 <= self.flag0_probe_fraction <= 1.0:
            raise ConfigError("flag0_probe_fraction must be in [0, 1]")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "LifecycleConfig":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        embedder = EmbedderConfig.from_json(payload.pop("embedder")) if "embedder" in payload else EmbedderConfig()
        try:
            return cls(embedder=embedder, **payload)
        except TypeError as exc:
            raise ConfigError(f"bad config field: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "model_path": self.model_path, "run_dir": self.run_dir,
            "embedder": self.embedder.to_json(),
            "planner_kind": self.planner_kind, "planner_url": self.planner_url,
            "planner_seed": self.planner_seed,
            "driver_kind": self.driver_kind, "mock_script_path": self.mock_script_path,
            "generator_kind": self.generator_kind, "generator_url": self.generator_url,
            "flag0_probe_policy": self.flag0_probe_policy,
            "flag0_probe_fraction": self.flag0_probe_fraction,
            "seed": self.seed, "workers": self.workers,
        }


@dataclass
class SampleRecord:
    sample_id: str
    path: str
    hash: str
    flag: Optional[int] = None
    prob: Optional[float] = None
    verdict: Optional[str] = None
    repair_kind: Optional[str] = None
    error: Optional[str] = None
    timings_ms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id, "path": self.path, "hash": self.hash,
            "flag": self.flag, "prob": self.prob, "verdict": self.verdict,
            "repair_kind": self.repair_kind, "error": self.error,
            "timings_ms": self.timings_ms,
        }


@dataclass
class RunManifest:
    run_id: str
    config: dict
    records: list[SampleRecord]
    metrics: dict
    created_at: str = ""

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "config": self.config,
            "records": [r.to_json() for r in self.records],
            "metrics": self.metrics,
        }


def _build_planner(cfg: LifecycleConfig):
    if cfg.planner_kind == "remote":
        return RemotePlanner(cfg.planner_url)
    return RulePlanner(seed=cfg.planner_seed)


def _build_driver(cfg: LifecycleConfig):
    if cfg.driver_kind == "container":
        return ContainerDriver()
    if cfg.mock_script_path:
        return MockSandboxDriver.from_file(cfg.mock_script_path)
    return MockSandboxDriver()


def _build_generator(cfg: LifecycleConfig):
    if cfg.generator_kind == "remote":
        return RemotePatchGenerator(cfg.generator_url)
    return TemplatePatchGenerator()


def _should_probe_flag0(cfg: LifecycleConfig, sample_id: str) -> bool:
    if cfg.flag0_probe_policy == "all":
        return True
    if cfg.flag0_probe_policy == "none":
        return False
    digest = hashlib.sha256(f"{cfg.seed}:{sample_id}".encode()).digest()
    fraction = int.from_bytes(digest[:8], "little") / 2**64
    return fraction < cfg.flag0_probe_fraction


def _aggregate(records: list[SampleRecord]) -> dict:
    total = len(records)
    flagged = sum(1 for r in records if r.flag == 1)
    exploited = sum(1 for r in records if r.verdict == "Exploited")
    repairs = sum(1 for r in records if r.repair_kind is not None)
    successes = sum(1 for r in records if r.repair_kind == "Success")
    errors = sum(1 for r in records if r.error is not None)
    return {
        "samples": total,
        "flagged": flagged,
        "exploited": exploited,
        "repairs_attempted": repairs,
        "repairs_succeeded": successes,
        "errors": errors,
    }


def run_lifecycle(
    inputs: list[str | Path],
    cfg: LifecycleConfig,
    model: FusionModel | None = None,
) -> RunManifest:
    run_dir = Path(cfg.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "review").mkdir(exist_ok=True)
    if model is None:
        model = load_model(cfg.model_path)
    model.embedder_cfg = cfg.embedder
    planner = _build_planner(cfg)
    driver = _build_driver(cfg)
    generator = _build_generator(cfg)

    detections = (run_dir / "detections.jsonl").open("w", encoding="utf-8")
    validations = (run_dir / "validations.jsonl").open("w", encoding="utf-8")
    repairs = (run_dir / "repairs.jsonl").open("w", encoding="utf-8")
    records: list[SampleRecord] = []

    try:
        for path in inputs:
            path = Path(path)
            sample_id = path.stem
            raw = path.read_bytes()
            record = SampleRecord(sample_id=sample_id, path=str(path), hash=content_hash(raw))
            records.append(record)
            try:
                language = detect_language(str(path))
                t0 = time.monotonic()
                result = detect(raw, language, model)
                record.timings_ms["detect"] = int((time.monotonic() - t0) * 1000)
                record.flag = result.flag
                record.prob = result.prob_vulnerable
                detections.write(json.dumps({
                    "path": str(path), "sample_id": sample_id, "flag": result.flag,
                    "prob": result.prob_vulnerable, "alpha_g": result.alpha_g,
                    "alpha_l": result.alpha_l, "hash": record.hash,
                }, sort_keys=True) + "\n")

                if result.flag == 0 and not _should_probe_flag0(cfg, sample_id):
                    record.verdict = "Skipped"
                    continue

                doc = parse_to_uast(raw, language)
                vsample = ValidationSample(
                    sample_id=sample_id, source=raw.decode("utf-8"),
                    language=language, doc=doc, flag=result.flag,
                )
                t0 = time.monotonic()
                trace = validate_sample(vsample, result.flag, planner, driver)
                record.timings_ms["validate"] = int((time.monotonic() - t0) * 1000)
                record.verdict = trace.verdict.kind.value
                validations.write(json.dumps(trace.to_json(), sort_keys=True) + "\n")

                if trace.verdict.kind is VerdictKind.EXPLOITED:
                    t0 = time.monotonic()
                    outcome = repair_sample(vsample, trace, model, generator)
                    record.timings_ms["repair"] = int((time.monotonic() - t0) * 1000)
                    record.repair_kind = outcome.kind
                    repairs.write(json.dumps({
                        "sample_id": sample_id, "verdict": trace.verdict.kind.value,
                        **outcome.to_json(),
                    }, sort_keys=True) + "\n")
                    if outcome.kind == "NonConvergent":
                        (run_dir / "review" / f"{sample_id}.json").write_text(
                            json.dumps(outcome.trace.to_json(), indent=2, sort_keys=True),
                            encoding="utf-8",
                        )
            except Exception as exc:  # sample-level isolation: the run continues
                record.error = f"{type(exc).__name__}: {exc}"
    finally:
        detections.close()
        validations.close()
        repairs.close()

    manifest = RunManifest(
        run_id=f"run-{cfg.seed}-{uuid.uuid5(uuid.NAMESPACE_URL, json.dumps([r.hash for r in records])).hex[:12]}",
        config=cfg.to_json(),
        records=records,
        metrics=_aggregate(records),
        created_at=time.strftime("%Y-%m-%dT%H:%M:%S"),
    )
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest.to_json(), indent=2, sort_keys=True), encoding="utf-8"
    )
    return manifest


# --- Table-style reporting ---

def report_metrics(manifest: RunManifest, labels: dict[str, int]) -> dict:
    """Lifecycle outcome rates against ground-truth labels.

    resolved: true-vulnerable samples fully fixed (Exploited and repair
    Success) over all true-vulnerable. fp_eliminated: falsely flagged samples
    the validator stopped (verdict != Exploited) over all falsely flagged.
    unnecessary_repairs_avoided: flagged-but-safe samples not repaired over
    flagged-but-safe. total_failure: errored, non-convergent, or
    inconsistent terminal states over all samples. Ratios with an empty
    denominator are reported as None.
    """
    missing = [r.sample_id for r in manifest.records if r.sample_id not in labels]
    if missing:
        raise MissingLabels(f"labels missing for {missing[:5]} (+{max(0, len(missing) - 5)} more)")

    records = manifest.records
    true_vuln = [r for r in records if labels[r.sample_id] == 1]
    false_flagged = [r for r in records if labels[r.sample_id] == 0 and r.flag == 1]
    resolved = [
        r for r in true_vuln if r.verdict == "Exploited" and r.repair_kind == "Success"
    ]
    fp_eliminated = [r for r in false_flagged if r.verdict != "Exploited"]
    not_repaired_safe = [r for r in false_flagged if r.repair_kind is None]
    failures = [
        r for r in records
        if r.error is not None
        or r.repair_kind == "NonConvergent"
        or (r.verdict == "Exploited" and r.repair_kind is None)
    ]

    def ratio(num: int, den: int) -> float | None:
        return (num / den) if den else None

    return {
        "resolved_vulnerabilities": ratio(len(resolved), len(true_vuln)),
        "false_positives_eliminated": ratio(len(fp_eliminated), len(false_flagged)),
        "unnecessary_repairs_avoided": ratio(len(not_repaired_safe), len(false_flagged)),
        "total_pipeline_failure": ratio(len(failures), len(records)),
        "counts": {
            "samples": len(records),
            "true_vulnerable": len(true_vuln),
            "false_flagged": len(false_flagged),
            "resolved": len(resolved),
            "failures": len(failures),
        },
        "definitions": {
            "total_pipeline_failure": "errored | repair NonConvergent | Exploited without repair record",
        },
    }


def write_uast_files(inputs: list[str | Path], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in inputs:
        path = Path(path)
        language = detect_language(str(path))
        doc = parse_to_uast(path.read_bytes(), language)
        target = out / (path.stem + ".uast.json")
        target.write_bytes(serialize_document(doc))
        written.append(target)
    return written
