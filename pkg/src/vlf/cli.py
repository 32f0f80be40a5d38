"""Command-line entry points for the vulnerability lifecycle toolkit."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import featurize_samples, generate_samples, seed_corpus, split_corpus
from .embedder import EmbedderConfig
from .fusion import detect
from .pipeline import LifecycleConfig, report_metrics, run_lifecycle, write_uast_files
from .repair import TemplatePatchGenerator, repair_sample
from .train import TrainConfig, TrainingData, load_model, save_model, train
from .uast.document import content_hash
from .uast.parse import detect_language, parse_to_uast
from .validation.orchestrator import validate_sample
from .validation.planner import RulePlanner
from .validation.sandbox import ContainerDriver, MockSandboxDriver
from .validation.types import ValidationSample


def _cmd_parse(args: argparse.Namespace) -> int:
    written = write_uast_files(args.paths, args.out)
    for path in written:
        print(path)
    return 0


def _cmd_seed_corpus(args: argparse.Namespace) -> int:
    samples = seed_corpus(args.out, seed=args.seed)
    print(f"wrote {len(samples)} files + labels.json to {args.out}")
    return 0


def _cmd_split(args: argparse.Namespace) -> int:
    labels_path = Path(args.data) / "labels.json"
    names = sorted(json.loads(labels_path.read_text(encoding="utf-8")))
    train_ix, val_ix, test_ix = split_corpus(len(names), seed=args.seed)
    out = Path(args.out or args.data)
    for split_name, ixs in (("train", train_ix), ("val", val_ix), ("test", test_ix)):
        (out / f"split_{split_name}.txt").write_text(
            "".join(names[i] + "\n" for i in ixs), encoding="utf-8"
        )
    print(f"split {len(names)} files 80/10/10 into {out}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    samples = generate_samples(args.samples, seed=args.seed)
    feats = featurize_samples(samples, EmbedderConfig(seed=args.seed))
    train_ix, val_ix, _ = split_corpus(len(feats), seed=args.seed)
    data = TrainingData(train=[feats[i] for i in train_ix], val=[feats[i] for i in val_ix])
    cfg = TrainConfig(seed=args.seed, max_epochs=args.max_epochs)
    model, history = train(data, cfg)
    model.embedder_cfg = EmbedderConfig(seed=args.seed)
    save_model(model, args.out)
    best = max(h["val_f1"] for h in history)
    print(f"trained {len(history)} epochs, best val F1 {best:.4f}, saved {args.out}")
    return 0


def _cmd_detect(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    for path in args.paths:
        raw = Path(path).read_bytes()
        language = detect_language(path)
        result = detect(raw, language, model)
        print(json.dumps({
            "path": path,
            "flag": result.flag,
            "prob": result.prob_vulnerable,
            "alpha_g": result.alpha_g,
            "alpha_l": result.alpha_l,
            "hash": content_hash(raw),
        }, sort_keys=True))
    return 0


def _make_driver(args: argparse.Namespace):
    if args.driver == "container":
        return ContainerDriver()
    if getattr(args, "mock_script", ""):
        return MockSandboxDriver.from_file(args.mock_script)
    return MockSandboxDriver()


def _cmd_validate(args: argparse.Namespace) -> int:
    model = load_model(args.model) if args.model else None
    planner = RulePlanner(seed=args.seed)
    driver = _make_driver(args)
    for path in args.paths:
        raw = Path(path).read_bytes()
        language = detect_language(path)
        if model is not None:
            flag = detect(raw, language, model).flag
        else:
            flag = 1
        doc = parse_to_uast(raw, language)
        sample = ValidationSample(
            sample_id=Path(path).stem, source=raw.decode("utf-8"),
            language=language, doc=doc, flag=flag,
        )
        trace = validate_sample(sample, flag, planner, driver)
        print(json.dumps(trace.to_json(), sort_keys=True))
    return 0


def _cmd_repair(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    planner = RulePlanner(seed=args.seed)
    driver = _make_driver(args)
    generator = TemplatePatchGenerator()
    for path in args.paths:
        raw = Path(path).read_bytes()
        language = detect_language(path)
        doc = parse_to_uast(raw, language)
        sample = ValidationSample(
            sample_id=Path(path).stem, source=raw.decode("utf-8"),
            language=language, doc=doc, flag=1,
        )
        trace = validate_sample(sample, 1, planner, driver)
        if trace.verdict.kind.value != "Exploited":
            print(json.dumps({"sample_id": sample.sample_id, "skipped": trace.verdict.kind.value}))
            continue
        outcome = repair_sample(sample, trace, model, generator)
        print(json.dumps({"sample_id": sample.sample_id, **outcome.to_json()}, sort_keys=True))
    return 0


def _cmd_lifecycle(args: argparse.Namespace) -> int:
    cfg = LifecycleConfig.from_json_file(args.config)
    if args.run_dir:
        cfg.run_dir = args.run_dir
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    manifest = run_lifecycle(args.paths, cfg)
    print(json.dumps(manifest.metrics, sort_keys=True))
    print(f"run directory: {cfg.run_dir}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .pipeline import RunManifest, SampleRecord

    payload = json.loads((Path(args.run_dir) / "manifest.json").read_text(encoding="utf-8"))
    records = [SampleRecord(
        sample_id=r["sample_id"], path=r["path"], hash=r["hash"], flag=r["flag"],
        prob=r["prob"], verdict=r["verdict"], repair_kind=r["repair_kind"],
        error=r["error"], timings_ms=r["timings_ms"],
    ) for r in payload["records"]]
    manifest = RunManifest(
        run_id=payload["run_id"], config=payload["config"], records=records,
        metrics=payload["metrics"], created_at=payload.get("created_at", ""),
    )
    raw_labels = json.loads(Path(args.labels).read_text(encoding="utf-8"))
    labels = {Path(k).stem: v["label"] if isinstance(v, dict) else int(v) for k, v in raw_labels.items()}
    report = report_metrics(manifest, labels)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlf", description="Execution-grounded vulnerability lifecycle")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse files into uAST JSON documents")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("seed-corpus", help="write the bundled labeled desk corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=20260801)
    p.set_defaults(fn=_cmd_seed_corpus)

    p = sub.add_parser("split", help="write 80/10/10 split lists for a corpus directory")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_split)

    p = sub.add_parser("train", help="train the fusion detector on a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=600)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-epochs", type=int, default=30)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("detect", help="flag files with a trained model")
    p.add_argument("paths", nargs="+")
    p.add_argument("--model", required=True)
    p.set_defaults(fn=_cmd_detect)

    p = sub.add_parser("validate", help="run execution-grounded validation")
    p.add_argument("paths", nargs="+")
    p.add_argument("--model", default="")
    p.add_argument("--driver", choices=["mock", "container"], default="mock")
    p.add_argument("--mock-script", default="")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("repair", help="validate then repair confirmed samples")
    p.add_argument("paths", nargs="+")
    p.add_argument("--model", required=True)
    p.add_argument("--driver", choices=["mock", "container"], default="mock")
    p.add_argument("--mock-script", default="")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_repair)

    p = sub.add_parser("lifecycle", help="run the full closed loop over input files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--config", required=True)
    p.add_argument("--run-dir", default="")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=_cmd_lifecycle)

    p = sub.add_parser("report", help="compute lifecycle metrics against labels")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--labels", required=True)
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
