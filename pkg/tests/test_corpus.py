from __future__ import annotations

import numpy as np

from vlf.corpus import featurize_samples, generate_samples, seed_corpus
from vlf.uast import parse_to_uast
from vlf.validation import ValidationSample, find_sinks


class TestGeneratedCorpus:
    def test_balanced_and_deterministic(self):
        a = generate_samples(60, seed=4)
        b = generate_samples(60, seed=4)
        assert [(s.name, s.source) for s in a] == [(s.name, s.source) for s in b]
        assert sum(s.label for s in a) == 30

    def test_all_parse_cleanly(self):
        for sample in generate_samples(90, seed=6):
            doc = parse_to_uast(sample.source.encode(), sample.language)
            assert not doc.has_errors, sample.name

    def test_vulnerable_samples_expose_their_sink_class(self):
        for sample in generate_samples(90, seed=8):
            if sample.label != 1:
                continue
            doc = parse_to_uast(sample.source.encode(), sample.language)
            vs = ValidationSample(
                sample_id=sample.name, source=sample.source,
                language=sample.language, doc=doc, flag=1,
            )
            classes = {h.vuln_class for h in find_sinks(vs)}
            assert sample.vuln_class in classes, sample.name

    def test_pairs_share_identifier_draws(self):
        samples = generate_samples(6, seed=12)
        vuln, safe = samples[0], samples[1]
        assert vuln.label == 1 and safe.label == 0
        # paired python sql templates draw the same function name
        vuln_fn = vuln.source.split("def ")[1].split("(")[0]
        safe_fn = safe.source.split("def ")[1].split("(")[0]
        assert vuln_fn == safe_fn

    def test_featurize_shapes(self):
        feats = featurize_samples(generate_samples(12, seed=3))
        for f in feats:
            assert f.semantic.shape == (1536,)
            assert f.graph.features.shape[1] == 768
            assert f.label in (0, 1)
