from __future__ import annotations

import pytest

from vlf.corpus import generate_samples
from vlf.uast.parse import parse_to_uast


@pytest.fixture(scope="session")
def corpus_samples():
    return generate_samples(120, seed=9)


@pytest.fixture(scope="session")
def corpus_docs(corpus_samples):
    return [(s, parse_to_uast(s.source.encode("utf-8"), s.language)) for s in corpus_samples]
