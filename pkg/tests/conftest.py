"""Shared fixtures and reference helpers."""

import random

import pytest

from phonsim.aligner import DEFAULT_SCHEME, ScoringScheme, nw_score
from phonsim.corpus import EncodedWord
from phonsim.engine import ComputePlan, compute_all_pairs
from phonsim.store import EdgeStore, EdgeStoreWriter


def make_words(n, seed=0, alphabet=12, min_len=1, max_len=9):
    """Deterministic random corpus of encoded words."""
    rng = random.Random(seed)
    return [
        EncodedWord(
            word=f"w{i:04d}",
            ipa=f"ipa{i:04d}",
            phonemes=tuple(rng.randrange(alphabet) for _ in range(rng.randint(min_len, max_len))),
            frequency=float(n - i),
        )
        for i in range(n)
    ]


def naive_payload(words, scheme=DEFAULT_SCHEME):
    """Independent reference: single-threaded double loop over the upper
    triangle, one scalar alignment per pair."""
    out = bytearray()
    for r in range(len(words)):
        for c in range(r + 1, len(words)):
            score = nw_score(words[r], words[c], scheme)
            out += score.to_bytes(1, "little", signed=True)
    return bytes(out)


def build_store(prefix, words, scheme=DEFAULT_SCHEME, chunk_size=4096, workers=1):
    """Compute and persist a store; returns its manifest."""
    plan = ComputePlan(n=len(words), chunk_size=chunk_size, worker_count=workers, scheme=scheme)
    writer = EdgeStoreWriter(prefix, words, scheme)
    compute_all_pairs(words, scheme, writer, plan)
    return writer.finalize()


@pytest.fixture
def small_store(tmp_path):
    """A 12-word store plus its words, handy for query tests."""
    words = make_words(12, seed=3, alphabet=6, min_len=2, max_len=6)
    prefix = tmp_path / "small"
    build_store(prefix, words)
    store = EdgeStore(prefix)
    yield store, words
    store.close()
