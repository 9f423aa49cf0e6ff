"""Phonetic similarity graphs over IPA transcriptions.

Pipeline: load a word/IPA/frequency corpus, encode transcriptions as
phoneme-ID sequences, score every word pair with optimal global alignment,
persist the scores as a compact binary edge store, and answer graph queries
(histograms, ego networks, shortest paths, Gephi exports) over filtered
views of that store.
"""

from .aligner import GAP, Alignment, ScoringScheme, nw_align, nw_score, oracle_score
from .corpus import (
    DEFAULT_DIGRAPHS,
    CorpusRow,
    EncodedWord,
    PhonemeInventory,
    build_inventory,
    encode_word,
    load_corpus,
    tokenize_ipa,
)
from .engine import ComputePlan, ComputeStats, compute_all_pairs, preflight_range_check
from .errors import DataError, PhonsimError
from .graph import GraphView, Path, ego_network, filter_view, shortest_path
from .store import EdgeStore, EdgeStoreWriter, Histogram, histogram, normalize
from .triangle import (
    col_of,
    index_of,
    nodes_for_edge_budget,
    num_edges,
    plan_block_width,
    prefix_count,
    row_of,
)

__version__ = "0.1.0"
