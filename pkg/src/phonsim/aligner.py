"""Optimal global alignment of two phoneme-ID sequences.

The score of aligning two words is the classic dynamic program over a
(len(a)+1) x (len(b)+1) score matrix: each cell takes the maximum of the
diagonal step plus the symbol-pair similarity, the step from above plus the
gap penalty, and the step from the left plus the gap penalty.  The
bottom-right cell is the optimal score.

``nw_score`` keeps only a two-row rolling buffer; ``nw_align`` fills the
whole matrix as one contiguous row-major buffer and walks it back to
recover one optimal alignment.  Both produce identical scores.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import DataError

__all__ = [
    "GAP",
    "ScoringScheme",
    "DEFAULT_SCHEME",
    "Alignment",
    "nw_score",
    "nw_align",
    "oracle_score",
    "load_scheme_file",
]

GAP = None  # slot marker for a phoneme aligned against a gap

ORACLE_MAX_TOTAL_LENGTH = 16


@dataclass(frozen=True)
class ScoringScheme:
    """Symbol-pair similarity plus a per-gap penalty.

    Uniform by default: ``match`` on the diagonal, ``mismatch`` elsewhere.
    ``overrides`` maps unordered ID pairs to specific values; the function
    is kept symmetric so scores do not depend on argument order.
    """

    match: int = 1
    mismatch: int = -1
    gap: int = -1
    overrides: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for (a, b), value in self.overrides.items():
            twin = self.overrides.get((b, a), value)
            if twin != value:
                raise ValueError(f"asymmetric override for pair ({a}, {b}): {value} vs {twin}")

    def similarity(self, a: int, b: int) -> int:
        value = self.overrides.get((a, b))
        if value is None:
            value = self.overrides.get((b, a))
        if value is not None:
            return value
        return self.match if a == b else self.mismatch

    @property
    def min_similarity(self) -> int:
        return min(self.match, self.mismatch, *self.overrides.values()) \
            if self.overrides else min(self.match, self.mismatch)

    @property
    def max_similarity(self) -> int:
        return max(self.match, self.mismatch, *self.overrides.values()) \
            if self.overrides else max(self.match, self.mismatch)

    @property
    def max_abs_similarity(self) -> int:
        return max(abs(self.min_similarity), abs(self.max_similarity))

    def hash_hex(self) -> str:
        """Stable 64-bit hex digest of the full scheme, overrides included."""
        h = hashlib.blake2b(digest_size=8)
        h.update(f"{self.match} {self.mismatch} {self.gap}".encode())
        for (a, b), value in sorted(self.overrides.items()):
            h.update(f" {a},{b}={value}".encode())
        return h.hexdigest()


DEFAULT_SCHEME = ScoringScheme()


@dataclass(frozen=True)
class Alignment:
    """One optimal alignment: (slot_a, slot_b) pairs where a slot is a
    phoneme ID or GAP, plus the total score."""

    pairs: tuple[tuple[int | None, int | None], ...]
    score: int


def _ids(word) -> tuple:
    return tuple(getattr(word, "phonemes", word))


def nw_score(a, b, scheme: ScoringScheme = DEFAULT_SCHEME) -> int:
    """Optimal global alignment score of two words (or raw ID sequences)."""
    sa, sb = _ids(a), _ids(b)
    gap = scheme.gap
    sim = scheme.similarity
    prev = [j * gap for j in range(len(sb) + 1)]
    for i, ai in enumerate(sa, start=1):
        cur = [i * gap] + [0] * len(sb)
        for j, bj in enumerate(sb, start=1):
            cur[j] = max(prev[j - 1] + sim(ai, bj), prev[j] + gap, cur[j - 1] + gap)
        prev = cur
    return prev[len(sb)]


def nw_align(a, b, scheme: ScoringScheme = DEFAULT_SCHEME) -> Alignment:
    """One optimal alignment, with deterministic tie-breaking.

    Ties during traceback prefer the diagonal step, then the step from
    above (symbol of ``a`` against a gap), then the step from the left.
    """
    sa, sb = _ids(a), _ids(b)
    la, lb = len(sa), len(sb)
    gap = scheme.gap
    sim = scheme.similarity
    stride = lb + 1

    # contiguous row-major score matrix, cell (i, j) at m[i*stride + j]
    m = [0] * ((la + 1) * stride)
    for i in range(la + 1):
        m[i * stride] = i * gap
    for j in range(lb + 1):
        m[j] = j * gap
    for i in range(1, la + 1):
        ai = sa[i - 1]
        base = i * stride
        up = base - stride
        for j in range(1, lb + 1):
            m[base + j] = max(
                m[up + j - 1] + sim(ai, sb[j - 1]),
                m[up + j] + gap,
                m[base + j - 1] + gap,
            )

    pairs: list[tuple[int | None, int | None]] = []
    i, j = la, lb
    while i > 0 or j > 0:
        here = m[i * stride + j]
        if i > 0 and j > 0 and here == m[(i - 1) * stride + j - 1] + sim(sa[i - 1], sb[j - 1]):
            pairs.append((sa[i - 1], sb[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and here == m[(i - 1) * stride + j] + gap:
            pairs.append((sa[i - 1], GAP))
            i -= 1
        else:
            pairs.append((GAP, sb[j - 1]))
            j -= 1
    pairs.reverse()
    return Alignment(tuple(pairs), m[la * stride + lb])


def oracle_score(a, b, scheme: ScoringScheme = DEFAULT_SCHEME) -> int:
    """Brute-force reference: enumerate every global alignment recursively
    over the three moves and return the best total.  Exponential; only for
    short inputs (len(a) + len(b) <= 16)."""
    sa, sb = _ids(a), _ids(b)
    if len(sa) + len(sb) > ORACLE_MAX_TOTAL_LENGTH:
        raise ValueError(
            f"oracle limited to len(a)+len(b) <= {ORACLE_MAX_TOTAL_LENGTH}, "
            f"got {len(sa)} + {len(sb)}"
        )
    gap = scheme.gap
    sim = scheme.similarity

    def best(i: int, j: int) -> int:
        if i == len(sa) and j == len(sb):
            return 0
        candidates = []
        if i < len(sa) and j < len(sb):
            candidates.append(sim(sa[i], sb[j]) + best(i + 1, j + 1))
        if i < len(sa):
            candidates.append(gap + best(i + 1, j))
        if j < len(sb):
            candidates.append(gap + best(i, j + 1))
        return max(candidates)

    return best(0, 0)


def load_scheme_file(path: str | Path, inventory=None) -> ScoringScheme:
    """Parse a scheme file: ``match``, ``mismatch`` and ``gap`` declarations
    plus optional ``tokenA<TAB>tokenB<TAB>value`` per-pair overrides.

    Blank lines and ``#`` comments are skipped.  Overrides name phoneme
    tokens, so they need an inventory to resolve against.
    """
    values: dict[str, int] = {}
    overrides: dict[tuple[int, int], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) == 2:
                key, value_s = parts
                if key not in ("match", "mismatch", "gap"):
                    raise DataError(f"{path}: line {lineno}: unknown key {key!r}")
                try:
                    values[key] = int(value_s)
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: {key} must be an integer") from None
            elif len(parts) == 3:
                if inventory is None:
                    raise DataError(
                        f"{path}: line {lineno}: per-pair overrides require an inventory"
                    )
                tok_a, tok_b, value_s = parts
                try:
                    value = int(value_s)
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: override must be an integer") from None
                for tok in (tok_a, tok_b):
                    if tok not in inventory.id_of:
                        raise DataError(f"{path}: line {lineno}: unknown phoneme {tok!r}")
                pair = (inventory.id_of[tok_a], inventory.id_of[tok_b])
                overrides[pair] = value
                overrides[(pair[1], pair[0])] = value
            else:
                raise DataError(f"{path}: line {lineno}: expected 2 or 3 tab-separated fields")
    for key in ("match", "mismatch", "gap"):
        if key not in values:
            raise DataError(f"{path}: missing required key {key!r}")
    return ScoringScheme(values["match"], values["mismatch"], values["gap"], overrides)
