"""Corpus loading, IPA tokenization, phoneme inventories and word encoding.

Corpus files are UTF-8 TSV with ``word<TAB>ipa<TAB>frequency`` columns
(extra columns ignored).  Transcriptions are tokenized into phoneme tokens,
the set of tokens becomes an integer-ID inventory, and each word is encoded
as a sequence of phoneme IDs.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

__all__ = [
    "CorpusRow",
    "EncodedWord",
    "PhonemeInventory",
    "DEFAULT_DIGRAPHS",
    "load_corpus",
    "tokenize_ipa",
    "build_inventory",
    "encode_word",
    "save_words",
    "load_words",
]

# Affricates that count as one phoneme even though they are written with two
# base symbols.  Configurable everywhere a digraph set is accepted.
DEFAULT_DIGRAPHS = frozenset({"dʒ", "tʃ"})

# Stripped during tokenization: syllable dot, primary/secondary stress marks.
SEPARATORS = frozenset({".", "ˈ", "ˌ"})

TIE_BAR = "͡"  # joins its neighbours into a digraph candidate


@dataclass(frozen=True)
class CorpusRow:
    """One corpus entry: orthography, raw IPA transcription (no slashes),
    and a usage frequency in arbitrary units."""

    word: str
    ipa: str
    frequency: float


@dataclass(frozen=True)
class EncodedWord:
    """A word with its transcription encoded as phoneme IDs."""

    word: str
    ipa: str
    phonemes: tuple[int, ...]
    frequency: float

    def __len__(self) -> int:
        return len(self.phonemes)


class PhonemeInventory:
    """Bijection between phoneme tokens and dense integer IDs 0..K-1."""

    def __init__(self, symbols: Sequence[str]):
        self.symbols: list[str] = list(symbols)
        self.id_of: dict[str, int] = {s: i for i, s in enumerate(self.symbols)}
        if len(self.id_of) != len(self.symbols):
            raise DataError("inventory contains duplicate phoneme tokens")
        self._digraphs: frozenset[str] | None = None

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, token: str) -> bool:
        return token in self.id_of

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PhonemeInventory) and self.symbols == other.symbols

    def multi_segment_tokens(self) -> frozenset[str]:
        """Tokens spanning more than one base symbol, i.e. the digraphs to
        respect when re-tokenizing text against this inventory."""
        if self._digraphs is None:
            self._digraphs = frozenset(s for s in self.symbols if len(_segments(s)) > 1)
        return self._digraphs

    def save(self, path: str | Path) -> None:
        """Write the sidecar file: one ``token<TAB>id`` line per symbol, by id."""
        with open(path, "w", encoding="utf-8") as fh:
            for i, sym in enumerate(self.symbols):
                fh.write(f"{sym}\t{i}\n")

    @classmethod
    def load(cls, path: str | Path) -> "PhonemeInventory":
        entries: dict[int, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise DataError(f"{path}: line {lineno}: expected 'token<TAB>id'")
                try:
                    ident = int(parts[1])
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: bad id {parts[1]!r}") from None
                if ident in entries:
                    raise DataError(f"{path}: line {lineno}: duplicate id {ident}")
                entries[ident] = parts[0]
        if not entries:
            raise DataError(f"{path}: inventory file is empty")
        if sorted(entries) != list(range(len(entries))):
            raise DataError(f"{path}: ids are not dense 0..{len(entries) - 1}")
        return cls([entries[i] for i in range(len(entries))])


def load_corpus(path: str | Path, limit: int | None = None) -> list[CorpusRow]:
    """Read a corpus TSV into rows, deduplicated and frequency-ranked.

    Duplicate words keep the first-seen transcription.  Rows are sorted by
    frequency descending with ties broken by orthography ascending (code
    point order, which for UTF-8 text equals byte order), then truncated
    to ``limit`` if given.  The result is deterministic for fixed input.
    """
    if limit is not None and limit <= 0:
        raise ValueError("limit must be positive")
    rows: list[CorpusRow] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8-sig", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise DataError(
                    f"{path}: line {lineno}: expected at least 3 tab-separated "
                    f"fields, got {len(parts)}"
                )
            word = parts[0].strip()
            ipa = parts[1].strip()
            try:
                frequency = float(parts[2])
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: cannot parse frequency {parts[2]!r}"
                ) from None
            if not word:
                raise DataError(f"{path}: line {lineno}: empty word")
            if not ipa:
                raise DataError(f"{path}: line {lineno}: empty IPA transcription")
            if math.isnan(frequency) or frequency < 0:
                raise DataError(f"{path}: line {lineno}: frequency must be >= 0")
            if word in seen:
                continue
            seen.add(word)
            rows.append(CorpusRow(word, ipa, frequency))
    if not rows:
        raise DataError(f"{path}: corpus is empty")
    rows.sort(key=lambda r: (-r.frequency, r.word))
    if limit is not None:
        rows = rows[:limit]
    return rows


def _segments(text: str) -> list[tuple[str, bool]]:
    """Split NFC text into (segment, tied_to_next) units.

    A segment is one base character plus its trailing combining marks.  The
    tie bar U+0361 stays attached to the segment it follows and flags it as
    joined to the next segment.
    """
    segs: list[list] = []
    for ch in text:
        if unicodedata.category(ch).startswith("M") and segs:
            segs[-1][0] += ch
            if ch == TIE_BAR:
                segs[-1][1] = True
        else:
            # a combining mark with no preceding base starts its own segment
            segs.append([ch, ch == TIE_BAR])
    return [(text, tied) for text, tied in segs]


def tokenize_ipa(ipa: str, digraphs: Iterable[str] = DEFAULT_DIGRAPHS) -> list[str]:
    """Split an IPA transcription into phoneme tokens.

    The input is normalized to NFC.  Syllable separators, stress marks and
    whitespace are dropped.  Combining diacritics attach to the preceding
    base symbol.  A tie bar joins its neighbours; if the joined pair (tie
    bar removed) is a known digraph it becomes that digraph token, otherwise
    the pair stays one token with the tie bar kept.  Plain digraphs match
    greedily, longest first, left to right.

    Concatenating the tokens reproduces the normalized input minus the
    separators and minus tie bars of digraphs taken whole.
    """
    norm = unicodedata.normalize("NFC", ipa)
    cleaned = "".join(ch for ch in norm if ch not in SEPARATORS and not ch.isspace())
    segs = _segments(cleaned)
    if not segs:
        raise DataError("no phonemes in transcription")

    dig = {unicodedata.normalize("NFC", d) for d in digraphs}
    dig_seg_lens = {len(_segments(d)) for d in dig if len(_segments(d)) > 1}
    max_span = max(dig_seg_lens, default=1)

    tokens: list[str] = []
    i = 0
    while i < len(segs):
        text, tied = segs[i]
        if tied:
            # collect the whole tie chain plus the segment that closes it
            j = i
            while j < len(segs) and segs[j][1]:
                j += 1
            j = min(j + 1, len(segs))
            joined = "".join(s for s, _ in segs[i:j])
            plain = joined.replace(TIE_BAR, "")
            tokens.append(plain if plain in dig else joined)
            i = j
            continue
        matched = False
        for span in range(min(max_span, len(segs) - i), 1, -1):
            if any(t for _, t in segs[i : i + span]):
                continue
            candidate = "".join(s for s, _ in segs[i : i + span])
            if candidate in dig:
                tokens.append(candidate)
                i += span
                matched = True
                break
        if not matched:
            tokens.append(text)
            i += 1
    return tokens


def build_inventory(
    rows: Sequence[CorpusRow], digraphs: Iterable[str] = DEFAULT_DIGRAPHS
) -> PhonemeInventory:
    """Assign integer IDs to phoneme tokens by first occurrence over rows."""
    if not rows:
        raise DataError("cannot build an inventory from an empty corpus")
    symbols: list[str] = []
    known: set[str] = set()
    for row in rows:
        try:
            tokens = tokenize_ipa(row.ipa, digraphs)
        except DataError as exc:
            raise DataError(f"word {row.word!r}: {exc}") from None
        for token in tokens:
            if token not in known:
                known.add(token)
                symbols.append(token)
    return PhonemeInventory(symbols)


def encode_word(
    row: CorpusRow,
    inventory: PhonemeInventory,
    digraphs: Iterable[str] | None = None,
) -> EncodedWord:
    """Encode a row's transcription as phoneme IDs against an inventory.

    When no digraph set is given, the inventory's own multi-symbol tokens
    are used, so text encoded against an inventory tokenizes the same way
    the inventory was built.
    """
    if digraphs is None:
        digraphs = inventory.multi_segment_tokens()
    tokens = tokenize_ipa(row.ipa, digraphs)
    ids = []
    for token in tokens:
        if token not in inventory.id_of:
            raise DataError(f"word {row.word!r}: phoneme {token!r} not in inventory")
        ids.append(inventory.id_of[token])
    return EncodedWord(row.word, row.ipa, tuple(ids), row.frequency)


def save_words(path: str | Path, words: Sequence[EncodedWord]) -> None:
    """Write the encoded word list: word, ipa, length, frequency, ID list."""
    with open(path, "w", encoding="utf-8") as fh:
        for w in words:
            ids = ",".join(str(p) for p in w.phonemes)
            fh.write(f"{w.word}\t{w.ipa}\t{len(w.phonemes)}\t{w.frequency!r}\t{ids}\n")


def load_words(path: str | Path) -> list[EncodedWord]:
    """Read back a file produced by save_words."""
    words: list[EncodedWord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise DataError(f"{path}: line {lineno}: expected 5 fields")
            word, ipa, length_s, freq_s, ids_s = parts
            try:
                length = int(length_s)
                frequency = float(freq_s)
                phonemes = tuple(int(p) for p in ids_s.split(",")) if ids_s else ()
            except ValueError:
                raise DataError(f"{path}: line {lineno}: malformed numeric field") from None
            if length != len(phonemes) or not phonemes:
                raise DataError(f"{path}: line {lineno}: length does not match ID list")
            words.append(EncodedWord(word, ipa, phonemes, frequency))
    if not words:
        raise DataError(f"{path}: word file is empty")
    return words
