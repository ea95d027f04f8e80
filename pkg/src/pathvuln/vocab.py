"""Token/path vocabularies mapping strings to embedding row ids.

Row 0 is always the padding id and row 1 the unknown id; real entries
start at 2 and are ordered by descending training frequency with ties
broken lexicographically, so identical corpora always produce identical
id assignments.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedRecord

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<PAD>"
UNK_TOKEN = "<UNK>"

#: Class labels in id order: safe gets id 0, vuln id 1. The positive
#: (vulnerable) class is id 1 everywhere downstream.
TAGS = ("safe", "vuln")

_HEADER = "#vocab-format 1"


@dataclass(frozen=True)
class Vocabulary:
    """Immutable token table; position in `tokens` is the embedding id."""

    tokens: tuple[str, ...]
    counts: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.tokens) < 2 or self.tokens[0] != PAD_TOKEN or self.tokens[1] != UNK_TOKEN:
            raise ValueError("vocabulary must start with the padding and unknown sentinels")
        if len(self.tokens) != len(self.counts):
            raise ValueError("tokens and counts length mismatch")
        index = {}
        for i, tok in enumerate(self.tokens):
            if tok in index:
                raise ValueError(f"duplicate vocabulary entry {tok!r}")
            index[tok] = i
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        """Embedding row for token; unseen tokens map to the unknown id."""
        return self._index.get(token, UNK_ID)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    @classmethod
    def from_counts(cls, counts: Counter, min_count: int = 1) -> "Vocabulary":
        """Build from training-corpus frequencies.

        Entries below min_count are dropped (they will encode as unknown).
        """
        kept = [
            (tok, n)
            for tok, n in counts.items()
            if n >= min_count and tok not in (PAD_TOKEN, UNK_TOKEN)
        ]
        kept.sort(key=lambda item: (-item[1], item[0]))
        tokens = (PAD_TOKEN, UNK_TOKEN) + tuple(tok for tok, _ in kept)
        freq = (0, 0) + tuple(n for _, n in kept)
        return cls(tokens=tokens, counts=freq)

    # --- serialization ---------------------------------------------------

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_HEADER + "\n")
            for i, (tok, n) in enumerate(zip(self.tokens, self.counts)):
                fh.write(f"{i}\t{n}\t{tok}\n")

    @classmethod
    def from_tsv(cls, path) -> "Vocabulary":
        tokens = []
        counts = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != _HEADER:
                raise MalformedRecord(f"{path}: unrecognized vocabulary header {header!r}", 1)
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise MalformedRecord(f"{path}: expected 3 tab-separated fields", lineno)
                ident, n, tok = parts
                try:
                    ident = int(ident)
                    n = int(n)
                except ValueError:
                    raise MalformedRecord(f"{path}: non-integer id or count", lineno) from None
                if ident != len(tokens):
                    raise MalformedRecord(
                        f"{path}: ids must be contiguous (expected {len(tokens)}, got {ident})",
                        lineno,
                    )
                tokens.append(tok)
                counts.append(n)
        try:
            return cls(tokens=tuple(tokens), counts=tuple(counts))
        except ValueError as exc:
            raise MalformedRecord(f"{path}: {exc}", 1) from None

    def digest_update(self, h) -> None:
        for i, (tok, n) in enumerate(zip(self.tokens, self.counts)):
            h.update(f"{i}\t{n}\t{tok}\n".encode("utf-8"))


def vocab_digest(value_vocab: Vocabulary, path_vocab: Vocabulary) -> str:
    """Stable fingerprint binding a model checkpoint to its vocabularies."""
    h = hashlib.sha256()
    h.update(b"values\n")
    value_vocab.digest_update(h)
    h.update(b"paths\n")
    path_vocab.digest_update(h)
    return h.hexdigest()


def build_vocabularies(bags, min_count: int = 1) -> tuple[Vocabulary, Vocabulary]:
    """Count tokens/paths over training bags and freeze both tables."""
    value_counts: Counter = Counter()
    path_counts: Counter = Counter()
    for bag in bags:
        for ctx in bag.contexts:
            value_counts[ctx.start] += 1
            value_counts[ctx.end] += 1
            path_counts[ctx.path] += 1
    return (
        Vocabulary.from_counts(value_counts, min_count),
        Vocabulary.from_counts(path_counts, min_count),
    )


@dataclass(frozen=True)
class EncodedBag:
    """One function's contexts as embedding ids, ready for batching."""

    sample_id: int
    label_id: int
    starts: np.ndarray  # (n,) int32
    paths: np.ndarray
    ends: np.ndarray

    def __len__(self) -> int:
        return len(self.starts)


def encode_bag(bag, value_vocab: Vocabulary, path_vocab: Vocabulary) -> EncodedBag:
    """Map a bag's contexts through the vocabularies (unknowns to UNK)."""
    n = len(bag.contexts)
    starts = np.empty(n, dtype=np.int32)
    paths = np.empty(n, dtype=np.int32)
    ends = np.empty(n, dtype=np.int32)
    for i, ctx in enumerate(bag.contexts):
        starts[i] = value_vocab.id_of(ctx.start)
        paths[i] = path_vocab.id_of(ctx.path)
        ends[i] = value_vocab.id_of(ctx.end)
    return EncodedBag(
        sample_id=bag.sample_id,
        label_id=TAGS.index(bag.label),
        starts=starts,
        paths=paths,
        ends=ends,
    )
