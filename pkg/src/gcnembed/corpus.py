"""CoNLL-U ingestion, vocabulary construction and frequent-word subsampling."""

from __future__ import annotations

import hashlib
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator

import numpy as np

UNK = "<unk>"

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)


@dataclass
class TokenizedSentence:
    """One parsed sentence.

    ``token_ids`` is ``None`` until the sentence is encoded against a
    :class:`Vocabulary`.
    """

    forms: list[str]
    raw_heads: list[int]
    raw_labels: list[str]
    token_ids: list[int] | None = None
    line: int = 0

    def __len__(self) -> int:
        return len(self.forms)


@dataclass
class ConlluError:
    """A recoverable parse failure for a single sentence block."""

    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class Vocabulary:
    words: list[str]
    counts: np.ndarray
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary contains duplicate words")
        if self.counts.shape != (len(self.words),):
            raise ValueError("counts must have one entry per word")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    @property
    def unk_id(self) -> int | None:
        return self.index.get(UNK)

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def lookup(self, word: str) -> int:
        i = self.index.get(word)
        if i is None:
            if self.unk_id is None:
                raise KeyError(word)
            return self.unk_id
        return i

    def encode(self, sentence: TokenizedSentence) -> TokenizedSentence:
        sentence.token_ids = [self.lookup(w) for w in sentence.forms]
        return sentence

    def frequency(self, word_id: int) -> float:
        return float(self.counts[word_id]) / self.total_tokens

    def digest(self) -> str:
        h = hashlib.sha256()
        for w, c in zip(self.words, self.counts):
            h.update(f"{w}\t{int(c)}\n".encode("utf-8"))
        return h.hexdigest()

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for w, c in zip(self.words, self.counts):
                if "\t" in w or "\n" in w:
                    raise ValueError(f"word {w!r} cannot be written to a vocabulary file")
                f.write(f"{w}\t{int(c)}\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Vocabulary":
        words, counts = [], []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count'")
                try:
                    count = int(parts[1])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad count {parts[1]!r}") from None
                words.append(parts[0])
                counts.append(count)
        return cls(words, np.array(counts, dtype=np.int64))


def _parse_block(lines: list[tuple[int, str]], lowercase: bool) -> TokenizedSentence | ConlluError:
    forms, heads, labels, token_lines = [], [], [], []
    for lineno, line in lines:
        cols = line.split("\t")
        if len(cols) != 10:
            return ConlluError(lineno, f"expected 10 columns, got {len(cols)}")
        tok_id = cols[ID]
        if "-" in tok_id or "." in tok_id:
            continue
        try:
            position = int(tok_id)
        except ValueError:
            return ConlluError(lineno, f"non-integer token id {tok_id!r}")
        if position != len(forms) + 1:
            return ConlluError(lineno, f"token id {position} out of sequence")
        try:
            head = int(cols[HEAD])
        except ValueError:
            return ConlluError(lineno, f"non-integer HEAD {cols[HEAD]!r}")
        form = cols[FORM].lower() if lowercase else cols[FORM]
        forms.append(form)
        heads.append(head)
        labels.append(cols[DEPREL])
        token_lines.append(lineno)
    if not forms:
        return ConlluError(lines[0][0], "sentence has no tokens")
    n = len(forms)
    for i, h in enumerate(heads):
        if h < 0 or h > n:
            return ConlluError(token_lines[i], f"HEAD {h} out of range for {n} tokens")
        if h == i + 1:
            return ConlluError(token_lines[i], f"token {i + 1} is its own head")
    return TokenizedSentence(forms, heads, labels, line=lines[0][0])


def parse_conllu(
    stream: BinaryIO | Iterable[bytes] | bytes,
    vocab: Vocabulary | None = None,
    lowercase: bool = True,
) -> Iterator[TokenizedSentence | ConlluError]:
    """Yield one :class:`TokenizedSentence` or :class:`ConlluError` per block.

    Multiword ranges (``3-4``) and empty nodes (``5.1``) are skipped. Bytes
    that are not valid UTF-8 are replaced rather than raising; a broken block
    is reported and parsing resumes at the next blank line.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    block: list[tuple[int, str]] = []

    def flush():
        item = _parse_block(block, lowercase)
        if vocab is not None and isinstance(item, TokenizedSentence):
            vocab.encode(item)
        return item

    for lineno, raw in enumerate(stream, 1):
        line = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
        line = line.rstrip("\r\n")
        if not line.strip():
            if block:
                yield flush()
                block = []
            continue
        if line.startswith("#"):
            continue
        block.append((lineno, line))
    if block:
        yield flush()


def read_conllu(path, vocab=None, lowercase=True):
    """Read a whole file; returns ``(sentences, errors)``."""
    sentences, errors = [], []
    with open(path, "rb") as f:
        for item in parse_conllu(f, vocab, lowercase):
            (errors if isinstance(item, ConlluError) else sentences).append(item)
    return sentences, errors


def build_vocabulary(
    sentences: Iterable[TokenizedSentence | Iterable[str]],
    max_size: int = 150_000,
    min_count: int = 5,
) -> Vocabulary:
    """Frequency-ranked vocabulary with a trailing ``<unk>`` entry.

    Ties in frequency are broken by ascending surface form. At most
    ``max_size`` words are kept; the reserved unk entry comes on top of that
    and absorbs the occurrences of every dropped word.
    """
    if max_size < 1 or min_count < 1:
        raise ValueError("max_size and min_count must be positive")
    counter: Counter[str] = Counter()
    for s in sentences:
        forms = s.forms if isinstance(s, TokenizedSentence) else s
        counter.update(forms)
    dropped = counter.pop(UNK, 0)
    if not counter and not dropped:
        raise ValueError("empty corpus: no trainable vocabulary")
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = [(w, c) for w, c in ranked if c >= min_count][:max_size]
    if not kept:
        raise ValueError("empty corpus: no word reaches min_count")
    dropped += sum(counter.values()) - sum(c for _, c in kept)
    words = [w for w, _ in kept] + [UNK]
    counts = np.array([c for _, c in kept] + [dropped], dtype=np.int64)
    return Vocabulary(words, counts)


def keep_probability(word_id: int, vocab: Vocabulary, threshold: float = 1e-4) -> float:
    """Probability that an occurrence survives subsampling: ``min(1, sqrt(t / f))``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    f = vocab.frequency(word_id)
    if f <= 0:
        return 1.0
    return min(1.0, math.sqrt(threshold / f))


def keep_probabilities(vocab: Vocabulary, threshold: float = 1e-4) -> np.ndarray:
    """Vectorised :func:`keep_probability` over the whole vocabulary."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    f = vocab.counts / max(vocab.total_tokens, 1)
    with np.errstate(divide="ignore"):
        p = np.where(f > 0, np.sqrt(threshold / np.where(f > 0, f, 1.0)), 1.0)
    return np.minimum(p, 1.0)


def select_targets(
    sentence: TokenizedSentence,
    vocab: Vocabulary,
    threshold: float,
    rng: np.random.Generator,
    keep: np.ndarray | None = None,
) -> list[int]:
    """Positions that serve as prediction targets in this pass.

    The sentence itself is left alone; unk positions are never targets.
    ``keep`` may hold precomputed :func:`keep_probabilities`.
    """
    ids = np.asarray(sentence.token_ids)
    if keep is None:
        keep = keep_probabilities(vocab, threshold)
    p = keep[ids]
    if vocab.unk_id is not None:
        p = np.where(ids == vocab.unk_id, 0.0, p)
    draws = rng.random(len(ids))
    return [int(i) for i in np.flatnonzero(draws < p)]
