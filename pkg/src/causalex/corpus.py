"""Annotated-corpus IO, tag statistics and train/validation splitting.

File format: one ``token<TAB>tag`` line per token, a blank line between
sentences, and an optional ``# id: N`` comment line before each sentence.
UTF-8, LF line endings.  Sentences without an id comment are numbered by
their position in the file.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, TooSmall, ValidationError
from .scheme import O_TAG, Sentence, Tags, is_tag, validate_tags

COUNTED_TAGS = ("B-C", "I-C", "B-E", "I-E", "B-Emb", "I-Emb")


@dataclass
class Corpus:
    sentences: list[tuple[Sentence, Tags]]
    name: str = ""

    def __len__(self) -> int:
        return len(self.sentences)

    def ids(self) -> list[int]:
        return [s.id for s, _ in self.sentences]


@dataclass
class TagStats:
    counts: dict[str, int] = field(
        default_factory=lambda: {t: 0 for t in COUNTED_TAGS}
    )

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def read_corpus(source: bytes | io.IOBase, name: str = "",
                validate: bool = True) -> Corpus:
    """Parse the column format; reports malformed lines by number."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data

    sentences: list[tuple[Sentence, Tags]] = []
    seen_ids: set[int] = set()
    tokens: list[str] = []
    tags: list[str] = []
    pending_id: int | None = None
    first_line = 0

    def close(lineno: int) -> None:
        nonlocal tokens, tags, pending_id
        if not tokens:
            if pending_id is not None:
                raise ParseError(f"line {first_line}: id comment without sentence")
            return
        sid = pending_id if pending_id is not None else len(sentences)
        if sid in seen_ids:
            raise ParseError(f"line {first_line}: duplicate sentence id {sid}")
        seen_ids.add(sid)
        tag_tuple = tuple(tags)
        if validate:
            violations = validate_tags(tag_tuple)
            if violations:
                v = violations[0]
                raise ValidationError(
                    f"sentence {sid} (ending line {lineno}), token {v.index}: {v.message}"
                )
        sentences.append((Sentence(id=sid, tokens=tuple(tokens)), tag_tuple))
        tokens, tags, pending_id = [], [], None

    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            close(lineno)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if not body.startswith("id:"):
                continue  # other comments are ignored
            if tokens:
                raise ParseError(f"line {lineno}: id comment inside a sentence")
            try:
                pending_id = int(body[3:].strip())
            except ValueError:
                raise ParseError(f"line {lineno}: malformed id comment {line!r}")
            if pending_id < 0:
                raise ParseError(f"line {lineno}: negative sentence id")
            first_line = lineno
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"line {lineno}: expected token<TAB>tag, got {line!r}"
            )
        token, tag = parts
        if not token:
            raise ParseError(f"line {lineno}: empty token")
        if not is_tag(tag):
            raise ParseError(f"line {lineno}: unknown tag {tag!r}")
        if not tokens:
            first_line = lineno if pending_id is None else first_line
        tokens.append(token)
        tags.append(tag)
    close(len(text.split("\n")))
    return Corpus(sentences=sentences, name=name)


def write_corpus(corpus: Corpus) -> bytes:
    """Canonical serialization; ``read_corpus`` of the result is the identity."""
    out = io.StringIO()
    for sentence, tags in corpus.sentences:
        out.write(f"# id: {sentence.id}\n")
        for token, tag in zip(sentence.tokens, tags):
            out.write(f"{token}\t{tag}\n")
        out.write("\n")
    return out.getvalue().encode("utf-8")


def corpus_stats(corpus: Corpus) -> TagStats:
    """Per-tag-type counts over every sentence (O excluded)."""
    stats = TagStats()
    for _, tags in corpus.sentences:
        for tag in tags:
            if tag != O_TAG:
                stats.counts[tag] += 1
    return stats


def split_validation(corpus: Corpus, fraction: float,
                     seed: int) -> tuple[Corpus, Corpus]:
    """Disjoint (train, validation) partition with round(fraction*n) validation
    sentences, sampled uniformly; deterministic for a given seed."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = len(corpus)
    k = int(round(fraction * n))
    if k < 1 or k >= n:
        raise TooSmall(
            f"cannot take {k} validation sentences from a corpus of {n}"
        )
    rng = np.random.default_rng(seed)
    picked = set(rng.permutation(n)[:k].tolist())
    train = [s for i, s in enumerate(corpus.sentences) if i not in picked]
    val = [s for i, s in enumerate(corpus.sentences) if i in picked]
    return (
        Corpus(train, name=f"{corpus.name}-train"),
        Corpus(val, name=f"{corpus.name}-val"),
    )
