"""Causality tagging scheme: the 7-tag alphabet, triplet encoding and span extraction.

Tags combine a BIO position prefix with a role suffix: Cause (C), Effect (E)
and Emb for spans that act as Cause in one triplet and Effect in another.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import MalformedTags, NoCausality, OutOfRange, PartialOverlap

O_TAG = "O"
ROLES = ("C", "E", "Emb")

# Canonical tag order; doubles as the CRF tag indexing.
TAGS = ("O", "B-C", "I-C", "B-E", "I-E", "B-Emb", "I-Emb")
TAG_TO_INDEX = {t: i for i, t in enumerate(TAGS)}
N_TAGS = len(TAGS)

Tags = tuple[str, ...]
Span = tuple[int, int]  # token indices, half-open [start, end)


def tag_role(tag: str) -> str | None:
    """Role suffix of a tag, or None for O."""
    if tag == O_TAG:
        return None
    return tag.split("-", 1)[1]


def tag_position(tag: str) -> str | None:
    """B/I prefix of a tag, or None for O."""
    if tag == O_TAG:
        return None
    return tag.split("-", 1)[0]


def is_tag(value: str) -> bool:
    return value in TAG_TO_INDEX


@dataclass(frozen=True)
class Sentence:
    """A pre-tokenized sentence with a corpus-unique id."""

    id: int
    tokens: tuple[str, ...]

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"sentence id must be nonnegative, got {self.id}")
        if not self.tokens:
            raise ValueError("sentence must have at least one token")
        if any(not t for t in self.tokens):
            raise ValueError("tokens must be non-empty strings")

    def __len__(self) -> int:
        return len(self.tokens)

    def span_text(self, span: Span) -> str:
        start, end = span
        return " ".join(self.tokens[start:end])


@dataclass(frozen=True, order=True)
class CausalSpan:
    """A role-typed maximal token span."""

    role: str
    start: int
    end: int

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad span boundaries [{self.start}, {self.end})")

    @property
    def span(self) -> Span:
        return (self.start, self.end)


@dataclass(frozen=True, order=True)
class CausalTriplet:
    """An ordered (cause, effect) pair of token spans."""

    cause: Span
    effect: Span

    def __post_init__(self):
        for start, end in (self.cause, self.effect):
            if not 0 <= start < end:
                raise ValueError(f"bad span boundaries [{start}, {end})")
        if _overlaps(self.cause, self.effect):
            raise ValueError("cause and effect spans overlap")

    def cause_text(self, sentence: Sentence) -> str:
        return sentence.span_text(self.cause)

    def effect_text(self, sentence: Sentence) -> str:
        return sentence.span_text(self.effect)


class CausalityClass(enum.Enum):
    SIMPLE_SINGLE = "simple_single"
    COMPLEX = "complex"


@dataclass(frozen=True)
class TagViolation:
    index: int
    message: str


def _overlaps(a: Span, b: Span) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def encode_triplets(sentence: Sentence, triplets: list[CausalTriplet]) -> Tags:
    """Encode gold triplets as a tag sequence.

    A span used only as cause gets B-C/I-C, only as effect B-E/I-E, and a
    span that is cause in one triplet and effect in another (with identical
    boundaries) gets B-Emb/I-Emb.  Spans of distinct roles may coincide
    exactly but must not partially overlap.
    """
    n = len(sentence)
    roles: dict[Span, set[str]] = {}
    for t in triplets:
        roles.setdefault(t.cause, set()).add("C")
        roles.setdefault(t.effect, set()).add("E")

    spans = sorted(roles)
    for start, end in spans:
        if not (0 <= start < end <= n):
            raise OutOfRange(
                f"span [{start}, {end}) outside sentence {sentence.id} of length {n}"
            )
    for a, b in zip(spans, spans[1:]):
        if _overlaps(a, b):
            raise PartialOverlap(
                f"spans [{a[0]}, {a[1]}) and [{b[0]}, {b[1]}) partially overlap"
            )

    tags = [O_TAG] * n
    for span, used in roles.items():
        role = "Emb" if used == {"C", "E"} else ("C" if used == {"C"} else "E")
        start, end = span
        tags[start] = f"B-{role}"
        for i in range(start + 1, end):
            tags[i] = f"I-{role}"
    return tuple(tags)


def validate_tags(tags: Tags) -> list[TagViolation]:
    """Collect BIO well-formedness violations; empty iff well-formed."""
    violations = []
    prev_role: str | None = None
    for i, tag in enumerate(tags):
        if not is_tag(tag):
            violations.append(TagViolation(i, f"unknown tag {tag!r}"))
            prev_role = None
            continue
        pos, role = tag_position(tag), tag_role(tag)
        if pos == "I":
            if prev_role is None:
                violations.append(TagViolation(i, f"I-{role} without preceding span"))
            elif prev_role != role:
                violations.append(
                    TagViolation(i, f"I-{role} continues a {prev_role} span")
                )
        prev_role = role
    return violations


def repair_tags(tags: Tags) -> Tags:
    """Drop orphan I-tags (no open span of the same role) by rewriting them to O.

    Used to clean decoded sequences before triplet extraction; encoding output
    never needs repair.
    """
    repaired = []
    prev_role: str | None = None
    for tag in tags:
        if not is_tag(tag):
            repaired.append(O_TAG)
            prev_role = None
            continue
        pos, role = tag_position(tag), tag_role(tag)
        if pos == "I" and prev_role != role:
            repaired.append(O_TAG)
            prev_role = None
        else:
            repaired.append(tag)
            prev_role = role
    return tuple(repaired)


def extract_spans(tags: Tags) -> list[CausalSpan]:
    """Maximal B-led runs per role, left to right.

    Raises MalformedTags when the sequence fails validation.
    """
    violations = validate_tags(tags)
    if violations:
        first = violations[0]
        raise MalformedTags(f"index {first.index}: {first.message}")

    spans: list[CausalSpan] = []
    start: int | None = None
    role: str | None = None

    def close(end: int) -> None:
        nonlocal start, role
        if start is not None:
            spans.append(CausalSpan(role, start, end))
        start, role = None, None

    for i, tag in enumerate(tags):
        pos = tag_position(tag)
        if pos == "B":
            close(i)
            start, role = i, tag_role(tag)
        elif pos is None:
            close(i)
        # I continues the open span; validation guarantees role agreement
    close(len(tags))
    return spans


def classify_causality(spans: list[CausalSpan]) -> CausalityClass:
    """SIMPLE_SINGLE when no Emb span and a single cause or single effect side;
    COMPLEX otherwise."""
    if not spans:
        raise NoCausality("no causal spans")
    n_c = sum(1 for s in spans if s.role == "C")
    n_e = sum(1 for s in spans if s.role == "E")
    n_emb = sum(1 for s in spans if s.role == "Emb")
    if n_emb == 0 and (n_c == 1 or n_e == 1):
        return CausalityClass.SIMPLE_SINGLE
    return CausalityClass.COMPLEX
