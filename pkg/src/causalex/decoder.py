"""Tag-sequence to causal-triplet decoding.

Each causal span gets a role capacity: a Cause can emit one link (out-degree
1), an Effect can receive one (in-degree 1), an Emb span does both.  Candidate
(cause, effect) pairs come from the Cartesian product of emitters and
receivers; for complex sentences we search combinations of candidates,
smallest size first, keep those whose realized degree usage matches the
recorded capacities and whose coordinated same-role spans pair consistently,
and return the combination with the smallest total span distance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import CombinatorialBlowup
from .scheme import (
    CausalityClass,
    CausalSpan,
    CausalTriplet,
    Sentence,
    Tags,
    classify_causality,
    extract_spans,
)

# Out-degree, in-degree per role: a Cause emits, an Effect receives, an Emb
# span does both.
ROLE_DEGREES = {"C": (1, 0), "E": (0, 1), "Emb": (1, 1)}

COORDINATION_LEXICON = (",", "and", "or", "as well as")
DETERMINERS = ("the", "a", "an")


@dataclass(frozen=True)
class DegreeRecord:
    out_degree: int
    in_degree: int


class Candidate(NamedTuple):
    """Indices into the span list: cause side, effect side."""

    cause: int
    effect: int


@dataclass(frozen=True)
class Combination:
    candidates: tuple[Candidate, ...]
    total_distance: int


@dataclass(frozen=True)
class DecoderConfig:
    coordination_lexicon: tuple[str, ...] = COORDINATION_LEXICON
    determiners: tuple[str, ...] = DETERMINERS
    max_spans: int = 20
    max_combinations: int = 1_000_000


@dataclass
class DecodeResult:
    """Full decode outcome; ``triplets`` is the selected set.

    ``ambiguous`` is True when more than one combination passed all checks at
    the selected search size, i.e. the tags alone do not pin down the triplet
    set and the distance minimum acted as a tie-breaker heuristic.
    """

    triplets: list[CausalTriplet]
    spans: list[CausalSpan] = field(default_factory=list)
    causality_class: CausalityClass | None = None
    ambiguous: bool = False
    n_passing: int = 0
    combination: Combination | None = None


def count_degrees(spans: list[CausalSpan]) -> list[DegreeRecord]:
    if not spans:
        raise ValueError("empty span list")
    return [DegreeRecord(*ROLE_DEGREES[s.role]) for s in spans]


def candidate_pairs(spans: list[CausalSpan]) -> list[Candidate]:
    """All (emitter, receiver) index pairs, ordered by cause then effect index."""
    degrees = [ROLE_DEGREES[s.role] for s in spans]
    return [
        Candidate(i, j)
        for i in range(len(spans))
        if degrees[i][0] == 1
        for j in range(len(spans))
        if degrees[j][1] == 1 and i != j
    ]


def check_degree(comb: frozenset[Candidate] | tuple[Candidate, ...],
                 degrees: list[DegreeRecord]) -> bool:
    """True iff realized usage matches the recorded capacities exactly.

    Usage is binary: every span with out-degree 1 must act as cause in at
    least one candidate, every span with in-degree 1 as effect in at least
    one; spans without capacity never appear by construction.
    """
    out_used = [0] * len(degrees)
    in_used = [0] * len(degrees)
    for cand in comb:
        out_used[cand.cause] = 1
        in_used[cand.effect] = 1
    return all(
        out_used[i] == d.out_degree and in_used[i] == d.in_degree
        for i, d in enumerate(degrees)
    )


def _is_coordination_gap(tokens: tuple[str, ...],
                         config: DecoderConfig) -> bool:
    """True when the inter-span tokens are only coordination items/determiners."""
    allowed = set(config.determiners)
    multi = [tuple(item.split()) for item in config.coordination_lexicon
             if " " in item]
    single = {item for item in config.coordination_lexicon if " " not in item}
    i = 0
    lowered = tuple(t.lower() for t in tokens)
    while i < len(lowered):
        matched = False
        for phrase in multi:
            if lowered[i:i + len(phrase)] == phrase:
                i += len(phrase)
                matched = True
                break
        if matched:
            continue
        if lowered[i] in single or lowered[i] in allowed:
            i += 1
            continue
        return False
    return True


def _coordinated_pairs(spans: list[CausalSpan], sentence: Sentence,
                       config: DecoderConfig) -> list[tuple[int, int]]:
    """Index pairs of same-role spans adjacent in span order whose gap is
    pure coordination."""
    order = sorted(range(len(spans)), key=lambda i: spans[i].start)
    pairs = []
    for a, b in zip(order, order[1:]):
        if spans[a].role != spans[b].role:
            continue
        gap = sentence.tokens[spans[a].end:spans[b].start]
        if _is_coordination_gap(gap, config):
            pairs.append((a, b))
    return pairs


def check_conjunction(comb: frozenset[Candidate] | tuple[Candidate, ...],
                      spans: list[CausalSpan], sentence: Sentence,
                      config: DecoderConfig = DecoderConfig()) -> bool:
    """True iff coordinated same-role spans pair with identical counterpart sets."""
    for a, b in _coordinated_pairs(spans, sentence, config):
        out_a = {c.effect for c in comb if c.cause == a}
        out_b = {c.effect for c in comb if c.cause == b}
        in_a = {c.cause for c in comb if c.effect == a}
        in_b = {c.cause for c in comb if c.effect == b}
        if out_a != out_b or in_a != in_b:
            return False
    return True


def sum_distance(comb: frozenset[Candidate] | tuple[Candidate, ...],
                 spans: list[CausalSpan]) -> int:
    """Total |cause start - effect start| over the combination."""
    return sum(abs(spans[c.cause].start - spans[c.effect].start) for c in comb)


def decode_tags(sentence: Sentence, tags: Tags,
                config: DecoderConfig = DecoderConfig()) -> DecodeResult:
    """Decode a well-formed tag sequence into causal triplets.

    Simple path (no Emb, single cause or single effect): the full candidate
    product, gated by the conjunction check.  Complex path: search candidate
    combinations by increasing size starting at max(total out, total in),
    stop at the first size with any combination passing both checks, and
    select the minimum-distance one (ties: lexicographically smallest index
    sequence).
    """
    spans = extract_spans(tags)
    if not spans:
        return DecodeResult(triplets=[])

    cls = classify_causality(spans)
    candidates = candidate_pairs(spans)

    def materialize(comb: tuple[Candidate, ...]) -> list[CausalTriplet]:
        triplets = [
            CausalTriplet(cause=spans[c.cause].span, effect=spans[c.effect].span)
            for c in comb
        ]
        return sorted(triplets, key=lambda t: (t.cause, t.effect))

    if cls is CausalityClass.SIMPLE_SINGLE:
        comb = tuple(candidates)
        if check_conjunction(comb, spans, sentence, config):
            chosen = Combination(comb, sum_distance(comb, spans))
            return DecodeResult(materialize(comb), spans, cls, False, 1, chosen)
        return DecodeResult([], spans, cls, False, 0)

    if len(spans) > config.max_spans:
        raise CombinatorialBlowup(
            f"{len(spans)} spans exceed the cap of {config.max_spans}"
        )

    degrees = count_degrees(spans)
    min_size = max(
        sum(d.out_degree for d in degrees),
        sum(d.in_degree for d in degrees),
    )

    explored = 0
    for size in range(min_size, len(candidates) + 1):
        explored += math.comb(len(candidates), size)
        if explored > config.max_combinations:
            raise CombinatorialBlowup(
                f"search would explore over {config.max_combinations} combinations"
            )
        passing = [
            comb
            for comb in itertools.combinations(candidates, size)
            if check_degree(comb, degrees)
            and check_conjunction(comb, spans, sentence, config)
        ]
        if passing:
            best = min(passing, key=lambda c: (sum_distance(c, spans), c))
            chosen = Combination(best, sum_distance(best, spans))
            return DecodeResult(
                materialize(best), spans, cls, len(passing) > 1, len(passing),
                chosen,
            )
    return DecodeResult([], spans, cls, False, 0)


def tag2triplet(sentence: Sentence, tags: Tags,
                config: DecoderConfig = DecoderConfig()) -> list[CausalTriplet]:
    """Triplet list for a tag sequence; empty when no causality is present."""
    return decode_tags(sentence, tags, config).triplets
