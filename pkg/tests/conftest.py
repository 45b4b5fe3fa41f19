"""Shared fixtures: the reference example sentences used across decoder,
scheme and acceptance tests, with their gold spans and triplets."""

from dataclasses import dataclass

import pytest

from causalex.scheme import CausalSpan, CausalTriplet, Sentence


@dataclass(frozen=True)
class GoldSentence:
    sentence: Sentence
    tags: tuple[str, ...]
    spans: tuple[CausalSpan, ...]
    triplets: frozenset[CausalTriplet]


def _tags(n: int, spans) -> tuple[str, ...]:
    tags = ["O"] * n
    for span in spans:
        tags[span.start] = f"B-{span.role}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.role}"
    return tuple(tags)


def _gold(sid, text, spans, triplets) -> GoldSentence:
    sentence = Sentence(id=sid, tokens=tuple(text.split()))
    spans = tuple(spans)
    return GoldSentence(
        sentence=sentence,
        tags=_tags(len(sentence), spans),
        spans=spans,
        triplets=frozenset(triplets),
    )


@pytest.fixture(scope="session")
def single_pair():
    """One two-token cause, one single-token effect."""
    return _gold(
        0,
        "Financial stress is one of the main causes of divorce .",
        [CausalSpan("C", 0, 2), CausalSpan("E", 9, 10)],
        [CausalTriplet(cause=(0, 2), effect=(9, 10))],
    )


@pytest.fixture(scope="session")
def embedded_chain():
    """A middle span acting as effect of one triplet and cause of another;
    span token indices 5..7, 17..19, 22..25 inclusive."""
    return _gold(
        1,
        "It has been suggested that the chronic inflammation "
        "in the stomach lining that is often triggered by "
        "Helicobacter pylori infection leads to an increased acid production .",
        [
            CausalSpan("Emb", 5, 8),
            CausalSpan("C", 17, 20),
            CausalSpan("E", 22, 26),
        ],
        [
            CausalTriplet(cause=(17, 20), effect=(5, 8)),
            CausalTriplet(cause=(5, 8), effect=(22, 26)),
        ],
    )


@pytest.fixture(scope="session")
def coordinated_causes():
    """Five coordinated causes sharing a single effect."""
    return _gold(
        2,
        "The damages caused by mudslides , tremors , subsidence , "
        "superficial or underground water were verified , as well as "
        "swelling clay soils .",
        [
            CausalSpan("E", 0, 2),
            CausalSpan("C", 4, 5),
            CausalSpan("C", 6, 7),
            CausalSpan("C", 8, 9),
            CausalSpan("C", 10, 14),
            CausalSpan("C", 20, 23),
        ],
        [
            CausalTriplet(cause=(4, 5), effect=(0, 2)),
            CausalTriplet(cause=(6, 7), effect=(0, 2)),
            CausalTriplet(cause=(8, 9), effect=(0, 2)),
            CausalTriplet(cause=(10, 14), effect=(0, 2)),
            CausalTriplet(cause=(20, 23), effect=(0, 2)),
        ],
    )


@pytest.fixture(scope="session")
def separated_pairs():
    """Two independent cause-effect pairs; correct decoding keeps the
    near pairs and rejects the crossing assignment."""
    return _gold(
        3,
        "The torrential rains caused the disaster , and the typhoon "
        "caused the damage .",
        [
            CausalSpan("C", 1, 3),
            CausalSpan("E", 4, 6),
            CausalSpan("C", 8, 10),
            CausalSpan("E", 11, 13),
        ],
        [
            CausalTriplet(cause=(1, 3), effect=(4, 6)),
            CausalTriplet(cause=(8, 10), effect=(11, 13)),
        ],
    )


@pytest.fixture(scope="session")
def embedded_with_two_effects():
    """An embedded span feeding two coordinated-looking effects that are in
    fact separated by ordinary words; selected by minimal distance."""
    return _gold(
        4,
        "This year 's Nobel Laureates in Physiology or Medicine made the "
        "remarkable and unexpected discovery that inflammation in the stomach "
        "as well as ulceration of the stomach or duodenum is the result of "
        "an infection of the stomach caused by the bacterium Helicobacter pylori .",
        [
            CausalSpan("E", 16, 17),
            CausalSpan("E", 23, 24),
            CausalSpan("Emb", 33, 35),
            CausalSpan("C", 40, 44),
        ],
        [
            CausalTriplet(cause=(33, 35), effect=(16, 17)),
            CausalTriplet(cause=(33, 35), effect=(23, 24)),
            CausalTriplet(cause=(40, 44), effect=(33, 35)),
        ],
    )


@pytest.fixture(scope="session")
def all_gold(single_pair, embedded_chain, coordinated_causes, separated_pairs,
             embedded_with_two_effects):
    return [single_pair, embedded_chain, coordinated_causes, separated_pairs,
            embedded_with_two_effects]
