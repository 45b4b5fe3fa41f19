"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured margin when it succeeds."""

import math
import time

import numpy as np

from causalex.corpus import Corpus
from causalex.crf import log_partition, viterbi
from causalex.decoder import decode_tags, tag2triplet
from causalex.evaluate import aggregate_runs, format_report_row, triplet_prf
from causalex.net import mhsa_forward, model_grad
from causalex.scheme import (
    CausalTriplet,
    Sentence,
    TAGS,
    encode_triplets,
    extract_spans,
    validate_tags,
)
from causalex.train import (
    OptimizerState,
    TrainConfig,
    anneal_lr,
    clip_gradients,
    train,
)
from causalex.evaluate import Metrics

from genlayouts import random_layout
from test_crf import enumerate_scores, random_instance
from tinymodel import relative_error, tiny_model
from test_net import finite_difference_grads


def report(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE PASS: {name}{suffix}")


class TestDecoderFixtures:
    def test_tag_to_triplet_fixtures(self, single_pair, embedded_chain,
                                     coordinated_causes, separated_pairs):
        started = time.monotonic()

        result = tag2triplet(single_pair.sentence, single_pair.tags)
        assert set(result) == single_pair.triplets
        assert len(result) == 1

        decoded = decode_tags(embedded_chain.sentence, embedded_chain.tags)
        assert set(decoded.triplets) == embedded_chain.triplets
        assert decoded.n_passing == 1  # only one candidate combination survives

        result = tag2triplet(coordinated_causes.sentence, coordinated_causes.tags)
        assert set(result) == coordinated_causes.triplets
        shared_effect = {t.effect for t in result}
        assert shared_effect == {(0, 2)}
        assert len(result) == 5

        result = tag2triplet(separated_pairs.sentence, separated_pairs.tags)
        assert set(result) == separated_pairs.triplets
        assert CausalTriplet(cause=(1, 3), effect=(11, 13)) not in result
        assert CausalTriplet(cause=(8, 10), effect=(4, 6)) not in result

        elapsed = time.monotonic() - started
        assert elapsed < 1.0
        report("decoder fixtures", f"{elapsed * 1000:.0f} ms")


class TestCrfOracleEquivalence:
    def test_hundred_random_instances(self):
        started = time.monotonic()
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            k = int(rng.integers(2, 5))
            emissions, transitions = random_instance(rng, n, k, scale=1.5)
            scores = enumerate_scores(emissions, transitions)
            values = np.array(list(scores.values()))
            expected = float(np.log(np.exp(values - values.max()).sum())
                             + values.max())
            assert abs(log_partition(emissions, transitions) - expected) < 1e-9
            path = viterbi(emissions, transitions)
            assert scores[tuple(int(t) for t in path)] == max(scores.values())
        elapsed = time.monotonic() - started
        assert elapsed < 10.0
        report("crf oracle equivalence", f"100 instances in {elapsed:.1f} s")


class TestGradientSuite:
    def test_full_pipeline_finite_differences(self):
        started = time.monotonic()
        worst = 0.0
        for seed in range(5):
            params, bundle, gold, _ = tiny_model(seed + 100)
            assert bundle.n == 3
            _, grads = model_grad(params, [(bundle, gold, None)])
            fd = finite_difference_grads(params, bundle, gold, None, step=1e-4)
            for name in params.TENSOR_NAMES:
                reference = fd[name]
                if name == "char_table":
                    reference = reference.copy()
                    reference[0] = 0.0  # PAD row frozen
                err = relative_error(grads[name], reference)
                worst = max(worst, err)
                assert err < 1e-4, f"seed {seed}, {name}: {err:.2e}"
        elapsed = time.monotonic() - started
        assert elapsed < 60.0
        report("gradient suite",
               f"worst rel err {worst:.2e}, {elapsed:.1f} s, 5 seeds")


class TestAttentionProperties:
    def test_row_sums_and_degeneracies(self):
        params, _, _, _ = tiny_model(7)
        dims = params.dims
        rng = np.random.default_rng(3)

        h = rng.normal(size=(6, dims.bilstm_dim))
        _, trace = mhsa_forward(h, params)
        np.testing.assert_allclose(trace.probs.sum(axis=2), 1.0, atol=1e-6)

        h1 = rng.normal(size=(1, dims.bilstm_dim))
        _, trace1 = mhsa_forward(h1, params)
        np.testing.assert_allclose(trace1.probs, 1.0, atol=1e-12)

        row = rng.normal(size=dims.bilstm_dim)
        hn = np.tile(row, (5, 1))
        _, tracen = mhsa_forward(hn, params)
        np.testing.assert_allclose(tracen.probs, 1.0 / 5.0, atol=1e-12)
        report("attention properties")


class TestSchemeRoundtrip:
    N_LAYOUTS = 10_000

    def test_bulk_roundtrip(self):
        rng = np.random.default_rng(90125)
        ambiguous = []
        for i in range(self.N_LAYOUTS):
            sentence, triplets = random_layout(rng, i)
            tags = encode_triplets(sentence, sorted(triplets))
            assert validate_tags(tags) == []
            spans = extract_spans(tags)
            assert {s.span for s in spans} == (
                {t.cause for t in triplets} | {t.effect for t in triplets})

            result = decode_tags(sentence, tags)
            if result.ambiguous:
                ambiguous.append((i, len(spans), result.n_passing))
            else:
                assert set(result.triplets) == triplets, f"layout {i}"

        share = 1.0 - len(ambiguous) / self.N_LAYOUTS
        print(f"\n  decode-ambiguous layouts: {len(ambiguous)}"
              f" of {self.N_LAYOUTS} ({1 - share:.2%})")
        for sid, n_spans, n_passing in ambiguous[:10]:
            print(f"    layout {sid}: {n_spans} spans,"
                  f" {n_passing} passing combinations")
        assert share >= 0.95
        report("scheme roundtrip",
               f"{self.N_LAYOUTS} layouts, {share:.1%} unambiguous")


NOUNS = ("flooding", "drought", "famine", "unrest", "migration", "inflation",
         "outage", "shortage", "storms", "erosion", "landslides", "heatwaves")
MODIFIERS = ("severe", "widespread", "sudden", "prolonged")


def _noun_phrase(rng):
    if rng.random() < 0.4:
        return (str(rng.choice(MODIFIERS)), str(rng.choice(NOUNS)))
    return (str(rng.choice(NOUNS)),)


def smoke_corpus(n=200, seed=0):
    rng = np.random.default_rng(seed)
    sentences = []
    for i in range(n):
        x = _noun_phrase(rng)
        y = _noun_phrase(rng)
        if rng.random() < 0.5:
            tokens = x + ("causes",) + y + (".",)
            triplet = CausalTriplet(cause=(0, len(x)),
                                    effect=(len(x) + 1, len(x) + 1 + len(y)))
        else:
            tokens = y + ("is", "caused", "by") + x + (".",)
            triplet = CausalTriplet(cause=(len(y) + 3, len(y) + 3 + len(x)),
                                    effect=(0, len(y)))
        sentence = Sentence(id=i, tokens=tokens)
        sentences.append((sentence, encode_triplets(sentence, [triplet])))
    return Corpus(sentences, name="smoke")


SMOKE_TRAIN_CONFIG = TrainConfig(
    lstm_hidden=20, heads=2, head_size=4, char_dim=8, char_filters=8,
    word_dim=16, dropout_rate=0.1, learning_rate=0.02, batch_size=16,
    max_epochs=50, val_fraction=0.1, stop_f1=0.95, seed=13,
)


class TestLearnability:
    def test_smoke_training(self):
        corpus = smoke_corpus()
        started = time.monotonic()
        result = train(corpus, None, SMOKE_TRAIN_CONFIG)
        elapsed = time.monotonic() - started

        assert result.best_val_f1 >= 0.95
        assert len(result.history) <= 50
        assert elapsed < 300.0

        # determinism per seed: a rerun reproduces the epoch log prefix
        prefix_config = TrainConfig(
            **{**SMOKE_TRAIN_CONFIG.__dict__,
               "max_epochs": min(2, len(result.history)), "stop_f1": None})
        rerun = train(corpus, None, prefix_config)
        want = [r.format() for r in result.history[:prefix_config.max_epochs]]
        got = [r.format() for r in rerun.history]
        assert got == want

        # diagnostic (not a hard guarantee): decoded tags stay well-formed
        from causalex.train import _prepare_bundles
        from causalex import net as _net
        bundles = _prepare_bundles(
            corpus, result.word_table, result.params.alphabet, None,
            result.params.dims.ctx_dim)
        wellformed = sum(
            1 for bundle, _ in bundles
            if not validate_tags(tuple(
                TAGS[i] for i in _net.decode_sentence(result.params, bundle)))
        )
        print(f"\n  decoded well-formed: {wellformed}/{len(bundles)}")
        report("learnability smoke",
               f"F1 {result.best_val_f1:.3f} after {len(result.history)} epochs"
               f" in {elapsed:.1f} s")


class TestMetricsCriterion:
    def test_metrics_fixtures(self):
        gold = {i: [CausalTriplet(cause=(0, 1), effect=(3, 4))]
                for i in range(296)}
        pred = {
            i: [CausalTriplet(cause=(0, 1), effect=(3, 4) if i < 250 else (5, 6))]
            for i in range(296)
        }
        m = triplet_prf(gold, pred)
        expected = 250 / 296
        assert abs(m.precision - expected) < 1e-4
        assert abs(m.recall - expected) < 1e-4
        assert abs(m.f1 - expected) < 1e-4
        assert abs(m.f1 - 0.8446) < 1e-4

        # ten-run aggregation against hand-rolled mean and sample std
        f_values = [0.80, 0.82, 0.85, 0.83, 0.81, 0.86, 0.84, 0.79, 0.88, 0.82]
        runs = [Metrics(precision=v, recall=v, f1=v,
                        correct=0, predicted=0, gold=0) for v in f_values]
        agg = aggregate_runs(runs)
        mean = sum(f_values) / len(f_values)
        var = sum((v - mean) ** 2 for v in f_values) / (len(f_values) - 1)
        assert abs(agg.f_mean - mean) < 1e-6
        assert abs(agg.f_std - math.sqrt(var)) < 1e-6

        row = format_report_row("tagger", agg)
        name, p, r, f = row.split("\t")
        assert name == "tagger"
        for cell in (p, r, f):
            mean_part, std_part = cell.split("±")
            float(mean_part), float(std_part)
        report("metrics", f"P=R=F={m.f1:.4f} on the 250/296 fixture")


class TestClipAndAnneal:
    def test_clipping_and_annealing(self):
        adversarial = [
            {"a": np.full((50, 50), 1e6), "b": np.full(10, -1e6)},
            {"a": np.array([1e-30]), "b": np.full(3, 1e30)},
            {"a": np.ones(1) * 1.0000001},
        ]
        for grads in adversarial:
            clip_gradients(grads, 1.0)
            total = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
            assert total <= 1.0 + 1e-12

        state = OptimizerState(learning_rate=0.0075)
        anneal_lr(state, 2.0, patience=5)  # sets the baseline
        for _ in range(5):
            anneal_lr(state, 2.0, patience=5)
            assert state.learning_rate == 0.0075
        anneal_lr(state, 2.0, patience=5)  # sixth non-improving epoch
        assert state.learning_rate == 0.00375
        report("clipping and annealing")
