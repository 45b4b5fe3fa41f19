"""Training loop: Nadam updates, global-norm gradient clipping, variational
dropout, plateau learning-rate halving, and model selection by validation
triplet F1.

Nadam follows the published Nesterov-Adam formulation with the warming
momentum schedule mu_t = beta1 * (1 - 0.5 * 0.96^(t/250)); only the learning
rate is task-specific.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import net
from .corpus import Corpus, split_validation
from .decoder import DecoderConfig, tag2triplet
from .embeddings import (
    ContextualStore,
    EmbeddingTable,
    InputBundle,
    build_char_alphabet,
    assemble_inputs,
)
from .errors import CombinatorialBlowup, NonFiniteLoss, ParseError
from .evaluate import Metrics, triplet_prf
from .scheme import TAG_TO_INDEX, TAGS, repair_tags
from .net import DropoutMasks, ModelDims, ModelParams


@dataclass(frozen=True)
class TrainConfig:
    lstm_hidden: int = 100
    heads: int = 3
    head_size: int = 8
    char_dim: int = 30
    char_filters: int = 30
    word_dim: int = 300  # used only when no pretrained table is supplied
    ctx_dim: int = 0  # overridden by a contextual store's header
    dropout_rate: float = 0.5
    clip_threshold: float = 1.0
    learning_rate: float = 0.0075
    batch_size: int = 16
    max_epochs: int = 200
    anneal_patience: int = 5
    val_fraction: float = 0.1
    stop_f1: float | None = None  # early exit once validation F1 reaches this
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        for name in ("lstm_hidden", "heads", "head_size", "char_dim",
                     "char_filters", "word_dim", "batch_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def load_config(source: bytes | str, **overrides) -> TrainConfig:
    """Parse flat ``key = value`` lines mirroring the TrainConfig fields."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    known = {f.name: f.type for f in fields(TrainConfig)}
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in known:
            raise ParseError(f"line {lineno}: unknown config key {key!r}")
        if key in ("dropout_rate", "clip_threshold", "learning_rate",
                   "val_fraction", "stop_f1"):
            values[key] = None if raw.lower() == "none" else float(raw)
        else:
            values[key] = int(raw)
    values.update(overrides)
    return TrainConfig(**values)


def dump_config(config: TrainConfig) -> str:
    lines = []
    for f in fields(TrainConfig):
        value = getattr(config, f.name)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Optimizer

def clip_gradients(grads: dict[str, np.ndarray],
                   threshold: float) -> dict[str, np.ndarray]:
    """Scale all gradients so the global L2 norm is at most ``threshold``."""
    if threshold <= 0:
        raise ValueError("clip threshold must be positive")
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > threshold:
        scale = threshold / total
        for g in grads.values():
            g *= scale
    return grads


BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8
SCHEDULE_DECAY = 0.004  # mu_t exponent factor, i.e. 0.96^(t/250)


@dataclass
class OptimizerState:
    learning_rate: float
    step: int = 0
    m_schedule: float = 1.0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)
    best_train_loss: float = float("inf")
    epochs_since_improvement: int = 0
    best_val_f1: float = -1.0
    best_epoch: int = -1


def _named_tensors(params) -> list[tuple[str, np.ndarray]]:
    if isinstance(params, dict):
        return list(params.items())
    return params.named_arrays()


def init_optimizer(params, learning_rate: float) -> OptimizerState:
    named = _named_tensors(params)
    return OptimizerState(
        learning_rate=learning_rate,
        first_moment={n: np.zeros_like(a) for n, a in named},
        second_moment={n: np.zeros_like(a) for n, a in named},
    )


def nadam_step(params: ModelParams | dict[str, np.ndarray],
               grads: dict[str, np.ndarray], state: OptimizerState) -> None:
    """One in-place Nesterov-Adam update over every learnable tensor."""
    state.step += 1
    t = state.step
    mu_t = BETA1 * (1.0 - 0.5 * 0.96 ** (t * SCHEDULE_DECAY))
    mu_next = BETA1 * (1.0 - 0.5 * 0.96 ** ((t + 1) * SCHEDULE_DECAY))
    schedule_now = state.m_schedule * mu_t
    schedule_next = schedule_now * mu_next
    state.m_schedule = schedule_now

    for name, param in _named_tensors(params):
        g = grads[name]
        m = state.first_moment[name]
        v = state.second_moment[name]
        m *= BETA1
        m += (1.0 - BETA1) * g
        v *= BETA2
        v += (1.0 - BETA2) * g * g
        g_hat = g / (1.0 - schedule_now)
        m_hat = m / (1.0 - schedule_next)
        m_bar = (1.0 - mu_t) * g_hat + mu_next * m_hat
        v_hat = v / (1.0 - BETA2 ** t)
        param -= state.learning_rate * m_bar / (np.sqrt(v_hat) + EPSILON)
    if isinstance(params, ModelParams):
        # The PAD character row stays frozen at zero.
        params.char_table[0] = 0.0


def variational_dropout_mask(width: int, rate: float,
                             rng: np.random.Generator | int) -> np.ndarray:
    """Inverted-scaling Bernoulli mask, sampled once and reused at every
    timestep of a sentence; all-ones at rate 0."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("rate must be in [0, 1)")
    if rate == 0.0:
        return np.ones(width)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    keep = 1.0 - rate
    return (gen.random(width) < keep).astype(np.float64) / keep


def anneal_lr(state: OptimizerState, epoch_train_loss: float,
              patience: int = 5) -> OptimizerState:
    """Halve the learning rate once the epoch loss has not fallen below the
    best seen for more than ``patience`` consecutive epochs."""
    if epoch_train_loss < state.best_train_loss:
        state.best_train_loss = epoch_train_loss
        state.epochs_since_improvement = 0
    else:
        state.epochs_since_improvement += 1
        if state.epochs_since_improvement > patience:
            state.learning_rate /= 2.0
            state.epochs_since_improvement = 0
    return state


# ---------------------------------------------------------------------------
# Training driver

@dataclass
class EpochRecord:
    epoch: int
    loss: float
    lr: float
    val_p: float
    val_r: float
    val_f: float

    def format(self) -> str:
        return (f"{self.epoch}\t{self.loss:.6f}\t{self.lr:.8f}"
                f"\t{self.val_p:.4f}\t{self.val_r:.4f}\t{self.val_f:.4f}")


@dataclass
class TrainResult:
    params: ModelParams
    word_table: EmbeddingTable
    history: list[EpochRecord]
    best_epoch: int
    best_val_f1: float

    def log_text(self) -> str:
        if not self.history:
            return ""
        return "\n".join(r.format() for r in self.history) + "\n"


def random_word_table(vocabulary: list[str], dim: int, seed: int) -> EmbeddingTable:
    """Fixed random vectors for corpora without pretrained embeddings."""
    rng = np.random.default_rng(seed)
    bound = np.sqrt(3.0 / dim)
    entries = {w: rng.uniform(-bound, bound, size=dim) for w in vocabulary}
    return EmbeddingTable(dim=dim, entries=entries)


def _prepare_bundles(corpus: Corpus, word_table: EmbeddingTable,
                     alphabet: tuple[str, ...], ctx: ContextualStore | None,
                     ctx_dim: int) -> list[tuple[InputBundle, np.ndarray]]:
    out = []
    for sentence, tags in corpus.sentences:
        bundle = assemble_inputs(sentence, word_table, alphabet, ctx, ctx_dim)
        gold = np.array([TAG_TO_INDEX[t] for t in tags], dtype=np.int64)
        out.append((bundle, gold))
    return out


def evaluate_model(params: ModelParams,
                   bundles: list[tuple[InputBundle, np.ndarray]],
                   decoder_config: DecoderConfig = DecoderConfig(),
                   repair: bool = True) -> Metrics:
    """Triplet-level P/R/F of Viterbi decoding against the gold tags.

    Pathological predictions whose span count blows past the decoder's
    search caps (possible with an untrained model) score as empty.
    """
    gold_triplets = {}
    pred_triplets = {}
    for bundle, gold in bundles:
        sentence = bundle.sentence
        gold_tags = tuple(TAGS[i] for i in gold)
        pred_idx = net.decode_sentence(params, bundle)
        pred_tags = tuple(TAGS[i] for i in pred_idx)
        if repair:
            pred_tags = repair_tags(pred_tags)
        gold_triplets[sentence.id] = tag2triplet(sentence, gold_tags, decoder_config)
        try:
            pred_triplets[sentence.id] = tag2triplet(sentence, pred_tags,
                                                     decoder_config)
        except CombinatorialBlowup:
            pred_triplets[sentence.id] = []
    return triplet_prf(gold_triplets, pred_triplets)


def train(corpus: Corpus, word_table: EmbeddingTable | None,
          config: TrainConfig, ctx: ContextualStore | None = None,
          time_budget: float | None = None) -> TrainResult:
    """Train on ``corpus`` (internally split into train/validation), keeping
    the checkpoint with the highest validation triplet F1.

    The word table is never updated; when none is given, a fixed random
    table over the corpus vocabulary is built from the config seed.
    """
    seeds = np.random.SeedSequence(config.seed).spawn(4)
    split_seed = int(seeds[0].generate_state(1)[0])
    init_seed = int(seeds[1].generate_state(1)[0])
    shuffle_rng = np.random.default_rng(seeds[2])
    dropout_rng = np.random.default_rng(seeds[3])

    if word_table is None:
        vocab = sorted({tok for s, _ in corpus.sentences for tok in s.tokens})
        word_table = random_word_table(vocab, config.word_dim, init_seed)

    ctx_dim = ctx.dim if ctx is not None else config.ctx_dim
    dims = ModelDims(
        word_dim=word_table.dim, char_dim=config.char_dim,
        char_filters=config.char_filters, ctx_dim=ctx_dim,
        lstm_hidden=config.lstm_hidden, heads=config.heads,
        head_size=config.head_size,
    )
    alphabet = build_char_alphabet(
        tok for s, _ in corpus.sentences for tok in s.tokens)
    params = net.init_params(dims, alphabet, init_seed)

    train_corpus, val_corpus = split_validation(
        corpus, config.val_fraction, split_seed)
    train_bundles = _prepare_bundles(train_corpus, word_table, alphabet, ctx, ctx_dim)
    val_bundles = _prepare_bundles(val_corpus, word_table, alphabet, ctx, ctx_dim)

    state = init_optimizer(params, config.learning_rate)
    best_params = params.copy()
    history: list[EpochRecord] = []
    started = time.monotonic()

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_bundles))
        epoch_loss = 0.0
        for batch_start in range(0, len(order), config.batch_size):
            batch_idx = order[batch_start:batch_start + config.batch_size]
            batch = []
            for i in batch_idx:
                bundle, gold = train_bundles[i]
                masks = DropoutMasks(
                    input_mask=variational_dropout_mask(
                        dims.input_dim, config.dropout_rate, dropout_rng),
                    output_mask=variational_dropout_mask(
                        dims.bilstm_dim, config.dropout_rate, dropout_rng),
                )
                batch.append((bundle, gold, masks))
            loss, grads = net.model_grad(params, batch)
            if not np.isfinite(loss):
                raise NonFiniteLoss(
                    f"epoch {epoch}: non-finite batch loss {loss!r}"
                )
            for g in grads.values():
                g /= len(batch)
            clip_gradients(grads, config.clip_threshold)
            nadam_step(params, grads, state)
            epoch_loss += loss
        epoch_loss /= len(train_bundles)

        metrics = evaluate_model(params, val_bundles)
        record = EpochRecord(
            epoch=epoch, loss=epoch_loss, lr=state.learning_rate,
            val_p=metrics.precision, val_r=metrics.recall, val_f=metrics.f1)
        history.append(record)
        if metrics.f1 > state.best_val_f1:
            state.best_val_f1 = metrics.f1
            state.best_epoch = epoch
            best_params = params.copy()
        anneal_lr(state, epoch_loss, config.anneal_patience)
        if config.stop_f1 is not None and state.best_val_f1 >= config.stop_f1:
            break
        if time_budget is not None and time.monotonic() - started > time_budget:
            break

    return TrainResult(
        params=best_params, word_table=word_table, history=history,
        best_epoch=state.best_epoch, best_val_f1=max(state.best_val_f1, 0.0),
    )
