"""Token input vectors: static word table, random character table, and
precomputed per-token contextual vectors loaded from files.

Contextual store binary format ("CTXE"):
    magic   4 bytes  b"CTXE"
    version u32 LE   1
    dim     u32 LE
    records, repeated until EOF or trailer:
        sentence_id u32 LE
        n_tokens    u32 LE
        vectors     n_tokens * dim little-endian f32
    optional trailer:
        magic  4 bytes  b"META"
        length u32 LE
        utf-8 provenance string (embedder name)
Sentence id 0x4154454D (the trailer magic read as u32) is reserved.
"""

from __future__ import annotations

import io
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatch,
    MissingSentence,
    MissingToken,
    ParseError,
)
from .scheme import Sentence

logger = logging.getLogger(__name__)

PAD_CHAR = "\u0000"
UNK_CHAR = "\ufffd"
PAD_INDEX = 0
UNK_INDEX = 1

CTXE_MAGIC = b"CTXE"
META_MAGIC = b"META"
CTXE_VERSION = 1


@dataclass
class EmbeddingTable:
    """Fixed-dimension vectors keyed by string, with an unknown-key fallback."""

    dim: int
    entries: dict[str, np.ndarray]
    unk_policy: str = "zeros"
    _unk: np.ndarray | None = field(default=None, repr=False)

    def unk_vector(self) -> np.ndarray:
        if self._unk is None:
            if self.unk_policy == "mean" and self.entries:
                self._unk = np.mean(list(self.entries.values()), axis=0)
            else:
                self._unk = np.zeros(self.dim)
        return self._unk

    def lookup(self, key: str) -> np.ndarray:
        return self.entries.get(key, self.unk_vector())

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class ContextualStore:
    """Per-token vectors keyed by (sentence id, token index)."""

    dim: int
    records: dict[int, np.ndarray]  # sentence id -> (n_tokens, dim) f32
    provenance: str = ""

    def vectors_for(self, sentence: Sentence) -> np.ndarray:
        if sentence.id not in self.records:
            raise MissingSentence(f"no contextual record for sentence {sentence.id}")
        vecs = self.records[sentence.id]
        if vecs.shape[0] != len(sentence):
            raise MissingToken(
                f"sentence {sentence.id}: store has {vecs.shape[0]} tokens, "
                f"sentence has {len(sentence)}"
            )
        return vecs

    def lookup(self, sentence_id: int, token_index: int) -> np.ndarray:
        if sentence_id not in self.records:
            raise MissingSentence(f"no contextual record for sentence {sentence_id}")
        vecs = self.records[sentence_id]
        if not 0 <= token_index < vecs.shape[0]:
            raise MissingToken(
                f"sentence {sentence_id} has no token {token_index}"
            )
        return vecs[token_index]


@dataclass
class InputBundle:
    """Per-token model inputs for one sentence."""

    sentence: Sentence
    word_vecs: np.ndarray  # (n, word_dim) f64
    ctx_vecs: np.ndarray  # (n, ctx_dim) f64; ctx_dim may be 0
    char_rows: np.ndarray  # (n, max_word_len) int64, PAD-padded
    char_lens: np.ndarray  # (n,) int64 true word lengths

    @property
    def n(self) -> int:
        return len(self.sentence)


def load_word_table(source: bytes | io.IOBase,
                    unk_policy: str = "zeros") -> EmbeddingTable:
    """Parse the text table: header ``vocab_size dim``, then one
    ``word v1 ... v_dim`` row per word.  Duplicates: last wins, with a warning."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty word table")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"line 1: expected 'vocab_size dim', got {lines[0]!r}")
    try:
        vocab_size, dim = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"line 1: non-integer header {lines[0]!r}")
    if dim < 1:
        raise ParseError(f"line 1: dimension must be positive, got {dim}")

    entries: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != dim + 1:
            raise DimMismatch(
                f"line {lineno}: expected {dim} values, got {len(parts) - 1}"
            )
        word = parts[0]
        try:
            vector = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric vector component")
        if word in entries:
            logger.warning("duplicate word %r at line %d; keeping last", word, lineno)
        entries[word] = vector
    if len(entries) != vocab_size:
        logger.warning(
            "header declares %d words, parsed %d", vocab_size, len(entries)
        )
    return EmbeddingTable(dim=dim, entries=entries, unk_policy=unk_policy)


def write_word_table(table: EmbeddingTable) -> bytes:
    out = io.StringIO()
    out.write(f"{len(table.entries)} {table.dim}\n")
    for word, vec in table.entries.items():
        values = " ".join(format(v, ".6g") for v in vec)
        out.write(f"{word} {values}\n")
    return out.getvalue().encode("utf-8")


def build_char_alphabet(tokens_source) -> tuple[str, ...]:
    """PAD and UNK symbols followed by every character observed, sorted.

    ``tokens_source`` is an iterable of token strings (or of sentences'
    token tuples flattened by the caller).
    """
    chars: set[str] = set()
    for token in tokens_source:
        chars.update(token)
    chars.discard(PAD_CHAR)
    chars.discard(UNK_CHAR)
    return (PAD_CHAR, UNK_CHAR, *sorted(chars))


def init_char_table(alphabet: tuple[str, ...] | list[str], dim: int,
                    seed: int) -> EmbeddingTable:
    """Uniform init in [-sqrt(3/dim), +sqrt(3/dim)] per character; the PAD
    symbol gets an all-zero row."""
    if not alphabet:
        raise ValueError("empty alphabet")
    bound = np.sqrt(3.0 / dim)
    rng = np.random.default_rng(seed)
    entries = {}
    for ch in alphabet:
        if ch == PAD_CHAR:
            entries[ch] = np.zeros(dim)
        else:
            entries[ch] = rng.uniform(-bound, bound, size=dim)
    return EmbeddingTable(dim=dim, entries=entries)


def load_contextual(source: bytes | io.IOBase) -> ContextualStore:
    """Read the CTXE binary format (module docstring)."""
    buf = source if isinstance(source, bytes) else source.read()
    if not isinstance(buf, bytes):
        raise ParseError("contextual store must be read in binary mode")
    if len(buf) < 12 or buf[:4] != CTXE_MAGIC:
        raise ParseError("not a CTXE file (bad magic)")
    version, dim = struct.unpack_from("<II", buf, 4)
    if version != CTXE_VERSION:
        raise ParseError(f"unsupported CTXE version {version}")
    if dim < 1:
        raise ParseError(f"bad dimension {dim}")

    records: dict[int, np.ndarray] = {}
    provenance = ""
    offset = 12
    while offset < len(buf):
        if buf[offset:offset + 4] == META_MAGIC:
            if offset + 8 > len(buf):
                raise ParseError("truncated trailer")
            (length,) = struct.unpack_from("<I", buf, offset + 4)
            end = offset + 8 + length
            if end > len(buf):
                raise ParseError("truncated trailer body")
            provenance = buf[offset + 8:end].decode("utf-8")
            offset = end
            break
        if offset + 8 > len(buf):
            raise ParseError(f"truncated record header at byte {offset}")
        sid, n_tokens = struct.unpack_from("<II", buf, offset)
        offset += 8
        nbytes = n_tokens * dim * 4
        if offset + nbytes > len(buf):
            raise ParseError(f"truncated vectors for sentence {sid}")
        if n_tokens == 0:
            raise ParseError(f"sentence {sid}: zero tokens")
        vecs = np.frombuffer(buf, dtype="<f4", count=n_tokens * dim,
                             offset=offset).reshape(n_tokens, dim)
        if sid in records:
            raise ParseError(f"duplicate record for sentence {sid}")
        records[sid] = vecs.copy()
        offset += nbytes
    if offset != len(buf):
        raise ParseError("trailing bytes after trailer")
    return ContextualStore(dim=dim, records=records, provenance=provenance)


def write_contextual(store: ContextualStore) -> bytes:
    """Serialize to the CTXE format; used for fixtures and tests."""
    out = io.BytesIO()
    out.write(CTXE_MAGIC)
    out.write(struct.pack("<II", CTXE_VERSION, store.dim))
    for sid in sorted(store.records):
        vecs = np.asarray(store.records[sid], dtype="<f4")
        if vecs.ndim != 2 or vecs.shape[1] != store.dim:
            raise DimMismatch(f"sentence {sid}: vectors must be (n, {store.dim})")
        out.write(struct.pack("<II", sid, vecs.shape[0]))
        out.write(vecs.tobytes())
    if store.provenance:
        body = store.provenance.encode("utf-8")
        out.write(META_MAGIC)
        out.write(struct.pack("<I", len(body)))
        out.write(body)
    return out.getvalue()


def char_indices(token: str, alphabet_index: dict[str, int]) -> list[int]:
    return [alphabet_index.get(ch, UNK_INDEX) for ch in token]


def assemble_inputs(sentence: Sentence, words: EmbeddingTable,
                    chars: EmbeddingTable | tuple[str, ...],
                    ctx: ContextualStore | None = None,
                    ctx_dim: int = 0) -> InputBundle:
    """Per-token word vector, PAD-padded character index row, and contextual
    vector (zeros of ``ctx_dim`` when no store is given)."""
    alphabet = tuple(chars.entries) if isinstance(chars, EmbeddingTable) else tuple(chars)
    index = {ch: i for i, ch in enumerate(alphabet)}
    n = len(sentence)

    word_vecs = np.stack([
        np.asarray(words.lookup(tok), dtype=np.float64) for tok in sentence.tokens
    ])
    if ctx is not None:
        ctx_vecs = np.asarray(ctx.vectors_for(sentence), dtype=np.float64)
    else:
        ctx_vecs = np.zeros((n, ctx_dim))

    lens = np.array([len(tok) for tok in sentence.tokens], dtype=np.int64)
    max_len = int(lens.max())
    rows = np.full((n, max_len), PAD_INDEX, dtype=np.int64)
    for t, tok in enumerate(sentence.tokens):
        rows[t, :len(tok)] = char_indices(tok, index)
    return InputBundle(
        sentence=sentence,
        word_vecs=word_vecs,
        ctx_vecs=ctx_vecs,
        char_rows=rows,
        char_lens=lens,
    )
