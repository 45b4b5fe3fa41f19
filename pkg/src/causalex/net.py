"""Tagger network: char CNN, BiLSTM, multi-head self-attention, emission layer.

Everything runs in double precision with explicit forward traces and
hand-derived backward passes, so gradients are exact and checkable against
finite differences.  Per-sentence computation only; batching is a loop with
gradient accumulation in the training module.

Checkpoint format ("SCFM"):
    magic    4 bytes  b"SCFM"
    version  u32 LE   1
    dims     9 x u32 LE: word_dim, char_dim, char_filters, ctx_dim,
             lstm_hidden, heads, head_size, n_tags, char_kernel
    alphabet u32 count, then count u32 LE unicode codepoints
    vocab    u32 count, then per word: u32 LE byte length + UTF-8 bytes
    tensors, raw little-endian f64, in order:
        word_matrix (count, word_dim), word_unk (word_dim,),
        then the learnable tensors in ``ModelParams.named_arrays`` order.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import crf
from .embeddings import PAD_INDEX, EmbeddingTable, InputBundle
from .errors import IndexOutOfAlphabet, ShapeMismatch
from .scheme import N_TAGS

CHECKPOINT_MAGIC = b"SCFM"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ModelDims:
    word_dim: int
    char_dim: int
    char_filters: int
    ctx_dim: int
    lstm_hidden: int
    heads: int
    head_size: int
    n_tags: int = N_TAGS
    char_kernel: int = 3

    def __post_init__(self):
        if self.char_kernel % 2 != 1:
            raise ValueError("char kernel must be odd")

    @property
    def input_dim(self) -> int:
        return self.word_dim + self.char_filters + self.ctx_dim

    @property
    def bilstm_dim(self) -> int:
        return 2 * self.lstm_hidden

    @property
    def attn_dim(self) -> int:
        return self.heads * self.head_size

    @property
    def emission_in(self) -> int:
        return self.bilstm_dim + self.attn_dim


@dataclass
class ModelParams:
    """All learnable tensors.  LSTM gate blocks are stacked column-wise in
    the order input, forget, output, cell."""

    dims: ModelDims
    alphabet: tuple[str, ...]
    char_table: np.ndarray  # (len(alphabet), char_dim); PAD row frozen at zero
    cnn_w: np.ndarray  # (char_kernel * char_dim, char_filters)
    cnn_b: np.ndarray  # (char_filters,)
    fw_w: np.ndarray  # (input_dim, 4*lstm_hidden)
    fw_u: np.ndarray  # (lstm_hidden, 4*lstm_hidden)
    fw_b: np.ndarray  # (4*lstm_hidden,)
    bw_w: np.ndarray
    bw_u: np.ndarray
    bw_b: np.ndarray
    wq: np.ndarray  # (heads, bilstm_dim, head_size)
    wk: np.ndarray
    wv: np.ndarray
    we: np.ndarray  # (emission_in, n_tags)
    be: np.ndarray  # (n_tags,)
    trans: np.ndarray  # (n_tags + 2, n_tags + 2)

    TENSOR_NAMES = (
        "char_table", "cnn_w", "cnn_b",
        "fw_w", "fw_u", "fw_b", "bw_w", "bw_u", "bw_b",
        "wq", "wk", "wv", "we", "be", "trans",
    )

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in self.TENSOR_NAMES]

    def copy(self) -> "ModelParams":
        kwargs = {name: getattr(self, name).copy() for name in self.TENSOR_NAMES}
        return ModelParams(dims=self.dims, alphabet=self.alphabet, **kwargs)


def zero_grads(params: ModelParams) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.named_arrays()}


def init_params(dims: ModelDims, alphabet: tuple[str, ...], seed: int,
                char_table: np.ndarray | None = None) -> ModelParams:
    """Deterministic initialization: char rows uniform in +-sqrt(3/char_dim)
    (PAD row zero), weight matrices Glorot-uniform, biases zero, transitions
    uniform in +-0.1."""
    rng = np.random.default_rng(seed)

    def glorot(shape: tuple[int, ...]) -> np.ndarray:
        fan_in, fan_out = shape[-2], shape[-1]
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=shape)

    if char_table is None:
        bound = np.sqrt(3.0 / dims.char_dim)
        char_table = rng.uniform(-bound, bound, size=(len(alphabet), dims.char_dim))
    else:
        char_table = np.asarray(char_table, dtype=np.float64).copy()
        if char_table.shape != (len(alphabet), dims.char_dim):
            raise ShapeMismatch(
                f"char table {char_table.shape} != {(len(alphabet), dims.char_dim)}"
            )
    char_table[PAD_INDEX] = 0.0

    h4 = 4 * dims.lstm_hidden
    return ModelParams(
        dims=dims,
        alphabet=alphabet,
        char_table=char_table,
        cnn_w=glorot((dims.char_kernel * dims.char_dim, dims.char_filters)),
        cnn_b=np.zeros(dims.char_filters),
        fw_w=glorot((dims.input_dim, h4)),
        fw_u=glorot((dims.lstm_hidden, h4)),
        fw_b=np.zeros(h4),
        bw_w=glorot((dims.input_dim, h4)),
        bw_u=glorot((dims.lstm_hidden, h4)),
        bw_b=np.zeros(h4),
        wq=glorot((dims.heads, dims.bilstm_dim, dims.head_size)),
        wk=glorot((dims.heads, dims.bilstm_dim, dims.head_size)),
        wv=glorot((dims.heads, dims.bilstm_dim, dims.head_size)),
        we=glorot((dims.emission_in, dims.n_tags)),
        be=np.zeros(dims.n_tags),
        trans=rng.uniform(-0.1, 0.1, size=(dims.n_tags + 2, dims.n_tags + 2)),
    )


@dataclass
class DropoutMasks:
    """Variational dropout masks, constant across a sentence's timesteps."""

    input_mask: np.ndarray | None = None  # (input_dim,)
    output_mask: np.ndarray | None = None  # (bilstm_dim,)


# ---------------------------------------------------------------------------
# Char CNN

@dataclass
class CharCnnTrace:
    window_indices: list[np.ndarray]  # per token: (word_len, k) char indices
    argmax: np.ndarray  # (n, char_filters)


def char_cnn_forward(char_rows: np.ndarray, char_lens: np.ndarray,
                     params: ModelParams) -> tuple[np.ndarray, CharCnnTrace]:
    """Per-token max-over-positions convolution response.

    Window at position i covers chars i-(k-1)/2 .. i+(k-1)/2 with PAD at
    word boundaries; the PAD embedding row stays zero.
    """
    dims = params.dims
    if char_rows.max(initial=0) >= params.char_table.shape[0]:
        raise IndexOutOfAlphabet(
            f"char index {int(char_rows.max())} >= alphabet size "
            f"{params.char_table.shape[0]}"
        )
    n = char_rows.shape[0]
    k, cd, nf = dims.char_kernel, dims.char_dim, dims.char_filters
    half = (k - 1) // 2

    out = np.empty((n, nf))
    argmax = np.empty((n, nf), dtype=np.int64)
    window_indices: list[np.ndarray] = []
    for t in range(n):
        length = int(char_lens[t])
        idx = char_rows[t, :length]
        padded = np.concatenate([
            np.full(half, PAD_INDEX, dtype=np.int64), idx,
            np.full(half, PAD_INDEX, dtype=np.int64),
        ])
        win_idx = np.stack([padded[i:i + k] for i in range(length)])
        windows = params.char_table[win_idx].reshape(length, k * cd)
        conv = windows @ params.cnn_w + params.cnn_b  # (length, nf)
        am = np.argmax(conv, axis=0)
        out[t] = conv[am, np.arange(nf)]
        argmax[t] = am
        window_indices.append(win_idx)
    return out, CharCnnTrace(window_indices=window_indices, argmax=argmax)


def char_cnn_backward(d_out: np.ndarray, trace: CharCnnTrace,
                      params: ModelParams,
                      grads: dict[str, np.ndarray]) -> None:
    dims = params.dims
    cd = dims.char_dim
    for t, win_idx in enumerate(trace.window_indices):
        for f in range(dims.char_filters):
            g = d_out[t, f]
            if g == 0.0:
                continue
            i = trace.argmax[t, f]
            row_idx = win_idx[i]
            window = params.char_table[row_idx].reshape(-1)
            grads["cnn_w"][:, f] += window * g
            grads["cnn_b"][f] += g
            d_window = params.cnn_w[:, f] * g
            for pos, char_index in enumerate(row_idx):
                grads["char_table"][char_index] += d_window[pos * cd:(pos + 1) * cd]
    grads["char_table"][PAD_INDEX] = 0.0


# ---------------------------------------------------------------------------
# BiLSTM

@dataclass
class LstmDirectionTrace:
    x: np.ndarray  # inputs in processing order (n, input_dim)
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray  # candidate cell (tanh)
    c: np.ndarray
    tc: np.ndarray  # tanh(c)
    h_prev: np.ndarray
    c_prev: np.ndarray


@dataclass
class BiLstmTrace:
    fw: LstmDirectionTrace
    bw: LstmDirectionTrace


def _lstm_direction(x: np.ndarray, w: np.ndarray, u: np.ndarray,
                    b: np.ndarray, hidden: int) -> tuple[np.ndarray, LstmDirectionTrace]:
    n = x.shape[0]
    shape = (n, hidden)
    tr = LstmDirectionTrace(
        x=x, i=np.empty(shape), f=np.empty(shape), o=np.empty(shape),
        g=np.empty(shape), c=np.empty(shape), tc=np.empty(shape),
        h_prev=np.zeros(shape), c_prev=np.zeros(shape),
    )
    h = np.zeros(hidden)
    c = np.zeros(hidden)
    out = np.empty(shape)
    for t in range(n):
        tr.h_prev[t] = h
        tr.c_prev[t] = c
        a = x[t] @ w + h @ u + b
        i = expit(a[:hidden])
        f = expit(a[hidden:2 * hidden])
        o = expit(a[2 * hidden:3 * hidden])
        g = np.tanh(a[3 * hidden:])
        c = i * g + f * c
        tc = np.tanh(c)
        h = o * tc
        tr.i[t], tr.f[t], tr.o[t], tr.g[t], tr.c[t], tr.tc[t] = i, f, o, g, c, tc
        out[t] = h
    return out, tr


def _lstm_direction_backward(d_h: np.ndarray, tr: LstmDirectionTrace,
                             w: np.ndarray, u: np.ndarray,
                             hidden: int) -> tuple[np.ndarray, np.ndarray,
                                                   np.ndarray, np.ndarray]:
    """Returns (d_x, d_w, d_u, d_b) for one direction, inputs in processing order."""
    n = d_h.shape[0]
    d_x = np.zeros_like(tr.x)
    d_w = np.zeros_like(w)
    d_u = np.zeros_like(u)
    d_b = np.zeros(4 * hidden)
    dh_carry = np.zeros(hidden)
    dc_carry = np.zeros(hidden)
    for t in range(n - 1, -1, -1):
        dh = d_h[t] + dh_carry
        i, f, o, g, tc = tr.i[t], tr.f[t], tr.o[t], tr.g[t], tr.tc[t]
        do = dh * tc
        dc = dc_carry + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * tr.c_prev[t]
        dc_carry = dc * f
        da = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            do * o * (1.0 - o),
            dg * (1.0 - g * g),
        ])
        d_w += np.outer(tr.x[t], da)
        d_u += np.outer(tr.h_prev[t], da)
        d_b += da
        d_x[t] = w @ da
        dh_carry = u @ da
    return d_x, d_w, d_u, d_b


def bilstm_forward(x: np.ndarray,
                   params: ModelParams) -> tuple[np.ndarray, BiLstmTrace]:
    """Concatenated forward/backward hidden states, H: (n, 2*lstm_hidden)."""
    dims = params.dims
    if x.shape[1] != dims.input_dim:
        raise ShapeMismatch(f"input width {x.shape[1]} != {dims.input_dim}")
    h_fw, tr_fw = _lstm_direction(x, params.fw_w, params.fw_u, params.fw_b,
                                  dims.lstm_hidden)
    h_bw_rev, tr_bw = _lstm_direction(x[::-1].copy(), params.bw_w, params.bw_u,
                                      params.bw_b, dims.lstm_hidden)
    h = np.concatenate([h_fw, h_bw_rev[::-1]], axis=1)
    return h, BiLstmTrace(fw=tr_fw, bw=tr_bw)


def bilstm_backward(d_h: np.ndarray, trace: BiLstmTrace, params: ModelParams,
                    grads: dict[str, np.ndarray]) -> np.ndarray:
    hidden = params.dims.lstm_hidden
    d_fw = d_h[:, :hidden]
    d_bw = d_h[:, hidden:][::-1].copy()
    d_x_fw, d_w, d_u, d_b = _lstm_direction_backward(
        d_fw, trace.fw, params.fw_w, params.fw_u, hidden)
    grads["fw_w"] += d_w
    grads["fw_u"] += d_u
    grads["fw_b"] += d_b
    d_x_bw, d_w, d_u, d_b = _lstm_direction_backward(
        d_bw, trace.bw, params.bw_w, params.bw_u, hidden)
    grads["bw_w"] += d_w
    grads["bw_u"] += d_u
    grads["bw_b"] += d_b
    return d_x_fw + d_x_bw[::-1]


# ---------------------------------------------------------------------------
# Multi-head self-attention

@dataclass
class MhsaTrace:
    h: np.ndarray
    q: np.ndarray  # (heads, n, head_size)
    k: np.ndarray
    v: np.ndarray
    probs: np.ndarray  # (heads, n, n), rows sum to 1


def mhsa_forward(h: np.ndarray,
                 params: ModelParams) -> tuple[np.ndarray, MhsaTrace]:
    """Scaled dot-product attention per head; scaling by sqrt of the BiLSTM
    output width; heads concatenated column-wise."""
    dims = params.dims
    if h.shape[1] != dims.bilstm_dim:
        raise ShapeMismatch(f"H width {h.shape[1]} != {dims.bilstm_dim}")
    scale = 1.0 / np.sqrt(dims.bilstm_dim)
    q = np.einsum("nd,hde->hne", h, params.wq)
    k = np.einsum("nd,hde->hne", h, params.wk)
    v = np.einsum("nd,hde->hne", h, params.wv)
    scores = np.einsum("hne,hme->hnm", q, k) * scale
    scores -= scores.max(axis=2, keepdims=True)
    probs = np.exp(scores)
    probs /= probs.sum(axis=2, keepdims=True)
    heads_out = np.einsum("hnm,hme->hne", probs, v)
    n = h.shape[0]
    m = np.transpose(heads_out, (1, 0, 2)).reshape(n, dims.attn_dim)
    return m, MhsaTrace(h=h, q=q, k=k, v=v, probs=probs)


def mhsa_backward(d_m: np.ndarray, trace: MhsaTrace, params: ModelParams,
                  grads: dict[str, np.ndarray]) -> np.ndarray:
    dims = params.dims
    n = d_m.shape[0]
    scale = 1.0 / np.sqrt(dims.bilstm_dim)
    d_heads = np.transpose(
        d_m.reshape(n, dims.heads, dims.head_size), (1, 0, 2))
    p, q, k, v = trace.probs, trace.q, trace.k, trace.v

    d_p = np.einsum("hne,hme->hnm", d_heads, v)
    d_v = np.einsum("hnm,hne->hme", p, d_heads)
    # Softmax rows: dS = P * (dP - sum(dP * P)).
    row = np.sum(d_p * p, axis=2, keepdims=True)
    d_s = p * (d_p - row)
    d_q = np.einsum("hnm,hme->hne", d_s, k) * scale
    d_k = np.einsum("hnm,hne->hme", d_s, q) * scale

    grads["wq"] += np.einsum("nd,hne->hde", trace.h, d_q)
    grads["wk"] += np.einsum("nd,hne->hde", trace.h, d_k)
    grads["wv"] += np.einsum("nd,hne->hde", trace.h, d_v)
    d_h = (np.einsum("hne,hde->nd", d_q, params.wq)
           + np.einsum("hne,hde->nd", d_k, params.wk)
           + np.einsum("hne,hde->nd", d_v, params.wv))
    return d_h


# ---------------------------------------------------------------------------
# Emission projection

def emission_forward(h: np.ndarray, m: np.ndarray,
                     params: ModelParams) -> np.ndarray:
    z = np.concatenate([h, m], axis=1)
    if z.shape[1] != params.dims.emission_in:
        raise ShapeMismatch(
            f"emission input width {z.shape[1]} != {params.dims.emission_in}"
        )
    return z @ params.we + params.be


def emission_backward(d_e: np.ndarray, h: np.ndarray, m: np.ndarray,
                      params: ModelParams,
                      grads: dict[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    z = np.concatenate([h, m], axis=1)
    grads["we"] += z.T @ d_e
    grads["be"] += d_e.sum(axis=0)
    d_z = d_e @ params.we.T
    split = h.shape[1]
    return d_z[:, :split], d_z[:, split:]


# ---------------------------------------------------------------------------
# Full pipeline

@dataclass
class ForwardTrace:
    x: np.ndarray  # pre-dropout BiLSTM input
    x_dropped: np.ndarray
    char_trace: CharCnnTrace
    lstm_trace: BiLstmTrace
    h: np.ndarray  # pre-dropout BiLSTM output
    h_dropped: np.ndarray
    mhsa_trace: MhsaTrace
    m: np.ndarray
    emissions: np.ndarray
    masks: DropoutMasks | None


def forward_sentence(params: ModelParams, bundle: InputBundle,
                     masks: DropoutMasks | None = None) -> ForwardTrace:
    dims = params.dims
    if bundle.word_vecs.shape[1] != dims.word_dim:
        raise ShapeMismatch(
            f"word vectors {bundle.word_vecs.shape[1]}-D, model wants {dims.word_dim}"
        )
    if bundle.ctx_vecs.shape[1] != dims.ctx_dim:
        raise ShapeMismatch(
            f"contextual vectors {bundle.ctx_vecs.shape[1]}-D, model wants {dims.ctx_dim}"
        )
    c, char_trace = char_cnn_forward(bundle.char_rows, bundle.char_lens, params)
    x = np.concatenate([bundle.word_vecs, c, bundle.ctx_vecs], axis=1)

    x_dropped = x
    if masks is not None and masks.input_mask is not None:
        x_dropped = x * masks.input_mask[None, :]
    h, lstm_trace = bilstm_forward(x_dropped, params)
    h_dropped = h
    if masks is not None and masks.output_mask is not None:
        h_dropped = h * masks.output_mask[None, :]
    m, mhsa_trace = mhsa_forward(h_dropped, params)
    emissions = emission_forward(h_dropped, m, params)
    return ForwardTrace(
        x=x, x_dropped=x_dropped, char_trace=char_trace, lstm_trace=lstm_trace,
        h=h, h_dropped=h_dropped, mhsa_trace=mhsa_trace, m=m,
        emissions=emissions, masks=masks,
    )


def backward_sentence(d_emissions: np.ndarray, trace: ForwardTrace,
                      params: ModelParams,
                      grads: dict[str, np.ndarray]) -> None:
    dims = params.dims
    d_h_dropped, d_m = emission_backward(
        d_emissions, trace.h_dropped, trace.m, params, grads)
    d_h_dropped = d_h_dropped + mhsa_backward(d_m, trace.mhsa_trace, params, grads)
    d_h = d_h_dropped
    if trace.masks is not None and trace.masks.output_mask is not None:
        d_h = d_h_dropped * trace.masks.output_mask[None, :]
    d_x_dropped = bilstm_backward(d_h, trace.lstm_trace, params, grads)
    d_x = d_x_dropped
    if trace.masks is not None and trace.masks.input_mask is not None:
        d_x = d_x_dropped * trace.masks.input_mask[None, :]
    d_char = d_x[:, dims.word_dim:dims.word_dim + dims.char_filters]
    char_cnn_backward(d_char, trace.char_trace, params, grads)
    # Word and contextual slices are fixed inputs: no parameter gradient.


def sentence_nll(params: ModelParams, bundle: InputBundle,
                 gold: np.ndarray, masks: DropoutMasks | None = None) -> float:
    trace = forward_sentence(params, bundle, masks)
    loss, _ = crf.nll_and_grad(trace.emissions, params.trans, gold)
    return loss


def model_grad(params: ModelParams,
               batch: list[tuple[InputBundle, np.ndarray, DropoutMasks | None]],
               ) -> tuple[float, dict[str, np.ndarray]]:
    """Total CRF negative log-likelihood over the batch and its exact
    gradients for every learnable tensor (word vectors stay fixed)."""
    grads = zero_grads(params)
    total = 0.0
    for bundle, gold, masks in batch:
        trace = forward_sentence(params, bundle, masks)
        loss, crf_grads = crf.nll_and_grad(trace.emissions, params.trans, gold)
        total += loss
        grads["trans"] += crf_grads.transitions
        backward_sentence(crf_grads.emissions, trace, params, grads)
    return total, grads


def decode_sentence(params: ModelParams, bundle: InputBundle) -> np.ndarray:
    """Viterbi tag indices for one sentence (no dropout)."""
    trace = forward_sentence(params, bundle, masks=None)
    return crf.viterbi(trace.emissions, params.trans)


# ---------------------------------------------------------------------------
# Checkpoints

def save_checkpoint(params: ModelParams, word_table: EmbeddingTable,
                    sink: io.IOBase | None = None) -> bytes:
    """Serialize model and its (fixed) word table; see module docstring."""
    out = io.BytesIO()
    d = params.dims
    out.write(CHECKPOINT_MAGIC)
    out.write(struct.pack("<I", CHECKPOINT_VERSION))
    out.write(struct.pack(
        "<9I", d.word_dim, d.char_dim, d.char_filters, d.ctx_dim,
        d.lstm_hidden, d.heads, d.head_size, d.n_tags, d.char_kernel))
    out.write(struct.pack("<I", len(params.alphabet)))
    for ch in params.alphabet:
        out.write(struct.pack("<I", ord(ch)))
    words = list(word_table.entries)
    out.write(struct.pack("<I", len(words)))
    for word in words:
        raw = word.encode("utf-8")
        out.write(struct.pack("<I", len(raw)))
        out.write(raw)
    matrix = (np.stack([word_table.entries[w] for w in words])
              if words else np.zeros((0, d.word_dim)))
    out.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
    out.write(np.ascontiguousarray(word_table.unk_vector(), dtype="<f8").tobytes())
    for _, arr in params.named_arrays():
        out.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    blob = out.getvalue()
    if sink is not None:
        sink.write(blob)
    return blob


def load_checkpoint(source: bytes | io.IOBase) -> tuple[ModelParams, EmbeddingTable]:
    buf = source if isinstance(source, bytes) else source.read()
    if buf[:4] != CHECKPOINT_MAGIC:
        raise ShapeMismatch("not a model checkpoint (bad magic)")
    (version,) = struct.unpack_from("<I", buf, 4)
    if version != CHECKPOINT_VERSION:
        raise ShapeMismatch(f"unsupported checkpoint version {version}")
    fields = struct.unpack_from("<9I", buf, 8)
    dims = ModelDims(
        word_dim=fields[0], char_dim=fields[1], char_filters=fields[2],
        ctx_dim=fields[3], lstm_hidden=fields[4], heads=fields[5],
        head_size=fields[6], n_tags=fields[7], char_kernel=fields[8])
    offset = 8 + 36
    (alpha_count,) = struct.unpack_from("<I", buf, offset)
    offset += 4
    codepoints = struct.unpack_from(f"<{alpha_count}I", buf, offset)
    offset += 4 * alpha_count
    alphabet = tuple(chr(c) for c in codepoints)
    (vocab_count,) = struct.unpack_from("<I", buf, offset)
    offset += 4
    words = []
    for _ in range(vocab_count):
        (length,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        words.append(buf[offset:offset + length].decode("utf-8"))
        offset += length

    def take(shape: tuple[int, ...]) -> np.ndarray:
        nonlocal offset
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(buf, dtype="<f8", count=count, offset=offset)
        offset += count * 8
        return arr.reshape(shape).astype(np.float64)

    matrix = take((vocab_count, dims.word_dim))
    unk = take((dims.word_dim,))
    word_table = EmbeddingTable(
        dim=dims.word_dim,
        entries={w: matrix[i] for i, w in enumerate(words)},
    )
    word_table._unk = unk

    h4 = 4 * dims.lstm_hidden
    shapes = {
        "char_table": (alpha_count, dims.char_dim),
        "cnn_w": (dims.char_kernel * dims.char_dim, dims.char_filters),
        "cnn_b": (dims.char_filters,),
        "fw_w": (dims.input_dim, h4), "fw_u": (dims.lstm_hidden, h4), "fw_b": (h4,),
        "bw_w": (dims.input_dim, h4), "bw_u": (dims.lstm_hidden, h4), "bw_b": (h4,),
        "wq": (dims.heads, dims.bilstm_dim, dims.head_size),
        "wk": (dims.heads, dims.bilstm_dim, dims.head_size),
        "wv": (dims.heads, dims.bilstm_dim, dims.head_size),
        "we": (dims.emission_in, dims.n_tags), "be": (dims.n_tags,),
        "trans": (dims.n_tags + 2, dims.n_tags + 2),
    }
    tensors = {name: take(shapes[name]) for name in ModelParams.TENSOR_NAMES}
    if offset != len(buf):
        raise ShapeMismatch("checkpoint has trailing bytes")
    return ModelParams(dims=dims, alphabet=alphabet, **tensors), word_table
