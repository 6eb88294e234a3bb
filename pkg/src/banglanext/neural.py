"""Stacked bidirectional LSTM next-word model, implemented on numpy float64.

Layer stack: embedding -> Bi-LSTM -> Bi-LSTM -> dense ReLU -> dense softmax.
The first recurrent layer emits the full sequence of concatenated
forward/backward hidden states; the second is read out sequence-to-one as
concat(forward state at the last position, backward state at the first
position). Gradients come from backpropagation through time across both
directions and both layers; everything is deterministic given the seed.

Gate packing: each cell stores one input-weight matrix (4*units x in_dim),
one recurrent matrix (4*units x units) and one bias (4*units,), with the
gate blocks ordered input, forget, output, candidate.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    EmptyBatch,
    FormatVersionError,
    IdOutOfRange,
    ShapeMismatch,
)

CHECKPOINT_MAGIC = b"BNLMCKPT"
CHECKPOINT_VERSION = 1

_CELL_NAMES = ("lstm1_fwd", "lstm1_bwd", "lstm2_fwd", "lstm2_bwd")


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    context_len: int
    embed_dim: int = 64
    lstm_units: int = 100
    dense_hidden: int = 128
    seed: int = 0

    def __post_init__(self):
        if min(self.vocab_size, self.embed_dim, self.lstm_units, self.dense_hidden) < 1:
            raise ValueError("all dimensions must be >= 1")
        if not 1 <= self.context_len <= 5:
            raise ValueError("context_len must be in 1..5")


class LstmCellParams:
    """One LSTM direction's parameters, gates packed (input, forget, output, candidate)."""

    def __init__(self, w: np.ndarray, u: np.ndarray, b: np.ndarray):
        units = u.shape[1]
        if w.shape[0] != 4 * units or u.shape != (4 * units, units) or b.shape != (4 * units,):
            raise ShapeMismatch(
                f"inconsistent cell shapes w={w.shape} u={u.shape} b={b.shape}"
            )
        self.w = w
        self.u = u
        self.b = b
        self.units = units

    def _gate(self, arr: np.ndarray, idx: int) -> np.ndarray:
        return arr[idx * self.units : (idx + 1) * self.units]

    @property
    def bias_input(self) -> np.ndarray:
        return self._gate(self.b, 0)

    @property
    def bias_forget(self) -> np.ndarray:
        return self._gate(self.b, 1)

    @property
    def bias_output(self) -> np.ndarray:
        return self._gate(self.b, 2)

    @property
    def bias_candidate(self) -> np.ndarray:
        return self._gate(self.b, 3)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_step(
    cell: LstmCellParams, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One recurrence step on vectors: returns (h, c)."""
    if x.shape != (cell.w.shape[1],) or h_prev.shape != (cell.units,) or c_prev.shape != (cell.units,):
        raise ShapeMismatch(
            f"step shapes x={x.shape} h={h_prev.shape} c={c_prev.shape} "
            f"vs in_dim={cell.w.shape[1]} units={cell.units}"
        )
    h, c, _ = _step_batch(cell, x[None, :], h_prev[None, :], c_prev[None, :])
    return h[0], c[0]


def _step_batch(cell, x, h_prev, c_prev):
    """Batched step; also returns the gate activations for BPTT."""
    n = cell.units
    z = x @ cell.w.T + h_prev @ cell.u.T + cell.b
    i = _sigmoid(z[:, :n])
    f = _sigmoid(z[:, n : 2 * n])
    o = _sigmoid(z[:, 2 * n : 3 * n])
    g = np.tanh(z[:, 3 * n :])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    return h, c, (i, f, o, g, tc)


def _run_lstm(cell: LstmCellParams, xs: np.ndarray, reverse: bool):
    """Run over a (B, T, in_dim) sequence; hs comes back in original positions.

    With reverse=True the recurrence consumes the sequence right-to-left, so
    hs[:, t] is the state after having read positions T-1..t.
    """
    batch, steps, _ = xs.shape
    xs_proc = xs[:, ::-1] if reverse else xs
    h = np.zeros((batch, cell.units))
    c = np.zeros((batch, cell.units))
    hs, gates, h_prevs, cs = [], [], [], []
    for t in range(steps):
        h_prevs.append(h)
        c_prev = c
        h, c, acts = _step_batch(cell, xs_proc[:, t], h, c_prev)
        hs.append(h)
        cs.append(c)
        gates.append(acts)
    hs_proc = np.stack(hs, axis=1)
    cache = {
        "xs_proc": xs_proc,
        "gates": gates,
        "h_prevs": h_prevs,
        "cs": cs,
        "reverse": reverse,
    }
    return (hs_proc[:, ::-1] if reverse else hs_proc), cache


def _lstm_backward(cell: LstmCellParams, cache: dict, dhs: np.ndarray):
    """BPTT for one direction.

    dhs holds the loss gradient w.r.t. each emitted hidden state, indexed by
    original sequence position. Returns the gradient w.r.t. the input
    sequence (original positions) plus (dw, du, db).
    """
    xs_proc = cache["xs_proc"]
    batch, steps, _ = xs_proc.shape
    n = cell.units
    dhs_proc = dhs[:, ::-1] if cache["reverse"] else dhs
    dw = np.zeros_like(cell.w)
    du = np.zeros_like(cell.u)
    db = np.zeros_like(cell.b)
    dxs_proc = np.empty_like(xs_proc)
    dh_next = np.zeros((batch, n))
    dc_next = np.zeros((batch, n))
    for t in reversed(range(steps)):
        i, f, o, g, tc = cache["gates"][t]
        c_prev = cache["cs"][t - 1] if t > 0 else np.zeros((batch, n))
        dh = dhs_proc[:, t] + dh_next
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_next = dc * f
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g * g)],
            axis=1,
        )
        dw += dz.T @ xs_proc[:, t]
        du += dz.T @ cache["h_prevs"][t]
        db += dz.sum(axis=0)
        dxs_proc[:, t] = dz @ cell.w
        dh_next = dz @ cell.u
    dxs = dxs_proc[:, ::-1] if cache["reverse"] else dxs_proc
    return dxs, (dw, du, db)


class NeuralModel:
    """Parameter set plus architecture config. Immutable by convention after
    training; inference methods never write to the arrays."""

    def __init__(self, config: ModelConfig, params: dict[str, np.ndarray]):
        self.config = config
        self.embedding = params["embedding"]
        for name in _CELL_NAMES:
            cell = LstmCellParams(params[f"{name}.w"], params[f"{name}.u"], params[f"{name}.b"])
            setattr(self, name, cell)
        self.dense1_w = params["dense1.w"]
        self.dense1_b = params["dense1.b"]
        self.dense2_w = params["dense2.w"]
        self.dense2_b = params["dense2.b"]
        self._validate()

    def _validate(self):
        cfg = self.config
        expect = {
            "embedding": (cfg.vocab_size, cfg.embed_dim),
            "lstm1_fwd.w": (4 * cfg.lstm_units, cfg.embed_dim),
            "lstm1_bwd.w": (4 * cfg.lstm_units, cfg.embed_dim),
            "lstm2_fwd.w": (4 * cfg.lstm_units, 2 * cfg.lstm_units),
            "lstm2_bwd.w": (4 * cfg.lstm_units, 2 * cfg.lstm_units),
            "dense1.w": (cfg.dense_hidden, 2 * cfg.lstm_units),
            "dense1.b": (cfg.dense_hidden,),
            "dense2.w": (cfg.vocab_size, cfg.dense_hidden),
            "dense2.b": (cfg.vocab_size,),
        }
        actual = dict(self.param_items())
        for name, shape in expect.items():
            if actual[name].shape != shape:
                raise ShapeMismatch(f"{name}: {actual[name].shape} != {shape}")
            if not np.all(np.isfinite(actual[name])):
                raise ValueError(f"{name}: non-finite entries")

    def param_items(self) -> list[tuple[str, np.ndarray]]:
        """Every parameter tensor in the fixed checkpoint order."""
        items = [("embedding", self.embedding)]
        for name in _CELL_NAMES:
            cell = getattr(self, name)
            items += [(f"{name}.w", cell.w), (f"{name}.u", cell.u), (f"{name}.b", cell.b)]
        items += [
            ("dense1.w", self.dense1_w),
            ("dense1.b", self.dense1_b),
            ("dense2.w", self.dense2_w),
            ("dense2.b", self.dense2_b),
        ]
        return items

    def clone(self) -> "NeuralModel":
        return NeuralModel(self.config, {k: v.copy() for k, v in self.param_items()})

    def param_count(self) -> int:
        return sum(v.size for _, v in self.param_items())


def init_model(config: ModelConfig) -> NeuralModel:
    """Scaled-uniform (Glorot) init, zero biases except forget gates at 1.0."""
    rng = np.random.default_rng(config.seed)

    def glorot(shape, fan_in, fan_out):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=shape)

    n = config.lstm_units
    params: dict[str, np.ndarray] = {}
    params["embedding"] = glorot(
        (config.vocab_size, config.embed_dim), config.vocab_size, config.embed_dim
    )
    for name in _CELL_NAMES:
        in_dim = config.embed_dim if name.startswith("lstm1") else 2 * n
        params[f"{name}.w"] = glorot((4 * n, in_dim), in_dim, n)
        params[f"{name}.u"] = glorot((4 * n, n), n, n)
        b = np.zeros(4 * n)
        b[n : 2 * n] = 1.0
        params[f"{name}.b"] = b
    params["dense1.w"] = glorot((config.dense_hidden, 2 * n), 2 * n, config.dense_hidden)
    params["dense1.b"] = np.zeros(config.dense_hidden)
    params["dense2.w"] = glorot((config.vocab_size, config.dense_hidden), config.dense_hidden, config.vocab_size)
    params["dense2.b"] = np.zeros(config.vocab_size)
    return NeuralModel(config, params)


def _check_contexts(model: NeuralModel, contexts: np.ndarray) -> np.ndarray:
    contexts = np.asarray(contexts, dtype=np.int64)
    if contexts.ndim != 2 or contexts.shape[1] != model.config.context_len:
        raise ShapeMismatch(
            f"contexts shape {contexts.shape}, expected (*, {model.config.context_len})"
        )
    if contexts.size and (contexts.min() < 0 or contexts.max() >= model.config.vocab_size):
        raise IdOutOfRange("token id outside vocabulary")
    return contexts


def _forward_batch(model: NeuralModel, contexts: np.ndarray, need_cache: bool):
    n = model.config.lstm_units
    emb = model.embedding[contexts]
    h1f, c1f = _run_lstm(model.lstm1_fwd, emb, reverse=False)
    h1b, c1b = _run_lstm(model.lstm1_bwd, emb, reverse=True)
    seq1 = np.concatenate([h1f, h1b], axis=2)
    h2f, c2f = _run_lstm(model.lstm2_fwd, seq1, reverse=False)
    h2b, c2b = _run_lstm(model.lstm2_bwd, seq1, reverse=True)
    feat = np.concatenate([h2f[:, -1], h2b[:, 0]], axis=1)
    z1 = feat @ model.dense1_w.T + model.dense1_b
    a1 = np.maximum(z1, 0.0)
    logits = a1 @ model.dense2_w.T + model.dense2_b
    shift = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shift).sum(axis=1, keepdims=True))
    log_probs = shift - log_z
    if not need_cache:
        return log_probs, None
    cache = {
        "contexts": contexts,
        "caches": (c1f, c1b, c2f, c2b),
        "feat": feat,
        "z1": z1,
        "a1": a1,
        "units": n,
    }
    return log_probs, cache


def forward(model: NeuralModel, context) -> np.ndarray:
    """Probability vector over the vocabulary for one context window."""
    contexts = _check_contexts(model, np.asarray(context)[None, :])
    log_probs, _ = _forward_batch(model, contexts, need_cache=False)
    return np.exp(log_probs[0])


def forward_batch(model: NeuralModel, contexts) -> np.ndarray:
    """Probabilities for many context windows at once, shape (B, vocab)."""
    contexts = _check_contexts(model, contexts)
    log_probs, _ = _forward_batch(model, contexts, need_cache=False)
    return np.exp(log_probs)


def loss_and_grads(model: NeuralModel, contexts, targets):
    """Mean cross-entropy over the batch plus gradients for every tensor."""
    contexts = _check_contexts(model, contexts)
    targets = np.asarray(targets, dtype=np.int64)
    batch = len(targets)
    if batch == 0:
        raise EmptyBatch("loss needs at least one example")
    if contexts.shape[0] != batch:
        raise ShapeMismatch("contexts/targets length mismatch")
    if targets.min() < 0 or targets.max() >= model.config.vocab_size:
        raise IdOutOfRange("target id outside vocabulary")

    log_probs, cache = _forward_batch(model, contexts, need_cache=True)
    loss = -float(log_probs[np.arange(batch), targets].mean())

    n = cache["units"]
    dlogits = np.exp(log_probs)
    dlogits[np.arange(batch), targets] -= 1.0
    dlogits /= batch

    grads: dict[str, np.ndarray] = {}
    grads["dense2.w"] = dlogits.T @ cache["a1"]
    grads["dense2.b"] = dlogits.sum(axis=0)
    da1 = dlogits @ model.dense2_w
    dz1 = da1 * (cache["z1"] > 0)
    grads["dense1.w"] = dz1.T @ cache["feat"]
    grads["dense1.b"] = dz1.sum(axis=0)
    dfeat = dz1 @ model.dense1_w

    steps = contexts.shape[1]
    c1f, c1b, c2f, c2b = cache["caches"]
    dh2f = np.zeros((batch, steps, n))
    dh2f[:, -1] = dfeat[:, :n]
    dh2b = np.zeros((batch, steps, n))
    dh2b[:, 0] = dfeat[:, n:]
    dseq_f, (gw, gu, gb) = _lstm_backward(model.lstm2_fwd, c2f, dh2f)
    grads["lstm2_fwd.w"], grads["lstm2_fwd.u"], grads["lstm2_fwd.b"] = gw, gu, gb
    dseq_b, (gw, gu, gb) = _lstm_backward(model.lstm2_bwd, c2b, dh2b)
    grads["lstm2_bwd.w"], grads["lstm2_bwd.u"], grads["lstm2_bwd.b"] = gw, gu, gb
    dseq1 = dseq_f + dseq_b

    demb_f, (gw, gu, gb) = _lstm_backward(model.lstm1_fwd, c1f, dseq1[:, :, :n])
    grads["lstm1_fwd.w"], grads["lstm1_fwd.u"], grads["lstm1_fwd.b"] = gw, gu, gb
    demb_b, (gw, gu, gb) = _lstm_backward(model.lstm1_bwd, c1b, dseq1[:, :, n:])
    grads["lstm1_bwd.w"], grads["lstm1_bwd.u"], grads["lstm1_bwd.b"] = gw, gu, gb
    demb = demb_f + demb_b

    d_emb = np.zeros_like(model.embedding)
    np.add.at(d_emb, contexts.ravel(), demb.reshape(-1, model.config.embed_dim))
    grads["embedding"] = d_emb
    return loss, grads


def evaluate(model: NeuralModel, contexts, targets, chunk: int = 1024):
    """Mean cross-entropy and top-1 accuracy over a whole dataset."""
    contexts = _check_contexts(model, contexts)
    targets = np.asarray(targets, dtype=np.int64)
    if len(targets) == 0:
        return float("nan"), float("nan")
    total_nll = 0.0
    hits = 0
    for start in range(0, len(targets), chunk):
        ctx = contexts[start : start + chunk]
        tgt = targets[start : start + chunk]
        log_probs, _ = _forward_batch(model, ctx, need_cache=False)
        total_nll -= float(log_probs[np.arange(len(tgt)), tgt].sum())
        hits += int((log_probs.argmax(axis=1) == tgt).sum())
    return total_nll / len(targets), hits / len(targets)


def predict_topk(model: NeuralModel, context, k: int) -> list[tuple[int, float]]:
    """Top-k (id, probability) pairs, descending, ties to the lower id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    probs = forward(model, context)
    k = min(k, model.config.vocab_size)
    order = np.lexsort((np.arange(len(probs)), -probs))[:k]
    return [(int(i), float(probs[i])) for i in order]


# -- checkpoint io ---------------------------------------------------------


def save_model(model: NeuralModel, path) -> None:
    """Binary checkpoint: magic, JSON header, then raw row-major float64 LE
    tensor data in header order."""
    tensors = model.param_items()
    header = {
        "version": CHECKPOINT_VERSION,
        "config": asdict(model.config),
        "tensors": [{"name": name, "shape": list(arr.shape)} for name, arr in tensors],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for _, arr in tensors:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path) -> NeuralModel:
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise FormatVersionError(f"{path}: not a model checkpoint")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("version") != CHECKPOINT_VERSION:
            raise FormatVersionError(f"{path}: unsupported checkpoint version")
        config = ModelConfig(**header["config"])
        params: dict[str, np.ndarray] = {}
        for spec in header["tensors"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(fh.read(count * 8), dtype="<f8", count=count)
            params[spec["name"]] = data.reshape(shape).astype(np.float64)
    return NeuralModel(config, params)
