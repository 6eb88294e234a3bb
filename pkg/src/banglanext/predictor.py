"""Context routing, ranked suggestions and greedy sentence completion.

A context of L tokens goes to the order-min(L, 5) model, using only the
last min(L, 5) tokens. Completion appends the top suggestion, re-routes on
the grown context and stops at a terminator or the length cap. The unknown
token is never offered as a suggestion.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backoff import BackoffModel
from .errors import EmptyContext, FormatVersionError, MissingModel
from .neural import NeuralModel, forward, load_model, save_model
from .text import DEFAULT_TERMINATORS, Vocabulary

MAX_CONTEXT = 5
ENGINES = ("neural", "statistical")
DEFAULT_MAX_LEN = 50
BUNDLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Suggestion:
    token: str
    probability: float


@dataclass(frozen=True)
class Completion:
    tokens: list[str]
    terminated_by: str  # a terminator token, or "length-cap"
    steps: int


@dataclass
class ModelBundle:
    """The five neural models plus the statistical model over one vocabulary."""

    vocabulary: Vocabulary
    neural: dict[int, NeuralModel]
    statistical: BackoffModel | None
    terminators: tuple[str, ...] = DEFAULT_TERMINATORS

    def orders(self) -> list[int]:
        return sorted(self.neural)

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.vocabulary.save(out / "vocab.json")
        for order, model in self.neural.items():
            save_model(model, out / f"neural_order{order}.ckpt")
        if self.statistical is not None:
            self.statistical.save(out / "backoff.txt")
        manifest = {
            "version": BUNDLE_FORMAT_VERSION,
            "terminators": list(self.terminators),
            "neural_orders": sorted(self.neural),
            "statistical": self.statistical is not None,
        }
        with open(out / "bundle.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, sort_keys=True, indent=0)
            fh.write("\n")

    @classmethod
    def load(cls, out_dir) -> "ModelBundle":
        out = Path(out_dir)
        with open(out / "bundle.json", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("version") != BUNDLE_FORMAT_VERSION:
            raise FormatVersionError(
                f"bundle {out}: unsupported version {manifest.get('version')!r}"
            )
        vocab = Vocabulary.load(out / "vocab.json")
        neural = {
            order: load_model(out / f"neural_order{order}.ckpt")
            for order in manifest["neural_orders"]
        }
        statistical = (
            BackoffModel.load(out / "backoff.txt") if manifest["statistical"] else None
        )
        return cls(
            vocabulary=vocab,
            neural=neural,
            statistical=statistical,
            terminators=tuple(manifest["terminators"]),
        )


def route(context_tokens: list[str]) -> tuple[int, list[str]]:
    """Pick the model order for a free-length context: the last min(L, 5) tokens."""
    if not context_tokens:
        raise EmptyContext("context must contain at least one token")
    n = min(len(context_tokens), MAX_CONTEXT)
    return n, context_tokens[-n:]


def suggest(
    bundle: ModelBundle,
    context_tokens: list[str],
    k: int,
    engine: str = "neural",
) -> list[Suggestion]:
    """Ranked next-word candidates from the routed model, unk masked out."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    order, trimmed = route(context_tokens)
    ids = bundle.vocabulary.encode_tokens(trimmed)
    if engine == "neural":
        model = bundle.neural.get(order)
        if model is None:
            raise MissingModel(f"no neural model for order {order}")
        probs = forward(model, np.asarray(ids, dtype=np.int64))
    else:
        if bundle.statistical is None:
            raise MissingModel("bundle has no statistical model")
        stat_ctx = tuple(ids)[-bundle.statistical.max_order :]
        probs = bundle.statistical.full_distribution(stat_ctx)
    vocab = bundle.vocabulary
    ranked = np.lexsort((np.arange(len(probs)), -probs))
    out: list[Suggestion] = []
    for idx in ranked:
        if int(idx) == vocab.unk_id:
            continue
        out.append(Suggestion(token=vocab.decode(int(idx)), probability=float(probs[idx])))
        if len(out) == k:
            break
    return out


def complete_sentence(
    bundle: ModelBundle,
    prefix_tokens: list[str],
    engine: str = "neural",
    max_len: int = DEFAULT_MAX_LEN,
) -> Completion:
    """Greedy top-1 loop until a terminator appears or max_len tokens are added."""
    if not prefix_tokens:
        raise EmptyContext("prefix must contain at least one token")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    tokens = list(prefix_tokens)
    steps = 0
    while steps < max_len:
        candidates = suggest(bundle, tokens, k=1, engine=engine)
        if not candidates:  # vocabulary degenerate (unk only)
            break
        tokens.append(candidates[0].token)
        steps += 1
        if candidates[0].token in bundle.terminators:
            return Completion(tokens=tokens, terminated_by=candidates[0].token, steps=steps)
    return Completion(tokens=tokens, terminated_by="length-cap", steps=steps)
