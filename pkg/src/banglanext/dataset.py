"""Supervised n-gram datasets: fixed-length context windows predicting the next token.

Windows never cross sentence boundaries; duplicates are kept (frequency is
signal for both engines).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatVersionError, OrderOutOfRange

MIN_ORDER = 1
MAX_ORDER = 5
DATASET_FORMAT_VERSION = 1
_HEADER = "banglanext-dataset"
_ARROW = "→"  # separates context ids from the target id on each line


@dataclass(frozen=True)
class NGramDataset:
    """All (context window, next token) pairs of one order, in id space."""

    order: int
    contexts: np.ndarray  # (N, order) int64
    targets: np.ndarray  # (N,) int64
    vocab_size: int

    def __post_init__(self):
        if self.contexts.shape != (len(self.targets), self.order):
            raise ValueError("contexts shape does not match targets/order")

    def __len__(self) -> int:
        return len(self.targets)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{_HEADER} v{DATASET_FORMAT_VERSION}\n")
            fh.write(f"order={self.order} vocab_size={self.vocab_size}\n")
            for ctx, tgt in zip(self.contexts, self.targets):
                fh.write(" ".join(str(c) for c in ctx) + f" {_ARROW} {tgt}\n")

    @classmethod
    def load(cls, path) -> "NGramDataset":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != f"{_HEADER} v{DATASET_FORMAT_VERSION}":
                raise FormatVersionError(f"dataset file {path}: bad header {header!r}")
            meta = dict(kv.split("=") for kv in fh.readline().split())
            order = int(meta["order"])
            vocab_size = int(meta["vocab_size"])
            ctx_rows, tgt_rows = [], []
            for line in fh:
                left, _, right = line.partition(_ARROW)
                ctx_rows.append([int(c) for c in left.split()])
                tgt_rows.append(int(right))
        contexts = (
            np.asarray(ctx_rows, dtype=np.int64)
            if ctx_rows
            else np.empty((0, order), dtype=np.int64)
        )
        targets = np.asarray(tgt_rows, dtype=np.int64)
        return cls(order=order, contexts=contexts, targets=targets, vocab_size=vocab_size)


def build_dataset(sentences: list[list[int]], n: int, vocab_size: int) -> NGramDataset:
    """Slide a length-n window over every sentence.

    A sentence t1..tL yields (t_i..t_{i+n-1}) -> t_{i+n} for every i with
    i+n <= L, in sentence order then position order. Sentences shorter than
    n+1 contribute nothing (short inputs route to lower orders instead).
    """
    if not MIN_ORDER <= n <= MAX_ORDER:
        raise OrderOutOfRange(f"order {n} not in [{MIN_ORDER}, {MAX_ORDER}]")
    ctx_rows: list[list[int]] = []
    tgt_rows: list[int] = []
    for sent in sentences:
        for i in range(len(sent) - n):
            ctx_rows.append(sent[i : i + n])
            tgt_rows.append(sent[i + n])
    contexts = (
        np.asarray(ctx_rows, dtype=np.int64)
        if ctx_rows
        else np.empty((0, n), dtype=np.int64)
    )
    targets = np.asarray(tgt_rows, dtype=np.int64)
    return NGramDataset(order=n, contexts=contexts, targets=targets, vocab_size=vocab_size)


def dataset_stats(d: NGramDataset) -> dict[str, int]:
    """Exact example/context/target counts for reporting."""
    if len(d) == 0:
        return {"example_count": 0, "distinct_contexts": 0, "distinct_targets": 0}
    distinct_contexts = len({tuple(row) for row in d.contexts.tolist()})
    distinct_targets = len(set(d.targets.tolist()))
    return {
        "example_count": len(d),
        "distinct_contexts": distinct_contexts,
        "distinct_targets": distinct_targets,
    }
