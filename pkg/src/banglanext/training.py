"""Training loop for the neural models: Adam (default) or plain SGD,
deterministic per-epoch shuffling, per-epoch loss/accuracy metrics."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import NGramDataset
from .errors import OrderMismatch
from .neural import NeuralModel, evaluate, loss_and_grads

REPORT_CSV_HEADER = ["epoch", "loss", "accuracy"]


@dataclass(frozen=True)
class TrainOptions:
    epochs: int
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    optimizer: str = "adam"  # adam | sgd


@dataclass
class TrainReport:
    """Per-epoch mean cross-entropy and top-1 accuracy on the training set."""

    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    wall_time_s: float = 0.0

    def __len__(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        return self.losses[-1]

    @property
    def final_accuracy(self) -> float:
        return self.accuracies[-1]

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_CSV_HEADER)
            for epoch, (loss, acc) in enumerate(zip(self.losses, self.accuracies), start=1):
                writer.writerow([epoch, repr(loss), repr(acc)])

    @classmethod
    def load_csv(cls, path) -> "TrainReport":
        report = cls()
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != REPORT_CSV_HEADER:
                raise ValueError(f"{path}: unexpected CSV header {header}")
            for row in reader:
                report.losses.append(float(row[1]))
                report.accuracies.append(float(row[2]))
        return report


class Adam:
    def __init__(self, lr: float, beta1: float, beta2: float, eps: float):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, p in params.items():
            g = grads[name]
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


class Sgd:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params, grads) -> None:
        for name, p in params.items():
            p -= self.lr * grads[name]


def _make_optimizer(opts: TrainOptions):
    if opts.optimizer == "adam":
        return Adam(opts.learning_rate, opts.beta1, opts.beta2, opts.eps)
    if opts.optimizer == "sgd":
        return Sgd(opts.learning_rate)
    raise ValueError(f"unknown optimizer {opts.optimizer!r}")


def train(
    model: NeuralModel, dataset: NGramDataset, opts: TrainOptions
) -> tuple[NeuralModel, TrainReport]:
    """Train a copy of the model; the input model is left untouched.

    Each epoch shuffles example order with a stream derived solely from
    opts.seed, then reports full-training-set metrics after the updates, so
    two runs with the same seed, data and options match exactly.
    """
    if dataset.order != model.config.context_len:
        raise OrderMismatch(
            f"dataset order {dataset.order} != model context_len {model.config.context_len}"
        )
    start = time.perf_counter()
    report = TrainReport()
    if opts.epochs == 0 or len(dataset) == 0:
        report.wall_time_s = time.perf_counter() - start
        return model, report

    trained = model.clone()
    params = dict(trained.param_items())
    optimizer = _make_optimizer(opts)
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.epochs):
        perm = rng.permutation(len(dataset))
        for lo in range(0, len(perm), opts.batch_size):
            idx = perm[lo : lo + opts.batch_size]
            _, grads = loss_and_grads(trained, dataset.contexts[idx], dataset.targets[idx])
            optimizer.step(params, grads)
        loss, acc = evaluate(trained, dataset.contexts, dataset.targets)
        report.losses.append(loss)
        report.accuracies.append(acc)
    report.wall_time_s = time.perf_counter() - start
    return trained, report
