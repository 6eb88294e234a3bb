"""Run configuration: a flat key=value text file plus CLI overrides.

Every command resolves its RunConfig first, validates it, and writes the
resolved form into the output directory so a run can be reproduced from its
artifacts alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .text import BENGALI_RANGE, DEFAULT_TERMINATORS, CleaningConfig

CONFIG_KEYS = """
corpus out seed engine orders min_count
clean.allowed_ranges clean.terminators clean.strip_digits
model.embed_dim model.lstm_units model.dense_hidden
train.epochs train.batch_size train.learning_rate train.optimizer
train.beta1 train.beta2 train.eps
predict.k complete.max_len figures
""".split()


@dataclass(frozen=True)
class RunConfig:
    corpus_paths: tuple[str, ...] = ()
    out_dir: str = "runs/default"
    seed: int = 0
    engine: str = "neural"
    orders: tuple[int, ...] = (1, 2, 3, 4, 5)
    min_count: int = 1
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    embed_dim: int = 64
    lstm_units: int = 100
    dense_hidden: int = 128
    epochs: int = 300
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    k: int = 5
    max_len: int = 50
    figures: bool = True

    def validate(self) -> None:
        if not self.orders or any(n not in (1, 2, 3, 4, 5) for n in self.orders):
            raise ValueError(f"orders must be within 1..5, got {self.orders}")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.engine not in ("neural", "statistical"):
            raise ValueError(f"engine must be neural or statistical, got {self.engine!r}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.k < 1 or self.max_len < 1:
            raise ValueError("k and max_len must be >= 1")
        if min(self.embed_dim, self.lstm_units, self.dense_hidden) < 1:
            raise ValueError("model dimensions must be >= 1")


def _parse_ranges(value: str) -> tuple[tuple[int, int], ...]:
    ranges = []
    for part in value.replace(",", " ").split():
        lo, _, hi = part.partition("-")
        ranges.append((int(lo, 16), int(hi, 16)))
    return tuple(ranges)


def _format_ranges(ranges) -> str:
    return ",".join(f"{lo:04X}-{hi:04X}" for lo, hi in ranges)


def _parse_bool(value: str) -> bool:
    if value.lower() in ("true", "yes", "1"):
        return True
    if value.lower() in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def load_config(path) -> RunConfig:
    """Parse a flat key=value file; '#' starts a comment, repeated 'corpus'
    keys accumulate."""
    pairs: dict[str, str] = {}
    corpus: list[str] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "corpus":
            corpus.extend(p for p in value.split(",") if p.strip())
        else:
            pairs[key] = value
    cfg = RunConfig(corpus_paths=tuple(p.strip() for p in corpus))
    cleaning = CleaningConfig(
        allowed_ranges=_parse_ranges(pairs["clean.allowed_ranges"])
        if "clean.allowed_ranges" in pairs
        else (BENGALI_RANGE,),
        terminators=tuple(pairs["clean.terminators"].split())
        if "clean.terminators" in pairs
        else DEFAULT_TERMINATORS,
        strip_digits=_parse_bool(pairs.get("clean.strip_digits", "true")),
    )
    updates: dict = {"cleaning": cleaning}
    scalar = {
        "out": ("out_dir", str),
        "seed": ("seed", int),
        "engine": ("engine", str),
        "min_count": ("min_count", int),
        "model.embed_dim": ("embed_dim", int),
        "model.lstm_units": ("lstm_units", int),
        "model.dense_hidden": ("dense_hidden", int),
        "train.epochs": ("epochs", int),
        "train.batch_size": ("batch_size", int),
        "train.learning_rate": ("learning_rate", float),
        "train.optimizer": ("optimizer", str),
        "train.beta1": ("beta1", float),
        "train.beta2": ("beta2", float),
        "train.eps": ("eps", float),
        "predict.k": ("k", int),
        "complete.max_len": ("max_len", int),
        "figures": ("figures", _parse_bool),
    }
    for key, (attr, cast) in scalar.items():
        if key in pairs:
            updates[attr] = cast(pairs[key])
    if "orders" in pairs:
        updates["orders"] = tuple(int(n) for n in pairs["orders"].replace(",", " ").split())
    return replace(cfg, **updates)


def save_config(cfg: RunConfig, path) -> None:
    """Write the resolved configuration back out, one sorted key per line."""
    lines = []
    for p in cfg.corpus_paths:
        lines.append(f"corpus = {p}")
    lines += [
        f"clean.allowed_ranges = {_format_ranges(cfg.cleaning.allowed_ranges)}",
        f"clean.strip_digits = {str(cfg.cleaning.strip_digits).lower()}",
        f"clean.terminators = {' '.join(cfg.cleaning.terminators)}",
        f"complete.max_len = {cfg.max_len}",
        f"engine = {cfg.engine}",
        f"figures = {str(cfg.figures).lower()}",
        f"min_count = {cfg.min_count}",
        f"model.dense_hidden = {cfg.dense_hidden}",
        f"model.embed_dim = {cfg.embed_dim}",
        f"model.lstm_units = {cfg.lstm_units}",
        f"orders = {','.join(str(n) for n in cfg.orders)}",
        f"out = {cfg.out_dir}",
        f"predict.k = {cfg.k}",
        f"seed = {cfg.seed}",
        f"train.batch_size = {cfg.batch_size}",
        f"train.beta1 = {cfg.beta1!r}",
        f"train.beta2 = {cfg.beta2!r}",
        f"train.eps = {cfg.eps!r}",
        f"train.epochs = {cfg.epochs}",
        f"train.learning_rate = {cfg.learning_rate!r}",
        f"train.optimizer = {cfg.optimizer}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
