import time
from pathlib import Path

import pytest

from banglanext import cli
from banglanext.config import load_config
from banglanext.predictor import ModelBundle

ROOT = Path(__file__).resolve().parents[1]
TOY_CONFIG = ROOT / "configs" / "toy.conf"
TOY_CORPUS = ROOT / "data" / "toy_corpus.txt"

# Tiny corpus used by fast contract tests: long enough sentences that every
# order 1..5 gets examples, continuations deterministic per context.
TINY_SENTENCES = [
    "ami ajke bhalo bhat khai ।",
    "tumi kalke notun boi poro ।",
    "she raate mishti gaan shone ।",
    "amra ki ajke khela dekhbo ?",
]


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "tiny.txt"
    lines = [s for s in TINY_SENTENCES for _ in range(4)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_tiny_config(path: Path, corpus: Path, out: Path, epochs: int = 150) -> Path:
    path.write_text(
        "\n".join(
            [
                f"corpus = {corpus}",
                f"out = {out}",
                "seed = 5",
                "clean.allowed_ranges = 0041-005A,0061-007A,0980-09FF",
                "model.embed_dim = 8",
                "model.lstm_units = 12",
                "model.dense_hidden = 16",
                f"train.epochs = {epochs}",
                "train.batch_size = 8",
                "train.learning_rate = 0.01",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture(scope="session")
def tiny_run(tmp_path_factory, tiny_corpus):
    """Build + train the tiny corpus once; returns the artifact directory."""
    out = tmp_path_factory.mktemp("tiny_run")
    cfg_path = _write_tiny_config(out / "tiny.conf", tiny_corpus, out / "artifacts")
    assert cli.main(["build", "--config", str(cfg_path)]) == 0
    assert cli.main(["train", "--config", str(cfg_path)]) == 0
    return out / "artifacts"


@pytest.fixture(scope="session")
def tiny_bundle(tiny_run) -> ModelBundle:
    return ModelBundle.load(tiny_run)


@pytest.fixture(scope="session")
def toy_run(tmp_path_factory):
    """Full build + train of the bundled toy corpus with its shipped config.

    Expensive (a couple of minutes); shared by the acceptance suite and the
    tests that need a well-fit five-order bundle.
    """
    out = tmp_path_factory.mktemp("toy_run") / "artifacts"
    assert cli.main(["build", "--config", str(TOY_CONFIG), "--out", str(out)]) == 0
    t0 = time.perf_counter()
    assert cli.main(["train", "--config", str(TOY_CONFIG), "--out", str(out)]) == 0
    train_seconds = time.perf_counter() - t0
    return {"out": out, "train_seconds": train_seconds}


@pytest.fixture(scope="session")
def toy_bundle(toy_run) -> ModelBundle:
    return ModelBundle.load(toy_run["out"])


@pytest.fixture(scope="session")
def toy_cleaning(toy_run):
    return load_config(toy_run["out"] / "run_config.txt").cleaning
