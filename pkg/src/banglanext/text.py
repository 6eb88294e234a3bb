"""Text pipeline: normalization, tokenization, sentence splitting, vocabulary.

All operations are pure functions over immutable inputs; a Vocabulary is
frozen after construction and safe to share across threads.
"""
from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus, FormatVersionError, InvalidEncoding

DANDA = "।"  # Bangla full stop (danda)
DEFAULT_TERMINATORS = (DANDA, "?", "!")
UNK_TOKEN = "<unk>"

BENGALI_RANGE = (0x0980, 0x09FF)
LATIN_RANGES = ((0x0041, 0x005A), (0x0061, 0x007A))

VOCAB_FORMAT_VERSION = 1

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)


@dataclass(frozen=True)
class RawDocument:
    """One source document: a label (e.g. the file name) plus its text."""

    source_name: str
    text: str

    def __post_init__(self):
        if not self.source_name:
            raise ValueError("source_name must be non-empty")


@dataclass(frozen=True)
class CleaningConfig:
    """Rule set for `normalize`.

    allowed_ranges: inclusive codepoint ranges whose letters survive cleaning.
    terminators: sentence-ending symbols, kept as standalone tokens.
    strip_digits: drop decimal digits even when they fall inside an allowed
        range (the Bengali block contains its own digit run).
    """

    allowed_ranges: tuple[tuple[int, int], ...] = (BENGALI_RANGE,)
    terminators: tuple[str, ...] = DEFAULT_TERMINATORS
    strip_digits: bool = True

    @classmethod
    def romanized(cls, terminators: tuple[str, ...] = DEFAULT_TERMINATORS) -> "CleaningConfig":
        """Config for Latin-transliterated corpora (test fixtures, demos)."""
        return cls(allowed_ranges=LATIN_RANGES + (BENGALI_RANGE,), terminators=terminators)


def _check_text(text: str) -> None:
    # Python str is unicode by construction; surrogates sneak in via
    # surrogateescape decoding and are the one way "invalid UTF-8" survives.
    for ch in text:
        if 0xD800 <= ord(ch) <= 0xDFFF:
            raise InvalidEncoding("text contains surrogate codepoints")


def normalize(raw: RawDocument, rules: CleaningConfig = CleaningConfig()) -> str:
    """Clean one document down to script letters, whitespace and terminators.

    URLs are deleted outright; every other disallowed character becomes a
    space (so glued words split rather than merge); terminator symbols are
    space-padded so they tokenize as standalone tokens; whitespace runs
    collapse to single spaces. The ASCII pipe is folded into the danda.
    """
    _check_text(raw.text)
    text = _URL_RE.sub(" ", raw.text)
    out: list[str] = []
    for ch in text:
        if ch == "|":
            ch = DANDA
        if ch in rules.terminators:
            out.append(f" {ch} ")
        elif ch.isspace():
            out.append(" ")
        elif _is_allowed(ch, rules):
            out.append(ch)
        else:
            out.append(" ")
    return " ".join("".join(out).split())


def _is_allowed(ch: str, rules: CleaningConfig) -> bool:
    cp = ord(ch)
    for lo, hi in rules.allowed_ranges:
        if lo <= cp <= hi:
            if rules.strip_digits and unicodedata.category(ch) == "Nd":
                return False
            return True
    return False


def tokenize(normalized: str) -> list[str]:
    """Whitespace split; inverse of `" ".join` on normalized text."""
    return normalized.split()


def split_sentences(
    tokens: list[str], terminators: tuple[str, ...] = DEFAULT_TERMINATORS
) -> list[list[str]]:
    """Partition a token stream into sentences.

    A terminator closes the current sentence and stays as its final token;
    trailing tokens with no terminator form a last, unterminated sentence.
    """
    sentences: list[list[str]] = []
    current: list[str] = []
    for tok in tokens:
        current.append(tok)
        if tok in terminators:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


@dataclass(frozen=True)
class Vocabulary:
    """Bijection between token strings and dense integer ids.

    Ids are assigned by descending corpus frequency with codepoint-
    lexicographic tie-breaking; the reserved unknown token always takes the
    last id, so the layout is stable across min_count settings.
    """

    tokens: tuple[str, ...]
    unk_id: int
    token_to_id: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.token_to_id:
            object.__setattr__(
                self, "token_to_id", {t: i for i, t in enumerate(self.tokens)}
            )

    @property
    def size(self) -> int:
        return len(self.tokens)

    def encode(self, token: str) -> int:
        return self.token_to_id.get(token, self.unk_id)

    def decode(self, token_id: int) -> str:
        return self.tokens[token_id]

    def encode_tokens(self, tokens: list[str]) -> list[int]:
        return [self.encode(t) for t in tokens]

    def save(self, path) -> None:
        payload = {
            "version": VOCAB_FORMAT_VERSION,
            "unk_id": self.unk_id,
            "tokens": list(self.tokens),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=0, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != VOCAB_FORMAT_VERSION:
            raise FormatVersionError(
                f"vocabulary file {path}: unsupported version {payload.get('version')!r}"
            )
        return cls(tokens=tuple(payload["tokens"]), unk_id=payload["unk_id"])


def build_vocabulary(
    sentences: list[list[str]],
    min_count: int = 1,
    terminators: tuple[str, ...] = DEFAULT_TERMINATORS,
) -> Vocabulary:
    """Count tokens over sentences and assign ids.

    Tokens below min_count map to the unknown id, except terminators, which
    are kept whenever they occur at all (they must stay predictable targets).
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if not sentences:
        raise EmptyCorpus("no sentences to build a vocabulary from")
    counts = Counter(tok for sent in sentences for tok in sent)
    kept = [
        tok
        for tok, cnt in counts.items()
        if cnt >= min_count or tok in terminators
    ]
    kept.sort(key=lambda tok: (-counts[tok], tok))
    tokens = tuple(kept) + (UNK_TOKEN,)
    return Vocabulary(tokens=tokens, unk_id=len(tokens) - 1)


def read_corpus_file(path, source_name: str | None = None) -> RawDocument:
    """Read one UTF-8 text file into a RawDocument; strict decoding."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidEncoding(f"{path}: {exc}") from exc
    return RawDocument(source_name=source_name or str(path), text=text)
