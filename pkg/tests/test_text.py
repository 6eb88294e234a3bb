import json
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banglanext.errors import EmptyCorpus, FormatVersionError, InvalidEncoding
from banglanext.text import (
    DANDA,
    UNK_TOKEN,
    CleaningConfig,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    normalize,
    read_corpus_file,
    split_sentences,
    tokenize,
)

ROMAN = CleaningConfig.romanized()


def oracle_clean(text: str, cfg: CleaningConfig) -> str:
    """Independent character-class table walk (no URLs in its inputs)."""
    out = []
    for ch in text:
        if ch == "|":
            ch = DANDA
        if ch in cfg.terminators:
            out.append(f" {ch} ")
        elif ch.isspace():
            out.append(" ")
        elif any(lo <= ord(ch) <= hi for lo, hi in cfg.allowed_ranges) and not (
            cfg.strip_digits and unicodedata.category(ch) == "Nd"
        ):
            out.append(ch)
        else:
            out.append(" ")
    return " ".join("".join(out).split())


class TestNormalize:
    def test_derived_example(self):
        raw = "ami, bhat 12 khai।"
        expected = oracle_clean(raw, ROMAN)
        assert expected == "ami bhat khai ।"
        assert normalize(RawDocument("t", raw), ROMAN) == expected

    def test_empty(self):
        assert normalize(RawDocument("t", ""), ROMAN) == ""

    def test_fixed_point(self):
        assert normalize(RawDocument("t", "ami bhat khai ।"), ROMAN) == "ami bhat khai ।"

    def test_default_config_strips_latin(self):
        out = normalize(RawDocument("t", "abc আমি 12 ১২।"))
        assert out == "আমি ।"  # Bengali word survives, digits/latin gone

    def test_pipe_becomes_danda(self):
        assert normalize(RawDocument("t", "ami bhat|"), ROMAN) == "ami bhat ।"

    def test_url_removed(self):
        out = normalize(RawDocument("t", "ami https://example.com/x?q=1 bhat"), ROMAN)
        assert out == "ami bhat"

    def test_quotes_commas_digits_removed(self):
        out = normalize(RawDocument("t", '"ami", 42 bhat ০১'), ROMAN)
        assert out == "ami bhat"

    def test_surrogate_rejected(self):
        with pytest.raises(InvalidEncoding):
            normalize(RawDocument("t", "ami \udcff bhat"), ROMAN)

    def test_bad_utf8_file(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_bytes(b"ami \xff\xfe bhat")
        with pytest.raises(InvalidEncoding):
            read_corpus_file(p)

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=80))
    def test_idempotent(self, raw):
        try:
            once = normalize(RawDocument("t", raw), ROMAN)
        except InvalidEncoding:
            return
        assert normalize(RawDocument("t", once), ROMAN) == once


class TestTokenize:
    def test_examples(self):
        assert tokenize("ami bhat khai ।") == ["ami", "bhat", "khai", "।"]
        assert tokenize("") == []
        assert tokenize("ki ?") == ["ki", "?"]

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet="abc ক", max_size=60))
    def test_round_trip(self, raw):
        normalized = normalize(RawDocument("t", raw), ROMAN)
        assert " ".join(tokenize(normalized)) == normalized


class TestSplitSentences:
    def test_derived_example(self):
        tokens = ["ami", "bhat", "khai", "।", "tumi", "ki", "?"]
        assert split_sentences(tokens) == [
            ["ami", "bhat", "khai", "।"],
            ["tumi", "ki", "?"],
        ]

    def test_no_terminator(self):
        assert split_sentences(["ami", "bhat"]) == [["ami", "bhat"]]

    def test_lone_terminator(self):
        assert split_sentences(["।"]) == [["।"]]

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from(["ami", "bhat", "ki", "।", "?"]), max_size=30))
    def test_partition_and_invariants(self, tokens):
        sentences = split_sentences(tokens)
        assert [t for s in sentences for t in s] == tokens
        for sent in sentences:
            assert sent
            terms = [t for t in sent if t in ("।", "?", "!")]
            assert len(terms) <= 1
            if terms:
                assert sent[-1] == terms[0]


class TestVocabulary:
    CORPUS = [["ami", "bhat", "khai", "।"], ["ami", "pani", "khai", "।"]]

    def test_derived_layout(self):
        v = build_vocabulary(self.CORPUS, min_count=1)
        # hand frequency count: ami/khai/। twice, bhat/pani once, unk reserved last
        assert v.size == 6
        assert v.tokens == ("ami", "khai", "।", "bhat", "pani", UNK_TOKEN)
        assert v.encode("ami") < v.encode("bhat")
        assert v.unk_id == 5

    def test_min_count_keeps_terminators(self):
        v = build_vocabulary([["a", "a", "a", "।"]], min_count=5)
        assert set(v.tokens) == {"।", UNK_TOKEN}

    def test_deterministic(self):
        a = build_vocabulary(self.CORPUS)
        b = build_vocabulary(list(reversed(self.CORPUS)))
        assert a.tokens == b.tokens

    def test_bijection_and_unk(self):
        v = build_vocabulary(self.CORPUS)
        for tok in v.tokens:
            assert v.decode(v.encode(tok)) == tok
        ids = [v.encode(t) for t in v.tokens if t != UNK_TOKEN]
        assert len(set(ids)) == len(ids)
        assert v.encode("zzz") == v.unk_id

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_vocabulary([])

    def test_save_load_byte_identical(self, tmp_path):
        v = build_vocabulary(self.CORPUS)
        p1, p2 = tmp_path / "v1.json", tmp_path / "v2.json"
        v.save(p1)
        build_vocabulary(self.CORPUS).save(p2)
        assert p1.read_bytes() == p2.read_bytes()
        loaded = Vocabulary.load(p1)
        assert loaded.tokens == v.tokens and loaded.unk_id == v.unk_id

    def test_version_check(self, tmp_path):
        p = tmp_path / "v.json"
        p.write_text(json.dumps({"version": 99, "unk_id": 0, "tokens": ["x"]}))
        with pytest.raises(FormatVersionError):
            Vocabulary.load(p)
