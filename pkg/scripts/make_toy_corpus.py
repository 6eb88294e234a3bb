#!/usr/bin/env python3
"""Generate the bundled toy corpus (data/toy_corpus.txt).

Romanized synthetic Bangla sentences built from templates. Constraints the
rest of the project relies on:
  - every 4-token and 5-token context window has a unique next token across
    the whole corpus (so the 4-gram/5-gram models can reach ~100% accuracy);
  - the bigram "ami bhat" occurs only in the demo sentence
    "ami bhat khai ।", so its continuation is deterministic;
  - a mix of "।", "?" endings, ~200 sentences, vocabulary well under 500.

The raw file carries deliberate noise (digits, commas, ASCII pipe for the
danda) that the cleaning pipeline strips.
"""
import random
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from banglanext.text import CleaningConfig, RawDocument, normalize, split_sentences, tokenize

SUBJECTS = """ami tumi she amra tomra tara baba ma dada didi bhai bon bondhu
chele meye lokti shikkhok chatro daktar krishok""".split()
ADVERBS = """ajke kalke shokale bikale raate dupure ghore bazare pathe
schoole mathe bagane shohore""".split()
OBJECTS = """pani cha dudh ruti mach mangsho phol aam kola boi khata kolom
chithi golpo kobita gaan chobi kapor khabar sobji""".split()
ADJECTIVES = """bhalo notun purono lal shobuj boro choto mishti thanda gorom
shundor lomba""".split()
VERBS = """khay khabe pori poro porbe dekhi dekho dekhe dekhbe likhi lekho
lekhe likhbe shuni shono shone shunbe kini kine kinbe gai gabe kheli khele
khelbe banai banay ane anbe dey""".split()
QUESTION_WORDS = "keno kothay kokhon kemon".split()

PROTECTED = [
    "ami bhat khai ।",
    "ami pani khai ।",
    "tumi ki khao ?",
]

TARGET_DISTINCT = 70
REPEATS = (2, 3, 4)


def windows(tokens, n):
    return [(tuple(tokens[i : i + n]), tokens[i + n]) for i in range(len(tokens) - n)]


def conflicts(tokens, seen):
    for n in (4, 5):
        for ctx, nxt in windows(tokens, n):
            if seen.get(ctx, nxt) != nxt:
                return True
    return False


def record(tokens, seen):
    for n in (4, 5):
        for ctx, nxt in windows(tokens, n):
            seen[ctx] = nxt


def has_ami_bhat(tokens):
    return any(a == "ami" and b == "bhat" for a, b in zip(tokens, tokens[1:]))


def gen_sentence(rng):
    template = rng.randrange(5)
    subj = rng.choice(SUBJECTS)
    adv = rng.choice(ADVERBS)
    adj = rng.choice(ADJECTIVES)
    obj = rng.choice(OBJECTS)
    verb = rng.choice(VERBS)
    if template == 0:
        words = [subj, adv, adj, obj, verb]
    elif template == 1:
        words = [subj, adv, obj, verb, "ebong", rng.choice(OBJECTS), rng.choice(VERBS)]
    elif template == 2:
        words = [subj, rng.choice(QUESTION_WORDS), adj, obj, verb]
        return words + ["?"]
    elif template == 3:
        words = [subj, adv, "khub", adj, obj, verb]
    else:
        words = [subj, "ar", rng.choice(SUBJECTS), adv, obj, verb]
    return words + ["।"]


def add_noise(line, rng):
    """Sprinkle junk the normalizer must strip, without changing the tokens."""
    roll = rng.random()
    if roll < 0.15:
        line = line.replace(" ", ", ", 1)
    elif roll < 0.25:
        line = line.replace(" ", f" {rng.randrange(10, 99)} ", 1)
    if rng.random() < 0.2:
        line = line.replace("।", "|")
    return line


def main():
    rng = random.Random(20240917)
    seen = {}
    distinct = []
    for sent in PROTECTED:
        tokens = sent.split()
        record(tokens, seen)
        distinct.append(tokens)
    attempts = 0
    while len(distinct) < TARGET_DISTINCT and attempts < 10000:
        attempts += 1
        tokens = gen_sentence(rng)
        if has_ami_bhat(tokens) or conflicts(tokens, seen):
            continue
        if tokens in distinct:
            continue
        record(tokens, seen)
        distinct.append(tokens)

    lines = []
    for tokens in distinct:
        for _ in range(rng.choice(REPEATS)):
            lines.append(add_noise(" ".join(tokens), rng))
    rng.shuffle(lines)
    # a couple of multi-sentence lines to exercise the splitter
    merged = []
    i = 0
    while i < len(lines):
        if rng.random() < 0.15 and i + 1 < len(lines):
            merged.append(lines[i] + " " + lines[i + 1])
            i += 2
        else:
            merged.append(lines[i])
            i += 1

    out = Path(__file__).resolve().parents[1] / "data" / "toy_corpus.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(merged) + "\n", encoding="utf-8")

    # verify through the real pipeline
    cfg = CleaningConfig.romanized()
    doc = RawDocument("toy", out.read_text(encoding="utf-8"))
    sentences = split_sentences(tokenize(normalize(doc, cfg)), cfg.terminators)
    vocab = Counter(t for s in sentences for t in s)
    check = {}
    for sent in sentences:
        for n in (4, 5):
            for ctx, nxt in windows(sent, n):
                assert check.setdefault(ctx, nxt) == nxt, f"conflict at {ctx}"
    for sent in sentences:
        for a, b, c in zip(sent, sent[1:], sent[2:]):
            if (a, b) == ("ami", "bhat"):
                assert c == "khai", sent
    n_sent = len(sentences)
    assert 190 <= n_sent <= 260, n_sent
    assert len(vocab) <= 480, len(vocab)
    print(f"wrote {out}: {n_sent} sentences, {len(vocab)} distinct tokens, "
          f"{len(distinct)} distinct sentences")


if __name__ == "__main__":
    main()
