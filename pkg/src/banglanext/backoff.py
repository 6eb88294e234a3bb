"""Katz back-off language model with Good-Turing discounting.

Probability of word w after context c (length m, counts written c(.)):

    P(w | c) = d(c(c.w)) / c(c)              if c(c.w) > 0
             = alpha(c) * P(w | c[1:])       otherwise

    alpha(c) = (1 - sum_seen d(c(c.w)) / c(c))
             / (1 - sum_seen P(w | c[1:]))

where d(r) is the Good-Turing discounted count (r+1) * N_{r+1} / N_r for
r <= k_gt and d(r) = r above the threshold. An unobserved context backs off
with alpha = 1. The order-0 base case is the add-one-smoothed unigram
distribution over the whole vocabulary, so the recursion always terminates
with a distribution that sums to one.

On sparse corpora the count-of-count tables have gaps (N_{r+1} = 0) or give
estimates outside (0, r]; those r fall back to an absolute discount r - 0.5
so some probability mass always reaches unseen continuations.

One further desk-scale corner: alpha is undefined when the back-off
distribution itself carries zero mass on the unseen continuations (a lower
level whose counts all sat above k_gt kept everything). The leftover mass is
then interpolated along the back-off distribution over all words, which
preserves the unit total exactly.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatVersionError, OrderOutOfRange, UnseenContext

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
_HEADER = "banglanext-backoff"

DEFAULT_K_GT = 5
DEFAULT_FALLBACK_DISCOUNT = 0.5


@dataclass
class CountTable:
    """Exact tuple counts for every order 1..max_order+1, within sentences."""

    max_order: int
    orders: dict[int, dict[tuple[int, ...], int]]
    total_unigrams: int


def count_ngrams(sentences: list[list[int]], max_order: int) -> CountTable:
    """Count all id tuples of length 1..max_order+1, windows within sentences."""
    if not 1 <= max_order <= 5:
        raise OrderOutOfRange(f"max_order {max_order} not in [1, 5]")
    orders: dict[int, dict[tuple[int, ...], int]] = {}
    for k in range(1, max_order + 2):
        counts: Counter = Counter()
        for sent in sentences:
            for i in range(len(sent) - k + 1):
                counts[tuple(sent[i : i + k])] += 1
        orders[k] = dict(counts)
    total = sum(orders[1].values())
    return CountTable(max_order=max_order, orders=orders, total_unigrams=total)


def _good_turing_discounts(
    counts: dict[tuple[int, ...], int], k_gt: int, fallback: float
) -> tuple[dict[int, float], list[int]]:
    """Map observed count r -> discounted count d(r), for r <= k_gt.

    Returns the discount table plus the list of r whose Good-Turing estimate
    was unusable (count-of-count gap or estimate outside (0, r]) and fell
    back to the absolute discount r - fallback.
    """
    freq_of_freq = Counter(counts.values())
    discounts: dict[int, float] = {}
    fell_back: list[int] = []
    for r in sorted(freq_of_freq):
        if r > k_gt:
            continue
        n_r1 = freq_of_freq.get(r + 1, 0)
        d = (r + 1) * n_r1 / freq_of_freq[r] if n_r1 else 0.0
        if not 0.0 < d <= r:
            d = max(r - fallback, fallback)
            fell_back.append(r)
        discounts[r] = d
    return discounts, fell_back


class BackoffModel:
    """Immutable after construction; queries are read-only and concurrent-safe.

    Back-off weights are memoized per context on first use; the memo only
    ever stores the one deterministic value per key, so racing writers are
    harmless.
    """

    def __init__(
        self,
        counts: CountTable,
        vocab_size: int,
        k_gt: int = DEFAULT_K_GT,
        fallback_discount: float = DEFAULT_FALLBACK_DISCOUNT,
    ):
        self.counts = counts
        self.max_order = counts.max_order
        self.vocab_size = vocab_size
        self.k_gt = k_gt
        self.fallback_discount = fallback_discount
        self.discounts: dict[int, dict[int, float]] = {}
        fallbacks: dict[int, list[int]] = {}
        for k in range(2, self.max_order + 2):
            self.discounts[k], fell_back = _good_turing_discounts(
                counts.orders[k], k_gt, fallback_discount
            )
            if fell_back:
                fallbacks[k] = fell_back
        if fallbacks:
            log.warning(
                "Good-Turing estimates unusable (sparse count-of-counts); "
                "absolute discount %.2f applied for {tuple length: counts} %s",
                fallback_discount,
                fallbacks,
            )
        # continuations[k][prefix] = [(word, count), ...] for (k)-order prefixes
        self.continuations: dict[int, dict[tuple[int, ...], list[tuple[int, int]]]] = {}
        for k in range(1, self.max_order + 1):
            index: dict[tuple[int, ...], list[tuple[int, int]]] = {}
            for tup, cnt in counts.orders[k + 1].items():
                index.setdefault(tup[:-1], []).append((tup[-1], cnt))
            for ext in index.values():
                ext.sort()
            self.continuations[k] = index
        self._blend_cache: dict[tuple[int, ...], tuple[bool, float]] = {}
        uni = np.zeros(vocab_size, dtype=np.float64)
        for (w,), c in counts.orders[1].items():
            uni[w] = c
        self._base_dist = (uni + 1.0) / (counts.total_unigrams + vocab_size)

    @classmethod
    def fit(
        cls,
        sentences: list[list[int]],
        vocab_size: int,
        max_order: int = 5,
        k_gt: int = DEFAULT_K_GT,
        fallback_discount: float = DEFAULT_FALLBACK_DISCOUNT,
    ) -> "BackoffModel":
        return cls(count_ngrams(sentences, max_order), vocab_size, k_gt, fallback_discount)

    # -- probabilities ----------------------------------------------------

    def _discounted(self, order: int, r: int) -> float:
        return self.discounts[order].get(r, float(r))

    def mle_prob(self, context: tuple[int, ...], word: int) -> float:
        """Unsmoothed relative frequency; raises on an unseen context."""
        context = tuple(context)
        if len(context) > self.max_order:
            raise OrderOutOfRange(f"context length {len(context)} > {self.max_order}")
        if not context:
            if self.counts.total_unigrams == 0:
                raise UnseenContext("empty corpus")
            return self.counts.orders[1].get((word,), 0) / self.counts.total_unigrams
        denom = self.counts.orders[len(context)].get(context, 0)
        if denom == 0:
            raise UnseenContext(f"context {context} never observed")
        num = self.counts.orders[len(context) + 1].get(context + (word,), 0)
        return num / denom

    def _blend(self, context: tuple[int, ...]) -> tuple[bool, float]:
        """How an observed context passes its leftover mass down (cached).

        Normally (interpolate=False) the weight is the back-off alpha applied
        to unseen continuations only. When the back-off distribution has no
        mass left on unseen words (its own level kept everything, or every
        word is a seen continuation), alpha is undefined; the leftover is
        then spread along the back-off distribution over all words
        (interpolate=True), which keeps the total at exactly one.
        """
        cached = self._blend_cache.get(context)
        if cached is not None:
            return cached
        m = len(context)
        ctx_count = self.counts.orders[m][context]
        seen = self.continuations[m].get(context, [])
        kept = sum(self._discounted(m + 1, c) for _, c in seen) / ctx_count
        leftover = max(1.0 - kept, 0.0)
        bo_seen = sum(self.katz_prob(context[1:], w) for w, _ in seen)
        unseen_bo = 1.0 - bo_seen
        if unseen_bo > 1e-12:
            result = (False, leftover / unseen_bo)
        else:
            result = (True, leftover)
        self._blend_cache[context] = result
        return result

    def katz_prob(self, context: tuple[int, ...], word: int) -> float:
        """Smoothed P(word | context); total over the vocabulary is 1."""
        context = tuple(context)
        if len(context) > self.max_order:
            raise OrderOutOfRange(f"context length {len(context)} > {self.max_order}")
        if not context:
            return float(self._base_dist[word])
        m = len(context)
        ctx_count = self.counts.orders[m].get(context, 0)
        if ctx_count == 0:
            return self.katz_prob(context[1:], word)
        c = self.counts.orders[m + 1].get(context + (word,), 0)
        interpolate, weight = self._blend(context)
        if interpolate:
            return self._discounted(m + 1, c) / ctx_count + weight * self.katz_prob(
                context[1:], word
            )
        if c > 0:
            return self._discounted(m + 1, c) / ctx_count
        return weight * self.katz_prob(context[1:], word)

    def full_distribution(self, context: tuple[int, ...]) -> np.ndarray:
        """P(. | context) over the whole vocabulary as one vector."""
        context = tuple(context)
        if not context:
            return self._base_dist.copy()
        m = len(context)
        ctx_count = self.counts.orders[m].get(context, 0)
        lower = self.full_distribution(context[1:])
        if ctx_count == 0:
            return lower
        seen = self.continuations[m].get(context, [])
        interpolate, weight = self._blend(context)
        dist = weight * lower
        if interpolate:
            for w, c in seen:
                dist[w] += self._discounted(m + 1, c) / ctx_count
        else:
            for w, c in seen:
                dist[w] = self._discounted(m + 1, c) / ctx_count
        return dist

    def predict_next(self, context: tuple[int, ...]) -> tuple[int, float]:
        """Argmax of the smoothed distribution; ties go to the lowest id."""
        context = tuple(context)[-self.max_order :]
        dist = self.full_distribution(context)
        best = int(np.argmax(dist))  # first maximum = lowest id
        return best, float(dist[best])

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{_HEADER} v{MODEL_FORMAT_VERSION}\n")
            fh.write(
                f"max_order={self.max_order} vocab_size={self.vocab_size} "
                f"k_gt={self.k_gt} fallback_discount={self.fallback_discount!r}\n"
            )
            for k in range(1, self.max_order + 2):
                table = self.counts.orders[k]
                fh.write(f"order {k} entries {len(table)}\n")
                for tup in sorted(table):
                    fh.write(" ".join(str(i) for i in tup) + f" {table[tup]}\n")

    @classmethod
    def load(cls, path) -> "BackoffModel":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != f"{_HEADER} v{MODEL_FORMAT_VERSION}":
                raise FormatVersionError(f"backoff model {path}: bad header {header!r}")
            meta = dict(kv.split("=") for kv in fh.readline().split())
            max_order = int(meta["max_order"])
            orders: dict[int, dict[tuple[int, ...], int]] = {}
            current: dict[tuple[int, ...], int] | None = None
            remaining = 0
            for line in fh:
                parts = line.split()
                if remaining == 0:
                    if parts[0] != "order":
                        raise FormatVersionError(f"backoff model {path}: corrupt section")
                    current = {}
                    orders[int(parts[1])] = current
                    remaining = int(parts[3])
                    continue
                current[tuple(int(p) for p in parts[:-1])] = int(parts[-1])
                remaining -= 1
        total = sum(orders.get(1, {}).values())
        counts = CountTable(max_order=max_order, orders=orders, total_unigrams=total)
        return cls(
            counts,
            vocab_size=int(meta["vocab_size"]),
            k_gt=int(meta["k_gt"]),
            fallback_discount=float(meta["fallback_discount"]),
        )


def predict_next_statistical(model: BackoffModel, context: tuple[int, ...]) -> tuple[int, float]:
    """Module-level alias for the argmax query."""
    return model.predict_next(context)
