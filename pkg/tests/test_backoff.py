from collections import Counter

import numpy as np
import pytest

from banglanext.backoff import BackoffModel, count_ngrams
from banglanext.errors import FormatVersionError, OrderOutOfRange, UnseenContext

# ids for the two-sentence toy corpus "ami bhat khai ।" / "ami pani khai ।"
AMI, KHAI, DANDA, BHAT, PANI, UNK = range(6)
TOY = [[AMI, BHAT, KHAI, DANDA], [AMI, PANI, KHAI, DANDA]]


def oracle_distribution(sentences, vocab_size, context, k_gt=5, fallback=0.5):
    """Brute-force Katz distribution by direct summation, sharing no code
    with the implementation: literal window counting, literal formulas."""

    def count(tup):
        total = 0
        for s in sentences:
            for i in range(len(s) - len(tup) + 1):
                if tuple(s[i : i + len(tup)]) == tup:
                    total += 1
        return total

    def discount(k, r):
        if r > k_gt:
            return float(r)
        freq = Counter()
        for s in sentences:
            for i in range(len(s) - k + 1):
                freq[tuple(s[i : i + k])] += 1
        n_of = Counter(freq.values())
        d = (r + 1) * n_of.get(r + 1, 0) / n_of[r] if n_of.get(r + 1, 0) else 0.0
        if not 0.0 < d <= r:
            d = max(r - fallback, fallback)
        return d

    def dist(ctx):
        if not ctx:
            n_tokens = sum(len(s) for s in sentences)
            return np.array(
                [(count((w,)) + 1.0) / (n_tokens + vocab_size) for w in range(vocab_size)]
            )
        lower = dist(ctx[1:])
        c_ctx = count(ctx)
        if c_ctx == 0:
            return lower
        k = len(ctx) + 1
        seen = {w: count(ctx + (w,)) for w in range(vocab_size) if count(ctx + (w,)) > 0}
        kept = sum(discount(k, c) / c_ctx for c in seen.values())
        leftover = max(1.0 - kept, 0.0)
        bo_seen = sum(lower[w] for w in sorted(seen))
        if 1.0 - bo_seen <= 1e-12:  # no back-off mass on unseen words
            out = leftover * lower
            for w, c in seen.items():
                out[w] += discount(k, c) / c_ctx
            return out
        alpha = leftover / (1.0 - bo_seen)
        out = alpha * lower
        for w, c in seen.items():
            out[w] = discount(k, c) / c_ctx
        return out

    return dist(tuple(context))


class TestCounts:
    def test_hand_counts(self):
        ct = count_ngrams([[0, 1, 0, 1]], max_order=1)
        assert ct.orders[1] == {(0,): 2, (1,): 2}
        assert ct.orders[2] == {(0, 1): 2, (1, 0): 1}
        assert ct.total_unigrams == 4

    def test_empty(self):
        ct = count_ngrams([], max_order=2)
        assert all(not ct.orders[k] for k in ct.orders)

    def test_trigram(self):
        ct = count_ngrams([[0, 0, 0]], max_order=2)
        assert ct.orders[3] == {(0, 0, 0): 1}

    def test_order_out_of_range(self):
        with pytest.raises(OrderOutOfRange):
            count_ngrams([[0]], max_order=6)

    def test_marginal_consistency(self):
        rng = np.random.default_rng(2)
        sentences = [rng.integers(0, 6, size=rng.integers(1, 9)).tolist() for _ in range(40)]
        ct = count_ngrams(sentences, max_order=4)
        for k in range(1, 5):
            extension_sums = Counter()
            for tup, c in ct.orders[k + 1].items():
                extension_sums[tup[:-1]] += c
            for prefix, total in extension_sums.items():
                assert ct.orders[k][prefix] >= total


@pytest.fixture(scope="module")
def model():
    return BackoffModel.fit(TOY, vocab_size=6, max_order=3)


class TestMle:
    def test_half(self, model):
        assert model.mle_prob((AMI,), BHAT) == 0.5

    def test_one(self, model):
        assert model.mle_prob((AMI, BHAT), KHAI) == 1.0

    def test_unseen_context(self, model):
        with pytest.raises(UnseenContext):
            model.mle_prob((UNK,), AMI)


class TestKatz:
    def test_normalization_observed_and_unseen(self, model):
        contexts = [ctx for k in range(1, 4) for ctx in model.counts.orders[k]]
        rng = np.random.default_rng(0)
        contexts += [
            tuple(rng.integers(0, 6, size=rng.integers(1, 4)).tolist()) for _ in range(100)
        ]
        for ctx in contexts:
            total = sum(model.katz_prob(ctx, w) for w in range(6))
            assert abs(total - 1.0) < 1e-6
            assert abs(model.full_distribution(ctx).sum() - 1.0) < 1e-6

    def test_unseen_word_gets_backoff_mass(self):
        # corpus "a b ।" / "a c ।": alpha(a) by hand. With N_2 = 0 at the
        # bigram level the discount falls back to 0.5, so the seen mass is
        # (0.5 + 0.5)/2 = 0.5 and the unigram base gives each seen word
        # 2/11: alpha = 0.5 / (1 - 4/11) = 11/14, and the unseen word d has
        # base mass 1/11, hence P = 11/14 * 1/11 = 1/14.
        a, b, c, danda, d = range(5)
        m = BackoffModel.fit([[a, b, danda], [a, c, danda]], vocab_size=5, max_order=1)
        assert m.katz_prob((a,), d) == pytest.approx(1.0 / 14.0)
        assert m.katz_prob((a,), d) > 0

    def test_no_discount_above_threshold(self):
        # every continuation of (x,) counted above k_gt: katz == mle there
        x, y, z = 0, 1, 2
        sentences = [[x, y]] * 10 + [[x, z]] * 8
        m = BackoffModel.fit(sentences, vocab_size=4, max_order=1)
        for w in (y, z):
            assert m.katz_prob((x,), w) == pytest.approx(m.mle_prob((x,), w))

    def test_zero_mass_backoff_interpolates(self):
        # (b,) is undiscounted (count > k_gt) so its distribution puts zero
        # mass outside {c}; the leftover of (a, b) must then flow along the
        # back-off distribution instead of being dropped.
        a, b, c, x = 0, 1, 2, 3
        sentences = [[a, b, c]] * 3 + [[x, b, c]] * 9
        m = BackoffModel.fit(sentences, vocab_size=5, max_order=2)
        assert m.katz_prob((b,), c) == 1.0  # degenerate lower level
        for ctx in [(a, b), (b,), (x, b), (a,), (c,)]:
            assert abs(sum(m.katz_prob(ctx, w) for w in range(5)) - 1.0) < 1e-12
            assert abs(m.full_distribution(ctx).sum() - 1.0) < 1e-12
        np.testing.assert_allclose(
            m.full_distribution((a, b)), oracle_distribution(sentences, 5, (a, b)), rtol=1e-12
        )

    def test_backoff_ratio_constant_for_unseen_context(self, model):
        unseen = (UNK, UNK)
        ratios = {
            model.katz_prob(unseen, w) / model.katz_prob(unseen[1:], w) for w in range(6)
        }
        assert len(ratios) == 1  # same alpha for every word

    def test_discount_monotonicity(self, model):
        for order, table in model.discounts.items():
            for r, d in table.items():
                assert 0.0 < d <= r, (order, r, d)

    def test_matches_brute_force_distribution(self):
        rng = np.random.default_rng(42)
        sentences = []
        total = 0
        while total < 45:  # corpus of <= 50 tokens
            length = int(rng.integers(2, 6))
            sentences.append(rng.integers(0, 5, size=length).tolist())
            total += length
        model = BackoffModel.fit(sentences, vocab_size=6, max_order=3)
        for _ in range(50):
            ctx = tuple(rng.integers(0, 6, size=rng.integers(0, 4)).tolist())
            expected = oracle_distribution(sentences, 6, ctx)
            actual = model.full_distribution(ctx)
            np.testing.assert_allclose(actual, expected, rtol=1e-12, atol=1e-15)


class TestPredict:
    def test_continuation_argmax(self):
        model = BackoffModel.fit(TOY, vocab_size=6, max_order=3)
        word, prob = model.predict_next((AMI, BHAT))
        assert word == KHAI
        word, _ = model.predict_next((KHAI,))
        assert word == DANDA  # both sentences continue khai with the danda

    def test_tie_breaks_to_lower_id(self):
        # b and c follow a equally often, counts above k_gt so no discount:
        # both end at probability 1/2 and the argmax must pick min(b, c)
        a, b, c = 0, 1, 2
        model = BackoffModel.fit([[a, b]] * 6 + [[a, c]] * 6, vocab_size=4, max_order=1)
        dist = model.full_distribution((a,))
        assert dist[b] == dist[c] == 0.5
        word, _ = model.predict_next((a,))
        assert word == b

    def test_long_context_trimmed(self):
        model = BackoffModel.fit(TOY, vocab_size=6, max_order=3)
        long_ctx = (PANI, UNK, AMI, AMI, BHAT)
        assert model.predict_next(long_ctx) == model.predict_next(long_ctx[-3:])


class TestPersistence:
    def test_round_trip(self, tmp_path):
        model = BackoffModel.fit(TOY, vocab_size=6, max_order=3)
        path = tmp_path / "m.txt"
        model.save(path)
        loaded = BackoffModel.load(path)
        rng = np.random.default_rng(1)
        for _ in range(30):
            ctx = tuple(rng.integers(0, 6, size=rng.integers(0, 4)).tolist())
            np.testing.assert_array_equal(
                loaded.full_distribution(ctx), model.full_distribution(ctx)
            )
        path2 = tmp_path / "m2.txt"
        loaded.save(path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_version_check(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("banglanext-backoff v9\nmax_order=1 vocab_size=2 k_gt=5 fallback_discount=0.5\n")
        with pytest.raises(FormatVersionError):
            BackoffModel.load(path)
