import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plstream.lm import (
    BOS, EOS, UNK, ArpaFormatError, NGramLM, format_arpa, parse_arpa, read_arpa, write_arpa,
)

TOY = ["the cat sat", "the cat ran", "a dog sat on the mat", "the dog ran"]


def _contexts(lm):
    """Every observed context of length 0..order-1, including the BOS-padded ones."""
    out = {()}
    for n in range(1, lm.max_order):
        out.update(lm.entries_[n])
    return sorted(out)


def test_hand_count_unigram():
    lm = NGramLM(order=1).fit(["a a a"])
    counts = lm.counts_[1]
    assert counts[("a",)] / sum(counts.values()) == 0.75
    # Witten-Bell interpolates the 3/4 estimate with a uniform floor over {a, </s>, <unk>}.
    types, size = 2, 3
    assert math.isclose(10 ** lm.logprob([], "a"), (3 + types / size) / (4 + types))


def test_add_k_closed_form():
    lm = NGramLM(order=1, smoothing="add-k", k=0.5).fit(["a a a"])
    assert math.isclose(10 ** lm.logprob([], "a"), 3.5 / (4 + 0.5 * 3))


def test_trigram_coverage_single_sentence():
    lm = NGramLM(order=3).fit(["x y z w"])
    padded = [BOS, "x", "y", "z", "w", EOS]
    for i in range(len(padded) - 2):
        assert lm.contains(padded[i:i + 3])


def test_seen_word_is_table_lookup():
    lm = NGramLM().fit(TOY)
    assert lm.logprob(["the", "cat"], "sat") == lm.ngram_logprob(("the", "cat", "sat"))


def test_manual_backoff_trace():
    lm = NGramLM().fit(TOY[:3])
    # Neither "cat sat mat" nor "sat mat" occurs: two backoff hops down to the unigram.
    assert not lm.contains(("cat", "sat", "mat")) and not lm.contains(("sat", "mat"))
    expected = (lm.entries_[2][("cat", "sat")][1] + lm.entries_[1][("sat",)][1]
                + lm.ngram_logprob(("mat",)))
    assert math.isclose(lm.logprob(["cat", "sat"], "mat"), expected)
    # "sat on" is a stored bigram, so only one hop.
    assert math.isclose(lm.logprob(["cat", "sat"], "on"),
                        lm.entries_[2][("cat", "sat")][1] + lm.ngram_logprob(("sat", "on")))


def test_unseen_context_is_unigram_plus_backoffs():
    lm = NGramLM().fit(TOY)
    assert math.isclose(lm.logprob(["zebra", "quokka"], "cat"),
                        lm.entries_[1][(UNK,)][1] + lm.ngram_logprob(("cat",)))


def test_oov_maps_to_unk():
    lm = NGramLM().fit(TOY)
    assert lm.logprob(["the"], "platypus") == lm.logprob(["the"], UNK)


def test_context_truncated_to_order():
    lm = NGramLM(order=2).fit(TOY)
    assert lm.logprob(["a", "dog", "the"], "cat") == lm.logprob(["the"], "cat")


@pytest.mark.parametrize("smoothing", ["witten-bell", "add-k"])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_every_context_sums_to_one(smoothing, order):
    lm = NGramLM(order=order, smoothing=smoothing).fit(TOY)
    for ctx in _contexts(lm):
        total = math.fsum(10 ** lm.logprob(list(ctx), w) for w in lm.predictable_words)
        assert abs(total - 1) <= 1e-6, ctx


@given(st.lists(st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=8), min_size=1, max_size=12),
       st.integers(1, 3), st.integers(1, 2))
def test_sum_to_one_property(sentences, order, prune):
    lm = NGramLM(order=order, prune_min_count=prune).fit([" ".join(s) for s in sentences])
    for ctx in _contexts(lm):
        assert abs(lm.context_mass(ctx) - 1) <= 1e-6


@given(st.lists(st.lists(st.sampled_from("abcde"), min_size=1, max_size=6), min_size=1, max_size=10))
def test_prefix_and_suffix_present(sentences):
    lm = NGramLM(order=3).fit([" ".join(s) for s in sentences])
    for n in (2, 3):
        for g in lm.entries_[n]:
            assert g[:-1] in lm.entries_[n - 1] and g[1:] in lm.entries_[n - 1]


def test_uniform_lm_perplexity_is_vocab_size():
    words = ["w1", "w2", "w3", "w4"]
    lp = math.log10(1 / 6)
    entries = {1: {(w,): (lp, None) for w in words + [EOS, UNK]}}
    entries[1][(BOS,)] = (-99.0, None)
    lm = NGramLM.from_entries(entries)
    for text in ["w1", "w2 w3 w3", "zzz w4"]:
        assert math.isclose(lm.perplexity(text), 6)


def test_repeated_word_perplexity_closed_form():
    lm = NGramLM(order=1).fit(TOY)
    p_cat = 10 ** lm.logprob([], "cat")
    p_end = 10 ** lm.logprob([], EOS)
    expected = (p_cat ** 4 * p_end) ** (-1 / 5)
    assert math.isclose(lm.perplexity("cat cat cat cat"), expected)


def test_train_perplexity_below_uniform_and_heldout():
    rng = np.random.default_rng(0)
    subjects, verbs, objects = ["the cat", "a dog", "my friend"], ["sees", "likes", "eats"], ["fish", "bread", "the ball"]
    make = lambda n: [f"{rng.choice(subjects)} {rng.choice(verbs)} {rng.choice(objects)}" for _ in range(n)]
    train, heldout = make(200), make(50)
    lm = NGramLM().fit(train)
    assert lm.corpus_perplexity(train) <= len(lm.predictable_words)
    assert lm.corpus_perplexity(train) <= lm.corpus_perplexity(heldout) + 1e-9
    assert lm.score(train) == -lm.corpus_perplexity(train)


@pytest.mark.parametrize("kwargs", [{"order": 0}, {"smoothing": "kneser"}, {"smoothing": "add-k", "k": 0}])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        NGramLM(**kwargs).fit(TOY)


def test_empty_inputs():
    with pytest.raises(ValueError):
        NGramLM().fit([])
    with pytest.raises(ValueError):
        NGramLM().fit(TOY).perplexity("   ")


def test_pruning_is_monotone():
    corpus = TOY * 3 + ["a cat sat on a dog", "the mat ran"]
    sizes = [NGramLM(prune_min_count=p).fit(corpus).num_entries() for p in range(1, 6)]
    assert sizes == sorted(sizes, reverse=True)


# ----------------------------------------------------------------------- ARPA
def test_arpa_byte_fixpoint(tmp_path):
    lm = NGramLM().fit(TOY)
    write_arpa(lm, tmp_path / "a.arpa")
    write_arpa(read_arpa(tmp_path / "a.arpa"), tmp_path / "b.arpa")
    write_arpa(read_arpa(tmp_path / "b.arpa"), tmp_path / "c.arpa")
    assert (tmp_path / "b.arpa").read_bytes() == (tmp_path / "c.arpa").read_bytes()


@given(st.lists(st.lists(st.sampled_from("pqrs"), min_size=1, max_size=5), min_size=1, max_size=8),
       st.integers(1, 3))
def test_arpa_round_trip_entrywise(sentences, order):
    lm = NGramLM(order=order).fit([" ".join(s) for s in sentences])
    back = parse_arpa(format_arpa(lm))
    assert back.entries_.keys() == lm.entries_.keys()
    for n in lm.entries_:
        assert back.entries_[n].keys() == lm.entries_[n].keys()
        for g, (lp, bo) in lm.entries_[n].items():
            assert abs(back.entries_[n][g][0] - lp) <= 1e-6
            if bo is not None:
                assert abs(back.entries_[n][g][1] - bo) <= 1e-6
    text = format_arpa(lm)
    assert text.index("\\data\\") < text.index("\\1-grams:") < text.index("\\end\\")


def test_round_trip_scores_agree():
    lm = NGramLM().fit(TOY)
    back = parse_arpa(format_arpa(lm))
    for ctx in itertools.product(["the", "cat", "zzz"], repeat=2):
        for w in ["sat", "dog", EOS]:
            assert abs(back.logprob(ctx, w) - lm.logprob(ctx, w)) <= 1e-6


def _two_gram_arpa(declared_bigrams=5, present=4, end=True):
    lines = ["\\data\\", "ngram 1=4", f"ngram 2={declared_bigrams}", "", "\\1-grams:",
             "-0.5\t<s>\t-0.3", "-0.5\ta\t-0.3", "-0.5\t</s>", "-1.0\t<unk>", "", "\\2-grams:"]
    bigrams = ["-0.1\t<s> a", "-0.2\ta </s>", "-0.3\ta a", "-0.4\t<s> </s>", "-0.5\ta <unk>"]
    lines += bigrams[:present] + [""]
    if end:
        lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def test_highest_order_without_backoff_parses():
    lm = parse_arpa(_two_gram_arpa(5, 5))
    assert lm.max_order == 2 and lm.entries_[2][("a", "a")][1] is None


def test_count_mismatch_reports_lines():
    with pytest.raises(ArpaFormatError) as err:
        parse_arpa(_two_gram_arpa(5, 4))
    assert err.value.line == 11 and "declares 5" in str(err.value)


def test_missing_end_marker():
    with pytest.raises(ArpaFormatError, match="end"):
        parse_arpa(_two_gram_arpa(5, 5, end=False))


@pytest.mark.parametrize("text", ["ngram 1=1\n", "\\data\\\nngram one=1\n", "\\data\\\n\n\\end\\\n"])
def test_malformed_header(text):
    with pytest.raises(ArpaFormatError) as err:
        parse_arpa(text)
    assert err.value.line is not None
