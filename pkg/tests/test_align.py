import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from mtaug import (
    BilingualLexicon,
    DataError,
    SentencePair,
    WordAlignment,
    as_one_to_one,
    build_lexicon,
    intersect,
    parse_alignment_line,
    read_lexicon_tsv,
    write_lexicon_tsv,
)


def test_parse_basic():
    a = parse_alignment_line("0-1 2-3 10-0")
    assert a.links == {(0, 1), (2, 3), (10, 0)}


def test_parse_reversed_orientation():
    a = parse_alignment_line("1-0 3-2", reversed=True)
    assert a.links == {(0, 1), (2, 3)}


def test_parse_empty_line_is_empty_alignment():
    assert parse_alignment_line("").links == frozenset()
    assert parse_alignment_line("   ").links == frozenset()


def test_parse_duplicates_collapse():
    assert len(parse_alignment_line("0-1 0-1")) == 1


@pytest.mark.parametrize("bad", ["0:1", "a-b", "1-", "-1", "1--2", "1-2-3", "1.0-2"])
def test_parse_malformed_items(bad):
    with pytest.raises(DataError):
        parse_alignment_line(bad)


def test_parse_error_reports_line_number():
    with pytest.raises(DataError, match="line 17"):
        parse_alignment_line("0-1 x", line_no=17)


def test_to_pharaoh_sorted():
    a = parse_alignment_line("3-0 0-2 1-1")
    assert a.to_pharaoh() == "0-2 1-1 3-0"


def test_intersect_keeps_common_links():
    s2t = parse_alignment_line("0-0 1-1 1-2 3-3")
    t2s = parse_alignment_line("0-0 1-1 2-2 3-3")
    o2o = intersect(s2t, t2s)
    assert o2o.links == {(0, 0), (1, 1), (3, 3)}


def test_intersect_empty_when_disjoint():
    assert len(intersect(parse_alignment_line("0-0"), parse_alignment_line("1-1"))) == 0


def test_intersect_conflict_dropped_and_counted():
    # both links share target 0, which well-formed directional input never does
    degenerate = WordAlignment(frozenset({(0, 0), (1, 0)}))
    warnings = Counter()
    o2o = intersect(degenerate, degenerate, warnings)
    assert o2o.links == {(0, 0)}
    assert warnings["intersect_conflicts"] == 1


@given(
    st.sets(st.tuples(st.integers(0, 8), st.integers(0, 8)), max_size=20),
    st.sets(st.tuples(st.integers(0, 8), st.integers(0, 8)), max_size=20),
)
def test_intersect_subset_and_one_to_one(links_a, links_b):
    o2o = intersect(WordAlignment(frozenset(links_a)), WordAlignment(frozenset(links_b)))
    assert o2o.links <= (links_a & links_b)
    srcs = [i for i, _ in o2o.links]
    tgts = [j for _, j in o2o.links]
    assert len(srcs) == len(set(srcs))
    assert len(tgts) == len(set(tgts))


def test_as_one_to_one_accepts_valid():
    a = parse_alignment_line("0-1 1-0 2-2")
    assert as_one_to_one(a).links == a.links


def test_as_one_to_one_rejects_repeats():
    with pytest.raises(DataError, match="not one-to-one"):
        as_one_to_one(parse_alignment_line("0-0 0-1"))
    with pytest.raises(DataError, match="not one-to-one"):
        as_one_to_one(parse_alignment_line("0-0 1-0"))


def _pairs(rows):
    out = []
    for src, tgt, links in rows:
        pair = SentencePair.from_lines(src, tgt)
        out.append((pair, as_one_to_one(parse_alignment_line(links))))
    return out


def test_build_lexicon_most_frequent_wins():
    rows = [
        ("hund katze", "dog cat", "0-0 1-1"),
        ("hund katze", "dog cat", "0-0 1-1"),
        ("hund", "hound", "0-0"),
    ]
    lex = build_lexicon(_pairs(rows))
    assert lex["hund"] == "dog"
    assert lex["katze"] == "cat"
    assert lex.counts[("hund", "dog")] == 2
    assert lex.counts[("hund", "hound")] == 1


def test_build_lexicon_tie_breaks_lexicographically():
    rows = [
        ("haus", "zebra", "0-0"),
        ("haus", "abode", "0-0"),
    ]
    lex = build_lexicon(_pairs(rows))
    assert lex["haus"] == "abode"


def test_build_lexicon_order_independent():
    rows = [
        ("a", "x", "0-0"),
        ("a", "y", "0-0"),
        ("a", "y", "0-0"),
        ("b", "z", "0-0"),
    ] * 3
    base = build_lexicon(_pairs(rows))
    shuffled = rows[:]
    random.Random(11).shuffle(shuffled)
    assert build_lexicon(_pairs(shuffled)) == base


def test_build_lexicon_out_of_range_link():
    pair = SentencePair.from_lines("ein wort", "one word")
    bad = as_one_to_one(parse_alignment_line("0-0 5-1"))
    with pytest.raises(DataError, match="out of range"):
        build_lexicon([(pair, bad)])


def test_source_words_sorted():
    lex = build_lexicon(_pairs([("b a c", "y x z", "0-0 1-1 2-2")]))
    assert lex.source_words == ("a", "b", "c")


def test_lexicon_tsv_round_trip(tmp_path):
    lex = build_lexicon(_pairs([
        ("hund katze maus", "dog cat mouse", "0-0 1-1 2-2"),
        ("hund", "dog", "0-0"),
    ]))
    path = tmp_path / "lex.tsv"
    with open(path, "w", encoding="utf-8") as f:
        write_lexicon_tsv(lex, f)
    with open(path, encoding="utf-8") as f:
        loaded = read_lexicon_tsv(f)
    assert loaded == lex
    assert loaded.counts[("hund", "dog")] == 2


@pytest.mark.parametrize("row", ["onlyone", "a\tb", "a\tb\tc\td", "a\tb\tnotanumber", "\tb\t1"])
def test_lexicon_tsv_malformed(row):
    with pytest.raises(DataError, match="lexicon line 1"):
        read_lexicon_tsv([row])


def test_lexicon_tsv_skips_blank_lines():
    lex = read_lexicon_tsv(["a\tx\t3", "", "b\ty\t1"])
    assert len(lex) == 2
