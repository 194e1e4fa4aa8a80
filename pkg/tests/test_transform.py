import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from mtaug import (
    ConfigError,
    DataError,
    SentencePair,
    TaskContext,
    TaskSpec,
    apply_task,
    as_one_to_one,
    build_lexicon,
    copy_source,
    make_task,
    monotone_reorder,
    parse_alignment_line,
    replace_aligned,
    reverse,
    swap,
    token_mask,
)
from conftest import PYRAMID_MONO, PYRAMID_REVERSE


def _rng(n=0):
    return random.Random(n)


def test_reverse_golden(pyramid_pair):
    out = reverse(pyramid_pair)
    assert " ".join(out.tgt) == PYRAMID_REVERSE
    assert out.src == pyramid_pair.src


def test_copy_source_golden(pyramid_pair):
    out = copy_source(pyramid_pair)
    assert out.tgt == pyramid_pair.src


def test_mono_golden(pyramid_pair, pyramid_align):
    out = monotone_reorder(pyramid_pair, pyramid_align)
    assert " ".join(out.tgt) == PYRAMID_MONO


def test_mono_unaligned_follow_left_neighbour():
    # keys become [3, 3, 0]: "c" sorts first, "a b" keep their order after it
    pair = SentencePair.from_lines("s0 s1 s2 s3", "a b c")
    align = parse_alignment_line("3-0 0-2")
    out = monotone_reorder(pair, align)
    assert out.tgt == ("c", "a", "b")


def test_mono_leading_unaligned_stay_first():
    pair = SentencePair.from_lines("s0 s1", "a b c")
    align = parse_alignment_line("0-1 1-2")
    out = monotone_reorder(pair, align)
    assert out.tgt == ("a", "b", "c")


def test_mono_stable_for_equal_keys():
    pair = SentencePair.from_lines("s0", "a b c d")
    align = parse_alignment_line("0-0")
    assert monotone_reorder(pair, align).tgt == ("a", "b", "c", "d")


def test_mono_multi_link_uses_smallest_and_warns():
    pair = SentencePair.from_lines("s0 s1 s2", "a b")
    align = parse_alignment_line("2-0 0-0 1-1")
    warnings = Counter()
    out = monotone_reorder(pair, align, warnings)
    assert out.tgt == ("a", "b")
    assert warnings["mono_multi_link"] == 1


def test_mono_out_of_range():
    pair = SentencePair.from_lines("s0", "a b")
    with pytest.raises(DataError, match="out of range"):
        monotone_reorder(pair, parse_alignment_line("0-5"))


def test_token_mask_exact_count(pyramid_pair):
    out = token_mask(pyramid_pair, 0.5, "UNK", _rng())
    assert sum(t == "UNK" for t in out.tgt) == 4
    assert len(out.tgt) == 9


def test_token_mask_alpha_bounds(pyramid_pair):
    assert token_mask(pyramid_pair, 0.0, "UNK", _rng()).tgt == pyramid_pair.tgt
    assert all(t == "UNK" for t in token_mask(pyramid_pair, 1.0, "UNK", _rng()).tgt)


def test_token_mask_decimal_alpha_floors_exactly():
    # 0.7 * 10 must mask 7, not fall to 6 through float representation
    pair = SentencePair(("s",) * 10, tuple(f"t{i}" for i in range(10)))
    out = token_mask(pair, 0.7, "UNK", _rng())
    assert sum(t == "UNK" for t in out.tgt) == 7


@given(st.integers(1, 30), st.floats(0.0, 1.0), st.integers(0, 1000))
def test_token_mask_count_property(t, alpha, seed):
    pair = SentencePair(("s",), tuple(f"t{i}" for i in range(t)))
    out = token_mask(pair, alpha, "UNK", _rng(seed))
    expected = int(alpha * t + 1e-9)
    assert sum(tok == "UNK" for tok in out.tgt) == expected
    kept = [tok for tok in out.tgt if tok != "UNK"]
    assert len(set(kept)) == len(kept) == t - expected


def test_swap_exact_in_place_count(pyramid_pair):
    # 9 distinct tokens, alpha 0.5: two swaps displace 4, leaving 5 in place
    out = swap(pyramid_pair, 0.5, _rng())
    in_place = sum(a == b for a, b in zip(out.tgt, pyramid_pair.tgt))
    assert in_place == 5
    assert sorted(out.tgt) == sorted(pyramid_pair.tgt)


def test_swap_alpha_zero_identity(pyramid_pair):
    assert swap(pyramid_pair, 0.0, _rng()).tgt == pyramid_pair.tgt


def test_swap_two_tokens_full():
    pair = SentencePair(("s",), ("a", "b"))
    assert swap(pair, 1.0, _rng()).tgt == ("b", "a")


def test_swap_all_equal_tokens_terminates():
    pair = SentencePair(("s",), ("a",) * 8)
    out = swap(pair, 1.0, _rng())
    assert out.tgt == pair.tgt


@given(st.integers(2, 24), st.floats(0.0, 1.0), st.integers(0, 500))
@settings(max_examples=60)
def test_swap_properties(t, alpha, seed):
    pair = SentencePair(("s",), tuple(f"t{i}" for i in range(t)))
    out = swap(pair, alpha, _rng(seed))
    expected_moved = 2 * (int(alpha * t + 1e-9) // 2)
    moved = sum(a != b for a, b in zip(out.tgt, pair.tgt))
    assert moved == expected_moved
    assert sorted(out.tgt) == sorted(pair.tgt)


def _replace_fixture():
    pair = SentencePair(
        tuple(f"s{i}" for i in range(8)),
        tuple(f"t{i}" for i in range(8)),
    )
    o2o = as_one_to_one(parse_alignment_line(" ".join(f"{i}-{i}" for i in range(8))))
    rows = [(SentencePair(("neu",), ("new",)), as_one_to_one(parse_alignment_line("0-0"))),
            (SentencePair(("alt",), ("old",)), as_one_to_one(parse_alignment_line("0-0")))]
    return pair, o2o, build_lexicon(rows)


def test_replace_changes_linked_positions_consistently():
    pair, o2o, lex = _replace_fixture()
    out = replace_aligned(pair, 0.5, o2o, lex, _rng(4))
    changed = [i for i, (a, b) in enumerate(zip(out.tgt, pair.tgt)) if a != b]
    assert len(changed) == 4
    for j in changed:
        assert out.tgt[j] == lex[out.src[j]]
    assert sum(a != b for a, b in zip(out.src, pair.src)) == 4


def test_replace_capped_by_alignment_size():
    pair, _, lex = _replace_fixture()
    small = as_one_to_one(parse_alignment_line("0-0 1-1"))
    out = replace_aligned(pair, 1.0, small, lex, _rng())
    assert sum(a != b for a, b in zip(out.tgt, pair.tgt)) == 2


def test_replace_alpha_zero_identity():
    pair, o2o, lex = _replace_fixture()
    out = replace_aligned(pair, 0.0, o2o, lex, _rng())
    assert out == pair


def test_replace_empty_lexicon_rejected():
    pair, o2o, _ = _replace_fixture()
    empty = build_lexicon([])
    with pytest.raises(ConfigError, match="lexicon"):
        replace_aligned(pair, 0.5, o2o, empty, _rng())


def test_replace_out_of_range_link():
    pair, _, lex = _replace_fixture()
    bad = as_one_to_one(parse_alignment_line("0-20"))
    with pytest.raises(DataError, match="out of range"):
        replace_aligned(pair, 1.0, bad, lex, _rng())


def test_task_spec_validation():
    with pytest.raises(ConfigError, match="unknown task kind"):
        TaskSpec(kind="shuffle")
    with pytest.raises(ConfigError, match="requires an alpha"):
        TaskSpec(kind="swap")
    with pytest.raises(ConfigError, match="does not take"):
        TaskSpec(kind="reverse", alpha=0.5)
    with pytest.raises(ConfigError, match="must be in"):
        TaskSpec(kind="token", alpha=1.5)
    with pytest.raises(ConfigError, match="mask symbol"):
        TaskSpec(kind="token", alpha=0.5, unk="TWO WORDS")
    with pytest.raises(ConfigError, match="tag"):
        TaskSpec(kind="main", tag="bad tag")


def test_make_task_renders_tag():
    task = make_task("reverse")
    assert task.tag == "<task:reverse>"
    assert make_task("reverse", tag_format=None).tag is None


def test_apply_task_prepends_tag(pyramid_pair):
    out = apply_task(make_task("reverse"), pyramid_pair, TaskContext())
    assert out.src[0] == "<task:reverse>"
    assert out.src[1:] == pyramid_pair.src
    assert " ".join(out.tgt) == PYRAMID_REVERSE


def test_apply_task_main_untagged_identity(pyramid_pair):
    out = apply_task(make_task("main", tag_format=None), pyramid_pair, TaskContext())
    assert out == pyramid_pair


def test_apply_task_missing_resources(pyramid_pair):
    with pytest.raises(ConfigError, match="alignment"):
        apply_task(make_task("mono"), pyramid_pair, TaskContext())
    with pytest.raises(ConfigError, match="rng"):
        apply_task(make_task("token", alpha=0.5), pyramid_pair, TaskContext())
    with pytest.raises(ConfigError, match="lexicon"):
        apply_task(make_task("replace", alpha=0.5), pyramid_pair,
                   TaskContext(o2o=as_one_to_one(parse_alignment_line("0-0")), rng=_rng()))
