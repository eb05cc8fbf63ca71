import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cswgec.corpus import parse_tree
from cswgec.exceptions import SelectionError
from cswgec.select import (METHODS, SelectionConfig, SelectionContext, ScriptedChoice, mix_seed,
                           select_cont_token, select_noun_token, select_overlap_phrase,
                           select_rand_phrase, select_ratio_phrase, select_ratio_token,
                           select_spans, target_count)

from conftest import ANSWERS, ANSWERS_POS, ANSWERS_TREE
from oracles import exhaustive_overlap_choice

ANS = tuple(ANSWERS.split())


def ctx3(**kw):
    return SelectionContext(ANS, tree=parse_tree(ANSWERS_TREE), pos=tuple(ANSWERS_POS.split()), **kw)


def cfg(method, **kw):
    return SelectionConfig(method, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        SelectionConfig("ratio-token", ratio=0)
    with pytest.raises(ValueError):
        SelectionConfig("ratio-token", ratio=1.5)
    with pytest.raises(ValueError):
        SelectionConfig("bogus")


def test_target_count_is_ceiling():
    assert target_count(0.2, 13) == 3
    assert target_count(0.2, 10) == 2
    assert target_count(0.2, 15) == 3  # 0.2 * 15 is not exactly 3.0 in binary
    assert target_count(1.0, 3) == 3


# --- ratio-token ------------------------------------------------------------


def test_ratio_token_width_13_tokens():
    for seed in range(200):
        res = select_ratio_token(ctx3(), cfg("ratio-token"), random.Random(seed))
        assert sum(e - s for s, e in res.spans) == 3


def test_ratio_token_width_matches_draw_enumeration():
    # every ordered sequence of 3 distinct draws from the 12 eligible tokens
    # selects exactly 3 tokens; no draw may hit the final '.'
    eligible = [i for i, t in enumerate(ANS) if t != "."]
    assert len(eligible) == 12
    for picks in itertools.permutations(eligible[:6], 3):
        res = select_ratio_token(ctx3(), cfg("ratio-token"), ScriptedChoice(picks))
        covered = {i for s, e in res.spans for i in range(s, e)}
        assert covered == set(picks)


def test_ratio_token_single_token():
    res = select_ratio_token(SelectionContext(("cat",)), cfg("ratio-token"), random.Random(0))
    assert res.spans == ((0, 1),)


def test_ratio_token_answers_forced():
    res = select_ratio_token(ctx3(), cfg("ratio-token"), ScriptedChoice([2, 7, 8]))
    assert res.spans == ((2, 3), (7, 9))
    assert [" ".join(ANS[s:e]) for s, e in res.spans] == ["going", "answers to"]


def test_ratio_token_no_eligible():
    res = select_ratio_token(SelectionContext((".", "42")), cfg("ratio-token"), random.Random(0))
    assert not res.spans and res.skipped_reason == "no eligible tokens"


# --- cont-token -------------------------------------------------------------


def test_cont_token_width_and_range():
    ctx = SelectionContext(tuple("abcdefghij"))
    starts = set()
    for seed in range(300):
        [(s, e)] = select_cont_token(ctx, cfg("cont-token"), random.Random(seed)).spans
        assert e - s == 2 and 0 <= s <= 8
        starts.add(s)
    assert starts == set(range(9))


def test_cont_token_whole_sentence():
    res = select_cont_token(SelectionContext(("a", "b", "c")), cfg("cont-token", ratio=1.0),
                            random.Random(3))
    assert res.spans == ((0, 3),)


def test_cont_token_answers_forced():
    res = select_cont_token(ctx3(), cfg("cont-token"), ScriptedChoice([7]))
    assert res.spans == ((7, 10),)


# --- phrase methods ---------------------------------------------------------


def test_rand_phrase_forced_np():
    res = select_rand_phrase(ctx3(), cfg("rand-phrase"), ScriptedChoice([(9, 12)]))
    assert res.spans == ((9, 12),)


def test_rand_phrase_root_only():
    ctx = SelectionContext(("Hi",), tree=parse_tree("(S (UH Hi))"))
    assert not select_rand_phrase(ctx, cfg("rand-phrase"), random.Random(0)).spans


def test_rand_phrase_singleton():
    ctx = SelectionContext(("a", "b"), tree=parse_tree("(S (NP (DT a)) (VB b))"))
    for seed in range(20):
        assert select_rand_phrase(ctx, cfg("rand-phrase"), random.Random(seed)).spans == ((0, 1),)


def test_phrase_requires_tree():
    for fn in (select_rand_phrase, select_ratio_phrase, select_overlap_phrase):
        with pytest.raises(SelectionError, match="tree required"):
            fn(SelectionContext(("a",)), cfg("rand-phrase"), random.Random(0))


def test_ratio_phrase_answers():
    assert select_ratio_phrase(ctx3(), cfg("ratio-phrase")).spans == ((5, 8),)


def test_ratio_phrase_closest_width():
    # widths 2 and 5 with t = ceil(0.2 * 11) = 3
    toks = tuple("abcdefghijk")
    tree = parse_tree("(S (A (x a) (x b)) (x c) (B (x d) (x e) (x f) (x g) (x h)) "
                      "(x i) (x j) (x k))")
    ctx = SelectionContext(toks, tree=tree)
    assert select_ratio_phrase(ctx, cfg("ratio-phrase")).spans == ((0, 2),)


def test_ratio_phrase_tie_leftmost():
    toks = tuple("abcdefghijklmno")
    tree = parse_tree("(S (x a) (A (x b) (x c) (x d)) (B (x e) (x f) (x g)) (x h) (x i) "
                      "(x j) (x k) (x l) (x m) (x n) (x o))")
    ctx = SelectionContext(toks, tree=tree)
    assert select_ratio_phrase(ctx, cfg("ratio-phrase")).spans == ((1, 4),)


def test_overlap_phrase_no_edits_picks_widest():
    assert select_overlap_phrase(ctx3(), cfg("overlap-phrase")).spans == ((1, 12),)


def test_overlap_phrase_avoids_edit():
    # edit inside the VP; the subject NP (k=0) beats every VP (k=1)
    ctx = ctx3(edit_spans=((7, 8),))
    [(s, e)] = select_overlap_phrase(ctx, cfg("overlap-phrase")).spans
    assert (s, e) == (8, 12)  # widest constituent not containing token 7


def test_overlap_phrase_equal_width_leftmost():
    tree = parse_tree("(S (A (x a)) (B (x b)) (x c))")
    ctx = SelectionContext(("a", "b", "c"), tree=tree)
    assert select_overlap_phrase(ctx, cfg("overlap-phrase")).spans == ((0, 1),)


def test_overlap_zero_width_edit_on_boundary_does_not_count():
    tree = parse_tree("(S (A (x a) (x b)) (x c))")
    ctx = SelectionContext(("a", "b", "c"), tree=tree, edit_spans=((2, 2),))
    assert select_overlap_phrase(ctx, cfg("overlap-phrase")).spans == ((0, 2),)


# --- noun-token ---------------------------------------------------------------


def test_noun_token_answers_forced():
    res = select_noun_token(ctx3(), cfg("noun-token"), ScriptedChoice([7]))
    assert res.spans == ((7, 8),)


def test_noun_token_needs_pos():
    with pytest.raises(SelectionError):
        select_noun_token(SelectionContext(("a",)), cfg("noun-token"), random.Random(0))


def test_noun_token_no_nouns():
    ctx = SelectionContext(("run", "jump"), pos=("VERB", "VERB"))
    res = select_noun_token(ctx, cfg("noun-token"), random.Random(0))
    assert not res.spans and res.skipped_reason == "no noun tokens"


def test_noun_token_avoid_edits():
    ctx = SelectionContext(("I", "like", "apples"), pos=("PRON", "VERB", "NOUN"),
                           edit_spans=((2, 3),))
    assert select_noun_token(ctx, cfg("noun-token"), random.Random(0)).spans == ((2, 3),)
    res = select_noun_token(ctx, cfg("noun-token", avoid_edits=True), random.Random(0))
    assert not res.spans


# --- properties ---------------------------------------------------------------


def test_mix_seed_stable():
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF  # splitmix64 first output for state 0
    assert mix_seed(42, 1) != mix_seed(42, 2)


@st.composite
def random_contexts(draw):
    n = draw(st.integers(1, 12))
    toks = tuple(draw(st.lists(st.sampled_from(["cat", "dog", ".", "run", "7"]),
                               min_size=n, max_size=n)))

    def build(lo, hi, depth):
        if hi - lo == 1:
            leaf = f"(T {toks[lo]})"
            return f"(N {leaf})" if draw(st.booleans()) else leaf
        cuts = sorted(draw(st.sets(st.integers(lo + 1, hi - 1), min_size=1, max_size=min(3, hi - lo - 1))))
        bounds = [lo] + cuts + [hi]
        return "(X " + " ".join(build(a, b, depth + 1) for a, b in zip(bounds, bounds[1:])) + ")"

    tree = parse_tree(build(0, n, 0))
    pos = tuple(draw(st.lists(st.sampled_from(["NOUN", "VERB", "PROPN", "PUNCT"]),
                              min_size=n, max_size=n)))
    edits = []
    p = 0
    while p <= n and draw(st.booleans()):
        a = draw(st.integers(p, n))
        b = draw(st.integers(a, min(n, a + 3)))
        edits.append((a, b))
        p = b + 1
    return SelectionContext(toks, tuple(edits), tree, pos)


@settings(max_examples=300, deadline=None)
@given(random_contexts(), st.sampled_from(METHODS),
       st.integers(0, 2**64 - 1), st.floats(0.05, 1.0))
def test_selection_properties(ctx, method, seed, ratio):
    c = SelectionConfig(method, ratio=ratio, seed=seed)
    res = select_spans(ctx, c)
    assert res == select_spans(ctx, c)  # deterministic
    n = len(ctx.corrected)
    spans = res.spans
    for s, e in spans:
        assert 0 <= s < e <= n
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        assert e1 < s2 or (method != "ratio-token" and e1 <= s2)
    width = sum(e - s for s, e in spans)
    need = math.ceil(round(ratio * n, 9))
    if method == "ratio-token":
        assert width == min(sum(not x for x in ctx.neutral), need)
    elif method == "cont-token":
        assert len(spans) == 1 and width == min(n, need)
    elif method in ("rand-phrase", "ratio-phrase", "overlap-phrase"):
        if spans:
            assert len(spans) == 1 and spans[0] in ctx.tree.spans() and spans[0] != (0, n)
        else:
            assert all(sp == (0, n) for sp in ctx.tree.spans())
    else:
        if spans:
            assert width == 1 and ctx.pos[spans[0][0]] in ("NOUN", "PROPN")
        else:
            assert not {"NOUN", "PROPN"} & set(ctx.pos)


@settings(max_examples=300, deadline=None)
@given(random_contexts())
def test_overlap_matches_exhaustive(ctx):
    res = select_overlap_phrase(ctx, cfg("overlap-phrase"))
    expected = exhaustive_overlap_choice(ctx.tree.spans(), ctx.edit_spans, len(ctx.corrected))
    assert (res.spans[0] if res.spans else None) == expected
