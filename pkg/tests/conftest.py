import random

import pytest

from cswgec.corpus import AnnotatedSentence, Edit

WORLD_M2 = (
    "S What if human use up all the resource in the world ?\n"
    "A 2 3|||NOUN:NUM|||humans|||REQUIRED|||-NONE-|||0\n"
    "A 7 8|||NOUN:NUM|||resources|||REQUIRED|||-NONE-|||0\n"
)
# a valid tagging of the corrected world sentence
WORLD_POS = "PRON SCONJ NOUN VERB ADP DET DET NOUN ADP DET NOUN PUNCT"

ANSWERS = "She was going to have so many answers to so many questions ."
ANSWERS_TREE = (
    "(S (NP (PRP She)) (VP (VBD was) (VP (VBG going) (S (VP (TO to) (VP (VB have) "
    "(NP (NP (ADJP (RB so) (JJ many)) (NNS answers)) (PP (TO to) (NP (ADJP (RB so) "
    "(JJ many)) (NNS questions))))))))) (. .))"
)
ANSWERS_POS = "PRON AUX VERB PART VERB ADV ADJ NOUN ADP ADV ADJ NOUN PUNCT"

WORDS = ["cat", "dog", "run", "big", "Red", "red", "the", "a", "sun", "tree", ".", ",", "42"]


def random_edits(rng, length, max_edits=4, annotator=0):
    """Sorted, non-overlapping random edits over ``length`` tokens."""
    edits = []
    pos = 0
    for _ in range(rng.randint(0, max_edits)):
        if pos > length:
            break
        start = rng.randint(pos, min(length, pos + 3))
        end = rng.randint(start, min(length, start + 2))
        n_repl = rng.randint(0 if end > start else 1, 2)
        repl = tuple(rng.choice(WORDS) for _ in range(n_repl))
        edits.append(Edit(start, end, repl, "R", annotator))
        # leave a gap so a later insertion cannot land inside this span
        pos = end + 1 if end > start else end + 1
    return edits


def random_sentence(rng, min_len=1, max_len=30, max_edits=4):
    tokens = tuple(rng.choice(WORDS) for _ in range(rng.randint(min_len, max_len)))
    return AnnotatedSentence(tokens, {0: tuple(random_edits(rng, len(tokens), max_edits))})


@pytest.fixture
def rng():
    return random.Random(1234)


ZH = {"cat": "猫", "dog": "狗", "run": "跑", "big": "大", "Red": "红色", "red": "红",
      "the": "这", "a": "一个", "sun": "太阳", "tree": "树", ".": "。", ",": "，", "42": "四十二"}


def random_tree(rng, tokens):
    """A random bracketing over ``tokens`` (preterminals labelled T)."""
    def build(lo, hi):
        if hi - lo == 1:
            return f"(T {tokens[lo]})"
        k = rng.randint(1, min(3, hi - lo - 1))
        cuts = sorted(rng.sample(range(lo + 1, hi), k))
        bounds = [lo] + cuts + [hi]
        return "(X " + " ".join(build(a, b) for a, b in zip(bounds, bounds[1:])) + ")"
    return build(0, len(tokens))


def annotate(sentence, rng):
    """Attach a random tree and random POS to the corrected side."""
    from cswgec.corpus import parse_tree
    corrected = sentence.corrected()
    tags = tuple(rng.choice(["NOUN", "VERB", "PROPN", "ADJ", "PUNCT"]) for _ in corrected)
    tree = parse_tree(random_tree(rng, corrected)) if corrected else None
    return sentence.with_tree(tree).with_pos(tags)


def write_cli_fixture(directory, n=40, seed=7):
    """M2 corpus with matching tree, POS and dictionary files under ``directory``."""
    from cswgec.corpus import dumps_m2
    r = random.Random(seed)
    sents = [random_sentence(r, max_len=12) for _ in range(n)]
    trees, tags = [], []
    for s in sents:
        corrected = s.corrected()
        trees.append(random_tree(r, corrected) if corrected else "")
        tags.append(" ".join(r.choice(["NOUN", "VERB", "PROPN", "ADJ"]) for _ in corrected))
    paths = {name: directory / name for name in ("in.m2", "in.trees", "in.pos", "zh.tsv")}
    paths["in.m2"].write_text(dumps_m2(sents), encoding="utf-8")
    paths["in.trees"].write_text("\n".join(trees) + "\n", encoding="utf-8")
    paths["in.pos"].write_text("\n".join(tags) + "\n", encoding="utf-8")
    paths["zh.tsv"].write_text("".join(f"{k}\t{v}\n" for k, v in ZH.items()), encoding="utf-8")
    return paths
