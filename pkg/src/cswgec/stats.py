"""Script-based language labels, CSW statistics and the learner-corpus test-set filter."""

from __future__ import annotations

import enum
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .scripts import HAN, HANGUL, LATIN, is_kana, script_of


class Lang(enum.Enum):
    EN = "en"
    ZH = "zh"
    JA = "ja"
    KO = "ko"
    UNKNOWN = "unknown"
    NEUTRAL = "neutral"

    @property
    def is_other(self):
        return self not in (Lang.EN, Lang.NEUTRAL)


def _tally(token):
    counts = Counter()
    for ch in token:
        if ch.isalpha():
            script = script_of(ch)
            counts["kana" if is_kana(script) else script] += 1
    return counts


def classify_token(token: str) -> Lang:
    """Label a token by the scripts of its letters."""
    counts = _tally(token)
    total = sum(counts.values())
    if not total:
        return Lang.NEUTRAL
    latin = counts[LATIN]
    if latin * 2 > total:
        return Lang.EN
    if counts[HANGUL]:
        return Lang.KO
    if counts["kana"]:
        return Lang.JA
    if counts[HAN]:
        return Lang.ZH
    if latin and latin >= total - latin:
        return Lang.EN
    return Lang.UNKNOWN


def classify_sentence(tokens: Sequence[str]) -> list[Lang]:
    """Token labels where Han-only tokens follow the sentence's kana.

    A Han token in a sentence that contains kana anywhere is Japanese, not
    Chinese.
    """
    labels = [classify_token(t) for t in tokens]
    if Lang.JA in labels:
        labels = [Lang.JA if lab is Lang.ZH else lab for lab in labels]
    return labels


@dataclass(frozen=True)
class CswStats:
    ratio: float
    spf: int
    en: int = 0
    other: int = 0
    neutral: int = 0


def switch_count(labels: Iterable[Lang]) -> int:
    seq = [lab for lab in labels if lab is not Lang.NEUTRAL]
    return sum(a is not b for a, b in zip(seq, seq[1:]))


def sentence_stats(tokens: Sequence[str], count_neutral=False) -> CswStats:
    """CSW ratio (percent) and switchpoint count of one sentence.

    The ratio's denominator excludes punctuation-like tokens unless
    ``count_neutral`` is set.
    """
    labels = classify_sentence(tokens)
    other = sum(lab.is_other for lab in labels)
    en = sum(lab is Lang.EN for lab in labels)
    neutral = len(labels) - other - en
    denom = other + en + (neutral if count_neutral else 0)
    ratio = 100.0 * other / denom if denom else 0.0
    return CswStats(ratio, switch_count(labels), en, other, neutral)


@dataclass(frozen=True)
class CorpusStats:
    sentences: int
    ratio_mean: float
    ratio_std: float
    spf_mean: float
    spf_std: float

    def to_dict(self):
        return {
            "sentences": self.sentences,
            "ratio": {"mean": self.ratio_mean, "std": self.ratio_std},
            "spf": {"mean": self.spf_mean, "std": self.spf_std},
        }


def corpus_stats(corpus: Iterable[Sequence[str]], count_neutral=False) -> CorpusStats:
    """Mean and population standard deviation of ratio and SPF."""
    per = [sentence_stats(toks, count_neutral) for toks in corpus]
    if not per:
        return CorpusStats(0, 0.0, 0.0, 0.0, 0.0)
    ratios = [s.ratio for s in per]
    spfs = [float(s.spf) for s in per]
    return CorpusStats(len(per), statistics.fmean(ratios), statistics.pstdev(ratios),
                       statistics.fmean(spfs), statistics.pstdev(spfs))


# ---------------------------------------------------------------------------
# test-set filter

RULE_LANGUAGE = "language"
RULE_NO_CORRECTION = "no_correction"
RULE_PREFIX = "prefix"
RULE_LENGTH = "length"
RULES = (RULE_LANGUAGE, RULE_NO_CORRECTION, RULE_PREFIX, RULE_LENGTH)

MAX_LENGTH_DIFF = 5


@dataclass
class FilterReport:
    total: int = 0
    kept: int = 0
    removed: dict = field(default_factory=lambda: dict.fromkeys(RULES, 0))

    def to_dict(self):
        return {"total": self.total, "kept": self.kept, "removed": dict(self.removed)}


def parse_lang_pair(lang_pair):
    """``"en-zh"`` or ``("en", "zh")`` -> the non-English language code."""
    if isinstance(lang_pair, str):
        lang_pair = lang_pair.replace("_", "-").split("-")
    langs = [x.lower() for x in lang_pair]
    if len(langs) != 2 or "en" not in langs or langs[0] == langs[1]:
        raise ValueError(f"language pair must be English plus one other language, got {lang_pair!r}")
    other = langs[1] if langs[0] == "en" else langs[0]
    return Lang(other)


def failed_rule(orig: Sequence[str], corrected: Sequence[str], other: Lang, max_diff=MAX_LENGTH_DIFF):
    """Name of the first rule a pair violates, or None if it is kept."""
    labels = set(classify_sentence(orig))
    others = {lab for lab in labels if lab.is_other}
    if Lang.EN not in labels or others != {other}:
        return RULE_LANGUAGE
    if list(orig) == list(corrected):
        return RULE_NO_CORRECTION
    if len(corrected) > len(orig) and list(corrected[:len(orig)]) == list(orig):
        return RULE_PREFIX
    if abs(len(orig) - len(corrected)) > max_diff:
        return RULE_LENGTH
    return None


def filter_mask(pairs, lang_pair, max_diff=MAX_LENGTH_DIFF):
    """Per-pair keep flags plus the removal counts."""
    other = parse_lang_pair(lang_pair)
    report = FilterReport()
    mask = []
    for orig, corrected in pairs:
        report.total += 1
        rule = failed_rule(orig, corrected, other, max_diff)
        mask.append(rule is None)
        if rule is not None:
            report.removed[rule] += 1
    report.kept = sum(mask)
    return mask, report


def filter_csw(pairs, lang_pair, max_diff=MAX_LENGTH_DIFF):
    """Keep (orig, corrected) pairs that pass every rule, in input order."""
    pairs = list(pairs)
    mask, report = filter_mask(pairs, lang_pair, max_diff)
    return [p for p, keep in zip(pairs, mask) if keep], report
