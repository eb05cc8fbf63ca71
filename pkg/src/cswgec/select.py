"""Span-selection methods over a corrected sentence.

Every selector takes a :class:`SelectionContext`, a :class:`SelectionConfig`
and a random source exposing ``choice(seq)`` (``random.Random`` or any
stand-in). Selectors only ever draw through ``choice``, which is what lets
tests force a particular pick.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import ParseTree
from .exceptions import SelectionError
from .scripts import has_letter

METHODS = (
    "ratio-token",
    "cont-token",
    "rand-phrase",
    "ratio-phrase",
    "overlap-phrase",
    "noun-token",
)
PHRASE_METHODS = ("rand-phrase", "ratio-phrase", "overlap-phrase")
NOUN_TAGS = frozenset({"NOUN", "PROPN"})

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SelectionConfig:
    method: str = "ratio-token"
    ratio: float = 0.2
    seed: int = 0
    avoid_edits: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if not 0 < self.ratio <= 1:
            raise ValueError(f"ratio must be in (0, 1], got {self.ratio}")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def needs_tree(self):
        return self.method in PHRASE_METHODS

    @property
    def needs_pos(self):
        return self.method == "noun-token"


@dataclass(frozen=True)
class SelectionContext:
    corrected: tuple[str, ...]
    edit_spans: tuple[tuple[int, int], ...] = ()
    tree: ParseTree | None = None
    pos: tuple[str, ...] | None = None
    neutral: tuple[bool, ...] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "corrected", tuple(self.corrected))
        object.__setattr__(self, "edit_spans", tuple(tuple(s) for s in self.edit_spans))
        if self.neutral is None:
            object.__setattr__(self, "neutral", tuple(is_neutral(t) for t in self.corrected))
        if self.pos is not None and len(self.pos) != len(self.corrected):
            raise SelectionError("POS tags are not aligned with the corrected sentence")
        if self.tree is not None and self.tree.leaf_count != len(self.corrected):
            raise SelectionError("tree is not aligned with the corrected sentence")


@dataclass(frozen=True)
class SelectionResult:
    spans: tuple[tuple[int, int], ...] = ()
    skipped_reason: str | None = None

    def __bool__(self):
        return bool(self.spans)


def is_neutral(token):
    """Punctuation, digits and symbols carry no language."""
    return not has_letter(token)


def target_count(ratio, length):
    # rounding guards against 0.2 * 15 == 3.0000000000000004
    return math.ceil(round(ratio * length, 9))


def mix_seed(seed, index):
    """splitmix64 of ``seed XOR index``; the per-sentence seed."""
    z = (seed ^ index) & _MASK64
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed, index=0):
    return random.Random(mix_seed(seed, index))


def runs_to_spans(indices):
    """Merge a set of token indices into maximal contiguous spans."""
    spans = []
    for i in sorted(indices):
        if spans and spans[-1][1] == i:
            spans[-1][1] = i + 1
        else:
            spans.append([i, i + 1])
    return tuple((s, e) for s, e in spans)


def strictly_intersects(edit_span, span):
    """Zero-width spans intersect only when strictly inside ``span``."""
    a, b = edit_span
    s, e = span
    if a == b:
        return s < a < e
    return a < e and s < b


def _inside_edit(index, edit_spans):
    return any(a <= index < b for a, b in edit_spans)


def select_ratio_token(ctx, cfg, rng):
    length = len(ctx.corrected)
    eligible = [i for i in range(length) if not ctx.neutral[i]]
    if not eligible:
        return SelectionResult(skipped_reason="no eligible tokens")
    need = target_count(cfg.ratio, length)
    picked = set()
    while len(picked) < need and eligible:
        i = rng.choice(eligible)
        eligible.remove(i)
        picked.add(i)
    return SelectionResult(runs_to_spans(picked))


def select_cont_token(ctx, cfg, rng):
    length = len(ctx.corrected)
    if length == 0:
        return SelectionResult(skipped_reason="empty sentence")
    n = min(length, target_count(cfg.ratio, length))
    start = rng.choice(range(length - n + 1))
    return SelectionResult(((start, start + n),))


def _eligible_constituents(ctx):
    if ctx.tree is None:
        raise SelectionError("tree required")
    length = len(ctx.corrected)
    seen = set()
    spans = []
    for c in ctx.tree.constituents:
        if 1 <= c.width < length and c.span not in seen:
            seen.add(c.span)
            spans.append(c.span)
    return spans


def select_rand_phrase(ctx, cfg, rng):
    spans = _eligible_constituents(ctx)
    if not spans:
        return SelectionResult(skipped_reason="no proper constituent")
    return SelectionResult((rng.choice(spans),))


def select_ratio_phrase(ctx, cfg, rng=None):
    spans = _eligible_constituents(ctx)
    if not spans:
        return SelectionResult(skipped_reason="no proper constituent")
    t = target_count(cfg.ratio, len(ctx.corrected))
    best = min(spans, key=lambda sp: (abs(sp[1] - sp[0] - t), sp[0], sp[1] - sp[0]))
    return SelectionResult((best,))


def overlap_key(span, edit_spans):
    """Sort key: fewest intersecting edits, then widest, then leftmost."""
    k = sum(strictly_intersects(es, span) for es in edit_spans)
    return k, -(span[1] - span[0]), span[0]


def select_overlap_phrase(ctx, cfg, rng=None):
    spans = _eligible_constituents(ctx)
    if not spans:
        return SelectionResult(skipped_reason="no proper constituent")
    return SelectionResult((min(spans, key=lambda sp: overlap_key(sp, ctx.edit_spans)),))


def select_noun_token(ctx, cfg, rng):
    if ctx.pos is None:
        raise SelectionError("pos required")
    candidates = [i for i, tag in enumerate(ctx.pos) if tag in NOUN_TAGS]
    if cfg.avoid_edits:
        candidates = [i for i in candidates if not _inside_edit(i, ctx.edit_spans)]
    if not candidates:
        return SelectionResult(skipped_reason="no noun tokens")
    i = rng.choice(candidates)
    return SelectionResult(((i, i + 1),))


SELECTORS = {
    "ratio-token": select_ratio_token,
    "cont-token": select_cont_token,
    "rand-phrase": select_rand_phrase,
    "ratio-phrase": select_ratio_phrase,
    "overlap-phrase": select_overlap_phrase,
    "noun-token": select_noun_token,
}


def select_spans(ctx: SelectionContext, cfg: SelectionConfig, rng=None) -> SelectionResult:
    """Dispatch to the configured method; ``rng`` defaults to one seeded from ``cfg``."""
    if rng is None:
        rng = make_rng(cfg.seed)
    return SELECTORS[cfg.method](ctx, cfg, rng)


class ScriptedChoice:
    """A stand-in RNG whose ``choice`` returns predetermined values in order.

    Each scripted value must be a member of the sequence it is drawn from.
    """

    def __init__(self, picks: Sequence):
        self._picks = list(picks)

    def choice(self, seq):
        if not self._picks:
            raise LookupError("scripted choices exhausted")
        pick = self._picks.pop(0)
        if pick not in seq:
            raise LookupError(f"scripted pick {pick!r} is not a candidate")
        return pick
