"""Span-level precision/recall/F-beta scoring of GEC edits."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Edit
from .edits import MERGED, extract_edits


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other):
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def match_edits(hyp: Sequence[Edit], ref: Sequence[Edit]) -> MatchCounts:
    """Count matches on (start, end, replacement); type labels are ignored."""
    overlap = Counter(e.key for e in hyp) & Counter(e.key for e in ref)
    tp = sum(overlap.values())
    return MatchCounts(tp, len(hyp) - tp, len(ref) - tp)


def prf(counts: MatchCounts, beta=0.5):
    """(precision, recall, f). An empty denominator makes P or R equal 1."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    b2 = beta * beta
    denom = b2 * p + r
    f = (1 + b2) * p * r / denom if denom else 0.0
    return p, r, f


@dataclass(frozen=True)
class Score:
    counts: MatchCounts
    precision: float
    recall: float
    f: float
    beta: float = 0.5
    choices: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def from_counts(cls, counts, beta=0.5, choices=()):
        return cls(counts, *prf(counts, beta), beta=beta, choices=tuple(choices))

    def to_dict(self):
        return {
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "fn": self.counts.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f": self.f,
            "beta": self.beta,
        }

    def summary(self):
        return (f"TP={self.counts.tp} FP={self.counts.fp} FN={self.counts.fn} "
                f"P={self.precision:.4f} R={self.recall:.4f} F{self.beta:g}={self.f:.4f}")


def _best_annotator(running, hyp, ref_sets, beta):
    best = None
    for annotator in sorted(ref_sets):
        local = match_edits(hyp, ref_sets[annotator])
        total = running + local
        key = (prf(total, beta)[2], local.tp, -local.fp, -annotator)
        if best is None or key > best[0]:
            best = (key, annotator, local)
    return best[1], best[2]


def score_corpus(sources, hyp_edits, ref_sets: Sequence[Mapping[int, Sequence[Edit]]], beta=0.5):
    """Corpus P/R/F with a greedy per-sentence choice of reference annotator.

    Each sentence takes the annotator that maximizes the running corpus F
    (ties: more true positives, fewer false positives, lower id). The choice
    depends on sentence order.
    """
    if not (len(sources) == len(hyp_edits) == len(ref_sets)):
        raise ValueError(
            f"length mismatch: {len(sources)} sources, {len(hyp_edits)} hypotheses, "
            f"{len(ref_sets)} references"
        )
    running = MatchCounts()
    choices = []
    for hyp, refs in zip(hyp_edits, ref_sets):
        annotator, local = _best_annotator(running, hyp, refs or {0: ()}, beta)
        running = running + local
        choices.append(annotator)
    return Score.from_counts(running, beta, choices)


def score_from_text(sources, hypotheses, ref_sets, merge=MERGED, beta=0.5):
    """Extract hypothesis edits by alignment, then :func:`score_corpus`."""
    if len(sources) != len(hypotheses):
        raise ValueError(f"length mismatch: {len(sources)} sources, {len(hypotheses)} hypotheses")
    hyp_edits = [extract_edits(src, hyp, merge) for src, hyp in zip(sources, hypotheses)]
    return score_corpus(sources, hyp_edits, ref_sets, beta)
