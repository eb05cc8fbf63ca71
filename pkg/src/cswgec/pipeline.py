"""End-to-end generation of code-switched GEC pairs.

For each sentence: apply the edits, pick spans on the corrected side,
translate them, drop edits the spans cut through, shift the rest and invert
back to an erroneous CSW source.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import AnnotatedSentence, Edit
from .edits import Projection, apply_edits, invert
from .exceptions import CswError, TranslationError
from .select import (SelectionConfig, SelectionContext, make_rng, select_spans,
                     strictly_intersects)
from .translate import Segmenter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Provenance:
    method: str
    seed: int
    corrected_spans: tuple[tuple[int, int], ...] = ()
    source_spans: tuple[tuple[int, int], ...] = ()
    edits_dropped: int = 0
    passed_through: bool = False
    reason: str | None = None


@dataclass(frozen=True)
class CswPair:
    source: tuple[str, ...]
    corrected: tuple[str, ...]
    edits: tuple[Edit, ...]
    provenance: Provenance

    def to_sentence(self, annotator=0):
        edits = tuple(e if e.annotator == annotator else
                      Edit(e.start, e.end, e.replacement, e.etype, annotator) for e in self.edits)
        return AnnotatedSentence(self.source, {annotator: edits})


@dataclass
class _Counts:
    sentencesIn: int = 0
    sentencesOut: int = 0
    sentencesPassedThrough: int = 0
    sentencesSkipped: int = 0
    editsIn: int = 0
    editsOut: int = 0
    editsDropped: int = 0

    def as_dict(self):
        return dict(vars(self))


@dataclass
class GenerationReport:
    """Corpus-level counters; edits of skipped sentences are not counted."""

    totals: _Counts = field(default_factory=_Counts)
    per_method: dict[str, _Counts] = field(default_factory=dict)
    skipped: list[dict] = field(default_factory=list)

    def __getattr__(self, name):
        # expose the counters directly: report.sentencesOut
        if name != "totals" and name in _Counts.__dataclass_fields__:
            return getattr(self.totals, name)
        raise AttributeError(name)

    def _bump(self, method, **deltas):
        bucket = self.per_method.setdefault(method, _Counts())
        for key, value in deltas.items():
            setattr(self.totals, key, getattr(self.totals, key) + value)
            setattr(bucket, key, getattr(bucket, key) + value)

    def record(self, method, edits_in, pair=None, index=None, error=None):
        if pair is None:
            self._bump(method, sentencesIn=1, sentencesSkipped=1)
            self.skipped.append({"index": index, "reason": str(error)})
            return
        self._bump(
            method,
            sentencesIn=1,
            sentencesOut=1,
            sentencesPassedThrough=int(pair.provenance.passed_through),
            editsIn=edits_in,
            editsOut=len(pair.edits),
            editsDropped=pair.provenance.edits_dropped,
        )

    def to_dict(self):
        out = self.totals.as_dict()
        out["perMethod"] = {m: c.as_dict() for m, c in sorted(self.per_method.items())}
        out["skipped"] = list(self.skipped)
        return out


def _context(sentence, view, annotator):
    return SelectionContext(
        corrected=view.tokens,
        edit_spans=tuple(p.span for p in view.projections),
        tree=sentence.tree,
        pos=sentence.pos,
    )


def generate_pair(sentence: AnnotatedSentence, cfg: SelectionConfig, backend,
                  segmenter=None, target_lang="zh", source_lang="en",
                  annotator=0, rng=None, index=0) -> CswPair:
    """Turn one annotated sentence into a CSW source/corrected pair.

    ``rng`` overrides the per-sentence generator derived from ``cfg.seed``
    and ``index``. Translation failures propagate as TranslationError.
    """
    segmenter = segmenter or Segmenter()
    if rng is None:
        rng = make_rng(cfg.seed, index)
    edits = sentence.edits(annotator)
    view = apply_edits(sentence.tokens, edits)
    if not view.tokens:
        return CswPair(sentence.tokens, view.tokens, edits,
                       Provenance(cfg.method, cfg.seed, passed_through=True,
                                  reason="empty corrected sentence"))
    result = select_spans(_context(sentence, view, annotator), cfg, rng)
    if not result.spans:
        return CswPair(sentence.tokens, view.tokens, edits,
                       Provenance(cfg.method, cfg.seed, passed_through=True,
                                  reason=result.skipped_reason))

    spans = result.spans
    kept = [p for p in view.projections
            if not any(strictly_intersects(p.span, sp) for sp in spans)]
    dropped = len(view.projections) - len(kept)

    tokens = list(view.tokens)
    new_spans = []
    for s, e in sorted(spans, reverse=True):
        text = " ".join(tokens[s:e])
        translated = segmenter(backend.translate(text, source_lang, target_lang), target_lang)
        if not translated:
            raise TranslationError(f"translation of {text!r} segmented to nothing")
        delta = len(translated) - (e - s)
        tokens[s:e] = translated
        kept = [p if p.c_start < e else
                Projection(p.edit, p.c_start + delta, p.c_end + delta, p.orig_tokens)
                for p in kept]
        new_spans = [(a + delta, b + delta) for a, b in new_spans]
        new_spans.insert(0, (s, s + len(translated)))

    corrected = tuple(tokens)
    source, src_edits = invert(corrected, kept)
    src_spans = _source_spans(new_spans, kept)

    check = apply_edits(source, src_edits)
    assert check.tokens == corrected, "inversion does not reproduce the corrected sentence"
    return CswPair(source, corrected, src_edits,
                   Provenance(cfg.method, cfg.seed, tuple(new_spans), src_spans, dropped))


def _source_spans(corrected_spans, projections):
    """Map translated corrected-side spans to source coordinates."""
    out = []
    for s, e in corrected_spans:
        shift = sum((p.c_end - p.c_start) - len(p.orig_tokens)
                    for p in projections if p.c_end <= s)
        out.append((s - shift, e - shift))
    return tuple(out)


def generate_corpus(corpus: Sequence[AnnotatedSentence], cfg: SelectionConfig, backend,
                    segmenter=None, target_lang="zh", source_lang="en", annotator=0,
                    fail_fast=False, jobs=1):
    """Map :func:`generate_pair` over a corpus, preserving order.

    Returns ``(pairs, report)``. Sentences whose translation fails are left
    out of ``pairs`` and listed in the report unless ``fail_fast`` is set.
    Every sentence gets its own RNG, so ``jobs`` never changes the output.
    """
    segmenter = segmenter or Segmenter()

    def work(index):
        sentence = corpus[index]
        try:
            return generate_pair(sentence, cfg, backend, segmenter, target_lang,
                                 source_lang, annotator, index=index), None
        except (TranslationError, CswError) as exc:
            if fail_fast:
                raise
            logger.warning("sentence %d skipped: %s", index, exc)
            return None, exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, range(len(corpus))))
    else:
        outcomes = [work(i) for i in range(len(corpus))]

    report = GenerationReport()
    pairs = []
    for index, (pair, error) in enumerate(outcomes):
        report.record(cfg.method, len(corpus[index].edits(annotator)), pair, index, error)
        if pair is not None:
            pairs.append(pair)
    return pairs, report
