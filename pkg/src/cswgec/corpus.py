"""Data model and readers/writers for M2 corpora, bracketed trees and POS files.

Tokens are plain ``str`` objects. All containers are tuples so that a parsed
sentence can be shared between threads without copying.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .exceptions import AlignmentError, FormatError

NOOP_LINE = "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{annotator}"

_WHITESPACE = frozenset(" \t\n\r\v\f　 ")

# Penn treebank escapes for bracket tokens
_PTB_UNESCAPE = {
    "-LRB-": "(",
    "-RRB-": ")",
    "-LSB-": "[",
    "-RSB-": "]",
    "-LCB-": "{",
    "-RCB-": "}",
}


def check_token(token):
    if not isinstance(token, str) or not token:
        raise FormatError(f"invalid token {token!r}: tokens must be non-empty strings")
    if any(ch in _WHITESPACE for ch in token):
        raise FormatError(f"invalid token {token!r}: tokens must not contain whitespace")


@dataclass(frozen=True)
class Edit:
    """Replace source tokens ``[start, end)`` with ``replacement``."""

    start: int
    end: int
    replacement: tuple[str, ...] = ()
    etype: str = ""
    annotator: int = 0

    def __post_init__(self):
        if not isinstance(self.replacement, tuple):
            object.__setattr__(self, "replacement", tuple(self.replacement))
        if self.start < 0 or self.end < self.start:
            raise FormatError(f"invalid edit span [{self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise FormatError(f"empty insertion at {self.start}")
        if self.annotator < 0:
            raise FormatError(f"negative annotator id {self.annotator}")
        for tok in self.replacement:
            check_token(tok)

    @property
    def span(self):
        return self.start, self.end

    @property
    def key(self):
        """Identity used for scoring: span plus replacement, type ignored."""
        return self.start, self.end, self.replacement


def check_edits(edits: Sequence[Edit], length: int) -> None:
    """Raise FormatError unless ``edits`` are in bounds, sorted and disjoint."""
    prev = None
    for edit in edits:
        if edit.end > length:
            raise FormatError(
                f"span out of bounds: [{edit.start}, {edit.end}) on {length} tokens"
            )
        if prev is not None:
            if (edit.start, edit.end) < (prev.start, prev.end):
                raise FormatError(
                    f"edits not sorted: [{prev.start}, {prev.end}) before [{edit.start}, {edit.end})"
                )
            if edit.start < prev.end:
                raise FormatError(
                    f"overlapping spans [{prev.start}, {prev.end}) and [{edit.start}, {edit.end})"
                )
        prev = edit


@dataclass(frozen=True)
class Constituent:
    label: str
    start: int
    end: int
    depth: int

    @property
    def width(self):
        return self.end - self.start

    @property
    def span(self):
        return self.start, self.end


@dataclass(frozen=True)
class ParseTree:
    """Constituent spans of a bracketed parse, preterminals excluded.

    Unary chains covering the same span are collapsed into one constituent
    whose label joins the chain with ``+`` (outermost first).
    """

    constituents: tuple[Constituent, ...]
    leaf_count: int
    leaves: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.constituents, tuple):
            object.__setattr__(self, "constituents", tuple(self.constituents))
        roots = [c for c in self.constituents if c.start == 0 and c.end == self.leaf_count]
        if len(roots) != 1:
            raise FormatError(f"tree must have exactly one root constituent, found {len(roots)}")
        for c in self.constituents:
            if not 0 <= c.start < c.end <= self.leaf_count:
                raise FormatError(f"constituent {c.label} span [{c.start}, {c.end}) out of bounds")

    def spans(self):
        return [c.span for c in self.constituents]


@dataclass(frozen=True)
class AnnotatedSentence:
    """A tokenized source sentence with per-annotator edits.

    An empty ``edit_sets`` mapping is normalized to ``{0: ()}`` (annotator 0,
    no corrections), which is how such a sentence is written to M2.
    ``pos`` and ``tree`` annotate the corrected side of ``annotator``'s edits.
    """

    tokens: tuple[str, ...]
    edit_sets: Mapping[int, tuple[Edit, ...]] = field(default_factory=dict)
    tree: ParseTree | None = None
    pos: tuple[str, ...] | None = None

    def __post_init__(self):
        tokens = tuple(self.tokens)
        for tok in tokens:
            check_token(tok)
        sets = {int(a): tuple(e) for a, e in self.edit_sets.items()} or {0: ()}
        for annotator, edits in sets.items():
            check_edits(edits, len(tokens))
            for e in edits:
                if e.annotator != annotator:
                    raise FormatError(
                        f"edit annotator {e.annotator} filed under annotator {annotator}"
                    )
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "edit_sets", dict(sorted(sets.items())))
        if self.pos is not None:
            object.__setattr__(self, "pos", tuple(self.pos))

    def edits(self, annotator=0):
        return self.edit_sets.get(annotator, ())

    def corrected(self, annotator=0):
        out = list(self.tokens)
        for e in reversed(self.edits(annotator)):
            out[e.start:e.end] = e.replacement
        return tuple(out)

    def with_tree(self, tree):
        return replace(self, tree=tree)

    def with_pos(self, pos):
        return replace(self, pos=tuple(pos))


# ---------------------------------------------------------------------------
# stream helpers


def _read_text(stream) -> str:
    if isinstance(stream, bytes):
        return stream.decode("utf-8")
    if isinstance(stream, str):
        return stream
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def _split_tokens(text, lineno):
    if not text:
        return ()
    tokens = text.split(" ")
    if any(not t for t in tokens):
        raise FormatError("empty token (repeated or trailing space)", lineno)
    for t in tokens:
        try:
            check_token(t)
        except FormatError as exc:
            raise FormatError(str(exc), lineno) from None
    return tuple(tokens)


# ---------------------------------------------------------------------------
# M2


def _parse_edit_line(line, lineno):
    fields = line[2:].split("|||")
    if len(fields) != 6:
        raise FormatError(f"expected 6 '|||'-separated fields, got {len(fields)}", lineno)
    span, etype, repl, _required, _comment, annotator = fields
    parts = span.split()
    if len(parts) != 2:
        raise FormatError(f"bad span field {span!r}", lineno)
    try:
        start, end = int(parts[0]), int(parts[1])
        annotator = int(annotator)
    except ValueError:
        raise FormatError("span and annotator id must be integers", lineno) from None
    if annotator < 0:
        raise FormatError(f"negative annotator id {annotator}", lineno)
    if etype == "noop" or (start, end) == (-1, -1):
        return annotator, None
    if repl == "-NONE-":
        repl = ""
    replacement = _split_tokens(repl, lineno)
    try:
        return annotator, Edit(start, end, replacement, etype, annotator)
    except FormatError as exc:
        raise FormatError(str(exc), lineno) from None


def _build_sentence(tokens, entries, s_lineno):
    sets: dict[int, list[Edit]] = {}
    for lineno, annotator, edit in entries:
        bucket = sets.setdefault(annotator, [])
        if edit is None:
            continue
        if edit.end > len(tokens):
            raise FormatError(
                f"span out of bounds: [{edit.start}, {edit.end}) on {len(tokens)} tokens",
                lineno,
            )
        bucket.append(edit)
    for annotator, edits in sets.items():
        edits.sort(key=lambda e: (e.start, e.end))
        try:
            check_edits(edits, len(tokens))
        except FormatError as exc:
            raise FormatError(f"annotator {annotator}: {exc}", s_lineno) from None
    return AnnotatedSentence(tokens, {a: tuple(e) for a, e in sets.items()})


def loads_m2(text: str) -> list[AnnotatedSentence]:
    """Parse M2 text into sentences."""
    sentences = []
    tokens = None
    s_lineno = 0
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if tokens is not None:
                sentences.append(_build_sentence(tokens, entries, s_lineno))
                tokens, entries = None, []
            continue
        if line == "S" or line.startswith("S "):
            if tokens is not None:
                sentences.append(_build_sentence(tokens, entries, s_lineno))
                entries = []
            tokens = _split_tokens(line[2:], lineno)
            s_lineno = lineno
        elif line.startswith("A "):
            if tokens is None:
                raise FormatError("'A' line without a preceding 'S' line", lineno)
            annotator, edit = _parse_edit_line(line, lineno)
            entries.append((lineno, annotator, edit))
        else:
            raise FormatError(f"unrecognised line prefix {line[:2]!r}", lineno)
    if tokens is not None:
        sentences.append(_build_sentence(tokens, entries, s_lineno))
    return sentences


def read_m2(stream) -> list[AnnotatedSentence]:
    """Read an M2 corpus from a binary/text stream, bytes or str."""
    return loads_m2(_read_text(stream))


def _edit_line(edit):
    repl = " ".join(edit.replacement)
    if "|||" in repl or "|||" in edit.etype:
        raise FormatError("'|||' cannot be represented in M2")
    return f"A {edit.start} {edit.end}|||{edit.etype}|||{repl}|||REQUIRED|||-NONE-|||{edit.annotator}"


def dumps_m2(sentences: Iterable[AnnotatedSentence]) -> str:
    """Serialize sentences to M2 text; every entry ends with a blank line."""
    blocks = []
    for sent in sentences:
        lines = ["S " + " ".join(sent.tokens) if sent.tokens else "S"]
        for annotator, edits in sorted(sent.edit_sets.items()):
            check_edits(edits, len(sent.tokens))
            if not edits:
                lines.append(NOOP_LINE.format(annotator=annotator))
            lines.extend(_edit_line(e) for e in edits)
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks) + ("\n" if blocks else "")


def write_m2(sentences: Iterable[AnnotatedSentence], stream=None) -> bytes:
    """Encode sentences as UTF-8 M2; also writes to ``stream`` when given.

    The whole corpus is serialized before anything is written, so an invalid
    sentence never leaves partial output behind.
    """
    data = dumps_m2(list(sentences)).encode("utf-8")
    if stream is not None:
        if isinstance(stream, io.TextIOBase):
            stream.write(data.decode("utf-8"))
        else:
            stream.write(data)
    return data


# ---------------------------------------------------------------------------
# bracketed trees


def _tokenize_brackets(line, lineno):
    """Yield (position, token) with tokens '(', ')' or an atom."""
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in "()":
            yield i, ch
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < n and line[j] not in "()" and not line[j].isspace():
                j += 1
            yield i, line[i:j]
            i = j


def parse_tree(line: str, lineno: int | None = None) -> ParseTree:
    """Parse one Penn-style bracketing into a ParseTree."""
    # node = [label, children, position]; leaves are plain strings
    stack: list[list] = []
    root = None
    expect_label = False
    for pos, tok in _tokenize_brackets(line, lineno):
        if root is not None:
            raise FormatError(f"trailing material at column {pos}", lineno)
        if tok == "(":
            node = ["", [], pos]
            if stack:
                stack[-1][1].append(node)
            stack.append(node)
            expect_label = True
        elif tok == ")":
            if not stack:
                raise FormatError(f"unbalanced ')' at column {pos}", lineno)
            node = stack.pop()
            if not node[1]:
                raise FormatError(f"empty node at column {node[2]}", lineno)
            if not stack:
                root = node
            expect_label = False
        else:
            if not stack:
                raise FormatError(f"token outside brackets at column {pos}", lineno)
            if expect_label:
                stack[-1][0] = tok
                expect_label = False
            else:
                stack[-1][1].append(tok)
    if stack:
        raise FormatError(f"unbalanced '(' opened at column {stack[-1][2]}", lineno)
    if root is None:
        raise FormatError("empty tree", lineno)

    leaves: list[str] = []
    spans: dict[tuple[int, int], Constituent] = {}

    def walk(node, depth):
        label, children, pos = node
        start = len(leaves)
        if any(isinstance(c, str) for c in children):
            if len(children) != 1:
                raise FormatError(f"node at column {pos} mixes words and subtrees", lineno)
            leaves.append(_PTB_UNESCAPE.get(children[0], children[0]))
            return False
        for child in children:
            walk(child, depth + 1)
        key = (start, len(leaves))
        if key in spans:
            inner = spans[key]
            spans[key] = Constituent(f"{label}+{inner.label}" if label else inner.label,
                                     start, len(leaves), depth)
        else:
            spans[key] = Constituent(label, start, len(leaves), depth)
        return True

    is_phrase = walk(root, 0)
    if not is_phrase:
        # a bare preterminal is its own root
        spans[(0, 1)] = Constituent(root[0], 0, 1, 0)
    constituents = sorted(spans.values(), key=lambda c: (c.start, -c.end))
    return ParseTree(tuple(constituents), len(leaves), tuple(leaves))


def read_trees(stream, corpus: Sequence[AnnotatedSentence], annotator=0):
    """Attach one tree per line to ``corpus``; leaves must equal the corrected side."""
    lines = _read_text(stream).splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != len(corpus):
        raise AlignmentError(f"{len(lines)} trees for {len(corpus)} sentences")
    out = []
    for i, (line, sent) in enumerate(zip(lines, corpus)):
        corrected = sent.corrected(annotator)
        if not line.strip():
            if corrected:
                raise AlignmentError("missing tree", i)
            out.append(sent)
            continue
        tree = parse_tree(line, i + 1)
        if tree.leaves != corrected:
            raise AlignmentError(
                f"tree leaves {' '.join(tree.leaves)!r} do not match tokens {' '.join(corrected)!r}",
                i,
            )
        out.append(sent.with_tree(tree))
    return out


def read_pos(stream, corpus: Sequence[AnnotatedSentence], annotator=0):
    """Attach one line of space-separated UPOS tags per sentence."""
    lines = _read_text(stream).split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != len(corpus):
        raise AlignmentError(f"{len(lines)} POS lines for {len(corpus)} sentences")
    out = []
    for i, (line, sent) in enumerate(zip(lines, corpus)):
        tags = line.split()
        n = len(sent.corrected(annotator))
        if len(tags) != n:
            raise AlignmentError(f"{len(tags)} tags for {n} corrected tokens", i)
        out.append(sent.with_pos(tags))
    return out
