"""Edit-span algebra: apply, invert and extract token-level edits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import Edit, check_edits
from .exceptions import FormatError

MERGED = "merged"
SPLIT = "split"

# alignment operations
MATCH = "M"
SUBSTITUTE = "S"
TRANSPOSE = "T"
DELETE = "D"
INSERT = "I"

# costs in tenths so that sums stay exact
_SUB = 10
_SUB_CASE = 1
_INDEL = 10
_TRANSPOSE = 10

EXTRACTED_TYPE = "X"


@dataclass(frozen=True)
class Projection:
    """Where an edit landed on the corrected side, and what it removed."""

    edit: Edit
    c_start: int
    c_end: int
    orig_tokens: tuple[str, ...]

    @property
    def span(self):
        return self.c_start, self.c_end


@dataclass(frozen=True)
class CorrectedView:
    tokens: tuple[str, ...]
    projections: tuple[Projection, ...]


def apply_edits(source: Sequence[str], edits: Sequence[Edit]) -> CorrectedView:
    """Apply sorted, disjoint ``edits`` to ``source``."""
    check_edits(edits, len(source))
    tokens: list[str] = []
    projections = []
    pos = 0
    for e in edits:
        tokens.extend(source[pos:e.start])
        c_start = len(tokens)
        tokens.extend(e.replacement)
        projections.append(Projection(e, c_start, len(tokens), tuple(source[e.start:e.end])))
        pos = e.end
    tokens.extend(source[pos:])
    return CorrectedView(tuple(tokens), tuple(projections))


def check_projections(length: int, projections: Sequence[Projection]) -> None:
    prev_end = 0
    for p in projections:
        if not 0 <= p.c_start <= p.c_end <= length:
            raise FormatError(f"projection [{p.c_start}, {p.c_end}) out of bounds on {length} tokens")
        if p.c_start < prev_end:
            raise FormatError(f"projection [{p.c_start}, {p.c_end}) overlaps its predecessor")
        if p.c_start == p.c_end and not p.orig_tokens:
            raise FormatError(f"projection at {p.c_start} neither inserts nor deletes")
        prev_end = p.c_end


def invert(corrected: Sequence[str], projections: Sequence[Projection]):
    """Rebuild the source sentence and source-side edits from projections.

    Projections are taken in the given order; their ``edit`` only contributes
    its type label and annotator, coordinates are recomputed.
    """
    check_projections(len(corrected), projections)
    source: list[str] = []
    edits = []
    pos = 0
    for p in projections:
        source.extend(corrected[pos:p.c_start])
        start = len(source)
        source.extend(p.orig_tokens)
        edits.append(Edit(start, len(source), tuple(corrected[p.c_start:p.c_end]),
                          p.edit.etype, p.edit.annotator))
        pos = p.c_end
    source.extend(corrected[pos:])
    return tuple(source), tuple(edits)


def _step_costs(source, target):
    """Suffix DP table: cost[i][j] aligns source[i:] with target[j:]."""
    n, m = len(source), len(target)
    lower_s = [t.lower() for t in source]
    lower_t = [t.lower() for t in target]
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m - 1, -1, -1):
        cost[n][j] = cost[n][j + 1] + _INDEL
    for i in range(n - 1, -1, -1):
        row, below = cost[i], cost[i + 1]
        row[m] = below[m] + _INDEL
        s_tok, s_low = source[i], lower_s[i]
        s_next = source[i + 1] if i + 1 < n else None
        right = row[m]
        for j in range(m - 1, -1, -1):
            t_tok = target[j]
            if s_tok == t_tok:
                # a match is never beaten: one extra indel costs at most _INDEL
                right = below[j + 1]
            else:
                best = below[j + 1] + (_SUB_CASE if s_low == lower_t[j] else _SUB)
                if s_next == t_tok and j + 1 < m and s_tok == target[j + 1]:
                    c = cost[i + 2][j + 2] + _TRANSPOSE
                    if c < best:
                        best = c
                c = below[j] + _INDEL
                if c < best:
                    best = c
                c = right + _INDEL
                right = c if c < best else best
            row[j] = right
    return cost


def align(source: Sequence[str], target: Sequence[str]):
    """Minimal-cost alignment of two token sequences.

    Returns ``(cost, ops)`` where ``ops`` is a list of ``(op, i, j)``: the
    operation code and the source/target positions it starts at. Equal-cost
    ties are resolved left to right preferring match, substitution,
    transposition, deletion, insertion.
    """
    cost = _step_costs(source, target)
    n, m = len(source), len(target)
    ops = []
    i = j = 0
    while i < n or j < m:
        here = cost[i][j]
        if i < n and j < m:
            if source[i] == target[j]:
                if cost[i + 1][j + 1] == here:
                    ops.append((MATCH, i, j))
                    i += 1
                    j += 1
                    continue
            else:
                step = _SUB_CASE if source[i].lower() == target[j].lower() else _SUB
                if cost[i + 1][j + 1] + step == here:
                    ops.append((SUBSTITUTE, i, j))
                    i += 1
                    j += 1
                    continue
                if (i + 1 < n and j + 1 < m and source[i] == target[j + 1]
                        and source[i + 1] == target[j]
                        and cost[i + 2][j + 2] + _TRANSPOSE == here):
                    ops.append((TRANSPOSE, i, j))
                    i += 2
                    j += 2
                    continue
        if i < n and cost[i + 1][j] + _INDEL == here:
            ops.append((DELETE, i, j))
            i += 1
            continue
        ops.append((INSERT, i, j))
        j += 1
    return cost[0][0] / 10, ops


def ops_cost(source, target, ops):
    """Cost of an explicit operation list; independent of the DP table."""
    total = 0
    for op, i, j in ops:
        if op == SUBSTITUTE:
            total += _SUB_CASE if source[i].lower() == target[j].lower() else _SUB
        elif op in (DELETE, INSERT, TRANSPOSE):
            total += _INDEL
    return total / 10


def _op_extent(op):
    """(source tokens consumed, target tokens consumed)."""
    if op in (MATCH, SUBSTITUTE):
        return 1, 1
    if op == TRANSPOSE:
        return 2, 2
    if op == DELETE:
        return 1, 0
    return 0, 1


def extract_edits(source: Sequence[str], hypothesis: Sequence[str], merge: str = MERGED):
    """Edits turning ``source`` into ``hypothesis``.

    With ``merge="merged"`` every maximal run of non-match operations becomes
    one edit; with ``"split"`` each operation is its own edit.
    """
    if merge not in (MERGED, SPLIT):
        raise ValueError(f"merge must be {MERGED!r} or {SPLIT!r}, not {merge!r}")
    _, ops = align(source, hypothesis)
    groups: list[list] = []
    prev_match = True
    for op in ops:
        if op[0] == MATCH:
            prev_match = True
            continue
        if merge == SPLIT or prev_match:
            groups.append([])
        groups[-1].append(op)
        prev_match = False
    edits = []
    for group in groups:
        _, i0, j0 = group[0]
        op, i1, j1 = group[-1]
        di, dj = _op_extent(op)
        edits.append(Edit(i0, i1 + di, tuple(hypothesis[j0:j1 + dj]), EXTRACTED_TYPE))
    return edits
