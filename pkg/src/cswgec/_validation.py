"""Input checks shared by the estimators and the CLI."""

from .corpus import AnnotatedSentence
from .exceptions import FormatError, SelectionError


def check_corpus(X, require_tree=False, require_pos=False):
    """Return ``X`` as a list of AnnotatedSentence, checking required annotations."""
    corpus = list(X)
    for i, sent in enumerate(corpus):
        if not isinstance(sent, AnnotatedSentence):
            raise FormatError(f"item {i} is {type(sent).__name__}, expected AnnotatedSentence")
        if require_tree and sent.tree is None:
            raise SelectionError(f"tree required (sentence {i} has none)")
        if require_pos and sent.pos is None:
            raise SelectionError(f"pos required (sentence {i} has none)")
    return corpus


def check_pairs(X):
    """Return ``X`` as a list of (orig, corrected) token tuples."""
    pairs = []
    for i, item in enumerate(X):
        try:
            orig, corrected = item
        except (TypeError, ValueError):
            raise FormatError(f"item {i} is not an (orig, corrected) pair") from None
        if isinstance(orig, str) or isinstance(corrected, str):
            orig, corrected = str(orig).split(), str(corrected).split()
        pairs.append((tuple(orig), tuple(corrected)))
    return pairs
