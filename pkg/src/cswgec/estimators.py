"""scikit-learn compatible wrappers around the generation and filter steps."""

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_corpus, check_pairs
from .pipeline import generate_corpus
from .select import SelectionConfig
from .stats import filter_csw, parse_lang_pair
from .translate import Segmenter


class CswAugmenter(TransformerMixin, BaseEstimator):
    """Rewrite an annotated corpus into code-switched GEC training data.

    Parameters
    ----------
    backend : object with ``translate(text, source, target)``
        Translation backend, e.g. :class:`~cswgec.translate.DictionaryBackend`.
    method : str, default="ratio-token"
        One of the span-selection methods in :data:`cswgec.select.METHODS`.
    ratio : float, default=0.2
        Target fraction of switched tokens.
    seed : int, default=0
    target_lang, source_lang : str
    lexicon : iterable of str, optional
        Extra words for the segmenter.
    annotator : int, default=0
        Whose edits are carried over; other annotators are dropped.
    avoid_edits : bool, default=False
    fail_fast : bool, default=False
        Raise on the first translation failure instead of skipping.
    n_jobs : int, default=1

    Attributes
    ----------
    config_ : SelectionConfig
    pairs_ : list of CswPair
        Result of the last ``transform``.
    report_ : GenerationReport
    """

    def __init__(self, backend=None, method="ratio-token", ratio=0.2, seed=0,
                 target_lang="zh", source_lang="en", lexicon=None, annotator=0,
                 avoid_edits=False, fail_fast=False, n_jobs=1):
        self.backend = backend
        self.method = method
        self.ratio = ratio
        self.seed = seed
        self.target_lang = target_lang
        self.source_lang = source_lang
        self.lexicon = lexicon
        self.annotator = annotator
        self.avoid_edits = avoid_edits
        self.fail_fast = fail_fast
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        if self.backend is None:
            raise ValueError("a translation backend is required")
        self.config_ = SelectionConfig(self.method, self.ratio, self.seed, self.avoid_edits)
        self.segmenter_ = Segmenter(self.lexicon or ())
        if X is not None:
            check_corpus(X, self.config_.needs_tree, self.config_.needs_pos)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        corpus = check_corpus(X, self.config_.needs_tree, self.config_.needs_pos)
        self.pairs_, self.report_ = generate_corpus(
            corpus, self.config_, self.backend, self.segmenter_,
            target_lang=self.target_lang, source_lang=self.source_lang,
            annotator=self.annotator, fail_fast=self.fail_fast, jobs=self.n_jobs,
        )
        return [p.to_sentence(self.annotator) for p in self.pairs_]


class CswFilter(TransformerMixin, BaseEstimator):
    """Drop (orig, corrected) pairs that fail the CSW test-set rules."""

    def __init__(self, lang_pair="en-zh", max_length_diff=5):
        self.lang_pair = lang_pair
        self.max_length_diff = max_length_diff

    def fit(self, X=None, y=None):
        self.other_lang_ = parse_lang_pair(self.lang_pair)
        return self

    def transform(self, X):
        check_is_fitted(self, "other_lang_")
        kept, self.report_ = filter_csw(check_pairs(X), self.lang_pair, self.max_length_diff)
        return kept
