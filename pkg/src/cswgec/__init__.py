"""Synthetic code-switched GEC data generation and evaluation."""

from .corpus import (AnnotatedSentence, Constituent, Edit, ParseTree, dumps_m2, loads_m2,
                     parse_tree, read_m2, read_pos, read_trees, write_m2)
from .edits import CorrectedView, Projection, align, apply_edits, extract_edits, invert
from .estimators import CswAugmenter, CswFilter
from .exceptions import (AlignmentError, CswError, FormatError, SelectionError,
                         TranslationError)
from .pipeline import CswPair, GenerationReport, generate_corpus, generate_pair
from .score import MatchCounts, Score, match_edits, score_corpus, score_from_text
from .select import (METHODS, SelectionConfig, SelectionContext, SelectionResult,
                     select_spans)
from .stats import Lang, classify_token, corpus_stats, filter_csw, sentence_stats
from .translate import (DictionaryBackend, HttpBackend, Segmenter, TranslationCache,
                        segment)

__version__ = "0.1.0"
