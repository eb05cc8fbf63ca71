"""Command-line entry point: ``cswgec {generate,filter,stats,score}``.

Exit status: 0 success, 1 usage error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import requests

from .corpus import read_m2, read_pos, read_trees, write_m2
from .edits import MERGED, SPLIT
from .exceptions import CswError, SelectionError, TranslationError
from .pipeline import generate_corpus
from .score import score_corpus, score_from_text
from .select import METHODS, SelectionConfig
from .stats import corpus_stats, filter_mask, parse_lang_pair
from .translate import Segmenter, parse_backend

logger = logging.getLogger("cswgec")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BACKEND = 0, 1, 2, 3

DEFAULTS = {
    "ratio": 0.2,
    "seed": 0,
    "annotator": 0,
    "merge": MERGED,
    "beta": 0.5,
    "source_lang": "en",
    "fail_fast": False,
    "avoid_edits": False,
    "jobs": 1,
    "format": "auto",
    "hyp_format": "auto",
    "side": "source",
    "count_neutral": False,
    "api_key_header": "X-API-Key",
    "max_length_diff": 5,
}

REQUIRED = {
    "generate": ("input", "method", "target_lang", "backend", "out"),
    "filter": ("input", "lang_pair", "out"),
    "stats": ("input",),
    "score": ("ref", "hyp"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="cswgec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", default=S, help="JSON file of defaults; flags override it")
        p.add_argument("--dry-run", action="store_true", default=S,
                       help="validate inputs and print the resolved configuration")
        p.add_argument("-v", "--verbose", action="store_true", default=S)

    g = sub.add_parser("generate", help="synthesize CSW GEC data from an M2 corpus")
    common(g)
    g.add_argument("--input", default=S)
    g.add_argument("--out", default=S)
    g.add_argument("--report", default=S)
    g.add_argument("--method", choices=METHODS, default=S)
    g.add_argument("--target-lang", dest="target_lang", default=S)
    g.add_argument("--source-lang", dest="source_lang", default=S)
    g.add_argument("--ratio", type=float, default=S)
    g.add_argument("--seed", type=int, default=S)
    g.add_argument("--backend", default=S, help="dict:<tsv path> or http:<url>")
    g.add_argument("--cache", default=S, help="translation cache file (http backend)")
    g.add_argument("--api-key-header", dest="api_key_header", default=S)
    g.add_argument("--trees", default=S)
    g.add_argument("--pos", default=S)
    g.add_argument("--lexicon", default=S, help="one word per line, for segmentation")
    g.add_argument("--annotator", type=int, default=S)
    g.add_argument("--avoid-edits", dest="avoid_edits", action="store_true", default=S)
    g.add_argument("--fail-fast", dest="fail_fast", action="store_true", default=S)
    g.add_argument("--jobs", type=int, default=S)

    f = sub.add_parser("filter", help="apply the CSW test-set filters")
    common(f)
    f.add_argument("--input", default=S)
    f.add_argument("--format", choices=("auto", "tsv", "m2"), default=S)
    f.add_argument("--lang-pair", dest="lang_pair", default=S, help="e.g. en-zh")
    f.add_argument("--annotator", type=int, default=S)
    f.add_argument("--max-length-diff", dest="max_length_diff", type=int, default=S)
    f.add_argument("--out", default=S)
    f.add_argument("--report", default=S)

    st = sub.add_parser("stats", help="CSW ratio and switchpoint statistics")
    common(st)
    st.add_argument("--input", default=S)
    st.add_argument("--format", choices=("auto", "text", "tsv", "m2"), default=S)
    st.add_argument("--side", choices=("source", "corrected"), default=S)
    st.add_argument("--annotator", type=int, default=S)
    st.add_argument("--count-neutral", dest="count_neutral", action="store_true", default=S)
    st.add_argument("--out", default=S)

    sc = sub.add_parser("score", help="span-level P/R/F against M2 references")
    common(sc)
    sc.add_argument("--ref", default=S)
    sc.add_argument("--hyp", default=S)
    sc.add_argument("--hyp-format", dest="hyp_format", choices=("auto", "text", "m2"), default=S)
    sc.add_argument("--merge", choices=(MERGED, SPLIT), default=S)
    sc.add_argument("--beta", type=float, default=S)
    sc.add_argument("--out", default=S)
    return parser


def resolve_config(argv):
    """Parse flags and merge them over ``--config`` and the built-in defaults."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config = dict(DEFAULTS)
    if "config" in args:
        try:
            with open(args["config"], encoding="utf-8") as f:
                loaded = json.load(f)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args['config']}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must contain a JSON object")
        config.update({k.replace("-", "_"): v for k, v in loaded.items()})
    config.update(args)
    config["command"] = command
    _validate(config)
    return config


def _validate(cfg):
    command = cfg["command"]
    missing = [k for k in REQUIRED[command] if cfg.get(k) in (None, "")]
    if missing:
        raise UsageError(f"{command}: missing required option(s): "
                         + ", ".join("--" + k.replace("_", "-") for k in missing))
    if command == "generate":
        try:
            sel = SelectionConfig(cfg["method"], float(cfg["ratio"]), int(cfg["seed"]),
                                  bool(cfg["avoid_edits"]))
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from None
        if sel.needs_tree and not cfg.get("trees"):
            raise UsageError(f"tree required: method {sel.method} needs --trees")
        if sel.needs_pos and not cfg.get("pos"):
            raise UsageError(f"pos required: method {sel.method} needs --pos")
        if int(cfg["jobs"]) < 1:
            raise UsageError("--jobs must be at least 1")
        if cfg["target_lang"] == cfg["source_lang"]:
            raise UsageError("source and target language must differ")
        backend = str(cfg["backend"])
        if not backend.startswith(("dict:", "http:", "https:")):
            raise UsageError("--backend must be dict:<path> or http:<url>")
    if command == "filter":
        try:
            parse_lang_pair(cfg["lang_pair"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if command == "score":
        if cfg["merge"] not in (MERGED, SPLIT):
            raise UsageError(f"--merge must be {MERGED} or {SPLIT}")
        if float(cfg["beta"]) <= 0:
            raise UsageError("--beta must be positive")


# ---------------------------------------------------------------------------
# output helpers


class _AtomicOutputs:
    """Stage outputs in temp files; rename them all only on success."""

    def __init__(self):
        self._staged = []

    def add(self, path, data: bytes):
        path = Path(path)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        self._staged.append((tmp, path))

    def commit(self):
        for tmp, path in self._staged:
            os.replace(tmp, path)
        self._staged = []

    def discard(self):
        for tmp, _ in self._staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        self._staged = []


def _json_bytes(obj):
    return (json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def _detect(path, fmt, choices):
    if fmt != "auto":
        return fmt
    suffix = Path(path).suffix.lower().lstrip(".")
    return suffix if suffix in choices else choices[-1]


def _load_corpus(cfg, annotator=0):
    corpus = read_m2(_read_bytes(cfg["input"]))
    if cfg.get("trees"):
        corpus = read_trees(_read_bytes(cfg["trees"]), corpus, annotator)
    if cfg.get("pos"):
        corpus = read_pos(_read_bytes(cfg["pos"]), corpus, annotator)
    return corpus


def _read_tsv_pairs(path):
    pairs = []
    text = _read_bytes(path).decode("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.count("\t") != 1:
            raise CswError(f"{path}:{lineno}: expected 'orig<TAB>corrected'")
        orig, cor = line.split("\t")
        pairs.append((tuple(orig.split()), tuple(cor.split())))
    return pairs


# ---------------------------------------------------------------------------
# commands


def cmd_generate(cfg, out):
    annotator = int(cfg["annotator"])
    sel = SelectionConfig(cfg["method"], float(cfg["ratio"]), int(cfg["seed"]),
                          bool(cfg["avoid_edits"]))
    corpus = _load_corpus(cfg, annotator)
    segmenter = Segmenter.from_file(cfg["lexicon"]) if cfg.get("lexicon") else Segmenter()
    try:
        backend = parse_backend(cfg["backend"], cfg.get("cache"), cfg["api_key_header"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.get("dry_run"):
        return corpus
    pairs, report = generate_corpus(
        corpus, sel, backend, segmenter, target_lang=cfg["target_lang"],
        source_lang=cfg["source_lang"], annotator=annotator,
        fail_fast=bool(cfg["fail_fast"]), jobs=int(cfg["jobs"]),
    )
    out.add(cfg["out"], write_m2(p.to_sentence(annotator) for p in pairs))
    if cfg.get("report"):
        out.add(cfg["report"], _json_bytes(report.to_dict()))
    logger.info("generated %d sentences (%d passed through, %d skipped)",
                report.sentencesOut, report.sentencesPassedThrough, report.sentencesSkipped)


def cmd_filter(cfg, out):
    fmt = _detect(cfg["input"], cfg["format"], ("m2", "tsv"))
    annotator = int(cfg["annotator"])
    if fmt == "m2":
        corpus = read_m2(_read_bytes(cfg["input"]))
        pairs = [(s.tokens, s.corrected(annotator)) for s in corpus]
    else:
        corpus = None
        pairs = _read_tsv_pairs(cfg["input"])
    if cfg.get("dry_run"):
        return
    mask, report = filter_mask(pairs, cfg["lang_pair"], int(cfg["max_length_diff"]))
    if corpus is not None:
        data = write_m2(s for s, keep in zip(corpus, mask) if keep)
    else:
        data = "".join(f"{' '.join(o)}\t{' '.join(c)}\n"
                       for (o, c), keep in zip(pairs, mask) if keep).encode("utf-8")
    out.add(cfg["out"], data)
    if cfg.get("report"):
        out.add(cfg["report"], _json_bytes(report.to_dict()))


def cmd_stats(cfg, out):
    fmt = _detect(cfg["input"], cfg["format"], ("m2", "tsv", "text"))
    annotator = int(cfg["annotator"])
    side = cfg["side"]
    if fmt == "m2":
        corpus = read_m2(_read_bytes(cfg["input"]))
        sents = [s.tokens if side == "source" else s.corrected(annotator) for s in corpus]
    elif fmt == "tsv":
        pairs = _read_tsv_pairs(cfg["input"])
        sents = [o if side == "source" else c for o, c in pairs]
    else:
        text = _read_bytes(cfg["input"]).decode("utf-8")
        sents = [tuple(line.split()) for line in text.splitlines() if line.strip()]
    if cfg.get("dry_run"):
        return
    data = _json_bytes(corpus_stats(sents, bool(cfg["count_neutral"])).to_dict())
    if cfg.get("out"):
        out.add(cfg["out"], data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_score(cfg, out):
    refs = read_m2(_read_bytes(cfg["ref"]))
    fmt = _detect(cfg["hyp"], cfg["hyp_format"], ("m2", "text"))
    sources = [s.tokens for s in refs]
    ref_sets = [s.edit_sets for s in refs]
    if fmt == "m2":
        hyps = read_m2(_read_bytes(cfg["hyp"]))
        if [h.tokens for h in hyps] != sources:
            raise CswError("hypothesis M2 source sentences differ from the reference")
        if cfg.get("dry_run"):
            return
        score = score_corpus(sources, [h.edits(min(h.edit_sets)) for h in hyps], ref_sets,
                             float(cfg["beta"]))
    else:
        text = _read_bytes(cfg["hyp"]).decode("utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        hyps = [tuple(line.split()) for line in lines]
        if len(hyps) != len(sources):
            raise CswError(f"{len(hyps)} hypothesis lines for {len(sources)} reference sentences")
        if cfg.get("dry_run"):
            return
        score = score_from_text(sources, hyps, ref_sets, cfg["merge"], float(cfg["beta"]))
    if cfg.get("out"):
        out.add(cfg["out"], _json_bytes(score.to_dict()))
    print(score.summary())


COMMANDS = {
    "generate": cmd_generate,
    "filter": cmd_filter,
    "stats": cmd_stats,
    "score": cmd_score,
}


def run(argv=None):
    """Run one command; returns the exit status instead of exiting."""
    out = _AtomicOutputs()
    try:
        cfg = resolve_config(argv)
        logging.basicConfig(level=logging.INFO if cfg.get("verbose") else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[cfg["command"]](cfg, out)
        if cfg.get("dry_run"):
            shown = {k: v for k, v in sorted(cfg.items()) if k != "dry_run"}
            print(json.dumps(shown, indent=2, sort_keys=True, ensure_ascii=False))
            return EXIT_OK
        out.commit()
        return EXIT_OK
    except (UsageError, SelectionError) as exc:
        _diag(exc)
        return EXIT_USAGE
    except (TranslationError, requests.RequestException) as exc:
        _diag(exc)
        return EXIT_BACKEND
    except (CswError, OSError, UnicodeDecodeError) as exc:
        _diag(exc)
        return EXIT_DATA
    finally:
        out.discard()


def _diag(exc):
    message = " ".join(str(exc).split())
    print(f"cswgec: error: {message}", file=sys.stderr)


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
