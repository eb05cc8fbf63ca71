"""Translation backends, the script-run segmenter and a persistent cache."""

from __future__ import annotations

import hashlib
import logging
import os
import threading
import time
from pathlib import Path
from typing import Iterable, Mapping, Protocol

import requests

from .exceptions import TranslationError
from .scripts import HAN, HANGUL, script_of

logger = logging.getLogger(__name__)

NO_SPACE_LANGS = frozenset({"zh", "ja"})


def joiner(lang):
    return "" if lang in NO_SPACE_LANGS else " "


def _check_request(text, source, target):
    if not text:
        raise ValueError("translation text must be non-empty")
    if source == target:
        raise ValueError(f"source and target language are both {source!r}")


class Backend(Protocol):
    def translate(self, text: str, source: str, target: str) -> str: ...


class DictionaryBackend:
    """Deterministic phrase-table translation.

    Exact phrase lookup first; if ``per_token`` is set, fall back to
    translating token by token and joining with the target language's joiner.
    """

    def __init__(self, table: Mapping[str, str], per_token: bool = True):
        self.table = dict(table)
        self.per_token = per_token

    @classmethod
    def from_tsv(cls, path, per_token=True):
        table = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n").rstrip("\r")
                if not line.strip():
                    continue
                if "\t" not in line:
                    raise TranslationError(f"{path}:{lineno}: expected 'phrase<TAB>translation'")
                src, tgt = line.split("\t", 1)
                table[src] = tgt
        return cls(table, per_token=per_token)

    def translate(self, text, source, target):
        _check_request(text, source, target)
        out = self.table.get(text)
        if out is None and self.per_token:
            words = text.split()
            missing = [w for w in words if not self.table.get(w)]
            if not missing:
                out = joiner(target).join(self.table[w] for w in words)
            elif len(words) > 1:
                raise TranslationError(f"untranslatable: {text!r} (missing {', '.join(missing)})")
        if not out or not out.strip():
            raise TranslationError(f"untranslatable: {text!r}")
        return out


def request_hash(source, target, text):
    digest = hashlib.blake2b(f"{source}\t{target}\t{text}".encode("utf-8"), digest_size=8)
    return digest.hexdigest()


class TranslationCache:
    """Append-only log of ``hash<TAB>src<TAB>tgt<TAB>text<TAB>translation`` lines.

    Reads are served from memory; appends go through a single lock so the
    file only ever receives whole records.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._records: dict[str, tuple[str, str, str, str]] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.endswith("\n"):
                    logger.warning("%s:%d: truncated cache record skipped", self.path, lineno)
                    continue
                fields = line[:-1].split("\t")
                if len(fields) != 5 or not fields[4]:
                    logger.warning("%s:%d: malformed cache record skipped", self.path, lineno)
                    continue
                key, src, tgt, text, translation = fields
                if request_hash(src, tgt, text) != key:
                    logger.warning("%s:%d: cache record hash mismatch, skipped", self.path, lineno)
                    continue
                self._records[key] = (src, tgt, text, translation)

    def __len__(self):
        return len(self._records)

    def lookup(self, text, source, target):
        record = self._records.get(request_hash(source, target, text))
        if record is None or record[:3] != (source, target, text):
            return None
        return record[3]

    def append(self, text, source, target, translation):
        translation = " ".join(translation.split())
        if not translation:
            raise ValueError("refusing to cache an empty translation")
        if any(ch in text for ch in "\t\n"):
            raise ValueError("cache keys must not contain tabs or newlines")
        key = request_hash(source, target, text)
        line = f"{key}\t{source}\t{target}\t{text}\t{translation}\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)
                f.flush()
            self._records[key] = (source, target, text, translation)

    def compact(self):
        """Rewrite the log keeping only the latest record per key."""
        with self._lock:
            tmp = self.path.with_name(self.path.name + ".tmp")
            with open(tmp, "w", encoding="utf-8") as f:
                for key, (src, tgt, text, translation) in self._records.items():
                    f.write(f"{key}\t{src}\t{tgt}\t{text}\t{translation}\n")
            os.replace(tmp, self.path)


class HttpBackend:
    """POSTs ``{"q", "source", "target"}`` and reads ``translatedText``.

    Retries connection errors, 429 and 5xx responses with exponential backoff.
    """

    def __init__(self, url, api_key=None, api_key_header="X-API-Key", cache=None,
                 max_attempts=5, base_delay=0.25, factor=2.0, timeout=30.0,
                 session=None, sleep=time.sleep):
        self.url = url
        self.api_key = api_key
        self.api_key_header = api_key_header
        self.cache = cache
        self.max_attempts = max_attempts
        self.base_delay = base_delay
        self.factor = factor
        self.timeout = timeout
        self.session = session or requests.Session()
        self.sleep = sleep

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers[self.api_key_header] = self.api_key
        return headers

    def _post(self, payload):
        status = None
        for attempt in range(self.max_attempts):
            if attempt:
                self.sleep(self.base_delay * self.factor ** (attempt - 1))
            try:
                resp = self.session.post(self.url, json=payload, headers=self._headers(),
                                         timeout=self.timeout)
            except requests.RequestException as exc:
                logger.warning("translation request failed (attempt %d): %s", attempt + 1, exc)
                continue
            status = resp.status_code
            if status == 429 or status >= 500:
                logger.warning("translation backend returned %d (attempt %d)", status, attempt + 1)
                continue
            if status != 200:
                raise TranslationError(f"translation backend returned HTTP {status}", status=status)
            try:
                return resp.json()["translatedText"]
            except (ValueError, KeyError, TypeError):
                raise TranslationError("response has no 'translatedText' field", status=status) from None
        raise TranslationError(
            f"translation failed after {self.max_attempts} attempts (last status {status})",
            status=status,
        )

    def translate(self, text, source, target):
        _check_request(text, source, target)
        if self.cache is not None:
            hit = self.cache.lookup(text, source, target)
            if hit is not None:
                return hit
        out = self._post({"q": text, "source": source, "target": target})
        if not isinstance(out, str) or not out.strip():
            raise TranslationError(f"empty translation for {text!r}")
        if self.cache is not None:
            self.cache.append(text, source, target, out)
        return out


class Segmenter:
    """Whitespace split, then split at script boundaries.

    With a lexicon, Han/Hangul positions first try a greedy longest match
    against it; a matched word may run into neighbouring kana (``答え``).
    """

    def __init__(self, lexicon: Iterable[str] = ()):
        self.lexicon = frozenset(w for w in lexicon if w)
        self._max_len = max((len(w) for w in self.lexicon), default=0)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls(line.strip() for line in f)

    def _lexicon_match(self, chunk, i):
        if not self.lexicon or script_of(chunk[i]) not in (HAN, HANGUL):
            return 0
        for size in range(min(self._max_len, len(chunk) - i), 1, -1):
            if chunk[i:i + size] in self.lexicon:
                return size
        return 0

    def _split_chunk(self, chunk):
        out = []
        i, n = 0, len(chunk)
        scripts = [script_of(ch) for ch in chunk]
        while i < n:
            size = self._lexicon_match(chunk, i)
            if size:
                out.append(chunk[i:i + size])
                i += size
                continue
            j = i + 1
            while j < n and scripts[j] == scripts[i] and not self._lexicon_match(chunk, j):
                j += 1
            out.append(chunk[i:j])
            i = j
        return out

    def __call__(self, text, lang=None):
        tokens = []
        for chunk in text.split():
            tokens.extend(self._split_chunk(chunk))
        return tokens


def segment(text, lang=None, lexicon=()):
    """Tokenize translated text with the default script-run segmenter."""
    return Segmenter(lexicon)(text, lang)


def parse_backend(descriptor, cache_path=None, api_key_header="X-API-Key", per_token=True):
    """Build a backend from ``dict:<path>`` or ``http:<url>``."""
    kind, _, target = descriptor.partition(":")
    if descriptor.startswith(("http://", "https://")):
        kind, target = "http", descriptor
    if kind == "dict" and target:
        return DictionaryBackend.from_tsv(target, per_token=per_token)
    if kind == "http" and target:
        cache = TranslationCache(cache_path) if cache_path else None
        return HttpBackend(target, api_key=os.environ.get("CSW_TRANSLATE_API_KEY"),
                           api_key_header=api_key_header, cache=cache)
    raise ValueError(f"backend must be 'dict:<path>' or 'http:<url>', got {descriptor!r}")
