import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
import requests
from hypothesis import given, settings
from hypothesis import strategies as st

from cswgec.exceptions import TranslationError
from cswgec.translate import (DictionaryBackend, HttpBackend, Segmenter, TranslationCache,
                              parse_backend, request_hash, segment)


def test_dictionary_phrase():
    assert DictionaryBackend({"world": "世界"}).translate("world", "en", "zh") == "世界"
    backend = DictionaryBackend({"so many questions": "非常に多くの質問"})
    assert backend.translate("so many questions", "en", "ja") == "非常に多くの質問"


def test_dictionary_per_token_joiners():
    table = {"so": "そう", "many": "多く", "big": "큰", "dog": "개"}
    assert DictionaryBackend(table).translate("so many", "en", "ja") == "そう多く"
    assert DictionaryBackend(table).translate("big dog", "en", "ko") == "큰 개"


def test_dictionary_miss():
    with pytest.raises(TranslationError, match="untranslatable"):
        DictionaryBackend({"so": "そう"}, per_token=False).translate("so many", "en", "ja")
    with pytest.raises(TranslationError, match="missing many"):
        DictionaryBackend({"so": "そう"}).translate("so many", "en", "ja")


def test_request_validation():
    with pytest.raises(ValueError):
        DictionaryBackend({}).translate("", "en", "zh")
    with pytest.raises(ValueError):
        DictionaryBackend({}).translate("a", "en", "en")


def test_dictionary_from_tsv(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("world\t世界\nso many\t非常に多く\n\n", encoding="utf-8")
    backend = DictionaryBackend.from_tsv(path)
    assert backend.translate("so many", "en", "ja") == "非常に多く"


# --- segmentation -----------------------------------------------------------


def test_segment_single_script():
    assert segment("世界", "zh") == ["世界"]


def test_segment_script_boundaries():
    assert segment("答え に", "ja") == ["答", "え", "に"]
    assert segment("答え に", "ja", lexicon=["答え"]) == ["答え", "に"]


def test_segment_whitespace():
    assert segment("so many", "en") == ["so", "many"]


def test_segment_mixed_scripts():
    assert segment("2023年にソウルへ", "ja") == ["2023", "年", "に", "ソウル", "へ"]
    assert segment("world?", "en") == ["world", "?"]


def test_segment_lexicon_longest_match():
    seg = Segmenter(["多く", "非常", "非常に", "質問"])
    assert seg("非常に多くの質問", "ja") == ["非常に", "多く", "の", "質問"]


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="ab 世界答えにソウル한국12?!　", min_size=1, max_size=20),
       st.lists(st.sampled_from(["世界", "答え", "한국"]), max_size=3))
def test_segment_preserves_characters(text, lexicon):
    tokens = Segmenter(lexicon)(text)
    assert all(tokens)
    assert "".join(tokens) == "".join(text.split())


# --- cache ------------------------------------------------------------------


def test_cache_read_your_write(tmp_path):
    cache = TranslationCache(tmp_path / "c.log")
    assert cache.lookup("world", "en", "zh") is None
    cache.append("world", "en", "zh", "世界")
    assert cache.lookup("world", "en", "zh") == "世界"
    assert TranslationCache(tmp_path / "c.log").lookup("world", "en", "zh") == "世界"


def test_cache_last_writer_wins(tmp_path):
    path = tmp_path / "c.log"
    cache = TranslationCache(path)
    cache.append("world", "en", "zh", "世界")
    cache.append("world", "en", "zh", "天下")
    assert TranslationCache(path).lookup("world", "en", "zh") == "天下"
    cache.compact()
    assert path.read_text(encoding="utf-8").count("\n") == 1
    assert TranslationCache(path).lookup("world", "en", "zh") == "天下"


def test_cache_record_format(tmp_path):
    path = tmp_path / "c.log"
    TranslationCache(path).append("world", "en", "zh", "世界")
    key, src, tgt, text, translation = path.read_text(encoding="utf-8").rstrip("\n").split("\t")
    assert (src, tgt, text, translation) == ("en", "zh", "world", "世界")
    assert key == request_hash("en", "zh", "world") and len(key) == 16


def test_cache_skips_corrupt_records(tmp_path, caplog):
    path = tmp_path / "c.log"
    good = f"{request_hash('en', 'zh', 'world')}\ten\tzh\tworld\t世界\n"
    path.write_text("garbage line\n" + good + "deadbeefdeadbeef\ten\tzh\tx\ty\n"
                    + "partial\trecord", encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        cache = TranslationCache(path)
    assert len(cache) == 1
    assert cache.lookup("world", "en", "zh") == "世界"
    assert len(caplog.records) == 3


def test_cache_collision_guard(tmp_path):
    path = tmp_path / "c.log"
    cache = TranslationCache(path)
    key = request_hash("en", "zh", "world")
    cache._records[key] = ("en", "zh", "other text", "x")
    assert cache.lookup("world", "en", "zh") is None


def test_cache_concurrent_appends(tmp_path):
    path = tmp_path / "c.log"
    cache = TranslationCache(path)

    def work(k):
        for i in range(50):
            cache.append(f"w{k}_{i}", "en", "zh", f"t{k}_{i}")

    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(TranslationCache(path)) == 200


# --- HTTP ---------------------------------------------------------------------


class FakeResponse:
    def __init__(self, status, payload):
        self.status_code = status
        self._payload = payload

    def json(self):
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append((url, json, headers))
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def test_http_request_shape_and_cache(tmp_path):
    session = FakeSession([FakeResponse(200, {"translatedText": "世界"})])
    cache = TranslationCache(tmp_path / "c.log")
    backend = HttpBackend("http://x/t", api_key="k", api_key_header="X-Key", cache=cache,
                          session=session, sleep=lambda s: None)
    assert backend.translate("world", "en", "zh") == "世界"
    assert backend.translate("world", "en", "zh") == "世界"
    assert len(session.calls) == 1
    url, payload, headers = session.calls[0]
    assert payload == {"q": "world", "source": "en", "target": "zh"}
    assert headers["X-Key"] == "k"


def test_http_retries_with_backoff():
    delays = []
    session = FakeSession([
        requests.ConnectionError("down"),
        FakeResponse(503, {}),
        FakeResponse(429, {}),
        FakeResponse(200, {"translatedText": "세계"}),
    ])
    backend = HttpBackend("http://x", session=session, sleep=delays.append)
    assert backend.translate("world", "en", "ko") == "세계"
    assert delays == [0.25, 0.5, 1.0]


def test_http_gives_up_after_five_attempts():
    delays = []
    session = FakeSession([FakeResponse(500, {})] * 5)
    backend = HttpBackend("http://x", session=session, sleep=delays.append)
    with pytest.raises(TranslationError) as info:
        backend.translate("world", "en", "ko")
    assert info.value.status == 500
    assert delays == [0.25, 0.5, 1.0, 2.0]


def test_http_client_error_not_retried():
    session = FakeSession([FakeResponse(403, {})])
    with pytest.raises(TranslationError, match="403"):
        HttpBackend("http://x", session=session, sleep=lambda s: None).translate("a", "en", "zh")
    assert len(session.calls) == 1


def test_http_empty_translation():
    session = FakeSession([FakeResponse(200, {"translatedText": " "})])
    with pytest.raises(TranslationError, match="empty"):
        HttpBackend("http://x", session=session).translate("a", "en", "zh")


@pytest.fixture
def local_server():
    seen = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
            seen.append((body, self.headers.get("X-API-Key")))
            data = json.dumps({"translatedText": body["q"].upper()}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/translate", seen
    server.shutdown()


def test_http_against_local_server(local_server, monkeypatch):
    url, seen = local_server
    monkeypatch.setenv("CSW_TRANSLATE_API_KEY", "secret")
    backend = parse_backend(f"http:{url}")
    assert backend.translate("so many", "en", "zh") == "SO MANY"
    assert seen == [({"q": "so many", "source": "en", "target": "zh"}, "secret")]


def test_parse_backend_errors():
    with pytest.raises(ValueError):
        parse_backend("ftp:somewhere")
