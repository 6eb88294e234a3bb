import json
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import pytest

from banglanext.server import SuggestServer
from banglanext.text import CleaningConfig


@pytest.fixture(scope="module")
def server(tiny_bundle):
    srv = SuggestServer(tiny_bundle, port=0, cleaning=CleaningConfig.romanized()).start()
    yield srv
    srv.shutdown()


def get(server, path):
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{server.port}{path}") as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def post(server, path, payload, raw: bytes | None = None):
    data = raw if raw is not None else json.dumps(payload).encode("utf-8")
    req = urllib.request.Request(
        f"http://127.0.0.1:{server.port}{path}",
        data=data,
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


class TestHealth:
    def test_ok(self, server, tiny_bundle):
        status, body = get(server, "/api/health")
        assert status == 200
        assert body["status"] == "ok"
        assert body["bundle_orders"] == [1, 2, 3, 4, 5]
        assert body["vocab_size"] == tiny_bundle.vocabulary.size

    def test_loading_returns_503(self, tiny_bundle):
        srv = SuggestServer(None, port=0).start()
        try:
            status, body = get(srv, "/api/health")
            assert status == 503 and body["status"] == "loading"
            status, _ = post(srv, "/api/suggest", {"context": "ami", "k": 1})
            assert status == 503
            srv.set_bundle(tiny_bundle)
            status, _ = get(srv, "/api/health")
            assert status == 200
        finally:
            srv.shutdown()


class TestSuggest:
    def test_happy_path(self, server):
        status, body = post(server, "/api/suggest", {"context": "ami ajke bhalo bhat", "k": 3})
        assert status == 200
        assert body["order_used"] == 4
        assert isinstance(body["latency_ms"], float)
        cands = body["candidates"]
        assert len(cands) == 3
        assert cands[0]["token"] == "khai"
        probs = [c["probability"] for c in cands]
        assert probs == sorted(probs, reverse=True)

    def test_empty_context_400(self, server):
        assert post(server, "/api/suggest", {"context": "", "k": 1})[0] == 400
        assert post(server, "/api/suggest", {"k": 1})[0] == 400
        assert post(server, "/api/suggest", {"context": 42, "k": 1})[0] == 400

    def test_unknown_engine_422(self, server):
        assert post(server, "/api/suggest", {"context": "ami", "engine": "quantum"})[0] == 422

    def test_malformed_json_400(self, server):
        assert post(server, "/api/suggest", None, raw=b"{nope")[0] == 400

    def test_k_clamped_to_20(self, server, tiny_bundle):
        status, body = post(server, "/api/suggest", {"context": "ami", "k": 999})
        assert status == 200
        assert len(body["candidates"]) <= 20
        status, body = post(server, "/api/suggest", {"context": "ami", "k": -3})
        assert status == 200
        assert len(body["candidates"]) == 1

    def test_statistical_engine(self, server):
        status, body = post(
            server, "/api/suggest", {"context": "ami ajke bhalo bhat", "engine": "statistical"}
        )
        assert status == 200
        assert body["candidates"][0]["token"] == "khai"


class TestComplete:
    def test_happy_path(self, server):
        status, body = post(server, "/api/complete", {"prefix": "ami ajke bhalo bhat"})
        assert status == 200
        assert body["tokens"] == ["ami", "ajke", "bhalo", "bhat", "khai", "।"]
        assert body["terminated_by"] == "।"
        assert body["steps"] == 2

    def test_max_len_one(self, server):
        status, body = post(server, "/api/complete", {"prefix": "tumi", "max_len": 1})
        assert status == 200
        assert body["steps"] == 1
        assert len(body["tokens"]) == 2

    def test_bad_max_len(self, server):
        assert post(server, "/api/complete", {"prefix": "ami", "max_len": 0})[0] == 400
        assert post(server, "/api/complete", {"prefix": "ami", "max_len": "x"})[0] == 400


class TestConcurrencyAndStatelessness:
    def test_identical_bodies_modulo_latency(self, server):
        payload = {"context": "ami ajke", "k": 4}
        bodies = [post(server, "/api/suggest", payload)[1] for _ in range(5)]
        for body in bodies:
            body.pop("latency_ms")
        assert all(b == bodies[0] for b in bodies)

    def test_parallel_matches_sequential(self, server):
        contexts = [f"ami ajke bhalo bhat {i}" for i in range(10)] + ["tumi kalke", "she raate"]
        payloads = [{"context": c.replace(str(i), "khai"), "k": 5} for i, c in enumerate(contexts)]
        sequential = []
        for p in payloads:
            status, body = post(server, "/api/suggest", p)
            assert status == 200
            body.pop("latency_ms")
            sequential.append(body)
        with ThreadPoolExecutor(max_workers=16) as pool:
            parallel = list(pool.map(lambda p: post(server, "/api/suggest", p), payloads * 4))
        for i, (status, body) in enumerate(parallel):
            assert status == 200
            body.pop("latency_ms")
            assert body == sequential[i % len(payloads)]


class TestCorsAndStatic:
    def test_preflight(self, server):
        req = urllib.request.Request(
            f"http://127.0.0.1:{server.port}/api/suggest", method="OPTIONS"
        )
        with urllib.request.urlopen(req) as resp:
            assert resp.status == 204
            assert resp.headers["Access-Control-Allow-Origin"] == "*"

    def test_static_assets(self, tiny_bundle, tmp_path):
        (tmp_path / "index.html").write_text("<html>ok</html>")
        srv = SuggestServer(tiny_bundle, port=0, static_dir=str(tmp_path)).start()
        try:
            with urllib.request.urlopen(f"http://127.0.0.1:{srv.port}/") as resp:
                assert resp.status == 200
                assert b"ok" in resp.read()
            status, _ = get(srv, "/missing.js")
            assert status == 404
        finally:
            srv.shutdown()

    def test_unknown_endpoint_404(self, server):
        assert get(server, "/api/nope")[0] == 404
        assert post(server, "/api/nope", {})[0] == 404
