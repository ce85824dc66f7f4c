"""HTTP scoring service: POST /score over a loaded artifact.

Request and response bodies follow the score-provider wire contract:

    request:  {"sentences": [{"doc_id": ..., "line_no": ..., "text": ...}, ...]}
    response: {"scores":    [{"doc_id": ..., "line_no": ..., "score": ...}, ...]}

Scores come back in request order.  Each sentence is scored on its own,
so a given artifact returns the same numbers regardless of how clients
batch their requests, and the same numbers emit_scores writes to file.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from bert_scorer.scoring import ScorerArtifact, load_artifact, score_texts

logger = logging.getLogger("bert_scorer.server")


class RequestError(ValueError):
    """The request body does not follow the wire contract."""


def parse_request(body: bytes) -> list[tuple[str, int, str]]:
    """Validate a /score request body; returns (doc_id, line_no, text) rows."""
    try:
        payload = json.loads(body)
    except ValueError:
        raise RequestError("request body is not valid JSON") from None
    if not isinstance(payload, dict) or not isinstance(payload.get("sentences"), list):
        raise RequestError('request body is not {"sentences": [...]}')
    rows: list[tuple[str, int, str]] = []
    for item in payload["sentences"]:
        if not isinstance(item, dict):
            raise RequestError(f"malformed sentence entry {item!r}")
        try:
            doc_id = item["doc_id"]
            line_no = item["line_no"]
            text = item["text"]
        except KeyError as exc:
            raise RequestError(f"sentence entry missing field {exc}") from None
        if not isinstance(doc_id, str) or not doc_id:
            raise RequestError(f"malformed doc_id {doc_id!r}")
        if isinstance(line_no, bool) or not isinstance(line_no, int):
            raise RequestError(f"malformed line_no {line_no!r}")
        if not isinstance(text, str):
            raise RequestError(f"text for {doc_id}:{line_no} is not a string")
        rows.append((doc_id, line_no, text))
    return rows


def score_request(artifact: ScorerArtifact, rows: list[tuple[str, int, str]]) -> dict:
    scores = score_texts(artifact, [text for _, _, text in rows])
    return {
        "scores": [
            {"doc_id": doc_id, "line_no": line_no, "score": score}
            for (doc_id, line_no, _), score in zip(rows, scores)
        ]
    }


class _Handler(BaseHTTPRequestHandler):
    artifact: ScorerArtifact

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self) -> None:  # noqa: N802 (BaseHTTPRequestHandler API)
        if self.path.rstrip("/") != "/score":
            self._reply(404, {"error": f"no such endpoint: {self.path}"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        try:
            rows = parse_request(self.rfile.read(length))
        except RequestError as exc:
            self._reply(400, {"error": str(exc)})
            return
        self._reply(200, score_request(self.artifact, rows))

    def do_GET(self) -> None:  # noqa: N802
        self._reply(404, {"error": "only POST /score is supported"})

    def log_message(self, format: str, *args) -> None:
        logger.debug("%s - %s", self.address_string(), format % args)


def make_server(
    artifact_dir: str | Path, host: str = "127.0.0.1", port: int = 0
) -> ThreadingHTTPServer:
    """Build a ready-to-run server; port 0 picks a free port (see server_port)."""
    artifact = load_artifact(artifact_dir)
    handler = type("Handler", (_Handler,), {"artifact": artifact})
    return ThreadingHTTPServer((host, port), handler)


def serve(artifact_dir: str | Path, host: str = "127.0.0.1", port: int = 8080) -> None:
    """Serve POST /score until interrupted."""
    server = make_server(artifact_dir, host, port)
    logger.info("scoring service listening on %s:%d", host, server.server_port)
    try:
        server.serve_forever(poll_interval=0.1)
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
