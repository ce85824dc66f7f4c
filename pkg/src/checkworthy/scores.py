"""Transformer score intake: precomputed TSV files or a remote scoring service.

The ranking pipeline treats the transformer as an external probability
source.  Scores arrive either as a three-column TSV (doc_id, line_no,
score) or over HTTP from a service exposing POST /score with the JSON
contract

    request:  {"sentences": [{"doc_id": ..., "line_no": ..., "text": ...}, ...]}
    response: {"scores":    [{"doc_id": ..., "line_no": ..., "score": ...}, ...]}

Both paths are strict: every score must be a finite number in [0, 1],
every requested key must come back exactly once, and any shortfall
aborts the whole fetch rather than returning a partial map.  Transport
errors and 5xx responses are retried a configurable number of times;
4xx responses are not, since resending the same request cannot help.
"""

from __future__ import annotations

import math
import time
from pathlib import Path
from typing import Mapping, Sequence

import requests

ScoreMap = dict[tuple[str, int], float]

DEFAULT_BATCH_SIZE = 64
DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 2


class ScoreError(ValueError):
    """A score file or scoring service violated the contract."""


def _check_score(value: float, where: str) -> float:
    score = float(value)
    if math.isnan(score) or not (0.0 <= score <= 1.0):
        raise ScoreError(f"{where}: score {value!r} outside [0, 1]")
    return score


def load_scores_tsv(path: str | Path) -> ScoreMap:
    """Parse a doc_id/line_no/score TSV into a ScoreMap, strictly."""
    scores: ScoreMap = {}
    for line_number, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        if not raw.strip():
            continue
        where = f"{path} line {line_number}"
        fields = raw.split("\t")
        if len(fields) != 3:
            raise ScoreError(f"{where}: expected 3 tab-separated fields, got {len(fields)}")
        doc_id, line_no_text, score_text = fields
        if not doc_id:
            raise ScoreError(f"{where}: empty doc_id")
        try:
            line_no = int(line_no_text)
        except ValueError:
            raise ScoreError(f"{where}: line_no {line_no_text!r} is not an integer") from None
        try:
            score = float(score_text)
        except ValueError:
            raise ScoreError(f"{where}: score {score_text!r} is not a number") from None
        score = _check_score(score, where)
        key = (doc_id, line_no)
        if key in scores:
            raise ScoreError(f"{where}: duplicate key {doc_id}:{line_no}")
        scores[key] = score
    return scores


def save_scores_tsv(scores: Mapping[tuple[str, int], float], path: str | Path) -> None:
    """Write a ScoreMap as TSV, sorted by key; floats keep full precision."""
    lines = []
    for (doc_id, line_no), score in sorted(scores.items()):
        _check_score(score, f"key {doc_id}:{line_no}")
        lines.append(f"{doc_id}\t{line_no}\t{float(score)!r}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _score_url(endpoint: str) -> str:
    url = endpoint.rstrip("/")
    if not url.endswith("/score"):
        url += "/score"
    return url


def _parse_batch_response(
    payload: object, expected: Sequence[tuple[str, int]]
) -> ScoreMap:
    if not isinstance(payload, dict) or not isinstance(payload.get("scores"), list):
        raise ScoreError('scoring service response is not {"scores": [...]}')
    got: ScoreMap = {}
    for item in payload["scores"]:
        if not isinstance(item, dict):
            raise ScoreError(f"malformed score entry {item!r}")
        try:
            doc_id = item["doc_id"]
            line_no = item["line_no"]
            score = item["score"]
        except KeyError as exc:
            raise ScoreError(f"score entry missing field {exc}") from None
        if not isinstance(doc_id, str) or isinstance(line_no, bool) or not isinstance(line_no, int):
            raise ScoreError(f"malformed score key ({doc_id!r}, {line_no!r})")
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise ScoreError(f"score for {doc_id}:{line_no} is not a number: {score!r}")
        key = (doc_id, line_no)
        if key in got:
            raise ScoreError(f"duplicate score for {doc_id}:{line_no} in response")
        got[key] = _check_score(float(score), f"{doc_id}:{line_no}")
    missing = [key for key in expected if key not in got]
    if missing:
        doc_id, line_no = missing[0]
        raise ScoreError(
            f"incomplete response: {len(missing)} of {len(expected)} keys missing, "
            f"first {doc_id}:{line_no}"
        )
    extra = set(got) - set(expected)
    if extra:
        doc_id, line_no = sorted(extra)[0]
        raise ScoreError(f"response contains unrequested key {doc_id}:{line_no}")
    return got


def fetch_scores_http(
    endpoint: str,
    sentences: Sequence[tuple[str, int, str]],
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    timeout: float = DEFAULT_TIMEOUT,
    retries: int = DEFAULT_RETRIES,
    retry_wait: float = 0.5,
    session: requests.Session | None = None,
) -> ScoreMap:
    """Fetch scores for every sentence, batched, all-or-nothing.

    The result covers exactly the requested (doc_id, line_no) keys and is
    independent of the batch size for a deterministic server.
    """
    if batch_size < 1:
        raise ScoreError(f"batch_size must be >= 1, got {batch_size}")
    keys = [(doc_id, line_no) for doc_id, line_no, _ in sentences]
    if len(set(keys)) != len(keys):
        raise ScoreError("duplicate (doc_id, line_no) keys in scoring request")
    url = _score_url(endpoint)
    own_session = session is None
    http = session or requests.Session()
    scores: ScoreMap = {}
    try:
        for start in range(0, len(sentences), batch_size):
            batch = sentences[start : start + batch_size]
            body = {
                "sentences": [
                    {"doc_id": doc_id, "line_no": line_no, "text": text}
                    for doc_id, line_no, text in batch
                ]
            }
            scores.update(_send_batch(http, url, body, [s[:2] for s in batch], timeout, retries, retry_wait))
    finally:
        if own_session:
            http.close()
    return scores


def _send_batch(
    http: requests.Session,
    url: str,
    body: dict,
    expected: Sequence[tuple[str, int]],
    timeout: float,
    retries: int,
    retry_wait: float,
) -> ScoreMap:
    last_error: str | None = None
    for attempt in range(retries + 1):
        if attempt and retry_wait > 0:
            time.sleep(retry_wait * attempt)
        try:
            response = http.post(url, json=body, timeout=timeout)
        except requests.RequestException as exc:
            last_error = f"transport error: {exc}"
            continue
        if response.status_code >= 500:
            last_error = f"server error {response.status_code}"
            continue
        if not response.ok:
            raise ScoreError(
                f"scoring service rejected the request: {response.status_code} "
                f"{response.text[:200]}"
            )
        try:
            payload = response.json()
        except ValueError:
            raise ScoreError("scoring service returned non-JSON body") from None
        return _parse_batch_response(payload, expected)
    raise ScoreError(
        f"scoring service failed after {retries + 1} attempts: {last_error}"
    )


def scores_for_corpus(scores: Mapping[tuple[str, int], float], keys: Sequence[tuple[str, int]]) -> ScoreMap:
    """Restrict a ScoreMap to the given keys, requiring full coverage."""
    missing = [key for key in keys if key not in scores]
    if missing:
        doc_id, line_no = missing[0]
        raise ScoreError(
            f"{len(missing)} corpus sentences have no score, first {doc_id}:{line_no}"
        )
    return {key: scores[key] for key in keys}
