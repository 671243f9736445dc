"""Masked-token predictors: a remote fill-mask client and an offline stub.

Both modes answer the same question (top-k replacements for the one masked
position of a token sequence) and satisfy the same response normalization,
so generation code never cares which one produced a prediction.

The stub infers the mask's syntactic slot purely from the surrounding
tokens, never from AST information that the wire request does not carry.
That keeps it bit-for-bit reproducible by any server-side mock speaking
the same protocol: the request body is the entire input.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from typing import Sequence

import requests

from .minij import MASK_TOKEN
from .minij.lexer import KEYWORDS, WORD_LITERALS
from .targets import MaskedSequence

ENDPOINT_ENV = "MUTALM_PREDICTOR_URL"

BINARY_OP_POOL = ("+", "-", "*", "/", "%", "<", "<=", ">", ">=",
                  "==", "!=", "&&", "||")
UNARY_OP_POOL = ("!", "-", "++", "--")
AUGMENT_POOL = ("+", "-", "*", "/", "%")
SMALL_LITERAL_POOL = ("0", "1", "2", "10", "-1")

_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")
_NUMBER_RE = re.compile(r"-?[0-9]+\Z")


class PredictorError(Exception):
    """Base class for prediction failures."""


class RemoteUnavailable(PredictorError):
    """The endpoint could not be reached or is still loading."""


class ProtocolError(PredictorError):
    """The endpoint answered, but not with a valid fill-mask response."""


@dataclass(frozen=True)
class Prediction:
    token_text: str
    score: float
    rank: int

    def __post_init__(self):
        if not self.token_text or "\n" in self.token_text:
            raise ValueError("prediction token must be non-empty, one line")
        if not 0.0 < self.score <= 1.0:
            raise ValueError(f"score must be in (0, 1], got {self.score}")
        if self.rank < 1:
            raise ValueError("rank is 1-based")


@dataclass(frozen=True)
class PredictorConfig:
    k: int = 5
    mode: str = "stub"
    endpoint: str | None = None
    timeout: float = 30.0
    window_limit: int = 512
    concurrency: int = 4

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.mode not in ("stub", "remote"):
            raise ValueError(f"unknown predictor mode {self.mode!r}")
        if self.window_limit < 1:
            raise ValueError("window limit must be >= 1")

    def resolved_endpoint(self) -> str | None:
        return os.environ.get(ENDPOINT_ENV) or self.endpoint


# ---------------------------------------------------------------
# offline stub
# ---------------------------------------------------------------

def _is_identifier(tok: str | None) -> bool:
    return (tok is not None and _IDENT_RE.match(tok) is not None
            and tok not in KEYWORDS and tok not in WORD_LITERALS
            and tok != MASK_TOKEN)


def _is_literal(tok: str | None) -> bool:
    if tok is None:
        return False
    return (tok in WORD_LITERALS or _NUMBER_RE.match(tok) is not None
            or tok.startswith('"'))


def _ends_operand(tok: str | None) -> bool:
    return _is_identifier(tok) or _is_literal(tok) or tok in (")", "]")


def _starts_operand(tok: str | None) -> bool:
    return _is_identifier(tok) or _is_literal(tok) or tok in ("(", "!")


def _visible_identifiers(tokens: Sequence[str]) -> list[str]:
    seen: dict[str, None] = {}
    for tok in tokens:
        if _is_identifier(tok):
            seen.setdefault(tok)
    return list(seen)


def _visible_method_names(tokens: Sequence[str]) -> list[str]:
    seen: dict[str, None] = {}
    for tok, nxt in zip(tokens, list(tokens[1:]) + [None]):
        if _is_identifier(tok) and nxt == "(":
            seen.setdefault(tok)
    return list(seen)


def _candidate_pool(tokens: Sequence[str], mask_index: int) -> tuple[str, ...]:
    """Pick the pool for the masked slot from its neighbours alone."""
    prev = tokens[mask_index - 1] if mask_index > 0 else None
    nxt = tokens[mask_index + 1] if mask_index + 1 < len(tokens) else None

    if nxt == ".":                                   # receiver position
        return tuple(_visible_identifiers(tokens))
    if prev == ".":
        if nxt == "(":                               # member method name
            return tuple(_visible_method_names(tokens))
        return tuple(_visible_identifiers(tokens))   # member field name
    if nxt == "=" and _ends_operand(prev):           # augmenting "<op>="
        return AUGMENT_POOL
    if nxt == "=":                                   # assignment left side
        return tuple(_visible_identifiers(tokens))
    if _ends_operand(prev) and _starts_operand(nxt):
        return BINARY_OP_POOL                        # between two operands
    if nxt == "(" and not _ends_operand(prev):       # unqualified call name
        return tuple(_visible_method_names(tokens))
    if _starts_operand(nxt):                         # before an operand
        return UNARY_OP_POOL
    # plain operand position (identifier or literal)
    return tuple(_visible_identifiers(tokens)) + SMALL_LITERAL_POOL


def _stable_order_key(entry: str, context: tuple[str, ...]) -> tuple[int, str]:
    payload = "\x1f".join((entry,) + context).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big"), entry


def stub_predict_tokens(tokens: Sequence[str], mask_index: int,
                        k: int) -> list[Prediction]:
    """The stub rule on a bare wire request (tokens, mask index, k)."""
    if not 0 <= mask_index < len(tokens):
        raise ValueError("mask_index out of range")
    if tokens[mask_index] != MASK_TOKEN:
        raise ValueError("mask_index does not point at the placeholder")
    if k < 1:
        raise ValueError("k must be >= 1")
    lo = max(0, mask_index - 4)
    context = tuple(tokens[lo:mask_index]) + tuple(
        tokens[mask_index + 1:mask_index + 5])
    pool = [tok for tok in dict.fromkeys(_candidate_pool(tokens, mask_index))
            if tok != MASK_TOKEN]
    pool.sort(key=lambda entry: _stable_order_key(entry, context))
    return [Prediction(tok, 1.0 / (2 ** rank), rank)
            for rank, tok in enumerate(pool[:k], start=1)]


def stub_predict(seq: MaskedSequence, k: int) -> list[Prediction]:
    return stub_predict_tokens(seq.tokens, seq.mask_index, k)


# ---------------------------------------------------------------
# remote client
# ---------------------------------------------------------------

def _normalize_remote(payload: object, k: int) -> list[Prediction]:
    if not isinstance(payload, dict) or "predictions" not in payload:
        raise ProtocolError("response is missing the predictions field")
    raw = payload["predictions"]
    if not isinstance(raw, list) or len(raw) > k:
        raise ProtocolError("predictions must be a list of length <= k")
    cleaned = []
    for item in raw:
        if (not isinstance(item, dict)
                or not isinstance(item.get("token"), str)
                or not isinstance(item.get("score"), (int, float))
                or isinstance(item.get("score"), bool)):
            raise ProtocolError(f"malformed prediction entry: {item!r}")
        token, score = item["token"], float(item["score"])
        if token == MASK_TOKEN:
            continue
        if not token or "\n" in token or not 0.0 < score <= 1.0:
            raise ProtocolError(f"invalid prediction {item!r}")
        cleaned.append((token, score))
    cleaned.sort(key=lambda pair: (-pair[1], pair[0]))
    return [Prediction(tok, score, rank)
            for rank, (tok, score) in enumerate(cleaned, start=1)]


def remote_predict(seq: MaskedSequence, cfg: PredictorConfig,
                   session: requests.Session | None = None,
                   ) -> list[Prediction]:
    endpoint = cfg.resolved_endpoint()
    if not endpoint:
        raise ValueError("remote mode requires an endpoint")
    url = endpoint.rstrip("/") + "/predict"
    body = {"tokens": list(seq.tokens), "mask_index": seq.mask_index,
            "k": cfg.k}
    post = (session or requests).post
    try:
        resp = post(url, json=body, timeout=cfg.timeout)
    except requests.RequestException as err:
        raise RemoteUnavailable(f"{url}: {err}") from err
    if resp.status_code == 503:
        raise RemoteUnavailable(f"{url}: model is loading")
    if resp.status_code != 200:
        raise ProtocolError(f"{url}: unexpected status {resp.status_code}")
    try:
        payload = resp.json()
    except (ValueError, json.JSONDecodeError) as err:
        raise ProtocolError(f"{url}: response is not JSON") from err
    return _normalize_remote(payload, cfg.k)


def predict(seq: MaskedSequence, cfg: PredictorConfig,
            session: requests.Session | None = None) -> list[Prediction]:
    """Top-k predictions for the sequence's masked position."""
    if len(seq.tokens) > cfg.window_limit:
        raise ValueError("sequence exceeds the window limit; crop it first")
    if cfg.mode == "stub":
        return stub_predict(seq, cfg.k)
    return remote_predict(seq, cfg, session=session)


def predict_with_retry(seq: MaskedSequence, cfg: PredictorConfig,
                       session: requests.Session | None = None,
                       ) -> list[Prediction] | None:
    """predict with one retry on RemoteUnavailable; None when it failed."""
    try:
        return predict(seq, cfg, session=session)
    except RemoteUnavailable:
        try:
            return predict(seq, cfg, session=session)
        except RemoteUnavailable:
            return None


def predict_many(seqs: Sequence[MaskedSequence], cfg: PredictorConfig,
                 ) -> list[list[Prediction] | None]:
    """Predictions for many sequences, results aligned with the input.

    Remote requests run on a small thread pool; results are reduced by
    input index so concurrency never reorders anything.
    """
    if cfg.mode == "stub":
        return [predict_with_retry(seq, cfg) for seq in seqs]
    from concurrent.futures import ThreadPoolExecutor

    session = requests.Session()
    with ThreadPoolExecutor(max_workers=max(1, cfg.concurrency)) as pool:
        futures = [pool.submit(predict_with_retry, seq, cfg, session)
                   for seq in seqs]
        return [f.result() for f in futures]
