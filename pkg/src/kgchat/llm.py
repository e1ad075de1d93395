"""Pluggable chat backend: a deterministic mock plus an HTTP wire client.

The mock is the reference backend; it is a pure function of the request, so
every end-to-end test runs offline and reproducibly. The HTTP client speaks
the common chat-completions JSON shape and degrades gracefully: capability
answers fall back to the deterministic renderer instead of losing rows.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass

import httpx

from .errors import LlmTimeoutError, MalformedBackendReplyError, TransportError
from .rbac import Capability

MODE_ENV_VAR = "KGCHAT_LLM_MODE"
URL_ENV_VAR = "KGCHAT_LLM_URL"
MODEL_ENV_VAR = "KGCHAT_LLM_MODEL"

SUMMARY_SENTENCES = 2

NO_DATA_MESSAGE = "No matching data was found in the knowledge graph."
GENERIC_TEMPLATE = 'I can help with AI news questions. You asked: "{message}"'

_CONTENT_BLOCK = re.compile(r'"""(.*?)"""', re.DOTALL)
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


@dataclass
class Message:
    role: str                     # user | assistant
    content: str


@dataclass
class LlmRequest:
    system: str
    messages: list[Message]
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[-1].role != "user":
            raise ValueError("last message must come from the user")


@dataclass
class LlmResponse:
    text: str
    backend: str                  # mock | http
    latency_ms: int


@dataclass
class BackendConfig:
    mode: str = "mock"            # mock | http
    endpoint: str = ""
    model: str = ""
    timeout_ms: int = 10_000

    def __post_init__(self):
        if self.mode not in ("mock", "http"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.mode == "http" and (not self.endpoint or not self.model):
            raise ValueError("http mode requires endpoint and model")

    @classmethod
    def from_env(cls) -> "BackendConfig":
        mode = os.environ.get(MODE_ENV_VAR, "mock")
        return cls(mode=mode,
                   endpoint=os.environ.get(URL_ENV_VAR, ""),
                   model=os.environ.get(MODEL_ENV_VAR, ""))


def _format_number(value) -> str:
    return f"{value:.2f}" if isinstance(value, float) else str(value)


def render_insights(capability: Capability, args: dict, columns: list[str],
                    rows: list[list]) -> str:
    """Stable human-readable rendering of capability rows, one line per row."""
    if not rows:
        return NO_DATA_MESSAGE
    if capability is Capability.SIMILAR_ARTICLES:
        items = ", ".join(f"#{row[2]} (score {_format_number(row[0])})" for row in rows)
        return f"Top similar articles: {items}"
    if capability is Capability.SENTIMENT_LOOKUP:
        label, compound = rows[0][0], rows[0][1]
        return (f"Article {args.get('article_id')} sentiment: {label} "
                f"(compound {_format_number(compound)}).")
    if capability is Capability.TOPIC_PREDICTION:
        row = rows[0]
        return (f"Predicted topic for article {row[0]}: {row[2]} "
                f"(via article {row[1]}, similarity {_format_number(row[3])}).")
    lines = []
    for row in rows:
        cells = ", ".join(f"{col}={_format_number(cell)}" for col, cell in zip(columns, row))
        lines.append(cells)
    return "\n".join(lines)


def summarize_text(content: str) -> str:
    """First two sentences of the content, prefixed."""
    sentences = [s for s in _SENTENCE_SPLIT.split(content.strip()) if s]
    return "Summary: " + " ".join(sentences[:SUMMARY_SENTENCES])


def format_instruction(capability: Capability, args: dict, columns: list[str],
                       rows: list[list]) -> str:
    """Message asking the backend to present knowledge-graph rows."""
    payload = {"capability": capability.value, "args": args,
               "columns": columns, "rows": rows}
    return "Format these knowledge-graph rows for the user:\n" + json.dumps(payload)


def _mock_complete(request: LlmRequest) -> str:
    message = request.messages[-1].content
    lowered = message.strip().lower()
    if lowered.startswith("format these knowledge-graph rows"):
        _, _, body = message.partition("\n")
        try:
            payload = json.loads(body)
            capability = Capability.from_name(payload["capability"])
            return render_insights(capability, payload.get("args", {}),
                                   payload.get("columns", []), payload.get("rows", []))
        except Exception:
            return GENERIC_TEMPLATE.format(message=message.strip())
    if lowered.startswith("summarize"):
        block = _CONTENT_BLOCK.search(message)
        if block:
            return summarize_text(block.group(1))
    return GENERIC_TEMPLATE.format(message=message.strip())


def _http_complete(request: LlmRequest, config: BackendConfig) -> str:
    payload = {
        "model": config.model,
        "messages": ([{"role": "system", "content": request.system}] if request.system else [])
                    + [{"role": m.role, "content": m.content} for m in request.messages],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    try:
        reply = httpx.post(config.endpoint, json=payload,
                           timeout=config.timeout_ms / 1000.0)
        reply.raise_for_status()
    except httpx.TimeoutException as exc:
        raise LlmTimeoutError(f"backend timed out after {config.timeout_ms} ms") from exc
    except httpx.HTTPError as exc:
        raise TransportError(f"backend request failed: {exc}") from exc
    try:
        text = reply.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise MalformedBackendReplyError(f"reply missing choices[0].message.content: {exc}") from exc
    if not isinstance(text, str) or not text:
        raise MalformedBackendReplyError("backend returned empty content")
    return text


def complete(request: LlmRequest, config: BackendConfig) -> LlmResponse:
    """Run one chat completion against the configured backend."""
    start = time.perf_counter()
    if config.mode == "mock":
        text = _mock_complete(request)
    else:
        text = _http_complete(request, config)
    latency_ms = int((time.perf_counter() - start) * 1000)
    return LlmResponse(text=text, backend=config.mode, latency_ms=latency_ms)
