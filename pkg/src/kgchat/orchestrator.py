"""Conversation loop: authenticate, route, authorize, dispatch, explain.

Every turn produces a ChatResponse whose Explanation carries the full
provenance: routed capability, access decision, the executed query text,
the validation report, the raw rows, and any anomalies the error-handling
scan raised. Denied turns never carry query text or rows.
"""

from __future__ import annotations

import json
import math
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from . import capabilities as caps
from .cypher import (
    ResultTable,
    ValidationPolicy,
    ValidationReport,
    execute,
    unparse,
    validate_text,
)
from .errors import InternalError, UnknownArticleError, UnknownTurnError
from .graph import Graph
from .llm import (
    BackendConfig,
    GENERIC_TEMPLATE,
    LlmRequest,
    Message,
    NO_DATA_MESSAGE,
    complete,
    format_instruction,
    render_insights,
)
from .rbac import (
    AccessDecision,
    Capability,
    Policy,
    UNSUPPORTED_CAPABILITIES,
    authenticate,
    authorize,
)

SYSTEM_PROMPT = ("You are a careful assistant for an AI-news knowledge service. "
                 "Answer only from the supplied material.")

DENIAL_TEMPLATE = "Access denied: {reason}."
UNSUPPORTED_TEMPLATE = ("The {name} capability is recognized but not supported yet; "
                        "no knowledge-graph algorithm is configured for it.")
UNKNOWN_ARTICLE_TEMPLATE = "Article {article_id} was not found in the knowledge graph."

_ARTICLE_RULES = (
    (re.compile(r"\bsimilar\b.*\barticle\s+(\d+)\b"), Capability.SIMILAR_ARTICLES),
    (re.compile(r"\bsentiment\b.*\barticle\s+(\d+)\b"), Capability.SENTIMENT_LOOKUP),
    (re.compile(r"\btopic\b.*\barticle\s+(\d+)\b"), Capability.TOPIC_PREDICTION),
    (re.compile(r"\bsummarize\b.*\barticle\s+(\d+)\b"), Capability.SUMMARIZE),
)
_CYPHER_PREFIX = re.compile(r"^\s*cypher\s*:\s*", re.IGNORECASE)
_FACT_CHECK = re.compile(r"\bfact[- ]?check")
_INDUSTRY = re.compile(r"\bindustry\b")


@dataclass
class CapabilityRequest:
    capability: Capability
    args: dict = field(default_factory=dict)


@dataclass
class ChatTurn:
    turn_id: str
    session_id: str
    user_message: str
    timestamp: int                # unix milliseconds

    @classmethod
    def new(cls, session_id: str, user_message: str) -> "ChatTurn":
        return cls(turn_id=str(uuid.uuid4()), session_id=session_id,
                   user_message=user_message, timestamp=time.time_ns() // 1_000_000)


@dataclass
class Explanation:
    capability: str
    args: dict
    rbac: AccessDecision
    cypher_text: Optional[str] = None
    validation: Optional[ValidationReport] = None
    rows: Optional[ResultTable] = None
    anomalies: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "capability": self.capability,
            "args": self.args,
            "rbac": self.rbac.to_dict(),
            "cypher_text": self.cypher_text,
            "validation": self.validation.to_dict() if self.validation else None,
            "rows": self.rows.to_dict() if self.rows else None,
            "anomalies": list(self.anomalies),
        }


@dataclass
class ChatResponse:
    turn_id: str
    reply: str
    explanation: Explanation

    def to_dict(self) -> dict:
        return {"turn_id": self.turn_id, "reply": self.reply,
                "explanation": self.explanation.to_dict()}


@dataclass
class FeedbackRecord:
    turn_id: str
    rating: str                   # up | down
    comment: Optional[str] = None
    timestamp: int = 0

    def to_dict(self) -> dict:
        return {"turn_id": self.turn_id, "rating": self.rating,
                "comment": self.comment, "timestamp": self.timestamp}


def route_prompt(message: str) -> CapabilityRequest:
    """Deterministic intent routing; matching runs on a lowercased,
    whitespace-collapsed copy while the original text is kept for the LLM."""
    if not message.strip():
        return CapabilityRequest(Capability.GENERIC_RESPONSE)
    prefix = _CYPHER_PREFIX.match(message)
    if prefix:
        return CapabilityRequest(Capability.RAW_CYPHER,
                                 {"query_text": message[prefix.end():].strip()})
    normalized = " ".join(message.split()).lower()
    for pattern, capability in _ARTICLE_RULES:
        hit = pattern.search(normalized)
        if hit:
            args = {"article_id": int(hit.group(1))}
            if capability is Capability.SIMILAR_ARTICLES:
                args["k"] = caps.DEFAULT_TOP_K
            return CapabilityRequest(capability, args)
    if _FACT_CHECK.search(normalized):
        return CapabilityRequest(Capability.FACT_CHECK)
    if _INDUSTRY.search(normalized):
        return CapabilityRequest(Capability.INDUSTRY_PREDICTION)
    return CapabilityRequest(Capability.GENERIC_RESPONSE)


def _scan_anomalies(rows: ResultTable, report: ValidationReport) -> list[str]:
    """Error-handling pass over extracted rows."""
    anomalies = []
    if not rows.rows:
        anomalies.append("empty result set")
    for row in rows.rows:
        if any(isinstance(cell, float) and not math.isfinite(cell) for cell in row):
            anomalies.append("non-finite value in results")
            break
    if report.limit_injected and len(rows.rows) == report.effective_limit:
        anomalies.append(f"results truncated to the injected limit of {report.effective_limit}")
    return anomalies


class Orchestrator:
    """Owns one graph, one policy, one backend, and the append-only logs."""

    def __init__(self, graph: Graph, policy: Policy, backend: BackendConfig,
                 validation_policy: Optional[ValidationPolicy] = None,
                 audit_path: Optional[str] = None,
                 feedback_path: Optional[str] = None,
                 top_k: int = caps.DEFAULT_TOP_K,
                 topic_threshold: float = caps.DEFAULT_TOPIC_THRESHOLD):
        self.graph = graph
        self.policy = policy
        self.backend = backend
        self.validation_policy = validation_policy or ValidationPolicy()
        self.audit_path = audit_path
        self.feedback_path = feedback_path
        self.top_k = top_k
        self.topic_threshold = topic_threshold
        self._log_lock = threading.Lock()
        self._known_turns: set[str] = set()
        self._load_known_turns()

    # --- turn handling ---

    def handle_turn(self, turn: ChatTurn, token: str) -> ChatResponse:
        """Run the full loop for one turn. InvalidTokenError propagates to
        the transport layer; everything else becomes a normal chat reply."""
        principal = authenticate(token, self.policy)
        request = route_prompt(turn.user_message)
        decision = authorize(principal, request.capability, self.policy)
        explanation = Explanation(capability=request.capability.value,
                                  args=dict(request.args), rbac=decision)
        if not decision.granted:
            reply = DENIAL_TEMPLATE.format(reason=decision.reason)
        else:
            try:
                reply = self._dispatch(turn, request, explanation)
            except InternalError:
                raise
            except Exception as exc:
                raise InternalError(f"unexpected failure: {exc}") from exc
        response = ChatResponse(turn_id=turn.turn_id, reply=reply, explanation=explanation)
        self._append_audit(turn, response)
        return response

    def _dispatch(self, turn: ChatTurn, request: CapabilityRequest,
                  explanation: Explanation) -> str:
        capability = request.capability
        if capability in UNSUPPORTED_CAPABILITIES:
            return UNSUPPORTED_TEMPLATE.format(name=capability.value)
        if capability is Capability.GENERIC_RESPONSE:
            return self._complete(turn.user_message)
        if capability is Capability.SUMMARIZE:
            return self._summarize(turn, request, explanation)
        if capability is Capability.RAW_CYPHER:
            return self._raw_cypher(request, explanation)
        return self._kg_capability(request, explanation)

    def _complete(self, message: str) -> str:
        request = LlmRequest(system=SYSTEM_PROMPT, messages=[Message("user", message)])
        return complete(request, self.backend).text

    def _summarize(self, turn: ChatTurn, request: CapabilityRequest,
                   explanation: Explanation) -> str:
        article_id = request.args.get("article_id")
        node = self.graph.find_article(article_id) if article_id is not None else None
        if node is None:
            explanation.anomalies.append(f"unknown article {article_id}")
            return UNKNOWN_ARTICLE_TEMPLATE.format(article_id=article_id)
        content = node.properties.get("content", "")
        if not content:
            explanation.anomalies.append("empty article content")
            return NO_DATA_MESSAGE
        prompt = f'Summarize the following article:\n"""{content}"""'
        request_out = LlmRequest(system=SYSTEM_PROMPT, messages=[Message("user", prompt)])
        return complete(request_out, self.backend).text

    def _kg_capability(self, request: CapabilityRequest, explanation: Explanation) -> str:
        capability = request.capability
        article_id = request.args.get("article_id")
        try:
            if capability is Capability.SIMILAR_ARTICLES:
                _, run = caps.find_similar(self.graph, article_id,
                                           k=request.args.get("k", self.top_k),
                                           policy=self.validation_policy)
            elif capability is Capability.SENTIMENT_LOOKUP:
                _, run = caps.get_sentiment(self.graph, article_id,
                                            policy=self.validation_policy)
            else:
                threshold = request.args.get("threshold", self.topic_threshold)
                explanation.args["threshold"] = threshold
                _, run = caps.predict_topic(self.graph, article_id, threshold=threshold,
                                            policy=self.validation_policy)
        except UnknownArticleError:
            explanation.anomalies.append(f"unknown article {article_id}")
            return UNKNOWN_ARTICLE_TEMPLATE.format(article_id=article_id)
        explanation.cypher_text = run.cypher_text
        explanation.validation = run.validation
        explanation.rows = run.rows
        explanation.anomalies.extend(_scan_anomalies(run.rows, run.validation))
        return self._render(capability, explanation.args, run.rows)

    def _raw_cypher(self, request: CapabilityRequest, explanation: Explanation) -> str:
        text = request.args.get("query_text", "")
        report, ast = validate_text(text, self.validation_policy)
        explanation.validation = report
        if not report.accepted:
            lines = [f"{v.code}: {v.message}" for v in report.violations]
            return "Query rejected by the validation layer:\n" + "\n".join(lines)
        rows = execute(ast, self.graph, effective_limit=report.effective_limit)
        explanation.cypher_text = unparse(ast)
        explanation.rows = rows
        explanation.anomalies.extend(_scan_anomalies(rows, report))
        return self._render(Capability.RAW_CYPHER, explanation.args, rows)

    def _render(self, capability: Capability, args: dict, rows: ResultTable) -> str:
        """Step through the backend with a formatting instruction; the mock
        renders the fixed template, the HTTP backend may paraphrase but
        falls back to the deterministic rendering on any failure."""
        instruction = format_instruction(capability, args, rows.columns, rows.rows)
        request = LlmRequest(system=SYSTEM_PROMPT, messages=[Message("user", instruction)])
        try:
            return complete(request, self.backend).text
        except Exception:
            return render_insights(capability, args, rows.columns, rows.rows)

    # --- logs ---

    def _load_known_turns(self) -> None:
        if not self.audit_path:
            return
        try:
            with open(self.audit_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    try:
                        self._known_turns.add(json.loads(line)["turn"]["turn_id"])
                    except (ValueError, KeyError, TypeError):
                        continue
        except FileNotFoundError:
            pass

    def _append_audit(self, turn: ChatTurn, response: ChatResponse) -> None:
        self._known_turns.add(turn.turn_id)
        if not self.audit_path:
            return
        record = {"turn": {"turn_id": turn.turn_id, "session_id": turn.session_id,
                           "user_message": turn.user_message, "timestamp": turn.timestamp},
                  "response": response.to_dict()}
        with self._log_lock:
            with open(self.audit_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")

    def record_feedback(self, record: FeedbackRecord) -> None:
        """Append one rating to the feedback log; the turn must exist."""
        if record.turn_id not in self._known_turns:
            raise UnknownTurnError(f"no turn with id {record.turn_id!r}")
        if record.rating not in ("up", "down"):
            raise ValueError("rating must be 'up' or 'down'")
        if not record.timestamp:
            record.timestamp = time.time_ns() // 1_000_000
        if self.feedback_path:
            with self._log_lock:
                with open(self.feedback_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record.to_dict()) + "\n")

    def feedback_for(self, turn_id: str) -> list[FeedbackRecord]:
        """All stored feedback lines for one turn."""
        if not self.feedback_path:
            return []
        out = []
        try:
            with open(self.feedback_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    raw = json.loads(line)
                    if raw.get("turn_id") == turn_id:
                        out.append(FeedbackRecord(**raw))
        except FileNotFoundError:
            pass
        return out
