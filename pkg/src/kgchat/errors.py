"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KgChatError(Exception):
    """Base class for all kgchat errors."""


# --- graph store ---

class UnknownLabelError(KgChatError):
    """Node label (or relationship kind) outside the schema."""


class UnknownNodeError(KgChatError):
    """A node id that does not exist in the graph."""


class DuplicateKeyError(KgChatError):
    """Unique key (article_id / topic_id) already present."""


class SchemaViolationError(KgChatError):
    """Required property missing or carrying the wrong type."""


class LabelMismatchError(KgChatError):
    """Edge endpoints with labels the relationship does not allow."""


class DuplicateEdgeError(KgChatError):
    """A second HAS_TOPIC edge for the same (article, topic) pair."""


class FormatError(KgChatError):
    """Malformed snapshot, policy, or input file."""


# --- cypher engine ---

class LexError(KgChatError):
    """Invalid character in query text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ParseError(KgChatError):
    """Token stream does not match the grammar."""

    def __init__(self, expected: str, found: str, offset: int):
        super().__init__(f"expected {expected}, found {found} (offset {offset})")
        self.expected = expected
        self.found = found
        self.offset = offset


class EvalError(KgChatError):
    """Runtime failure while executing a validated query."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class DimensionMismatchError(KgChatError):
    """Vectors of different lengths where equal lengths are required."""


# --- rbac ---

class InvalidTokenError(KgChatError):
    """Authentication token is empty or not registered."""


class UnknownCapabilityError(KgChatError):
    """Policy file names a capability that does not exist."""


# --- llm gateway ---

class LlmTimeoutError(KgChatError):
    """Backend did not answer within the configured timeout."""


class TransportError(KgChatError):
    """Backend unreachable or returned a transport-level failure."""


class MalformedBackendReplyError(KgChatError):
    """Backend reply does not carry choices[0].message.content."""


# --- orchestrator ---

class UnknownArticleError(KgChatError):
    """Capability invoked for an article_id absent from the graph."""


class UnknownTurnError(KgChatError):
    """Feedback references a turn_id that was never handled."""


class InternalError(KgChatError):
    """Unexpected failure; no partial results may leak."""
