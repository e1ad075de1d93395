"""Role-based access control: tokens -> principals -> capability grants.

The model is deliberately flat: roles own capability sets, no hierarchy.
Three built-in roles (admin, analyst, guest) cover the grant and deny
paths; a JSON policy file can replace them entirely.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import FormatError, InvalidTokenError, UnknownCapabilityError

GRANT = "Grant"
DENY = "Deny"

POLICY_ENV_VAR = "KGCHAT_POLICY"


class Capability(str, Enum):
    GENERIC_RESPONSE = "GenericResponse"
    SUMMARIZE = "Summarize"
    SIMILAR_ARTICLES = "SimilarArticles"
    SENTIMENT_LOOKUP = "SentimentLookup"
    TOPIC_PREDICTION = "TopicPrediction"
    FACT_CHECK = "FactCheck"
    INDUSTRY_PREDICTION = "IndustryPrediction"
    RAW_CYPHER = "RawCypher"

    @classmethod
    def from_name(cls, name: str) -> "Capability":
        for capability in cls:
            if capability.value == name:
                return capability
        raise UnknownCapabilityError(f"unknown capability {name!r}")


# routed intents the dispatcher recognizes but answers as unsupported
UNSUPPORTED_CAPABILITIES = frozenset({Capability.FACT_CHECK, Capability.INDUSTRY_PREDICTION})

KG_CAPABILITIES = frozenset({
    Capability.SIMILAR_ARTICLES, Capability.SENTIMENT_LOOKUP, Capability.TOPIC_PREDICTION,
})


@dataclass
class Role:
    name: str
    capabilities: frozenset[Capability]
    labels: frozenset[str] = frozenset()


@dataclass
class Principal:
    user_id: str
    roles: list[str]


@dataclass
class AccessDecision:
    verdict: str                     # Grant | Deny
    role_used: Optional[str]
    reason: str

    @property
    def granted(self) -> bool:
        return self.verdict == GRANT

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "role_used": self.role_used, "reason": self.reason}


@dataclass
class Policy:
    roles: dict[str, Role] = field(default_factory=dict)
    tokens: dict[str, Principal] = field(default_factory=dict)


def default_policy() -> Policy:
    """Built-in roles and test tokens used when no policy file is given."""
    roles = {
        "admin": Role("admin", frozenset(Capability), frozenset({"Article", "Topic"})),
        "analyst": Role("analyst", frozenset({
            Capability.GENERIC_RESPONSE, Capability.SUMMARIZE,
            Capability.SIMILAR_ARTICLES, Capability.SENTIMENT_LOOKUP,
            Capability.TOPIC_PREDICTION,
        }), frozenset({"Article", "Topic"})),
        "guest": Role("guest", frozenset({
            Capability.GENERIC_RESPONSE, Capability.SUMMARIZE,
        })),
    }
    tokens = {
        "t-admin-1": Principal("admin1", ["admin"]),
        "t-analyst-1": Principal("analyst1", ["analyst"]),
        "t-guest-1": Principal("guest1", ["guest"]),
    }
    return Policy(roles=roles, tokens=tokens)


def _parse_policy(document: dict) -> Policy:
    if not isinstance(document, dict):
        raise FormatError("policy must be a JSON object")
    policy = Policy()
    for raw in document.get("roles", []):
        try:
            name = raw["name"]
            capabilities = frozenset(Capability.from_name(c) for c in raw["capabilities"])
            labels = frozenset(raw.get("labels", []))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed role entry: {exc}") from exc
        if not capabilities:
            raise FormatError(f"role {name!r} has an empty capability set")
        if not labels <= {"Article", "Topic"}:
            raise FormatError(f"role {name!r} lists unknown labels")
        policy.roles[name] = Role(name, capabilities, labels)
    for token, raw in document.get("tokens", {}).items():
        try:
            principal = Principal(raw["user"], list(raw["roles"]))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed token entry: {exc}") from exc
        if not principal.roles:
            raise FormatError(f"token for {principal.user_id!r} has no roles")
        for role_name in principal.roles:
            if role_name not in policy.roles:
                raise FormatError(f"token for {principal.user_id!r} references "
                                  f"unknown role {role_name!r}")
        policy.tokens[token] = principal
    return policy


def load_policy(path: Optional[str] = None) -> Policy:
    """Load a JSON policy file; None (and no env override) means built-ins.

    The KGCHAT_POLICY environment variable overrides the path argument.
    """
    env_path = os.environ.get(POLICY_ENV_VAR)
    if env_path:
        path = env_path
    if path is None:
        return default_policy()
    with open(path, "r", encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"policy is not valid JSON: {exc}") from exc
    return _parse_policy(document)


def authenticate(token: str, policy: Policy) -> Principal:
    """Resolve a bearer token to a principal, or fail with InvalidTokenError."""
    if not token:
        raise InvalidTokenError("empty token")
    principal = policy.tokens.get(token)
    if principal is None:
        raise InvalidTokenError("token not registered")
    return principal


def authorize(principal: Principal, capability: Capability, policy: Policy) -> AccessDecision:
    """Grant iff any of the principal's roles lists the capability. Pure."""
    for role_name in principal.roles:
        role = policy.roles.get(role_name)
        if role is not None and capability in role.capabilities:
            return AccessDecision(GRANT, role_name,
                                  f"role {role_name!r} grants {capability.value}")
    return AccessDecision(DENY, None,
                          f"none of your roles grant the {capability.value} capability")


def capabilities_for(principal: Principal, policy: Policy) -> list[Capability]:
    """Union of the principal's role capability sets, in declaration order."""
    held = set()
    for role_name in principal.roles:
        role = policy.roles.get(role_name)
        if role is not None:
            held |= role.capabilities
    return [c for c in Capability if c in held]
