"""Policy loading, authentication, and the grant/deny matrix."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from kgchat.errors import FormatError, InvalidTokenError, UnknownCapabilityError
from kgchat.rbac import (
    Capability,
    Policy,
    Principal,
    Role,
    authenticate,
    authorize,
    capabilities_for,
    default_policy,
    load_policy,
)

ALL_CAPABILITIES = list(Capability)

# documented default-policy table: role -> granted capabilities
DEFAULT_MATRIX = {
    "admin": set(Capability),
    "analyst": {Capability.GENERIC_RESPONSE, Capability.SUMMARIZE,
                Capability.SIMILAR_ARTICLES, Capability.SENTIMENT_LOOKUP,
                Capability.TOPIC_PREDICTION},
    "guest": {Capability.GENERIC_RESPONSE, Capability.SUMMARIZE},
}


def test_default_policy_has_three_roles():
    policy = default_policy()
    assert set(policy.roles) == {"admin", "analyst", "guest"}
    assert set(policy.tokens) == {"t-admin-1", "t-analyst-1", "t-guest-1"}


def test_full_default_matrix():
    policy = default_policy()
    cells = 0
    for role_name, granted in DEFAULT_MATRIX.items():
        principal = Principal(f"{role_name}1", [role_name])
        for capability in ALL_CAPABILITIES:
            decision = authorize(principal, capability, policy)
            assert decision.granted == (capability in granted), (role_name, capability)
            cells += 1
    assert cells == 24


def test_grant_names_role_and_deny_names_capability():
    policy = default_policy()
    grant = authorize(Principal("u", ["analyst"]), Capability.SIMILAR_ARTICLES, policy)
    assert grant.granted and grant.role_used == "analyst"
    deny = authorize(Principal("u", ["guest"]), Capability.TOPIC_PREDICTION, policy)
    assert not deny.granted
    assert deny.role_used is None
    assert "TopicPrediction" in deny.reason


def test_authenticate():
    policy = default_policy()
    principal = authenticate("t-analyst-1", policy)
    assert principal.user_id == "analyst1"
    assert principal.roles == ["analyst"]
    with pytest.raises(InvalidTokenError):
        authenticate("", policy)
    with pytest.raises(InvalidTokenError):
        authenticate("t-unknown", policy)


def test_load_policy_file_verbatim(tmp_path, monkeypatch):
    monkeypatch.delenv("KGCHAT_POLICY", raising=False)
    document = {
        "roles": [{"name": "analyst",
                   "capabilities": ["SimilarArticles", "SentimentLookup",
                                    "TopicPrediction", "Summarize", "GenericResponse"],
                   "labels": ["Article", "Topic"]}],
        "tokens": {"t-analyst-1": {"user": "analyst1", "roles": ["analyst"]}},
    }
    path = tmp_path / "policy.json"
    path.write_text(json.dumps(document))
    policy = load_policy(str(path))
    assert set(policy.roles) == {"analyst"}
    assert policy.roles["analyst"].capabilities == {
        Capability.SIMILAR_ARTICLES, Capability.SENTIMENT_LOOKUP,
        Capability.TOPIC_PREDICTION, Capability.SUMMARIZE, Capability.GENERIC_RESPONSE}
    principal = authenticate("t-analyst-1", policy)
    assert principal.user_id == "analyst1"


def test_load_policy_unknown_capability(tmp_path, monkeypatch):
    monkeypatch.delenv("KGCHAT_POLICY", raising=False)
    path = tmp_path / "policy.json"
    path.write_text(json.dumps({
        "roles": [{"name": "r", "capabilities": ["TimeTravel"]}], "tokens": {}}))
    with pytest.raises(UnknownCapabilityError):
        load_policy(str(path))


def test_load_policy_unresolved_role(tmp_path, monkeypatch):
    monkeypatch.delenv("KGCHAT_POLICY", raising=False)
    path = tmp_path / "policy.json"
    path.write_text(json.dumps({
        "roles": [], "tokens": {"t": {"user": "u", "roles": ["ghost"]}}}))
    with pytest.raises(FormatError):
        load_policy(str(path))


def test_env_var_overrides_path(tmp_path, monkeypatch):
    override = tmp_path / "override.json"
    override.write_text(json.dumps({
        "roles": [{"name": "only", "capabilities": ["GenericResponse"]}],
        "tokens": {}}))
    monkeypatch.setenv("KGCHAT_POLICY", str(override))
    policy = load_policy(str(tmp_path / "ignored.json"))
    assert set(policy.roles) == {"only"}


def test_authorize_monotone_in_capabilities():
    """Adding a capability to a role never turns a grant into a denial."""
    rng = random.Random(5)
    for _ in range(50):
        granted = set(rng.sample(ALL_CAPABILITIES, rng.randint(1, 7)))
        policy = Policy(roles={"r": Role("r", frozenset(granted))},
                        tokens={})
        principal = Principal("u", ["r"])
        extra = rng.choice(ALL_CAPABILITIES)
        bigger = Policy(roles={"r": Role("r", frozenset(granted | {extra}))}, tokens={})
        for capability in ALL_CAPABILITIES:
            before = authorize(principal, capability, policy).granted
            after = authorize(principal, capability, bigger).granted
            assert after >= before


@settings(max_examples=80, deadline=None)
@given(granted=st.sets(st.sampled_from(ALL_CAPABILITIES), min_size=1),
       capability=st.sampled_from(ALL_CAPABILITIES),
       user=st.sampled_from(["u1", "u2", "someone"]))
def test_decision_depends_only_on_roles_and_capability(granted, capability, user):
    policy = Policy(roles={"r": Role("r", frozenset(granted))}, tokens={})
    decision = authorize(Principal(user, ["r"]), capability, policy)
    assert decision.granted == (capability in granted)


def test_capabilities_for_union():
    policy = default_policy()
    principal = Principal("u", ["guest", "analyst"])
    held = capabilities_for(principal, policy)
    assert set(held) == DEFAULT_MATRIX["analyst"]
    assert held == [c for c in Capability if c in set(held)]  # declaration order
