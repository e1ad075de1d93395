"""Routing rules and the end-to-end turn loop with the mock backend."""

from __future__ import annotations

import json

import pytest

from kgchat.errors import InvalidTokenError, UnknownTurnError
from kgchat.llm import BackendConfig
from kgchat.orchestrator import (
    ChatTurn,
    FeedbackRecord,
    Orchestrator,
    route_prompt,
)
from kgchat.rbac import Capability, default_policy

MOCK = BackendConfig(mode="mock")


@pytest.fixture()
def orchestrator(fixture_graph, tmp_path):
    return Orchestrator(fixture_graph, default_policy(), MOCK,
                        audit_path=str(tmp_path / "audit.jsonl"),
                        feedback_path=str(tmp_path / "feedback.jsonl"))


def turn(message: str, session: str = "s1") -> ChatTurn:
    return ChatTurn.new(session_id=session, user_message=message)


# --- routing ---

@pytest.mark.parametrize("message,capability,args", [
    ("Find articles similar to article 100", Capability.SIMILAR_ARTICLES,
     {"article_id": 100, "k": 5}),
    ("what's the sentiment of article 100?", Capability.SENTIMENT_LOOKUP,
     {"article_id": 100}),
    ("predict the topic for article 100", Capability.TOPIC_PREDICTION,
     {"article_id": 100}),
    ("Please summarize article 104", Capability.SUMMARIZE, {"article_id": 104}),
    ("can you fact-check this claim?", Capability.FACT_CHECK, {}),
    ("which industry does this belong to", Capability.INDUSTRY_PREDICTION, {}),
    ("hello there", Capability.GENERIC_RESPONSE, {}),
    ("  What   is\tthe SENTIMENT of Article 113 ?", Capability.SENTIMENT_LOOKUP,
     {"article_id": 113}),
])
def test_route_prompt(message, capability, args):
    routed = route_prompt(message)
    assert routed.capability == capability
    assert routed.args == args


def test_route_cypher_prefix_preserves_case():
    routed = route_prompt("cypher: MATCH (n:Article) WHERE n.article_id = 100 RETURN n.sentiment")
    assert routed.capability == Capability.RAW_CYPHER
    assert routed.args["query_text"].startswith("MATCH (n:Article)")
    routed = route_prompt("CYPHER:   MATCH (n:Article) RETURN n.article_id")
    assert routed.args["query_text"] == "MATCH (n:Article) RETURN n.article_id"


def test_route_cypher_text_never_misroutes():
    # query text containing 'similarity' and 'article' words stays RawCypher
    routed = route_prompt(
        "cypher: MATCH (a1:Article {article_id: 100}), (a2:Article) WHERE a1 <> a2 "
        "WITH a1, a2, gds.similarity.cosine(a1.content_vector, a2.content_vector) AS s "
        "RETURN s LIMIT 5")
    assert routed.capability == Capability.RAW_CYPHER


# --- turn handling ---

def test_analyst_similar_turn(orchestrator):
    response = orchestrator.handle_turn(turn("find articles similar to article 100"),
                                        "t-analyst-1")
    explanation = response.explanation
    assert explanation.capability == "SimilarArticles"
    assert explanation.rbac.granted
    assert explanation.validation.accepted
    assert len(explanation.rows.rows) == 5
    assert explanation.cypher_text.startswith("MATCH (a1:Article {article_id: 100})")
    assert "#101" in response.reply
    assert explanation.anomalies == []


def test_guest_denied_no_leak(orchestrator):
    response = orchestrator.handle_turn(turn("find articles similar to article 100"),
                                        "t-guest-1")
    assert response.explanation.rbac.verdict == "Deny"
    assert response.reply.startswith("Access denied")
    assert "SimilarArticles" in response.reply
    assert response.explanation.cypher_text is None
    assert response.explanation.rows is None
    assert response.explanation.validation is None


def test_admin_write_query_rejected_verbatim(orchestrator):
    response = orchestrator.handle_turn(turn("cypher: MATCH (n) DETACH DELETE n"),
                                        "t-admin-1")
    explanation = response.explanation
    assert explanation.capability == "RawCypher"
    assert explanation.rbac.granted
    assert explanation.validation is not None
    assert not explanation.validation.accepted
    assert any(v.code == "WRITE_CLAUSE" for v in explanation.validation.violations)
    assert "WRITE_CLAUSE" in response.reply
    assert explanation.cypher_text is None
    assert explanation.rows is None


def test_admin_read_query_executes(orchestrator):
    response = orchestrator.handle_turn(
        turn("cypher: MATCH (n:Article) WHERE n.article_id = 100 RETURN n.sentiment"),
        "t-admin-1")
    assert response.explanation.rows.rows == [["positive"]]
    assert "positive" in response.reply


def test_generic_and_summarize_have_no_cypher(orchestrator):
    generic = orchestrator.handle_turn(turn("hello there"), "t-guest-1")
    assert generic.explanation.cypher_text is None
    assert generic.reply.startswith("I can help with AI news questions")
    summary = orchestrator.handle_turn(turn("summarize article 100"), "t-guest-1")
    assert summary.explanation.cypher_text is None
    assert summary.reply.startswith("Summary: ")


def test_unknown_article_becomes_anomaly(orchestrator):
    response = orchestrator.handle_turn(turn("sentiment of article 99999"),
                                        "t-analyst-1")
    assert response.reply == "Article 99999 was not found in the knowledge graph."
    assert response.explanation.anomalies == ["unknown article 99999"]
    assert response.explanation.rows is None


def test_unsupported_capabilities_answer_honestly(orchestrator):
    response = orchestrator.handle_turn(turn("fact-check article 100"), "t-admin-1")
    assert "FactCheck" in response.reply
    assert "not supported" in response.reply
    response = orchestrator.handle_turn(turn("industry outlook for article 100"),
                                        "t-admin-1")
    assert "IndustryPrediction" in response.reply


def test_empty_result_flagged(fixture_graph, low_sim_graph, tmp_path):
    orchestrator = Orchestrator(low_sim_graph, default_policy(), MOCK)
    response = orchestrator.handle_turn(turn("topic of article 100"), "t-analyst-1")
    assert "empty result set" in response.explanation.anomalies
    assert response.reply == "No matching data was found in the knowledge graph."


def test_invalid_token_raises(orchestrator):
    with pytest.raises(InvalidTokenError):
        orchestrator.handle_turn(turn("hello"), "t-nobody")


def test_audit_log_one_line_per_turn(orchestrator, tmp_path):
    messages = ["hello", "sentiment of article 100", "summarize article 100"]
    for message in messages:
        orchestrator.handle_turn(turn(message), "t-analyst-1")
    lines = open(orchestrator.audit_path, encoding="utf-8").read().splitlines()
    assert len(lines) == 3
    for line, message in zip(lines, messages):
        record = json.loads(line)
        assert record["turn"]["user_message"] == message
        assert record["response"]["explanation"]["rbac"]["verdict"] in ("Grant", "Deny")


def test_feedback_round_trip(orchestrator):
    response = orchestrator.handle_turn(turn("hello"), "t-guest-1")
    orchestrator.record_feedback(FeedbackRecord(response.turn_id, "up", "nice"))
    stored = orchestrator.feedback_for(response.turn_id)
    assert len(stored) == 1
    assert stored[0].rating == "up"
    assert stored[0].comment == "nice"
    assert stored[0].timestamp > 0


def test_feedback_unknown_turn(orchestrator):
    with pytest.raises(UnknownTurnError):
        orchestrator.record_feedback(FeedbackRecord("no-such-turn", "up"))


def test_feedback_sequential_order(orchestrator):
    response = orchestrator.handle_turn(turn("hello"), "t-guest-1")
    for i in range(100):
        orchestrator.record_feedback(FeedbackRecord(response.turn_id, "up", f"c{i}"))
    lines = open(orchestrator.feedback_path, encoding="utf-8").read().splitlines()
    assert len(lines) == 100
    assert [json.loads(l)["comment"] for l in lines] == [f"c{i}" for i in range(100)]


def test_known_turns_reload_from_audit_file(fixture_graph, tmp_path):
    audit = tmp_path / "audit.jsonl"
    feedback = tmp_path / "feedback.jsonl"
    first = Orchestrator(fixture_graph, default_policy(), MOCK,
                         audit_path=str(audit), feedback_path=str(feedback))
    response = first.handle_turn(turn("hello"), "t-guest-1")
    second = Orchestrator(fixture_graph, default_policy(), MOCK,
                          audit_path=str(audit), feedback_path=str(feedback))
    second.record_feedback(FeedbackRecord(response.turn_id, "down"))
    assert second.feedback_for(response.turn_id)[0].rating == "down"


def test_turn_determinism(fixture_graph):
    """Same graph, policy, message, token -> identical response minus ids."""
    messages_tokens = [
        ("find articles similar to article 100", "t-analyst-1"),
        ("sentiment of article 100", "t-analyst-1"),
        ("hello there", "t-guest-1"),
        ("cypher: MATCH (t:Topic) RETURN t.name ORDER BY t.name LIMIT 3", "t-admin-1"),
    ]

    def run_all():
        orchestrator = Orchestrator(fixture_graph, default_policy(), MOCK)
        out = []
        for message, token in messages_tokens:
            response = orchestrator.handle_turn(turn(message), token)
            record = response.to_dict()
            record.pop("turn_id")
            out.append(json.dumps(record, sort_keys=True))
        return out

    assert run_all() == run_all()
