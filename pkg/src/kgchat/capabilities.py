"""The three specialized knowledge-graph capabilities.

Each capability instantiates a fixed query template, runs it through the
public validate + execute path, and returns a typed result together with a
CapabilityRun carrying the exact Cypher text, the validation report, and
the raw rows, so every answer can be replayed and audited.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cypher import ResultTable, ValidationPolicy, ValidationReport, execute, parse_text, unparse
from .cypher.validator import validate
from .errors import InternalError, UnknownArticleError
from .graph import Graph
from .ingest import SentimentScore

DEFAULT_TOP_K = 5
DEFAULT_TOPIC_THRESHOLD = 0.97

SIMILAR_TEMPLATE = (
    "MATCH (a1:Article {{article_id: {article_id}}}), (a2:Article) "
    "WHERE a1 <> a2 "
    "WITH a1, a2, gds.similarity.cosine(a1.content_vector, a2.content_vector) AS similarity_score "
    "RETURN similarity_score, a1.article_id, a2.article_id "
    "ORDER BY similarity_score DESC LIMIT {k}"
)

SENTIMENT_TEMPLATE = (
    "MATCH (n:Article) WHERE n.article_id = {article_id} "
    "RETURN n.sentiment, n.compound"
)

TOPIC_TEMPLATE = (
    "MATCH (a1:Article {{article_id: {article_id}}}), (a2:Article), (a2)-[:HAS_TOPIC]->(t:Topic) "
    "WHERE a1 <> a2 "
    "WITH a1, a2, t, gds.similarity.cosine(a1.content_vector, a2.content_vector) AS similarity_score "
    "WHERE similarity_score > {threshold} "
    "RETURN a1.article_id, a2.article_id AS similar_article, t.name AS predicted_topic, similarity_score "
    "ORDER BY similarity_score DESC LIMIT 1"
)


@dataclass(frozen=True)
class SimilarArticle:
    article_id: int
    score: float


@dataclass(frozen=True)
class TopicPrediction:
    topic_name: str
    via_article: int
    score: float


@dataclass
class CapabilityRun:
    cypher_text: str
    validation: ValidationReport
    rows: ResultTable


def _run_template(graph: Graph, text: str, policy: Optional[ValidationPolicy]) -> CapabilityRun:
    policy = policy or ValidationPolicy()
    ast = parse_text(text)
    report = validate(ast, policy)
    if not report.accepted:
        raise InternalError(f"capability template rejected: {report.violations}")
    rows = execute(ast, graph, effective_limit=report.effective_limit)
    return CapabilityRun(cypher_text=unparse(ast), validation=report, rows=rows)


def _require_article(graph: Graph, article_id: int) -> None:
    if graph.find_article(article_id) is None:
        raise UnknownArticleError(f"no article with article_id {article_id}")


def find_similar(graph: Graph, article_id: int, k: int = DEFAULT_TOP_K,
                 policy: Optional[ValidationPolicy] = None) -> tuple[list[SimilarArticle], CapabilityRun]:
    """Top-k most similar articles by content-vector cosine, best first.

    k is capped at the validation policy's maximum limit so the recorded
    query replays unchanged through the public validate + execute path.
    """
    _require_article(graph, article_id)
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, (policy or ValidationPolicy()).max_limit)
    text = SIMILAR_TEMPLATE.format(article_id=article_id, k=k)
    run = _run_template(graph, text, policy)
    results = [SimilarArticle(article_id=row[2], score=row[0]) for row in run.rows.rows]
    return results, run


def get_sentiment(graph: Graph, article_id: int,
                  policy: Optional[ValidationPolicy] = None) -> tuple[SentimentScore, CapabilityRun]:
    """Stored sentiment label and compound for one article."""
    _require_article(graph, article_id)
    text = SENTIMENT_TEMPLATE.format(article_id=article_id)
    run = _run_template(graph, text, policy)
    row = run.rows.rows[0]
    return SentimentScore(compound=row[1], label=row[0]), run


def predict_topic(graph: Graph, article_id: int, threshold: float = DEFAULT_TOPIC_THRESHOLD,
                  policy: Optional[ValidationPolicy] = None) -> tuple[Optional[TopicPrediction], CapabilityRun]:
    """Topic of the most similar above-threshold article, or None."""
    _require_article(graph, article_id)
    text = TOPIC_TEMPLATE.format(article_id=article_id, threshold=repr(float(threshold)))
    run = _run_template(graph, text, policy)
    if not run.rows.rows:
        return None, run
    row = run.rows.rows[0]
    prediction = TopicPrediction(topic_name=row[2], via_article=row[1], score=row[3])
    return prediction, run
