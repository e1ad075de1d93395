"""Shared fixtures: the 50-article synthetic corpus and graph builders.

The corpus is engineered, not random:
  * article 100 holds exactly one valence word ("good"), so its compound
    is 1.9/sqrt(1.9^2 + 15);
  * article 101 is article 100's content with one word changed, landing
    their cosine near 0.99 (above the 0.97 topic threshold), and topic 1
    ("Machine Learning") is its lowest-numbered topic;
  * every other pair stays far below the threshold;
  * article 149 has empty content (zero vector, neutral sentiment);
  * 8 topics and exactly 120 topic assignments overall.
A separate 3-article corpus pins the best similarity at ~0.90 for the
below-threshold behavior.
"""

from __future__ import annotations

import json

import pytest

from kgchat.graph import Graph
from kgchat.ingest import RawArticle, TopicRef, build_graph

DIMENSION = 64

TOPIC_NAMES = {
    1: "Machine Learning",
    2: "Ethics",
    3: "Robotics",
    4: "Healthcare",
    5: "Finance",
    6: "Policy",
    7: "Education",
    8: "Security",
}

# 59 neutral words; none appear in the bundled valence lexicon
BASE_WORDS = (
    "the research group shipped a strict compiler for tensor graphs it lowers kernels "
    "onto silicon the runtime schedules batches across nodes and records traces for "
    "later review engineers compared throughput against older stacks using public "
    "workloads the report lists configuration details and cites prior material on "
    "scheduling theory readers can reproduce each figure from the published scripts "
    "and datasets"
).split()

APPENDIX_WORDS = (
    "the appendix walks through memory layout choices and shows packing tables a short "
    "section covers numeric formats and good rounding behavior during fused steps "
    "future drafts will extend coverage to sparse inputs and variable shapes the team "
    "thanks reviewers for careful reading and detailed notes"
).split()

ARTICLE_100_WORDS = BASE_WORDS + APPENDIX_WORDS
# one word changed ("strict" -> "permissive"); cosine to article 100 lands ~0.99
ARTICLE_101_WORDS = [w if i != 5 else "permissive" for i, w in enumerate(ARTICLE_100_WORDS)]

# six words swapped into the 59-word base text; cosine to it lands ~0.90
_LOW_SWAPS = {4: "quantum", 8: "ledger", 13: "beacon", 24: "mosaic", 30: "harbor", 37: "copper"}
LOW_SIM_WORDS = [_LOW_SWAPS.get(i, w) for i, w in enumerate(BASE_WORDS)]

# neutral generator vocabulary, disjoint from the texts above and the lexicon
VOCAB = (
    "model models dataset datasets network networks pipeline pipelines inference "
    "compute cluster clusters benchmark benchmarks metric metrics encoder decoder "
    "token tokens layer layers neuron neurons gradient gradients optimizer training "
    "evaluation deployment server servers processor processors memory storage "
    "bandwidth latency throughput quantization sparsity attention transformer "
    "transformers embedding embeddings checkpoint checkpoints scheduler corpus "
    "annotation annotations tooling monitoring dashboard telemetry profiler shard "
    "shards replica replicas"
).split()

POSITIVE_TAIL = "the panel found the results useful"
NEGATIVE_TAIL = "the panel warned of a security risk"
NEGATION_TAIL = "the panel said the draft is not good"

PUBLISHERS = ["TechWire", "PolicyDesk", "LabReport", "MarketBrief"]
COUNTRIES = ["IE", "US", "GB", "DE", "FR"]


def _generated_words(i: int) -> list[str]:
    count = 35 + (i % 7)
    return [VOCAB[(i * 7 + j * 3) % len(VOCAB)] for j in range(count)]


def _topics_for(i: int) -> list[int]:
    if i == 0:
        return [1, 4]
    if i == 1:
        return [1, 5]
    if i == 4:
        return [5, 8, 2]
    topics = [1 + (i % 8), 1 + ((i + 3) % 8)]
    if i % 5 in (0, 2):
        topics.append(1 + ((i + 5) % 8))
    return topics


def fixture_articles() -> list[RawArticle]:
    articles = []
    for i in range(50):
        article_id = 100 + i
        if i == 0:
            words = ARTICLE_100_WORDS
        elif i == 1:
            words = ARTICLE_101_WORDS
        elif i == 49:
            words = []
        else:
            words = _generated_words(i)
            if i == 16:
                words = words + NEGATION_TAIL.split()
            elif i % 4 == 1:
                words = words + POSITIVE_TAIL.split()
            elif i % 4 == 3:
                words = words + NEGATIVE_TAIL.split()
        articles.append(RawArticle(
            article_id=article_id,
            title=f"Briefing {article_id}",
            content=" ".join(words) + ("." if words else ""),
            published_date=f"2024-{1 + (i % 12):02d}-{1 + (i % 28):02d}",
            publisher=PUBLISHERS[i % len(PUBLISHERS)],
            country=COUNTRIES[i % len(COUNTRIES)],
            topics=[TopicRef(t, TOPIC_NAMES[t]) for t in _topics_for(i)],
        ))
    assert sum(len(a.topics) for a in articles) == 120
    return articles


def low_similarity_articles() -> list[RawArticle]:
    """Three articles whose best pairwise similarity to article 100 is ~0.90."""
    return [
        RawArticle(100, "Briefing 100", " ".join(BASE_WORDS) + ".",
                   "2024-01-01", "TechWire", "IE", [TopicRef(4, TOPIC_NAMES[4])]),
        RawArticle(101, "Briefing 101", " ".join(LOW_SIM_WORDS) + ".",
                   "2024-01-02", "TechWire", "IE", [TopicRef(1, TOPIC_NAMES[1])]),
        RawArticle(102, "Briefing 102", " ".join(_generated_words(9)) + ".",
                   "2024-01-03", "LabReport", "US", [TopicRef(2, TOPIC_NAMES[2])]),
    ]


def write_jsonl(articles: list[RawArticle], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for article in articles:
            fh.write(json.dumps({
                "article_id": article.article_id,
                "title": article.title,
                "content": article.content,
                "published_date": article.published_date,
                "publisher": article.publisher,
                "country": article.country,
                "topics": [{"topic_id": t.topic_id, "name": t.name} for t in article.topics],
            }) + "\n")


@pytest.fixture(scope="session")
def corpus() -> list[RawArticle]:
    return fixture_articles()


@pytest.fixture(scope="session")
def fixture_graph(corpus) -> Graph:
    return build_graph(corpus, dimension=DIMENSION)


@pytest.fixture(scope="session")
def low_sim_graph() -> Graph:
    return build_graph(low_similarity_articles(), dimension=DIMENSION)


@pytest.fixture(scope="session")
def fixture_jsonl(tmp_path_factory, corpus):
    path = tmp_path_factory.mktemp("corpus") / "articles.jsonl"
    write_jsonl(corpus, path)
    return path


@pytest.fixture(scope="session")
def fixture_snapshot(tmp_path_factory, fixture_graph):
    path = tmp_path_factory.mktemp("snapshots") / "fixture.json"
    fixture_graph.save_snapshot(str(path))
    return path


@pytest.fixture(scope="session")
def low_sim_snapshot(tmp_path_factory, low_sim_graph):
    path = tmp_path_factory.mktemp("snapshots-low") / "low.json"
    low_sim_graph.save_snapshot(str(path))
    return path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of a run."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(r for r in terminalreporter.stats.get(key, ())
                       if getattr(r, "when", "call") == "call"
                       and "test_acceptance" in r.nodeid)
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for report in sorted(reports, key=lambda r: r.nodeid):
        name = report.nodeid.split("::")[-1].replace("test_criterion_", "")
        status = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
