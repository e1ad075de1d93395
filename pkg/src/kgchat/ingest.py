"""Ingestion: raw news records -> preprocessed text -> sentiment ->
content embedding -> knowledge graph.

Sentiment uses a bundled valence lexicon (term<TAB>valence per line,
valences in [-4, 4]) with the classic sum-then-normalize compound score.
Embeddings use subword n-gram feature hashing: deterministic, no model
downloads, and cheap enough to recompute at ingest time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .errors import DimensionMismatchError, FormatError
from .graph import ARTICLE, HAS_TOPIC, TOPIC, Graph

DEFAULT_DIMENSION = 64

POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05

# damping applied to a valence token when a negation appears up to 3 tokens before
NEGATION_SCALAR = -0.74
NEGATION_LOOKBACK = 3

NEGATION_WORDS = frozenset({
    "no", "not", "never", "none", "nobody", "nothing", "neither", "nor",
    "nowhere", "cannot", "without", "hardly", "rarely", "scarcely", "barely",
    "isnt", "wasnt", "arent", "werent", "dont", "doesnt", "didnt", "cant",
    "couldnt", "shouldnt", "wouldnt", "wont", "aint", "hasnt", "havent", "hadnt",
})

_FNV_OFFSET = 0xcbf29ce484222325
_FNV_PRIME = 0x100000001b3
_MASK64 = (1 << 64) - 1

_NGRAM_SIZES = (3, 4, 5)


@dataclass(frozen=True)
class SentimentScore:
    compound: float            # in [-1, 1]
    label: str                 # positive | neutral | negative


@dataclass(frozen=True)
class EmbeddingVector:
    values: list[float]        # L2-normalized, or all zeros for empty input
    norm: float                # magnitude of the raw accumulator before normalizing


@dataclass
class TopicRef:
    topic_id: int
    name: str


@dataclass
class RawArticle:
    article_id: int
    title: str
    content: str
    published_date: str
    publisher: str
    country: str
    topics: list[TopicRef]


def preprocess(text: str) -> list[str]:
    """Lowercase and split on every character outside [a-z0-9]."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if "a" <= ch <= "z" or "0" <= ch <= "9":
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


def load_lexicon(path: str | None = None) -> dict[str, float]:
    """Read a term<TAB>valence lexicon; None loads the bundled file."""
    if path is None:
        source = resources.files("kgchat.data").joinpath("lexicon.txt").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    lexicon: dict[str, float] = {}
    for lineno, line in enumerate(source.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"lexicon line {lineno}: expected term<TAB>valence")
        try:
            lexicon[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise FormatError(f"lexicon line {lineno}: bad valence {parts[1]!r}") from exc
    return lexicon


_BUNDLED_LEXICON: dict[str, float] | None = None


def bundled_lexicon() -> dict[str, float]:
    global _BUNDLED_LEXICON
    if _BUNDLED_LEXICON is None:
        _BUNDLED_LEXICON = load_lexicon(None)
    return _BUNDLED_LEXICON


def score_sentiment(tokens: list[str], lexicon: dict[str, float] | None = None) -> SentimentScore:
    """Lexicon sum with negation damping, normalized to a compound in [-1, 1]."""
    if lexicon is None:
        lexicon = bundled_lexicon()
    total = 0.0
    for i, token in enumerate(tokens):
        valence = lexicon.get(token, 0.0)
        if valence == 0.0:
            continue
        window = tokens[max(0, i - NEGATION_LOOKBACK):i]
        if any(w in NEGATION_WORDS for w in window):
            valence *= NEGATION_SCALAR
        total += valence
    compound = total / math.sqrt(total * total + 15.0)
    compound = max(-1.0, min(1.0, compound))
    if compound >= POSITIVE_THRESHOLD:
        label = "positive"
    elif compound <= NEGATIVE_THRESHOLD:
        label = "negative"
    else:
        label = "neutral"
    return SentimentScore(compound=compound, label=label)


def fnv1a_64(data: bytes) -> int:
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _MASK64
    return value


def _token_features(token: str) -> list[str]:
    """The token plus boundary-marked character n-grams, first occurrence only."""
    marked = f"<{token}>"
    features = {token: None}
    for n in _NGRAM_SIZES:
        for i in range(len(marked) - n + 1):
            features.setdefault(marked[i:i + n], None)
    return list(features)


def embed(tokens: list[str], dimension: int = DEFAULT_DIMENSION) -> EmbeddingVector:
    """Signed feature hashing of subword n-grams, L2-normalized.

    Accumulation runs in token order; for a given input the result is
    bit-identical across runs and platforms.
    """
    if dimension < 2:
        raise DimensionMismatchError(f"embedding dimension must be >= 2, got {dimension}")
    values = [0.0] * dimension
    for token in tokens:
        for feature in _token_features(token):
            digest = fnv1a_64(feature.encode("utf-8"))
            sign = 1.0 if (digest >> 63) == 0 else -1.0
            values[digest % dimension] += sign
    norm = math.sqrt(math.fsum(v * v for v in values))
    if norm > 0.0:
        values = [v / norm for v in values]
    return EmbeddingVector(values=values, norm=norm)


def analyze_content(content: str, dimension: int,
                    lexicon: dict[str, float] | None = None) -> tuple[SentimentScore, EmbeddingVector]:
    tokens = preprocess(content)
    return score_sentiment(tokens, lexicon), embed(tokens, dimension)


def build_graph(articles: list[RawArticle], dimension: int = DEFAULT_DIMENSION,
                lexicon: dict[str, float] | None = None) -> Graph:
    """One Article node per record, one Topic node per distinct topic_id,
    one HAS_TOPIC edge per assignment; node numbering follows input order."""
    if dimension < 2:
        raise DimensionMismatchError(f"embedding dimension must be >= 2, got {dimension}")
    graph = Graph(dimension=dimension)
    topic_nodes: dict[int, int] = {}
    for article in articles:
        sentiment, vector = analyze_content(article.content, dimension, lexicon)
        node_id = graph.create_node(ARTICLE, {
            "article_id": article.article_id,
            "title": article.title,
            "content": article.content,
            "sentiment": sentiment.label,
            "compound": sentiment.compound,
            "content_vector": vector.values,
            "published_date": article.published_date,
            "publisher": article.publisher,
            "country": article.country,
        })
        for topic in article.topics:
            if topic.topic_id not in topic_nodes:
                topic_nodes[topic.topic_id] = graph.create_node(TOPIC, {
                    "topic_id": topic.topic_id,
                    "name": topic.name,
                })
            graph.create_edge(node_id, topic_nodes[topic.topic_id], HAS_TOPIC)
    return graph


def parse_article(record: dict) -> RawArticle:
    """Validate one JSON record; raises FormatError naming the bad field."""
    if not isinstance(record, dict):
        raise FormatError("record must be a JSON object")
    try:
        article_id = record["article_id"]
    except KeyError:
        raise FormatError("record missing article_id") from None
    if not isinstance(article_id, int) or isinstance(article_id, bool):
        raise FormatError("article_id must be an integer")
    fields = {}
    for name in ("title", "content", "published_date", "publisher", "country"):
        value = record.get(name, "")
        if not isinstance(value, str):
            raise FormatError(f"{name} must be text")
        fields[name] = value
    topics = []
    for raw in record.get("topics", []):
        if not isinstance(raw, dict) or "topic_id" not in raw or "name" not in raw:
            raise FormatError("topic entries need topic_id and name")
        if not isinstance(raw["topic_id"], int) or isinstance(raw["topic_id"], bool):
            raise FormatError("topic_id must be an integer")
        if not isinstance(raw["name"], str):
            raise FormatError("topic name must be text")
        topics.append(TopicRef(topic_id=raw["topic_id"], name=raw["name"]))
    return RawArticle(article_id=article_id, topics=topics, **fields)


def read_jsonl(path: str) -> list[RawArticle]:
    """Read one RawArticle JSON object per line; errors cite the line number."""
    articles: list[RawArticle] = []
    seen: set[int] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            try:
                article = parse_article(record)
            except FormatError as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
            if article.article_id in seen:
                raise FormatError(f"line {lineno}: duplicate article_id {article.article_id}")
            seen.add(article.article_id)
            articles.append(article)
    return articles
