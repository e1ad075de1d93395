"""Command-line surface: ingest, query, the three capability lookups,
serve, and a thin chat client for a running service."""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from . import capabilities as caps
from .cypher import ValidationPolicy, execute, unparse
from .cypher.lexer import WRITE_KEYWORDS, TokenKind, tokenize
from .cypher.parser import parse
from .cypher.validator import validate
from .errors import (
    FormatError,
    KgChatError,
    LexError,
    ParseError,
    UnknownArticleError,
)
from .graph import Graph
from .ingest import DEFAULT_DIMENSION, build_graph, load_lexicon, read_jsonl
from .rbac import Capability, Policy, Principal, authorize, default_policy, load_policy
from .service import ServiceConfig, serve


def _fail(message: str, code: int = 1) -> int:
    print(message, file=sys.stderr)
    return code


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        lexicon = load_lexicon(args.lexicon)
        articles = read_jsonl(args.input)
        graph = build_graph(articles, dimension=args.dimension, lexicon=lexicon)
        graph.save_snapshot(args.snapshot)
    except (FormatError, KgChatError) as exc:
        return _fail(f"ingest failed: {exc}")
    except OSError as exc:
        return _fail(f"ingest failed: {exc}")
    print(f"ingested {graph.article_count()} articles, {graph.topic_count()} topics, "
          f"{graph.edge_count()} edges")
    return 0


def _load_graph(path: str) -> Graph:
    return Graph.load_snapshot(path)


def _print_table(columns: list[str], rows: list[list]) -> None:
    def hm(cell) -> str:
        return "null" if cell is None else str(cell)

    widths = [len(c) for c in columns]
    rendered = [[hm(cell) for cell in row] for row in rows]
    for row in rendered:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip())
    print("  ".join("-" * w for w in widths))
    for row in rendered:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


def cmd_query(args: argparse.Namespace) -> int:
    try:
        graph = _load_graph(args.snapshot)
    except (OSError, FormatError) as exc:
        return _fail(f"cannot load snapshot: {exc}")
    policy: Policy = default_policy()
    decision = authorize(Principal("cli", [args.role]), Capability.RAW_CYPHER, policy)
    if not decision.granted:
        print(f"access denied: {decision.reason}", file=sys.stderr)
        return 2
    validation_policy = ValidationPolicy(max_limit=args.max_limit)
    try:
        tokens = tokenize(args.cypher)
    except LexError as exc:
        return _fail(f"lex error: {exc}")
    write_hits = [t for t in tokens
                  if t.kind == TokenKind.KEYWORD and t.upper in WRITE_KEYWORDS]
    if write_hits:
        for token in write_hits:
            print(f"WRITE_CLAUSE: write/DDL keyword {token.upper} is forbidden "
                  f"(offset {token.offset})")
        return 2
    try:
        ast = parse(tokens)
    except ParseError as exc:
        return _fail(f"parse error: {exc}")
    report = validate(ast, validation_policy)
    if not report.accepted:
        for violation in report.violations:
            print(f"{violation.code}: {violation.message}")
        return 2
    table = execute(ast, graph, effective_limit=report.effective_limit)
    _print_table(table.columns, table.rows)
    return 0


def cmd_similar(args: argparse.Namespace) -> int:
    try:
        graph = _load_graph(args.snapshot)
        results, run = caps.find_similar(graph, args.id, k=args.k)
    except (OSError, FormatError, UnknownArticleError) as exc:
        return _fail(str(exc))
    for item in results:
        print(f"#{item.article_id}  score {item.score:.6f}")
    if not results:
        print("no other articles in the graph")
    if args.explain:
        print(f"cypher: {run.cypher_text}")
    return 0


def cmd_sentiment(args: argparse.Namespace) -> int:
    try:
        graph = _load_graph(args.snapshot)
        score, run = caps.get_sentiment(graph, args.id)
    except (OSError, FormatError, UnknownArticleError) as exc:
        return _fail(str(exc))
    print(f"article {args.id}: {score.label} (compound {score.compound:.4f})")
    if args.explain:
        print(f"cypher: {run.cypher_text}")
    return 0


def cmd_topic(args: argparse.Namespace) -> int:
    try:
        graph = _load_graph(args.snapshot)
        prediction, run = caps.predict_topic(graph, args.id, threshold=args.threshold)
    except (OSError, FormatError, UnknownArticleError) as exc:
        return _fail(str(exc))
    if prediction is None:
        best, _ = caps.find_similar(graph, args.id, k=1)
        if best:
            print(f"no topic prediction (max similarity {best[0].score:.2f} "
                  f"≤ {args.threshold:.2f})")
        else:
            print("no topic prediction (no other articles)")
    else:
        print(f"predicted topic: {prediction.topic_name} "
              f"(via article {prediction.via_article}, score {prediction.score:.4f})")
    if args.explain:
        print(f"cypher: {run.cypher_text}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    config = ServiceConfig(port=args.port, snapshot_path=args.snapshot,
                           policy_path=args.policy, max_limit=args.max_limit,
                           dimension=args.dimension, audit_path=args.audit_log,
                           feedback_path=args.feedback_log, ui_dir=args.ui_dir)
    try:
        serve(config)
    except (OSError, FormatError, KgChatError) as exc:
        return _fail(f"startup failed: {exc}")
    return 0


def cmd_chat(args: argparse.Namespace) -> int:
    payload = {"token": args.token, "session_id": args.session, "message": args.message}
    try:
        reply = httpx.post(f"{args.url.rstrip('/')}/api/chat", json=payload, timeout=30)
    except httpx.HTTPError as exc:
        return _fail(f"request failed: {exc}")
    if reply.status_code != 200:
        return _fail(f"server returned {reply.status_code}: {reply.text}")
    body = reply.json()
    print(body["reply"])
    if args.explain:
        print(json.dumps(body["explanation"], indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgchat",
                                     description="knowledge-graph chat service tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a graph snapshot from a JSONL article feed")
    p.add_argument("--input", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    p.add_argument("--lexicon", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="validate and run a Cypher query on a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--cypher", required=True)
    p.add_argument("--role", default="admin")
    p.add_argument("--max-limit", type=int, default=100)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("similar", help="top-k similar articles")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--k", type=int, default=caps.DEFAULT_TOP_K)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("sentiment", help="stored sentiment of an article")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_sentiment)

    p = sub.add_parser("topic", help="topic prediction from the nearest similar article")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--threshold", type=float, default=caps.DEFAULT_TOPIC_THRESHOLD)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_topic)

    p = sub.add_parser("serve", help="run the HTTP chat service")
    p.add_argument("--port", type=int, default=8420)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--policy", default=None)
    p.add_argument("--max-limit", type=int, default=100)
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--audit-log", default="kgchat-audit.jsonl")
    p.add_argument("--feedback-log", default="kgchat-feedback.jsonl")
    p.add_argument("--ui-dir", default=None,
                   help="directory with the built browser console, served at /ui")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("chat", help="send one message to a running service")
    p.add_argument("--url", default="http://127.0.0.1:8420")
    p.add_argument("--token", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--session", default="cli")
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_chat)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
