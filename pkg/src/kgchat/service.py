"""HTTP/JSON surface for the chat loop.

Denied capabilities come back as normal 200 chat replies (the conversation
stays uniform); 401 is reserved for authentication failure. The graph is
loaded once at startup and shared read-only across requests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .cypher import ValidationPolicy
from .errors import InternalError, InvalidTokenError, UnknownTurnError
from .graph import Graph
from .llm import BackendConfig
from .orchestrator import ChatTurn, FeedbackRecord, Orchestrator
from .rbac import Policy, authenticate, capabilities_for, load_policy


@dataclass
class ServiceConfig:
    port: int = 8420
    snapshot_path: str = ""
    policy_path: Optional[str] = None
    backend: Optional[BackendConfig] = None
    max_limit: int = 100
    dimension: Optional[int] = None
    audit_path: Optional[str] = None
    feedback_path: Optional[str] = None
    ui_dir: Optional[str] = None      # built console assets, served at /ui


class RbacModel(BaseModel):
    verdict: str
    role_used: Optional[str] = None
    reason: str


class ViolationModel(BaseModel):
    code: str
    message: str
    offset: Optional[int] = None


class ValidationModel(BaseModel):
    verdict: str
    violations: list[ViolationModel]
    effective_limit: int
    limit_injected: bool


class RowsModel(BaseModel):
    columns: list[str]
    rows: list[list]


class ExplanationModel(BaseModel):
    capability: str
    args: dict
    rbac: RbacModel
    cypher_text: Optional[str] = None
    validation: Optional[ValidationModel] = None
    rows: Optional[RowsModel] = None
    anomalies: list[str] = Field(default_factory=list)


class ChatRequestModel(BaseModel):
    token: Optional[str] = None
    session_id: str = "default"
    message: str


class ChatResponseModel(BaseModel):
    turn_id: str
    reply: str
    explanation: ExplanationModel


class FeedbackRequestModel(BaseModel):
    turn_id: str
    rating: str
    comment: Optional[str] = None


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _bearer_token(request: Request, body_token: Optional[str]) -> str:
    """Authorization header wins over a token carried in the body."""
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return body_token or ""


def create_app(graph: Graph, policy: Policy, orchestrator: Orchestrator,
               ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="kgchat", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/api/health")
    def health():
        return {"status": "ok", "articles": graph.article_count()}

    @app.post("/api/chat", response_model=ChatResponseModel)
    def chat(body: ChatRequestModel, request: Request):
        token = _bearer_token(request, body.token)
        turn = ChatTurn.new(session_id=body.session_id, user_message=body.message)
        try:
            response = orchestrator.handle_turn(turn, token)
        except InvalidTokenError:
            return _error(401, "invalid token")
        except InternalError:
            return _error(500, "internal error")
        return response.to_dict()

    @app.post("/api/feedback")
    def feedback(body: FeedbackRequestModel):
        record = FeedbackRecord(turn_id=body.turn_id, rating=body.rating, comment=body.comment)
        try:
            orchestrator.record_feedback(record)
        except UnknownTurnError:
            return _error(404, "unknown turn_id")
        except ValueError as exc:
            return _error(422, str(exc))
        return {"ok": True}

    @app.get("/api/articles/{article_id}")
    def article(article_id: int):
        node = graph.find_article(article_id)
        if node is None:
            return _error(404, "unknown article")
        properties = {k: v for k, v in node.properties.items() if k != "content_vector"}
        return properties

    @app.get("/api/roles/me")
    def roles_me(request: Request):
        token = _bearer_token(request, request.query_params.get("token"))
        try:
            principal = authenticate(token, policy)
        except InvalidTokenError:
            return _error(401, "invalid token")
        return {"user": principal.user_id, "roles": list(principal.roles),
                "capabilities": [c.value for c in capabilities_for(principal, policy)]}

    if ui_dir:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def build_service(config: ServiceConfig) -> tuple[FastAPI, Orchestrator]:
    """Load the snapshot and policy, wire the orchestrator, build the app."""
    graph = Graph.load_snapshot(config.snapshot_path)
    if config.dimension is not None and config.dimension != graph.dimension:
        raise InternalError(f"snapshot dimension {graph.dimension} does not match "
                            f"--dimension {config.dimension}")
    policy = load_policy(config.policy_path)
    backend = config.backend or BackendConfig.from_env()
    validation_policy = ValidationPolicy(max_limit=config.max_limit)
    orchestrator = Orchestrator(graph, policy, backend,
                                validation_policy=validation_policy,
                                audit_path=config.audit_path,
                                feedback_path=config.feedback_path)
    app = create_app(graph, policy, orchestrator, ui_dir=config.ui_dir)
    return app, orchestrator


def serve(config: ServiceConfig) -> None:
    """Run the service with uvicorn until interrupted."""
    import uvicorn

    app, _ = build_service(config)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="info")
