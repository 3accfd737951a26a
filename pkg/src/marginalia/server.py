"""HTTP/JSON API for annotation, merge and session operations.

Technique endpoints follow the array-in / indexed-object-out contract: the
request carries {"paragraphs": [...]} and the response is a JSON object
with one stringified-index key per paragraph. They are stateless and
backed by the engine's global hash-keyed cache. Session endpoints manage
one document per session with per-session mutation serialization. Every
error response carries {"error": {"code": ..., "message": ...}}.
"""

from __future__ import annotations

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .docstate import ConflictError, Engine, SessionStore, SummaryLevel
from .merge import MergeSpan, MergeSuggestion
from .textseg import Paragraph

__all__ = ["ApiError", "create_app", "technique_envelope"]


class ApiError(Exception):
    """Error with a machine-readable code, rendered as the error envelope."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def technique_envelope(engine: Engine, paragraphs: list[str], level: SummaryLevel) -> dict:
    """Indexed-object envelope: {"0": cell, ..., "n-1": cell}."""
    cells = engine.annotate_texts(paragraphs, level)
    return {str(i): cell for i, cell in enumerate(cells)}


def _require_paragraphs(payload: dict) -> list[str]:
    paragraphs = payload.get("paragraphs")
    if not isinstance(paragraphs, list) or not all(isinstance(p, str) for p in paragraphs):
        raise ApiError(400, "invalid_request", "'paragraphs' must be an array of strings")
    return paragraphs


def _require_int(payload: dict, key: str, minimum: int | None = None) -> int:
    value = payload.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ApiError(400, "invalid_request", f"'{key}' must be an integer")
    if minimum is not None and value < minimum:
        raise ApiError(400, "invalid_request", f"'{key}' must be >= {minimum}")
    return value


def _require_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise ApiError(400, "invalid_request", f"'{key}' must be a string")
    return value


def _parse_level(name: str, k) -> SummaryLevel:
    if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 1):
        raise ApiError(400, "invalid_request", "'k' must be an integer >= 1")
    try:
        return SummaryLevel.parse(name, k)
    except ValueError as exc:
        raise ApiError(400, "invalid_level", str(exc)) from None


def _suggestion_from_wire(payload: dict) -> MergeSuggestion:
    try:
        return MergeSuggestion(
            merged_text=payload["merged"],
            retained=[MergeSpan(*span) for span in payload["retained_spans"]],
            cut=[MergeSpan(*span) for span in payload["cut_spans"]],
            source_hashes=(int(payload["source_hashes"][0]), int(payload["source_hashes"][1])),
        )
    except (KeyError, TypeError, ValueError, IndexError):
        raise ApiError(400, "invalid_request", "malformed merge suggestion") from None


def _suggestion_to_wire(suggestion: MergeSuggestion) -> dict:
    return {
        "merged": suggestion.merged_text,
        "retained": suggestion.pairs(suggestion.retained),
        "cut": suggestion.pairs(suggestion.cut),
        "retained_spans": [
            [s.paragraph_id, s.sentence_index, s.start, s.end] for s in suggestion.retained
        ],
        "cut_spans": [[s.paragraph_id, s.sentence_index, s.start, s.end] for s in suggestion.cut],
        "source_hashes": [str(h) for h in suggestion.source_hashes],
    }


def create_app(
    engine: Engine,
    *,
    sessions: SessionStore | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="marginalia", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = sessions if sessions is not None else SessionStore()
    app.state.engine = engine
    app.state.sessions = store

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "invalid_request", "malformed request body")

    @app.exception_handler(StarletteHTTPException)
    async def handle_http(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return _error_response(exc.status_code, code, str(exc.detail))

    def get_session(session_id: str):
        try:
            return store.get(session_id)
        except KeyError:
            raise ApiError(404, "session_not_found", f"unknown session {session_id!r}") from None

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/extractive")
    def extractive(payload: dict = Body(...)):
        paragraphs = _require_paragraphs(payload)
        k = _require_int(payload, "k", minimum=1)
        return technique_envelope(engine, paragraphs, SummaryLevel.extractive(k))

    @app.post("/api/central")
    def central(payload: dict = Body(...)):
        paragraphs = _require_paragraphs(payload)
        return technique_envelope(engine, paragraphs, SummaryLevel.CENTRAL)

    @app.post("/api/abstractive")
    def abstractive(payload: dict = Body(...)):
        paragraphs = _require_paragraphs(payload)
        return technique_envelope(engine, paragraphs, SummaryLevel.ABSTRACTIVE)

    @app.post("/api/keywords")
    def keywords(payload: dict = Body(...)):
        paragraphs = _require_paragraphs(payload)
        return technique_envelope(engine, paragraphs, SummaryLevel.KEYWORDS)

    @app.post("/api/merge")
    def merge(payload: dict = Body(...)):
        a_text = _require_str(payload, "a")
        b_text = _require_str(payload, "b")
        if not a_text.strip() or not b_text.strip():
            raise ApiError(400, "invalid_request", "'a' and 'b' must be non-empty paragraphs")
        suggestion = engine.suggest_merge(
            Paragraph.from_text(a_text), Paragraph.from_text(b_text)
        )
        return {
            "merged": suggestion.merged_text,
            "retained": suggestion.pairs(suggestion.retained),
            "cut": suggestion.pairs(suggestion.cut),
        }

    @app.post("/api/session")
    def create_session():
        session = store.create()
        return {
            "session_id": session.session_id,
            "revision": session.revision,
            "paragraph_count": 0,
        }

    @app.put("/api/session/{session_id}/text")
    def put_text(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        text = _require_str(payload, "text")
        diff = session.apply_edit(text)
        return {
            "changed": diff.changed,
            "removed": diff.removed,
            "revision": session.revision,
            "paragraph_count": len(session.paragraphs),
        }

    @app.get("/api/session/{session_id}/text")
    def get_text(session_id: str):
        session = get_session(session_id)
        return {"text": session.full_text(), "revision": session.revision}

    @app.post("/api/session/{session_id}/reorder")
    def reorder(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        from_index = _require_int(payload, "from", minimum=0)
        to_index = _require_int(payload, "to", minimum=0)
        try:
            order = session.reorder(from_index, to_index)
        except IndexError as exc:
            raise ApiError(400, "out_of_range", str(exc)) from None
        return {
            "order": order,
            "revision": session.revision,
            "text": session.full_text(),
        }

    @app.delete("/api/session/{session_id}/card/{index}")
    def delete_card(session_id: str, index: int):
        session = get_session(session_id)
        try:
            session.delete_card(index)
        except IndexError as exc:
            raise ApiError(400, "out_of_range", str(exc)) from None
        return {
            "revision": session.revision,
            "paragraph_count": len(session.paragraphs),
            "text": session.full_text(),
        }

    @app.post("/api/session/{session_id}/merge/preview")
    def merge_preview(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        a_index = _require_int(payload, "a_index", minimum=0)
        b_index = _require_int(payload, "b_index", minimum=0)
        n = len(session.paragraphs)
        if a_index >= n or b_index >= n or a_index == b_index:
            raise ApiError(400, "out_of_range", f"invalid paragraph pair ({a_index}, {b_index})")
        suggestion = engine.suggest_merge(
            session.paragraphs[a_index], session.paragraphs[b_index]
        )
        return _suggestion_to_wire(suggestion)

    @app.post("/api/session/{session_id}/merge/accept")
    def merge_accept(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        a_index = _require_int(payload, "a_index", minimum=0)
        b_index = _require_int(payload, "b_index", minimum=0)
        suggestion_payload = payload.get("suggestion")
        if not isinstance(suggestion_payload, dict):
            raise ApiError(400, "invalid_request", "'suggestion' must be an object")
        suggestion = _suggestion_from_wire(suggestion_payload)
        try:
            session.accept_merge(a_index, b_index, suggestion)
        except ConflictError as exc:
            raise ApiError(409, "stale_suggestion", str(exc)) from None
        except IndexError as exc:
            raise ApiError(400, "out_of_range", str(exc)) from None
        return {
            "revision": session.revision,
            "paragraph_count": len(session.paragraphs),
            "text": session.full_text(),
        }

    @app.get("/api/session/{session_id}/cards")
    def cards(session_id: str, level: str, k: int | None = None):
        session = get_session(session_id)
        parsed = _parse_level(level, k)
        revision = session.revision
        cells = session.annotate(engine, parsed)
        return {
            "revision": revision,
            "level": parsed.wire_name,
            "cards": [{"index": i, "content": cell} for i, cell in enumerate(cells)],
        }

    @app.get("/api/session/{session_id}/status")
    def status(session_id: str):
        session = get_session(session_id)
        return {"pending": session.pending, "revision": session.revision}

    return app
