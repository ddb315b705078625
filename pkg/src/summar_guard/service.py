"""JSON-over-HTTP facade over sessions for the companion UI and tests.

One process hosts many sessions; requests for a session serialize through its
lock, responses carry no timestamps so identical request sequences produce
identical bodies.
"""

from __future__ import annotations

import json
import threading

from fastapi import FastAPI, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import properties
from .engine import spec_from_json, spec_to_json
from .errors import (
    DuplicateViewName,
    SummarGuardError,
    UnknownAttribute,
    UnknownInput,
    UnknownNode,
)
from .model import render_value
from .session import Session

ROW_PAGE_CAP = 1000


class SessionRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    def create(self, mode: str) -> str:
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter}"
            self._sessions[sid] = Session(mode=mode)
            return sid

    def get(self, sid: str) -> Session:
        s = self._sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid!r}")
        return s


def _table_summary(session: Session, ref: str) -> dict:
    table = session.resolve(ref)
    return {
        "name": ref,
        "kind": table.kind,
        "rows": len(table),
        "schema": [
            {"name": a.name, "role": a.role, "category": a.category,
             "dimension": a.dimension}
            for a in table.schema.attributes
        ],
    }


def _session_summary(sid: str, session: Session) -> dict:
    nodes = []
    for node in sorted(session.nodes.values(), key=lambda n: n.created_at):
        nodes.append({
            "id": node.id,
            "spec": spec_to_json(node.spec),
            "inputs": list(node.inputs),
            "rows": len(node.result),
            "schema": list(node.result.schema.names),
            "verdicts": [v.to_json() for v in node.verdict_log],
        })
    return {
        "session_id": sid,
        "mode": session.mode,
        "base_tables": sorted(session.base_tables),
        "nodes": nodes,
        "views": dict(sorted(session.views.items())),
        "focus": session.focus,
    }


def create_app() -> FastAPI:
    app = FastAPI(title="summar-guard")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = SessionRegistry()

    @app.exception_handler(SummarGuardError)
    async def engine_error(request, exc):
        status = 400
        if isinstance(exc, (UnknownInput, UnknownNode, UnknownAttribute)):
            status = 404
        elif isinstance(exc, DuplicateViewName):
            status = 409
        return JSONResponse({"error": type(exc).__name__, "message": str(exc)},
                            status_code=status)

    @app.post("/sessions")
    async def create_session(body: dict | None = None):
        mode = (body or {}).get("mode", properties.GSUM)
        if mode not in properties.MODES:
            raise HTTPException(400, f"unknown mode {mode!r}")
        return {"session_id": registry.create(mode)}

    @app.get("/sessions/{sid}")
    async def session_summary(sid: str):
        return _session_summary(sid, registry.get(sid))

    @app.post("/sessions/{sid}/tables")
    async def upload_table(sid: str, csv: UploadFile, declaration: str = Form(...)):
        session = registry.get(sid)
        try:
            decl = json.loads(declaration)
        except json.JSONDecodeError as exc:
            raise HTTPException(400, f"bad declaration JSON: {exc}")
        text = (await csv.read()).decode("utf-8")
        name = decl.get("name") or "table"
        kind = decl.get("kind", "fact")
        if kind == "dimension":
            parents: dict[str, list[str]] = {a: [] for a in decl.get("attrs", [])}
            for child, parent in decl.get("hierarchy", []):
                parents.setdefault(child, []).append(parent)
            session.declare_dimension(
                name, text, parents,
                nullable={a: True for a in decl.get("nullable", [])})
        elif kind == "fact":
            session.declare_fact(name, text, dims=decl.get("dims", {}),
                                 measures=decl.get("measures", {}),
                                 overrides=decl.get("overrides", {}))
        else:
            raise HTTPException(400, f"unknown table kind {kind!r}")
        return _table_summary(session, name)

    @app.post("/sessions/{sid}/query")
    async def run_query(sid: str, body: dict):
        session = registry.get(sid)
        try:
            spec = spec_from_json(body.get("spec", {}))
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(400, f"malformed query spec: {exc}")
        inputs = body.get("inputs") or ([session.focus] if session.focus else [])
        node, verdict = session.apply(spec, inputs, alias=body.get("alias"),
                                      force=bool(body.get("force")))
        if not verdict.accepted:
            return JSONResponse({"verdict": verdict.to_json()}, status_code=422)
        return {"node": _table_summary(session, node), "verdict": verdict.to_json()}

    @app.get("/sessions/{sid}/nodes/{ref}/rows")
    async def node_rows(sid: str, ref: str, limit: int = 100, offset: int = 0):
        table = registry.get(sid).resolve(ref)
        limit = max(0, min(limit, ROW_PAGE_CAP))
        offset = max(0, offset)
        page = table.rows[offset:offset + limit]
        return {
            "columns": list(table.schema.names),
            "rows": [[render_value(v) for v in r] for r in page],
            "total": len(table),
            "offset": offset,
        }

    @app.get("/sessions/{sid}/nodes/{ref}/properties")
    async def node_properties(sid: str, ref: str):
        table = registry.get(sid).resolve(ref)
        return {
            "table": ref,
            "dimension_attributes": sorted(table.schema.dimension_names),
            "properties": [p.to_json() for p in table.properties],
        }

    @app.get("/sessions/{sid}/nodes/{ref}/explain/{attr}")
    async def node_explain(sid: str, ref: str, attr: str):
        return registry.get(sid).explain(ref, attr)

    @app.post("/sessions/{sid}/focus")
    async def set_focus(sid: str, body: dict):
        session = registry.get(sid)
        node = body.get("node")
        if not node:
            raise HTTPException(400, "body must carry {'node': ...}")
        return {"focus": session.backtrack(node)}

    @app.post("/sessions/{sid}/views")
    async def save_view(sid: str, body: dict):
        session = registry.get(sid)
        name, node = body.get("name"), body.get("node")
        if not name or not node:
            raise HTTPException(400, "body must carry {'name': ..., 'node': ...}")
        session.save_view(name, node)
        return {"view": name, "node": node}

    @app.get("/sessions/{sid}/graphs/{dimension}")
    async def dimension_graph(sid: str, dimension: str, format: str = "json"):
        session = registry.get(sid)
        g = session.graphs.get(dimension)
        if g is None:
            raise HTTPException(404, f"unknown dimension {dimension!r}")
        if format == "dot":
            return PlainTextResponse(g.to_dot())
        return g.to_json()

    return app


app = create_app()
