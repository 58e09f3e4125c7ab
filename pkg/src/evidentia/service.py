"""HTTP session service over the assessment cycle.

The request core is a pure method, ``SessionService.handle_request(method,
path, body) -> (status, payload)``, so the whole API surface is testable
without sockets.  A thin ``ThreadingHTTPServer`` wrapper speaks actual HTTP
and can also serve a static console build from a directory.

Sessions persist as one JSON snapshot file each, written atomically
(temp file + rename), so a killed process never leaves a torn snapshot.
Mutating endpoints require the client's ``expected_revision`` and answer 409
when it is stale; that is the whole concurrency contract for one session.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any

from .cycle import (
    AssessmentState,
    CycleConfig,
    InformationSource,
    check_termination,
    classify_hypotheses,
    compose_commitment,
    integrate,
    invoke_source,
    rank_sources,
    set_goals,
    sort_findings,
    start_session,
)
from .errors import (
    AlreadyObservedError,
    DuplicateEvidenceError,
    EvidentiaError,
    NoSuchNodeError,
    NoSuchSessionError,
    NoSuchSourceError,
    NotTerminatedError,
    NoUsableSourceError,
    ParseError,
    RevisionConflictError,
    UnobservableFindingError,
    ZeroNormalizerError,
    ZeroProbabilityEvidenceError,
)
from .network import network_from_dict, network_to_dict
from .propagation import evidence_from_dict, initialize

log = logging.getLogger(__name__)

DEFAULT_DATA_DIR = "evidentia_sessions"
DATA_DIR_ENV = "EVIDENTIA_DATA"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    state: AssessmentState
    revision: int = 1
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def snapshot_session(session: Session) -> dict:
    """Whole-session snapshot; loading it back reproduces the session."""
    state = session.state
    network = state.network
    return {
        "session_id": session.id,
        "revision": session.revision,
        "created": session.created,
        "updated": session.updated,
        "network": network_to_dict(network),
        "config": state.config.to_dict(),
        "sources": [s.to_dict() for s in state.sources],
        "ledger": [f.to_dict(network) for f in state.belief_state.ledger],
        "spent": state.spent,
        "invocations": state.invocations,
        "failed_sources": sorted(state.failed_sources),
        "pending_yields": list(state.pending_yields),
        "trace": list(state.trace),
    }


def session_from_snapshot(snapshot: dict) -> Session:
    """Rebuild a session; beliefs are recomputed from the persisted ledger."""
    network = network_from_dict(snapshot["network"])
    config = CycleConfig.from_dict(snapshot["config"])
    sources = tuple(InformationSource.from_dict(s) for s in snapshot["sources"])
    belief_state = initialize(network)
    prior_beliefs = dict(belief_state.belief_map)
    from .propagation import assert_evidence

    for raw in snapshot["ledger"]:
        belief_state = assert_evidence(belief_state, evidence_from_dict(raw, network))
    state = AssessmentState(
        belief_state=belief_state,
        config=config,
        sources=sources,
        prior_beliefs=prior_beliefs,
        spent=float(snapshot["spent"]),
        invocations=int(snapshot["invocations"]),
        failed_sources=set(snapshot["failed_sources"]),
        pending_yields=list(snapshot["pending_yields"]),
        trace=list(snapshot["trace"]),
    )
    state.goals = set_goals(state)
    return Session(
        id=snapshot["session_id"],
        state=state,
        revision=int(snapshot["revision"]),
        created=snapshot["created"],
        updated=snapshot["updated"],
    )


class SessionStore:
    """In-memory session map with one JSON snapshot file per session.

    Pass ``directory=None`` for an ephemeral store (unit tests).  With a
    directory, every persisted session is reloaded on construction.
    """

    def __init__(self, directory: str | Path | None):
        self._dir = Path(directory) if directory is not None else None
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.json")):
                try:
                    snapshot = json.loads(path.read_text())
                    session = session_from_snapshot(snapshot)
                except (OSError, ValueError, KeyError, EvidentiaError) as exc:
                    log.warning("skipping unloadable snapshot %s: %s", path, exc)
                    continue
                self._sessions[session.id] = session

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session
        self.persist(session)

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise NoSuchSessionError(f"no session {session_id!r}")
        return session

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)

    def persist(self, session: Session) -> None:
        if self._dir is None:
            return
        path = self._dir / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        payload = json.dumps(snapshot_session(session), indent=2)
        with open(tmp, "w") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)


_ROUTES: list[tuple[str, re.Pattern, str]] = [
    ("POST", re.compile(r"^/sessions/?$"), "create"),
    ("GET", re.compile(r"^/sessions/?$"), "list"),
    ("GET", re.compile(r"^/sessions/([^/]+)/?$"), "describe"),
    ("GET", re.compile(r"^/sessions/([^/]+)/beliefs/?$"), "beliefs"),
    ("GET", re.compile(r"^/sessions/([^/]+)/hypotheses/?$"), "hypotheses"),
    ("GET", re.compile(r"^/sessions/([^/]+)/goals/?$"), "goals"),
    ("GET", re.compile(r"^/sessions/([^/]+)/sources/?$"), "sources"),
    ("POST", re.compile(r"^/sessions/([^/]+)/evidence/?$"), "evidence"),
    ("POST", re.compile(r"^/sessions/([^/]+)/invoke/?$"), "invoke"),
    ("GET", re.compile(r"^/sessions/([^/]+)/termination/?$"), "termination"),
    ("POST", re.compile(r"^/sessions/([^/]+)/commit/?$"), "commit"),
    ("GET", re.compile(r"^/sessions/([^/]+)/trace/?$"), "trace"),
]

_SESSION_BODY_KEYS = {"network", "config", "sources", "initial_findings"}


def _error(status: int, code: str, message: str) -> tuple[int, dict]:
    return status, {"error": {"code": code, "message": message}}


class SessionService:
    """Pure request handling over a SessionStore."""

    def __init__(self, store: SessionStore):
        self.store = store

    # -- dispatch ----------------------------------------------------------

    def handle_request(
        self, method: str, path: str, body: str | bytes | None = None
    ) -> tuple[int, dict]:
        path = path.split("?", 1)[0]
        matched_path = False
        for verb, pattern, name in _ROUTES:
            match = pattern.match(path)
            if not match:
                continue
            matched_path = True
            if verb != method:
                continue
            try:
                payload = self._decode_body(body) if verb == "POST" else None
                handler = getattr(self, f"_handle_{name}")
                return handler(*match.groups(), payload) if match.groups() else handler(payload)
            except NoSuchSessionError as exc:
                return _error(404, exc.code, str(exc))
            except (NoSuchNodeError, NoSuchSourceError) as exc:
                return _error(404, exc.code, str(exc))
            except (RevisionConflictError, DuplicateEvidenceError, NotTerminatedError) as exc:
                return _error(409, exc.code, str(exc))
            except (
                ZeroProbabilityEvidenceError,
                ZeroNormalizerError,
                UnobservableFindingError,
                AlreadyObservedError,
            ) as exc:
                return _error(422, exc.code, str(exc))
            except (ParseError, _BadRequest) as exc:
                code = exc.code if isinstance(exc, ParseError) else "ERR_PARSE"
                return _error(400, code, str(exc))
            except EvidentiaError as exc:
                return _error(400, exc.code, str(exc))
            except (ValueError, TypeError, KeyError) as exc:
                return _error(400, "ERR_PARSE", f"{type(exc).__name__}: {exc}")
        if matched_path:
            return _error(405, "ERR_METHOD", f"method {method} not allowed on {path}")
        return _error(404, "ERR_NOT_FOUND", f"no route for {path}")

    @staticmethod
    def _decode_body(body: str | bytes | None) -> dict:
        if body is None or body == b"" or body == "":
            raise _BadRequest("request body required")
        if isinstance(body, bytes):
            body = body.decode("utf-8", errors="replace")
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            raise _BadRequest(f"malformed JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise _BadRequest("body must be a JSON object")
        return payload

    # -- handlers ----------------------------------------------------------

    def _handle_create(self, payload: dict) -> tuple[int, dict]:
        unknown = set(payload) - _SESSION_BODY_KEYS
        if unknown:
            raise _BadRequest(f"unknown session fields: {sorted(unknown)}")
        if "network" not in payload:
            raise _BadRequest("missing required field 'network'")
        network = network_from_dict(payload["network"])
        config = CycleConfig.from_dict(payload.get("config") or {})
        sources = tuple(
            InformationSource.from_dict(raw) for raw in payload.get("sources") or []
        )
        findings = [
            evidence_from_dict(raw, network) for raw in payload.get("initial_findings") or []
        ]
        state = start_session(network, config=config, sources=sources, initial_findings=findings)
        session = Session(id=uuid.uuid4().hex[:12], state=state)
        self.store.add(session)
        return 201, {"session_id": session.id, "revision": session.revision}

    def _handle_list(self, _payload: None) -> tuple[int, dict]:
        return 200, {"sessions": self.store.ids()}

    def _handle_describe(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        state = session.state
        return 200, {
            "session_id": session.id,
            "revision": session.revision,
            "created": session.created,
            "updated": session.updated,
            "network": network_to_dict(state.network),
            "config": state.config.to_dict(),
            "sources": [s.to_dict() for s in state.sources],
            "ledger": [f.to_dict(state.network) for f in state.belief_state.ledger],
            "spent": state.spent,
            "invocations": state.invocations,
            "failed_sources": sorted(state.failed_sources),
            "pending_yields": list(state.pending_yields),
        }

    def _handle_beliefs(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        beliefs = {
            node_id: [float(x) for x in vector]
            for node_id, vector in session.state.belief_state.belief_map.items()
        }
        return 200, {"revision": session.revision, "beliefs": beliefs}

    def _handle_hypotheses(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        statuses = classify_hypotheses(session.state)
        return 200, {
            "revision": session.revision,
            "hypotheses": [h.to_dict() for h in statuses],
        }

    def _handle_goals(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        goals = set_goals(session.state)
        return 200, {"revision": session.revision, "goals": [g.to_dict() for g in goals]}

    def _handle_sources(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        state = session.state
        goals = set_goals(state)
        ranked: list[dict] = []
        if goals:
            try:
                ranked = [r.to_dict() for r in rank_sources(state, goals)]
            except NoUsableSourceError:
                ranked = []
        return 200, {"revision": session.revision, "ranked": ranked}

    def _handle_evidence(self, session_id: str, payload: dict) -> tuple[int, dict]:
        session = self.store.get(session_id)
        with session.lock:
            self._check_revision(session, payload)
            raw_findings = payload.get("findings")
            if not isinstance(raw_findings, list) or not raw_findings:
                raise _BadRequest("'findings' must be a nonempty array")
            network = session.state.network
            findings = [evidence_from_dict(raw, network) for raw in raw_findings]
            sorted_findings = sort_findings(session.state, findings)
            _, delta = integrate(session.state, findings)
            session.state.goals = set_goals(session.state)
            self._bump(session)
            return 200, {
                "revision": session.revision,
                "delta": delta.to_dict(),
                "sorted_findings": [s.to_dict(network) for s in sorted_findings],
            }

    def _handle_invoke(self, session_id: str, payload: dict) -> tuple[int, dict]:
        session = self.store.get(session_id)
        with session.lock:
            self._check_revision(session, payload)
            source_id = payload.get("source_id")
            if not isinstance(source_id, str):
                raise _BadRequest("'source_id' must be a string")
            yields = invoke_source(session.state, source_id)
            self._bump(session)
            return 200, {
                "revision": session.revision,
                "yields": yields,
                "spent": session.state.spent,
            }

    def _handle_termination(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        verdict = check_termination(session.state)
        return 200, {"revision": session.revision, **verdict.to_dict()}

    def _handle_commit(self, session_id: str, payload: dict) -> tuple[int, dict]:
        session = self.store.get(session_id)
        with session.lock:
            self._check_revision(session, payload)
            report = compose_commitment(session.state)
            self._bump(session)
            return 200, {
                "revision": session.revision,
                "report": report.to_dict(session.state.network),
            }

    def _handle_trace(self, session_id: str, _payload: None) -> tuple[int, dict]:
        session = self.store.get(session_id)
        return 200, {"revision": session.revision, "trace": list(session.state.trace)}

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def _check_revision(session: Session, payload: dict) -> None:
        expected = payload.get("expected_revision")
        if not isinstance(expected, int) or isinstance(expected, bool):
            raise _BadRequest("'expected_revision' must be an integer")
        if expected != session.revision:
            raise RevisionConflictError(
                f"expected_revision {expected} does not match current revision "
                f"{session.revision}"
            )

    def _bump(self, session: Session) -> None:
        session.revision += 1
        session.updated = _now()
        self.store.persist(session)


class _BadRequest(Exception):
    pass


# ---------------------------------------------------------------------------
# HTTP wrapper.


def _make_handler(service: SessionService, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            log.debug("%s - %s", self.address_string(), fmt % args)

        def _send_json(self, status: int, payload: dict) -> None:
            data = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def _api(self) -> None:
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else None
            status, payload = service.handle_request(self.command, self.path, body)
            self._send_json(status, payload)

        def do_POST(self) -> None:
            self._api()

        def do_GET(self) -> None:
            if self.path.split("?", 1)[0].startswith("/sessions"):
                self._api()
                return
            if static_dir is not None and self._serve_static():
                return
            self._send_json(404, {"error": {"code": "ERR_NOT_FOUND", "message": self.path}})

        def do_OPTIONS(self) -> None:
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def _serve_static(self) -> bool:
            rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
            root = static_dir.resolve()
            candidate = (root / rel).resolve()
            if not candidate.is_relative_to(root) or not candidate.is_file():
                return False
            content_types = {
                ".html": "text/html; charset=utf-8",
                ".js": "text/javascript",
                ".css": "text/css",
                ".json": "application/json",
                ".svg": "image/svg+xml",
                ".map": "application/json",
            }
            data = candidate.read_bytes()
            self.send_response(200)
            self.send_header(
                "Content-Type", content_types.get(candidate.suffix, "application/octet-stream")
            )
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
            return True

    return Handler


def make_server(
    port: int,
    data_dir: str | Path | None,
    static_dir: str | Path | None = None,
    host: str = "127.0.0.1",
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; port 0 picks a free port."""
    service = SessionService(SessionStore(data_dir))
    handler = _make_handler(service, Path(static_dir) if static_dir else None)
    server = ThreadingHTTPServer((host, port), handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def resolve_data_dir(flag_value: str | None) -> str:
    """Flag wins over the environment override, which wins over the default."""
    if flag_value:
        return flag_value
    return os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR


def serve(
    port: int,
    data_dir: str | Path | None,
    static_dir: str | Path | None = None,
    host: str = "127.0.0.1",
) -> None:
    server = make_server(port, data_dir, static_dir, host)
    actual = server.server_address[1]
    print(f"listening on http://{host}:{actual} (sessions in {data_dir or 'memory'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
