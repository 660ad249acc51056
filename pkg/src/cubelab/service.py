"""Session service: the wire-protocol surface over live sessions.

ServiceCore is the transport-free request handler (used directly by tests and
in-process agents); serve() exposes it over a loopback TCP socket with the
framing from protocol.py. Budgets are enforced server-side: a client that
ignores step accounting still receives failed_budget at the boundary.
"""

from __future__ import annotations

import base64
import socketserver
import threading
import uuid
from pathlib import Path

from .codecs import decode_initial
from .cube import CubeError, CubeState, scramble
from .metrics import MetricKind
from .observe import RenderedImage, Tier, WrongTier
from .protocol import error_message, recv_message, send_message
from .session import (EpisodeRecord, Session, SessionConfig, SessionStatus,
                      SessionTerminated, SolverTool, ToolUnavailable)
from .tasks import Split, load_manifest
from .twophase import PruningTables


class ServiceCore:
    """Thread-safe request handler; one instance serves many sessions."""

    def __init__(self, tables: PruningTables | None = None, split: Split | None = None):
        self.tables = tables
        self.split = split
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._records: dict[str, EpisodeRecord] = {}
        self._registry_lock = threading.Lock()

    # -- request entry point ---------------------------------------------------

    def handle(self, message: dict) -> dict:
        if not isinstance(message, dict) or "kind" not in message:
            return error_message("BAD_MESSAGE", "request must be an object with a 'kind'")
        kind = message["kind"]
        try:
            if kind == "create_session":
                return self._create(message.get("payload") or {})
            if kind == "action":
                return self._action(message)
            if kind == "close":
                return self._close(message)
            return error_message("BAD_MESSAGE", f"unknown kind {kind!r}")
        except SessionTerminated as exc:
            return error_message("SESSION_TERMINATED", str(exc), message.get("session"))
        except ToolUnavailable as exc:
            return error_message("TOOL_UNAVAILABLE", str(exc), message.get("session"))
        except WrongTier as exc:
            return error_message("WRONG_TIER", str(exc), message.get("session"))
        except (KeyError, TypeError, ValueError, CubeError) as exc:
            return error_message("BAD_ARGS", f"{type(exc).__name__}: {exc}",
                                 message.get("session"))

    # -- lifecycle ---------------------------------------------------------------

    def _create(self, payload: dict) -> dict:
        state, case_id, depth = self._initial_state(payload)
        config = SessionConfig(
            tier=Tier(payload.get("tier", "full_symbolic")),
            metric=MetricKind(payload.get("metric", "no_reward")),
            solver_tool=SolverTool(payload.get("solver_tool", "none")),
            max_steps=int(payload.get("max_steps", 20)),
            timeout=float(payload.get("timeout", 1800.0)),
            mode=payload.get("mode", "code"),
            case_id=case_id,
            depth=depth,
        )
        session = Session(state, config, tables=self.tables)
        sid = uuid.uuid4().hex[:12]
        with self._registry_lock:
            self._sessions[sid] = session
            self._locks[sid] = threading.Lock()
        return self._status_message(sid, session)

    def _initial_state(self, payload: dict) -> tuple[CubeState, str | None, int | None]:
        if "case_id" in payload:
            if self.split is None:
                raise ValueError("service has no manifest loaded")
            case = self.split.case_by_id(payload["case_id"])
            return case.cube(), case.id, case.depth
        if "state" in payload:
            return decode_initial(payload["state"]), None, payload.get("depth")
        if "scramble" in payload:
            spec = payload["scramble"]
            state, _ = scramble(int(spec.get("seed", 0)), int(spec["length"]))
            return state, None, payload.get("depth")
        raise ValueError("create_session needs one of case_id / state / scramble")

    def _get(self, message: dict) -> tuple[str, Session, threading.Lock]:
        sid = message.get("session")
        with self._registry_lock:
            session = self._sessions.get(sid)
            lock = self._locks.get(sid)
        if session is None:
            raise KeyError(f"SESSION_NOT_FOUND:{sid}")
        return sid, session, lock

    def _close(self, message: dict) -> dict:
        try:
            sid, session, lock = self._get(message)
        except KeyError:
            return error_message("SESSION_NOT_FOUND", f"no session {message.get('session')!r}")
        with lock:
            record = session.close()
            with self._registry_lock:
                self._records[sid] = record
                self._sessions.pop(sid, None)
        return {"kind": "status", "session": sid,
                "payload": {"status": record.final_status, "passed": record.passed,
                            "moves_made": record.moves_made,
                            "steps_used": record.steps_used,
                            "record": record.__dict__}}

    # -- actions -------------------------------------------------------------------

    def _action(self, message: dict) -> dict:
        try:
            sid, session, lock = self._get(message)
        except KeyError:
            return error_message("SESSION_NOT_FOUND", f"no session {message.get('session')!r}")
        payload = message.get("payload") or {}
        name = payload.get("name")
        args = payload.get("args") or {}
        with lock:
            if name == "make_move":
                reward = session.make_move(args["move"])
                return {"kind": "reward", "session": sid,
                        "payload": {"reward": reward, "status": session.status.value,
                                    "moves_made": session.moves_made}}
            if name == "submit_moves":
                rewards = session.submit_moves(args.get("moves", []))
                return {"kind": "reward", "session": sid,
                        "payload": {"rewards": rewards, "status": session.status.value,
                                    "moves_made": session.moves_made}}
            if name == "get_observation":
                obs = session.get_observation()
                return {"kind": "observation", "session": sid,
                        "payload": self._encode_observation(obs)}
            if name == "apply_view_transformation":
                viewpoint = session.apply_view_transformation(args["direction"])
                return {"kind": "status", "session": sid,
                        "payload": {"status": session.status.value,
                                    "viewpoint": viewpoint.describe()}}
            if name == "call_planner":
                text = session.call_planner(args["representation"])
                return {"kind": "observation", "session": sid,
                        "payload": {"format": "text", "data": text, "source": "planner"}}
            if name == "call_golden_planner":
                text = session.call_golden_planner(args["representation"])
                return {"kind": "observation", "session": sid,
                        "payload": {"format": "text", "data": text, "source": "planner"}}
            if name == "step_boundary":
                status = session.step_boundary()
                return self._status_message(sid, session, status=status)
            if name == "final_answer":
                return self._status_message(sid, session)
            return error_message("BAD_MESSAGE", f"unknown action {name!r}", sid)

    @staticmethod
    def _encode_observation(obs) -> dict:
        if isinstance(obs, RenderedImage):
            return {"format": "png_base64",
                    "data": base64.b64encode(obs.to_png_bytes()).decode(),
                    "width": obs.width, "height": obs.height}
        return {"format": "text", "data": obs}

    @staticmethod
    def _status_message(sid: str, session: Session,
                        status: SessionStatus | None = None) -> dict:
        status = status or session.status
        return {"kind": "status", "session": sid,
                "payload": {"status": status.value,
                            "passed": status == SessionStatus.PASSED,
                            "steps_used": session.steps_used,
                            "moves_made": session.moves_made,
                            "tier": session.config.tier.value}}

    def record_for(self, sid: str) -> EpisodeRecord | None:
        with self._registry_lock:
            return self._records.get(sid)


class _Handler(socketserver.BaseRequestHandler):
    def handle(self) -> None:
        core: ServiceCore = self.server.core
        while True:
            try:
                message = recv_message(self.request)
            except Exception:
                break
            if message is None:
                break
            try:
                response = core.handle(message)
            except Exception as exc:   # never kill the connection
                response = error_message("INTERNAL", f"{type(exc).__name__}: {exc}")
            send_message(self.request, response)


class CubeService(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], core: ServiceCore):
        super().__init__(address, _Handler)
        self.core = core


def serve(bind: str = "127.0.0.1:7424", tables: PruningTables | None = None,
          manifest: Path | None = None, background: bool = False) -> CubeService:
    host, _, port = bind.partition(":")
    split = load_manifest(manifest) if manifest else None
    core = ServiceCore(tables=tables, split=split)
    server = CubeService((host, int(port or 7424)), core)
    if background:
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
    else:
        server.serve_forever()
    return server
