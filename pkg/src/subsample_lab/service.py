"""HTTP session service wrapping the sequential labeling engine.

A session proposes point locations inside one sampling unit; a human (or a
scripted operator) labels them one by one.  After the initial batch is fully
labeled, every new label triggers the same stop check the simulation engine
uses, so a live session and a simulated one walk identical decision paths.
Sessions live in memory; an optional append-only journal (one JSON line per
event) allows interrupted sessions to be replayed.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field

from .adaptive import AdaptiveConfig, StopDecision, StopStatus, TraceEntry, check_tallies
from .designs import draw_point_order
from .legends import BinaryThreshold, Label, decide, legend_from_dict, legend_to_dict
from .stats import ConfidenceInterval, clopper_pearson, goodman_intervals

__all__ = [
    "SessionStore",
    "UnknownSessionError",
    "LabelConflictError",
    "create_app",
    "replay_journal",
]


class UnknownSessionError(KeyError):
    pass


class LabelConflictError(RuntimeError):
    pass


@dataclass
class _Session:
    session_id: str
    config: AdaptiveConfig
    side: int
    class_count: int
    seed: int
    image_url: str | None
    order: np.ndarray = field(repr=False)
    labels: dict[int, int] = field(default_factory=dict)
    proposed: int = 0
    status: str = "Active"
    final_label: Label | None = None
    trace: list[TraceEntry] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def cap(self) -> int:
        return min(self.config.n_max, self.side * self.side)


def _point_xy(flat_index: int, side: int) -> tuple[float, float]:
    # center-of-cell fractions in [0, 1)^2; x runs along columns
    row, col = divmod(int(flat_index), side)
    return (col + 0.5) / side, (row + 0.5) / side


class SessionStore:
    """All live sessions plus the optional event journal.

    The store lock guards the session table and journal appends; each session
    carries its own lock so labeling traffic for different sessions never
    serializes.
    """

    def __init__(self, journal_path=None):
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None

    def _journal(self, event: dict) -> None:
        if self._journal_path is None:
            return
        line = json.dumps(event, sort_keys=True)
        with open(self._journal_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def create(self, legend, alpha: float, n_init: int = 9, n_max: int = 144,
               side: int = 180, class_count: int = 2, seed: int = 0,
               image_url: str | None = None, session_id: str | None = None,
               journal: bool = True) -> _Session:
        if class_count < 2:
            raise ValueError(f"class_count must be >= 2, got {class_count}")
        if side < 2:
            raise ValueError(f"unit side must be >= 2, got {side}")
        if isinstance(legend, BinaryThreshold):
            worst = max(legend.target_classes)
            if worst >= class_count:
                raise ValueError(
                    f"target class {worst} outside the {class_count}-class legend"
                )
        config = AdaptiveConfig(legend=legend, alpha=alpha, n_init=n_init, n_max=n_max)
        session = _Session(
            session_id=session_id or uuid.uuid4().hex,
            config=config,
            side=side,
            class_count=class_count,
            seed=seed,
            image_url=image_url,
            order=draw_point_order(side * side, seed),
        )
        session.proposed = min(config.n_init, session.cap)
        with self._lock:
            if session.session_id in self._sessions:
                raise ValueError(f"session id {session.session_id} already exists")
            self._sessions[session.session_id] = session
            if journal:
                self._journal({
                    "event": "create",
                    "session_id": session.session_id,
                    "legend": legend_to_dict(legend),
                    "alpha": alpha,
                    "n_init": n_init,
                    "n_max": n_max,
                    "side": side,
                    "class_count": class_count,
                    "seed": seed,
                    "image_url": image_url,
                })
        return session

    def get(self, session_id: str) -> _Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def submit_label(self, session_id: str, point_index: int, class_value: int,
                     journal: bool = True) -> _Session:
        session = self.get(session_id)
        with session.lock:
            if session.status != "Active":
                raise LabelConflictError(
                    f"session is {session.status}; no further labels accepted"
                )
            if not 0 <= point_index < session.proposed:
                raise LabelConflictError(
                    f"point {point_index} has not been proposed "
                    f"(proposed so far: {session.proposed})"
                )
            if point_index in session.labels:
                raise LabelConflictError(f"point {point_index} is already labeled")
            if not 0 <= class_value < session.class_count:
                raise ValueError(
                    f"class {class_value} outside [0, {session.class_count})"
                )
            session.labels[point_index] = class_value
            if len(session.labels) == session.proposed:
                self._advance(session)
        if journal:
            with self._lock:
                self._journal({
                    "event": "label",
                    "session_id": session_id,
                    "point_index": point_index,
                    "class": class_value,
                })
        return session

    def _advance(self, session: _Session) -> None:
        # all proposed points are labeled: run the stop check, then either
        # finish or propose exactly one more point
        n = len(session.labels)
        tallies = np.bincount(
            np.fromiter(session.labels.values(), dtype=np.int64, count=n),
            minlength=session.class_count,
        )
        decision = check_tallies(tallies, n, session.config)
        if decision.status is StopStatus.CONTINUE and n >= session.cap:
            label = decide(tallies / n, session.config.legend)
            decision = StopDecision(StopStatus.STOP_CAPPED, label, decision.intervals)
        session.trace.append(TraceEntry(n, tuple(int(c) for c in tallies), decision))
        if decision.status is StopStatus.STOP_CONFIDENT:
            session.status = "Completed"
            session.final_label = decision.label
        elif decision.status is StopStatus.STOP_CAPPED:
            session.status = "Capped"
            session.final_label = decision.label
        else:
            session.proposed += 1

    def proposed_points(self, session: _Session) -> list[dict]:
        points = []
        for i in range(session.proposed):
            x, y = _point_xy(session.order[i], session.side)
            entry = {"index": i, "x": x, "y": y}
            if i in session.labels:
                entry["class"] = session.labels[i]
            points.append(entry)
        return points

    def state_payload(self, session: _Session) -> dict:
        with session.lock:
            n = len(session.labels)
            tallies = np.bincount(
                np.fromiter(session.labels.values(), dtype=np.int64, count=n),
                minlength=session.class_count,
            )
            legend = session.config.legend
            if isinstance(legend, BinaryThreshold):
                if n == 0:
                    ci = ConfidenceInterval(0.0, 1.0, session.config.alpha)
                else:
                    m = int(tallies[sorted(legend.target_classes)].sum())
                    ci = clopper_pearson(m, n, session.config.alpha)
                ci_payload = {"lower": ci.lower, "upper": ci.upper}
            else:
                if n == 0:
                    cis = [ConfidenceInterval(0.0, 1.0, session.config.alpha)
                           for _ in range(session.class_count)]
                else:
                    cis = goodman_intervals(tallies, session.config.alpha)
                ci_payload = [{"lower": c.lower, "upper": c.upper} for c in cis]
            proportions = (tallies / n) if n else np.zeros(session.class_count)
            final = None
            if session.final_label is not None:
                value = session.final_label.value
                final = {
                    "value": bool(value) if isinstance(legend, BinaryThreshold) else int(value),
                    "tie_flag": session.final_label.tie_flag,
                }
            return {
                "session_id": session.session_id,
                "status": session.status,
                "legend": legend_to_dict(legend),
                "alpha": session.config.alpha,
                "n_init": session.config.n_init,
                "n_max": session.cap,
                "class_count": session.class_count,
                "side": session.side,
                "image_url": session.image_url,
                "n_used": n,
                "tallies": [int(t) for t in tallies],
                "proportions": [float(p) for p in proportions],
                "ci": ci_payload,
                "proposed_points": self.proposed_points(session),
                "final_label": final,
            }

    def trace_payload(self, session: _Session) -> list[dict]:
        with session.lock:
            entries = list(session.trace)
        out = []
        for entry in entries:
            decision: dict = {"status": entry.decision.status.value}
            if entry.decision.label is not None:
                decision["label"] = {
                    "value": entry.decision.label.value,
                    "tie_flag": entry.decision.label.tie_flag,
                }
            decision["intervals"] = [
                {"lower": c.lower, "upper": c.upper}
                for c in entry.decision.intervals
            ]
            out.append({"n": entry.n, "tallies": list(entry.tallies),
                        "decision": decision})
        return out


def replay_journal(journal_path) -> SessionStore:
    """Rebuild a store by re-running a journal's create/label events.

    The rebuilt store keeps appending to the same journal.
    """
    path = Path(journal_path)
    store = SessionStore(journal_path=None)
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "create":
                    store.create(
                        legend=legend_from_dict(event["legend"]),
                        alpha=event["alpha"],
                        n_init=event["n_init"],
                        n_max=event["n_max"],
                        side=event["side"],
                        class_count=event["class_count"],
                        seed=event["seed"],
                        image_url=event.get("image_url"),
                        session_id=event["session_id"],
                        journal=False,
                    )
                elif event["event"] == "label":
                    store.submit_label(event["session_id"], event["point_index"],
                                       event["class"], journal=False)
                else:
                    raise ValueError(f"unknown journal event {event['event']!r}")
    store._journal_path = path
    return store


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    legend: dict
    alpha: float
    n_init: int = 9
    n_max: int = 144
    unit: dict | None = None
    image_url: str | None = None
    class_count: int = 2
    seed: int = 0


class SubmitLabelRequest(BaseModel):
    # the wire name "class" is a Python keyword, hence the alias
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    point_index: int
    class_value: int = Field(alias="class")


def create_app(store: SessionStore | None = None) -> FastAPI:
    """Build the HTTP app; pass a store to share sessions across apps."""
    app = FastAPI(title="subsample-lab session service")
    # The browser client is served from its own origin (any static file
    # server); sessions carry no credentials, so a permissive policy is fine.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.store = store if store is not None else SessionStore()

    def _get(session_id: str) -> _Session:
        try:
            return app.state.store.get(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        side = 180
        if request.unit is not None:
            if set(request.unit) - {"side"}:
                raise HTTPException(status_code=422,
                                    detail="unit accepts only a 'side' field")
            side = int(request.unit.get("side", 180))
        try:
            legend = legend_from_dict(request.legend)
            session = app.state.store.create(
                legend=legend,
                alpha=request.alpha,
                n_init=request.n_init,
                n_max=request.n_max,
                side=side,
                class_count=request.class_count,
                seed=request.seed,
                image_url=request.image_url,
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "session_id": session.session_id,
            "proposed_points": app.state.store.proposed_points(session),
        }

    @app.post("/sessions/{session_id}/labels")
    def submit_label(session_id: str, request: SubmitLabelRequest):
        _get(session_id)
        try:
            session = app.state.store.submit_label(
                session_id, request.point_index, request.class_value)
        except LabelConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return app.state.store.state_payload(session)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return app.state.store.state_payload(_get(session_id))

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        return {"trace": app.state.store.trace_payload(_get(session_id))}

    return app
