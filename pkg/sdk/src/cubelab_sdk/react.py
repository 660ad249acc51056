"""ReAct-style driver loop and replayable transcripts.

The callback owns the thinking: given the history so far and the latest
observation it returns the tool calls for one step (possibly ending with
final_answer). The loop owns the bookkeeping: it fetches observations, runs
the calls, marks step boundaries, stops on a terminal status, and records a
transcript that can be re-run against a fresh server.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from io import BytesIO
from typing import Callable, Sequence

from .client import ClientSession, ToolCall, ToolResult


@dataclass
class StepTrace:
    observation: dict
    calls: list[dict]
    results: list[str]


@dataclass
class Transcript:
    spec: dict
    steps: list[StepTrace] = field(default_factory=list)
    final_status: str = "running"
    passed: bool = False
    record: dict = field(default_factory=dict)
    callback_error: str | None = None

    def to_json(self) -> str:
        return json.dumps({
            "spec": self.spec,
            "steps": [s.__dict__ for s in self.steps],
            "final_status": self.final_status,
            "passed": self.passed,
            "record": self.record,
            "callback_error": self.callback_error,
        })

    @staticmethod
    def from_json(text: str) -> "Transcript":
        raw = json.loads(text)
        return Transcript(spec=raw["spec"],
                          steps=[StepTrace(**s) for s in raw["steps"]],
                          final_status=raw["final_status"], passed=raw["passed"],
                          record=raw.get("record", {}),
                          callback_error=raw.get("callback_error"))


def _observation_payload(result: ToolResult) -> dict:
    if result.kind == "image":
        buf = BytesIO()
        result.image.save(buf, format="PNG")
        return {"format": "png_base64", "data": base64.b64encode(buf.getvalue()).decode()}
    return {"format": "text", "data": result.text}


Callback = Callable[[list[StepTrace], ToolResult], Sequence[ToolCall]]


def react_loop(session: ClientSession, callback: Callback,
               max_steps: int = 20) -> Transcript:
    """Drive Thought-Code-Observation exchanges until the episode ends.

    Stops on a passed/failed status, on final_answer, or after max_steps; the
    session is always closed so the transcript carries the server's verdict.
    A callback exception is recorded, not raised.
    """
    transcript = Transcript(spec=dict(session.spec))
    try:
        for _ in range(max_steps):
            observation = session.get_observation()
            try:
                calls = list(callback(transcript.steps, observation))
            except Exception as exc:    # agent bugs end the episode gracefully
                transcript.callback_error = f"{type(exc).__name__}: {exc}"
                break
            trace = StepTrace(observation=_observation_payload(observation),
                              calls=[{"name": c.name, "args": c.args} for c in calls],
                              results=[])
            finished = False
            for call in calls:
                if call.name == "final_answer":
                    verdict = session.final_answer(call.args.get("answer", ""))
                    trace.results.append(f"final_answer -> {verdict.get('status')}")
                    finished = True
                    break
                result = session.tool(call.name, call.args)
                trace.results.append(result.brief())
            transcript.steps.append(trace)
            if finished:
                break
            if session.step_boundary() != "running":
                break
    finally:
        record = session.close()
        transcript.record = record if isinstance(record, dict) else {}
        transcript.final_status = transcript.record.get("status", session.status)
        transcript.passed = bool(transcript.record.get("passed",
                                                       session.status == "passed"))
    return transcript


def replay_transcript(transcript: Transcript, address) -> Transcript:
    """Re-run a transcript's tool calls against a fresh server session.

    Observations are fetched fresh (purity means they must match); the
    returned transcript's final status is compared by the caller.
    """
    def scripted(history: list[StepTrace], observation: ToolResult) -> list[ToolCall]:
        step = len(history)
        if step >= len(transcript.steps):
            return [ToolCall("final_answer")]
        return [ToolCall(c["name"], c["args"]) for c in transcript.steps[step].calls]

    session = ClientSession.connect(address, transcript.spec)
    return react_loop(session, scripted, max_steps=max(len(transcript.steps), 1))
