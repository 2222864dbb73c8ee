"""Wire vocabulary shared by the HTTP layer, the log store, and clients.

Pipeline results are a tagged union: Applied / Rejected / Lost / DecodeError.
Rejected and Lost are reused from the state machine and the channel; they are
the same outcomes, just surfaced one layer up. JSON shapes here are the
protocol contract the operator console consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

from hoverbot.channel import Lost
from hoverbot.codec import PulseFrame
from hoverbot.commands import Command, FlightState, Rejected
from hoverbot.sim import Telemetry

__all__ = [
    "Applied",
    "DecodeError",
    "PipelineResult",
    "DispatchReport",
    "LogEntry",
    "result_to_json",
    "result_from_json",
    "report_to_json",
    "entry_to_json",
    "entry_from_json",
    "telemetry_to_json",
]


@dataclass(frozen=True)
class Applied:
    """Command made it through the whole pipeline and actuated the vehicle."""

    new_state: FlightState


@dataclass(frozen=True)
class DecodeError:
    """Delivered frame could not be turned back into the dispatched command.

    kind is one of bad_sync, unrecognized_code, command_mismatch.
    """

    kind: str


PipelineResult = Applied | Rejected | Lost | DecodeError


@dataclass(frozen=True)
class DispatchReport:
    """What one dispatch did, plus the commands now legal for the station."""

    pipeline_result: PipelineResult
    new_state: FlightState
    valid_next: frozenset[Command]


@dataclass(frozen=True)
class LogEntry:
    """One dispatched command in a station's durable log.

    Sequences are gap-free and strictly increasing per station. Applied
    entries always carry both frames; pre-check rejections carry neither.
    injected marks dead-man commands issued by the service itself.
    """

    sequence: int
    timestamp: str
    session_id: str
    command: Command
    pipeline_result: PipelineResult
    frame_sent: PulseFrame | None = None
    frame_received: PulseFrame | None = None
    injected: bool = False


def result_to_json(result: PipelineResult) -> dict:
    if isinstance(result, Applied):
        return {"status": "applied", "new_state": result.new_state.value}
    if isinstance(result, Rejected):
        return {"status": "rejected", "reason": result.reason}
    if isinstance(result, Lost):
        return {"status": "lost"}
    if isinstance(result, DecodeError):
        return {"status": "decode_error", "kind": result.kind}
    raise TypeError(f"not a pipeline result: {result!r}")


def result_from_json(raw: dict) -> PipelineResult:
    status = raw["status"]
    if status == "applied":
        return Applied(FlightState(raw["new_state"]))
    if status == "rejected":
        return Rejected(raw["reason"])
    if status == "lost":
        return Lost()
    if status == "decode_error":
        return DecodeError(raw["kind"])
    raise ValueError(f"unknown pipeline result status: {status!r}")


def report_to_json(report: DispatchReport) -> dict:
    return {
        "pipeline_result": result_to_json(report.pipeline_result),
        "new_state": report.new_state.value,
        "valid_next": sorted(command.value for command in report.valid_next),
    }


def entry_to_json(entry: LogEntry) -> dict:
    return {
        "sequence": entry.sequence,
        "timestamp": entry.timestamp,
        "session_id": entry.session_id,
        "command": entry.command.value,
        "pipeline_result": result_to_json(entry.pipeline_result),
        "frame_sent": entry.frame_sent.as_text() if entry.frame_sent else None,
        "frame_received": entry.frame_received.as_text() if entry.frame_received else None,
        "injected": entry.injected,
    }


def entry_from_json(raw: dict) -> LogEntry:
    return LogEntry(
        sequence=raw["sequence"],
        timestamp=raw["timestamp"],
        session_id=raw["session_id"],
        command=Command(raw["command"]),
        pipeline_result=result_from_json(raw["pipeline_result"]),
        frame_sent=PulseFrame.from_text(raw["frame_sent"]) if raw["frame_sent"] else None,
        frame_received=(
            PulseFrame.from_text(raw["frame_received"]) if raw["frame_received"] else None
        ),
        injected=raw.get("injected", False),
    )


def telemetry_to_json(sample: Telemetry) -> dict:
    x, y, z = sample.position
    return {
        "clock": sample.clock,
        "state": sample.flight_state.value,
        "x": x,
        "y": y,
        "z": z,
        "heading": sample.heading,
        "distance_to_station": sample.distance_to_station,
        "link": sample.link.value,
    }
