"""Network-facing ground-control service.

Station registry, exclusive operator sessions, the command dispatch pipeline
(state-machine pre-check, port write, frame encode, channel transmit, decode,
actuate), durable command logging, telemetry fan-out, and the HTTP wire
protocol on top.
"""

from hoverbot.service.config import ConfigError, ServiceConfig, StationConfig, load_config
from hoverbot.service.core import (
    GroundControl,
    InvalidSession,
    Session,
    StationBusy,
    UnknownStation,
    replay_applied,
)
from hoverbot.service.http import BindError, ServiceHandle, create_app, init_service
from hoverbot.service.wire import Applied, DecodeError, DispatchReport, LogEntry

__all__ = [
    "Applied",
    "BindError",
    "ConfigError",
    "DecodeError",
    "DispatchReport",
    "GroundControl",
    "InvalidSession",
    "LogEntry",
    "ServiceConfig",
    "ServiceHandle",
    "Session",
    "StationBusy",
    "StationConfig",
    "UnknownStation",
    "create_app",
    "init_service",
    "load_config",
    "replay_applied",
]
