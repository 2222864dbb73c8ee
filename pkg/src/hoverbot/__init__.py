"""Ground-control chain for a tele-operated hoverbot.

Command vocabulary and flight state machine, emulated parallel-port output
stage, pulse-count radio codec, seeded lossy RF channel, fixed-timestep
flight kinematics, and the HTTP ground-control service that ties the chain
together.
"""

from hoverbot.commands import (
    Accepted,
    ActuationEffect,
    Command,
    FlightState,
    Rejected,
    TransitionResult,
    UnknownCommand,
    apply_command,
    initial_state,
    parse_command,
    valid_commands,
)

__all__ = [
    "Accepted",
    "ActuationEffect",
    "Command",
    "FlightState",
    "Rejected",
    "TransitionResult",
    "UnknownCommand",
    "apply_command",
    "initial_state",
    "parse_command",
    "valid_commands",
]

__version__ = "0.1.0"
