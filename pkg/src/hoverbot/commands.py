"""Operator command vocabulary and the flight state machine that gates it.

Everything here is a pure value-level function over enums, safe to call from
any thread. The transition table is total: every (state, command) pair yields
either an accepted transition with its actuation effect or a rejection with a
human-readable reason, never an exception.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = [
    "Command",
    "FlightState",
    "ActuationEffect",
    "Accepted",
    "Rejected",
    "TransitionResult",
    "UnknownCommand",
    "parse_command",
    "apply_command",
    "valid_commands",
    "initial_state",
]


class UnknownCommand(ValueError):
    """Token does not name any of the six operator commands."""


class Command(enum.Enum):
    """One of the six operator intents; serializes as its lowercase name."""

    START = "start"
    READY = "ready"
    FLY = "fly"
    LEFT = "left"
    RIGHT = "right"
    STOP = "stop"

    def __str__(self) -> str:
        return self.value


class FlightState(enum.Enum):
    """Hoverbot lifecycle state.

    LANDING is transient: it is only produced by STOP while AIRBORNE and
    always settles back to IDLE as the simulation descends to the ground.
    """

    IDLE = "idle"
    STARTED = "started"
    READY = "ready"
    AIRBORNE = "airborne"
    LANDING = "landing"

    def __str__(self) -> str:
        return self.value


class ActuationEffect(enum.Enum):
    """Symbolic actuation handed to the flight simulator."""

    POWER_ON = "power_on"
    SPIN_UP = "spin_up"
    CLIMB = "climb"
    YAW_LEFT = "yaw_left"
    YAW_RIGHT = "yaw_right"
    CUT_AND_DESCEND = "cut_and_descend"
    NO_OP = "no_op"


@dataclass(frozen=True)
class Accepted:
    next_state: FlightState
    effect: ActuationEffect


@dataclass(frozen=True)
class Rejected:
    reason: str


TransitionResult = Accepted | Rejected


# Canonical transition table. Pairs not listed are rejected. Repeating a
# command that leaves the state unchanged is an accepted no-op so operator
# double-clicks never fault a flying vehicle. FLY from STARTED spins up
# rather than launching: takeoff takes two clicks.
_TRANSITIONS: dict[tuple[FlightState, Command], tuple[FlightState, ActuationEffect]] = {
    (FlightState.IDLE, Command.START): (FlightState.STARTED, ActuationEffect.POWER_ON),
    (FlightState.IDLE, Command.STOP): (FlightState.IDLE, ActuationEffect.NO_OP),
    (FlightState.STARTED, Command.READY): (FlightState.READY, ActuationEffect.SPIN_UP),
    (FlightState.STARTED, Command.FLY): (FlightState.READY, ActuationEffect.SPIN_UP),
    (FlightState.STARTED, Command.STOP): (FlightState.IDLE, ActuationEffect.NO_OP),
    (FlightState.READY, Command.FLY): (FlightState.AIRBORNE, ActuationEffect.CLIMB),
    (FlightState.READY, Command.READY): (FlightState.READY, ActuationEffect.NO_OP),
    (FlightState.READY, Command.STOP): (FlightState.IDLE, ActuationEffect.NO_OP),
    (FlightState.AIRBORNE, Command.FLY): (FlightState.AIRBORNE, ActuationEffect.CLIMB),
    (FlightState.AIRBORNE, Command.LEFT): (FlightState.AIRBORNE, ActuationEffect.YAW_LEFT),
    (FlightState.AIRBORNE, Command.RIGHT): (FlightState.AIRBORNE, ActuationEffect.YAW_RIGHT),
    (FlightState.AIRBORNE, Command.STOP): (FlightState.LANDING, ActuationEffect.CUT_AND_DESCEND),
}

_COMMANDS_BY_NAME = {command.value: command for command in Command}


def parse_command(token: str) -> Command:
    """Parse an operator token, case-insensitively and ignoring surrounding
    whitespace. Raises UnknownCommand (quoting the token verbatim) for
    anything outside the six-command vocabulary."""
    name = token.strip().lower()
    try:
        return _COMMANDS_BY_NAME[name]
    except KeyError:
        raise UnknownCommand(f"unknown command: {token!r}") from None


def _rejection_reason(state: FlightState, command: Command) -> str:
    if state is FlightState.LANDING:
        return "landing in progress"
    if command in (Command.LEFT, Command.RIGHT):
        return "cannot steer before takeoff"
    return f"{command.value} is not available while {state.value}"


def apply_command(state: FlightState, command: Command) -> TransitionResult:
    """Run one command through the transition table.

    Pure function; never raises. Illegal pairs come back as Rejected with
    the reason an operator would want to read.
    """
    hit = _TRANSITIONS.get((state, command))
    if hit is None:
        return Rejected(_rejection_reason(state, command))
    next_state, effect = hit
    return Accepted(next_state, effect)


def valid_commands(state: FlightState) -> set[Command]:
    """Commands accepted in `state`; exactly the accepting rows of the table."""
    return {command for (table_state, command) in _TRANSITIONS if table_state is state}


def initial_state() -> FlightState:
    """Power-on state: waiting for a command."""
    return FlightState.IDLE
