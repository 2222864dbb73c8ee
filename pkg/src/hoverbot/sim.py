"""Fixed-timestep kinematic simulator for the hoverbot.

Actuation effects from the command state machine drive a force-free,
rate-based model: climbs and descents change altitude at constant rates,
steering yaws in place (no horizontal translation), and both the flight
ceiling and the ground are exact clamps. Each step emits a telemetry
snapshot; identical inputs always yield bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from hoverbot.channel import ChannelConfig, LinkQuality, link_status
from hoverbot.commands import (
    Accepted,
    ActuationEffect,
    Command,
    FlightState,
    TransitionResult,
    apply_command,
    initial_state,
)

__all__ = [
    "CLIMB_EFFECT_DURATION_S",
    "SimConfig",
    "HoverbotSim",
    "Telemetry",
    "TraceEntry",
    "BadScript",
    "actuate",
    "step",
    "run_script",
    "distance_to_station",
    "snapshot",
    "trace_to_csv",
]

# A single fly click climbs for this much simulated time, then the vehicle
# holds altitude until the next command.
CLIMB_EFFECT_DURATION_S = 1.0


class BadScript(ValueError):
    """Command script times are not strictly increasing (or are negative)."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation rates and limits; the ceiling is an exact altitude clamp."""

    dt: float = 0.02
    climb_rate: float = 1.0
    descend_rate: float = 1.5
    yaw_rate: float = 45.0
    ceiling: float = 15.0
    station_position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.climb_rate <= 0 or self.descend_rate <= 0 or self.yaw_rate <= 0:
            raise ValueError("rates must be positive")
        if self.ceiling <= 0:
            raise ValueError("ceiling must be positive")


@dataclass
class HoverbotSim:
    """Mutable vehicle state, owned by exactly one writer at a time.

    climb_expires_at is bookkeeping for the bounded climb: it holds the
    simulated time at which a pending CLIMB decays to hover.
    """

    flight_state: FlightState = field(default_factory=initial_state)
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    heading: float = 0.0
    clock: float = 0.0
    pending_effect: ActuationEffect = ActuationEffect.NO_OP
    climb_expires_at: float | None = None


@dataclass(frozen=True)
class Telemetry:
    """Immutable per-step snapshot fanned out to observers."""

    clock: float
    flight_state: FlightState
    position: tuple[float, float, float]
    heading: float
    distance_to_station: float
    link: LinkQuality


@dataclass(frozen=True)
class TraceEntry:
    """One scripted step: the post-step telemetry plus the command injected
    before the step, if any, with its accept/reject result."""

    telemetry: Telemetry
    command: Command | None = None
    result: TransitionResult | None = None


def distance_to_station(sim: HoverbotSim, cfg: SimConfig) -> float:
    """3-D euclidean distance to the ground station (station sits at z=0)."""
    x, y, z = sim.position
    sx, sy = cfg.station_position
    return math.sqrt((x - sx) ** 2 + (y - sy) ** 2 + z * z)


def snapshot(
    sim: HoverbotSim,
    cfg: SimConfig,
    channel: ChannelConfig | None = None,
) -> Telemetry:
    """Current telemetry; link quality comes from the channel config when
    one is supplied, otherwise reads GOOD."""
    distance = distance_to_station(sim, cfg)
    link = link_status(distance, channel) if channel is not None else LinkQuality.GOOD
    return Telemetry(sim.clock, sim.flight_state, sim.position, sim.heading, distance, link)


def actuate(sim: HoverbotSim, command: Command) -> TransitionResult:
    """Feed one command to the vehicle.

    Delegates legality to the command state machine; on acceptance the new
    flight state and effect are installed, on rejection the sim is untouched.
    The rejection reason is surfaced verbatim.
    """
    result = apply_command(sim.flight_state, command)
    if isinstance(result, Accepted):
        sim.flight_state = result.next_state
        sim.pending_effect = result.effect
        if result.effect is ActuationEffect.CLIMB:
            sim.climb_expires_at = sim.clock + CLIMB_EFFECT_DURATION_S
        else:
            sim.climb_expires_at = None
    return result


def step(
    sim: HoverbotSim,
    cfg: SimConfig,
    channel: ChannelConfig | None = None,
) -> Telemetry:
    """Advance the simulation by one dt and return the post-step telemetry.

    CLIMB raises altitude, capped exactly at the ceiling, and decays to
    hover once its window expires. Yaw effects turn in place, wrapping the
    heading into [0, 360). CUT_AND_DESCEND sinks at the descend rate and on
    touching the ground flips the state to IDLE with no pending effect.
    """
    effect = sim.pending_effect
    if (
        effect is ActuationEffect.CLIMB
        and sim.climb_expires_at is not None
        and sim.clock >= sim.climb_expires_at
    ):
        sim.pending_effect = ActuationEffect.NO_OP
        sim.climb_expires_at = None
        effect = ActuationEffect.NO_OP

    x, y, z = sim.position
    if effect is ActuationEffect.CLIMB:
        z = min(cfg.ceiling, z + cfg.climb_rate * cfg.dt)
    elif effect is ActuationEffect.YAW_LEFT:
        sim.heading = _wrap_heading(sim.heading - cfg.yaw_rate * cfg.dt)
    elif effect is ActuationEffect.YAW_RIGHT:
        sim.heading = _wrap_heading(sim.heading + cfg.yaw_rate * cfg.dt)
    elif effect is ActuationEffect.CUT_AND_DESCEND:
        z = max(0.0, z - cfg.descend_rate * cfg.dt)
        if z == 0.0:
            sim.flight_state = FlightState.IDLE
            sim.pending_effect = ActuationEffect.NO_OP
    sim.position = (x, y, z)
    sim.clock += cfg.dt
    return snapshot(sim, cfg, channel)


def _wrap_heading(heading: float) -> float:
    wrapped = heading % 360.0
    # float modulo can round a tiny negative up to exactly 360.0
    return 0.0 if wrapped >= 360.0 else wrapped


def run_script(
    script: list[tuple[float, Command]],
    cfg: SimConfig,
    duration: float | None = None,
    channel: ChannelConfig | None = None,
) -> list[TraceEntry]:
    """Run a timed command script from t=0 and return the per-step trace.

    Each command is injected before the step whose index rounds from its
    scheduled time (at most one injection per step; a colliding command waits
    for the next step). Rejected commands are recorded in the trace, never
    fatal. With an explicit duration the run is exactly round(duration/dt)
    steps; otherwise it runs through the last scheduled command and then
    until the vehicle settles to IDLE, within a bounded landing window.

    Raises BadScript for non-increasing or negative times.
    """
    times = [t for t, _ in script]
    if any(t < 0 for t in times):
        raise BadScript("script times must be non-negative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise BadScript("script times must be strictly increasing")

    scheduled = [(round(t / cfg.dt), command) for t, command in script]
    sim = HoverbotSim()
    trace: list[TraceEntry] = []

    if duration is not None:
        total_steps = round(duration / cfg.dt)
        last_required = -1
    else:
        total_steps = None
        last_required = scheduled[-1][0] if scheduled else -1
        # worst-case settle: finish a climb window, then descend from the ceiling
        settle_cap = (
            last_required
            + math.ceil(CLIMB_EFFECT_DURATION_S / cfg.dt)
            + math.ceil(cfg.ceiling / (cfg.descend_rate * cfg.dt))
            + 2
        )

    next_command = 0
    index = 0
    while True:
        if total_steps is not None:
            if index >= total_steps:
                break
        else:
            settled = (
                next_command >= len(scheduled)
                and sim.flight_state is FlightState.IDLE
                and sim.pending_effect is ActuationEffect.NO_OP
            )
            if index > last_required and (settled or index >= settle_cap):
                break
        command = None
        result = None
        if next_command < len(scheduled) and scheduled[next_command][0] <= index:
            command = scheduled[next_command][1]
            result = actuate(sim, command)
            next_command += 1
        telemetry = step(sim, cfg, channel)
        trace.append(TraceEntry(telemetry, command, result))
        index += 1
    return trace


def trace_to_csv(trace: list[TraceEntry]) -> str:
    """Trace as CSV text, one line per step: clock,state,x,y,z,heading."""
    lines = ["clock,state,x,y,z,heading"]
    for entry in trace:
        t = entry.telemetry
        x, y, z = t.position
        lines.append(f"{t.clock},{t.flight_state},{x},{y},{z},{t.heading}")
    return "\n".join(lines) + "\n"
