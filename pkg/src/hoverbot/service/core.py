"""Ground-control core: stations, exclusive sessions, and the dispatch pipeline.

Each station owns one simulator, one emulated parallel port, one radio
channel, and one durable command log, all guarded by a single per-station
lock so commands, simulation steps, and releases are totally ordered.
Telemetry snapshots are fanned out to subscriber queues; a subscriber that
stops draining its queue is dropped rather than allowed to stall stepping.

The dispatch pipeline per command: state-machine pre-check, one-hot port
write with a full handshake, pulse-frame encode, seeded channel transmit at
the vehicle's current distance, then decode and actuate on delivery. Every
dispatch appends exactly one log entry whatever the outcome.
"""

from __future__ import annotations

import logging
import queue
import secrets
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from hoverbot import channel as rf
from hoverbot import codec, port
from hoverbot.commands import (
    Accepted,
    Command,
    FlightState,
    Rejected,
    apply_command,
    initial_state,
    valid_commands,
)
from hoverbot.service.config import ServiceConfig, StationConfig
from hoverbot.service.log import CommandLog
from hoverbot.service.wire import Applied, DecodeError, DispatchReport, LogEntry
from hoverbot.sim import (
    HoverbotSim,
    Telemetry,
    actuate,
    distance_to_station,
    snapshot,
    step,
)

__all__ = [
    "DEFAULT_PULSE_RATE_HZ",
    "UnknownStation",
    "StationBusy",
    "InvalidSession",
    "Session",
    "TelemetrySubscription",
    "SubscriptionClosed",
    "Station",
    "GroundControl",
    "replay_applied",
]

log = logging.getLogger(__name__)

# Pulse rate used for every dispatched frame; middle of the codec's band.
DEFAULT_PULSE_RATE_HZ = 800.0

# Fast-clock pacing: batches of steps with a short sleep in between keeps the
# simulation roughly two orders of magnitude faster than real time while the
# telemetry stream stays consumable.
FAST_CLOCK_BATCH = 50
FAST_CLOCK_SLEEP_S = 0.01

TELEMETRY_QUEUE_DEPTH = 8192


class UnknownStation(KeyError):
    """No station registered under that id."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep the message plain
        return self.args[0] if self.args else ""


class StationBusy(RuntimeError):
    """Another session currently holds exclusive control of the station."""


class InvalidSession(KeyError):
    """Session token unknown, released, or expired."""

    def __str__(self) -> str:
        return self.args[0] if self.args else ""


@dataclass
class Session:
    """Exclusive control grant for one station."""

    session_id: str
    station_id: str
    opened_at: float
    command_count: int = 0
    last_activity: float = 0.0


class SubscriptionClosed(Exception):
    """Raised by TelemetrySubscription.get once the stream has ended."""


class TelemetrySubscription:
    """One observer's ordered view of a station's telemetry.

    Samples are buffered in a bounded queue; if the observer falls far enough
    behind to fill it, the station drops the subscription and the backlog
    ends with SubscriptionClosed.
    """

    def __init__(self, station: "Station"):
        self._station = station
        self._queue: queue.Queue[Telemetry] = queue.Queue(maxsize=TELEMETRY_QUEUE_DEPTH)
        self._dropped = threading.Event()

    def get(self, timeout: float | None = None) -> Telemetry:
        """Next sample in step order. Raises queue.Empty on timeout and
        SubscriptionClosed once dropped and drained."""
        try:
            return self._queue.get(timeout=timeout if not self._dropped.is_set() else 0.0)
        except queue.Empty:
            if self._dropped.is_set():
                raise SubscriptionClosed() from None
            raise

    def close(self) -> None:
        self._dropped.set()
        self._station._unsubscribe(self)

    # station side
    def _publish(self, sample: Telemetry) -> bool:
        try:
            self._queue.put_nowait(sample)
            return True
        except queue.Full:
            self._dropped.set()
            return False


class Station:
    """One hoverbot and its ground-side equipment, single-writer via `lock`."""

    def __init__(self, cfg: StationConfig, log_path: Path):
        self.id = cfg.id
        self.address = cfg.address
        self.channel = cfg.channel
        self.sim_config = cfg.sim
        self.sim = HoverbotSim()
        self.port = port.PortImage()
        self.command_log = CommandLog(log_path)
        self.lock = threading.RLock()
        self.active_session_id: str | None = None
        self.tx_sequence = 0
        self.port_tick = 0
        self._subscribers: list[TelemetrySubscription] = []

    # -- telemetry fan-out -------------------------------------------------

    def subscribe(self) -> TelemetrySubscription:
        subscription = TelemetrySubscription(self)
        with self.lock:
            self._subscribers.append(subscription)
        return subscription

    def _unsubscribe(self, subscription: TelemetrySubscription) -> None:
        with self.lock:
            if subscription in self._subscribers:
                self._subscribers.remove(subscription)

    def _publish(self, sample: Telemetry) -> None:
        # called under self.lock
        slow = [s for s in self._subscribers if not s._publish(sample)]
        for subscription in slow:
            self._subscribers.remove(subscription)
            log.warning("station %s: dropped slow telemetry subscriber", self.id)

    # -- simulation --------------------------------------------------------

    def step_once(self) -> Telemetry:
        with self.lock:
            sample = step(self.sim, self.sim_config, self.channel)
            self._publish(sample)
            return sample

    def settle_to_ground(self) -> None:
        """Step until the vehicle is idle on the ground. Called under lock;
        a full descent from the ceiling bounds the number of steps needed."""
        cfg = self.sim_config
        max_steps = round(cfg.ceiling / (cfg.descend_rate * cfg.dt)) + 2
        for _ in range(max_steps):
            if self.sim.flight_state is FlightState.IDLE:
                return
            sample = step(self.sim, cfg, self.channel)
            self._publish(sample)

    def telemetry_now(self) -> Telemetry:
        with self.lock:
            return snapshot(self.sim, self.sim_config, self.channel)


class GroundControl:
    """The service core: registry, sessions, dispatch, logs, and the clock."""

    def __init__(self, config: ServiceConfig, *, log_dir: Path | None = None):
        self.config = config
        directory = Path(log_dir) if log_dir is not None else config.log_dir
        self._stations: dict[str, Station] = {}
        for station_cfg in config.stations:
            self._stations[station_cfg.id] = Station(
                station_cfg, directory / f"{station_cfg.id}.jsonl"
            )
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        """Start per-station clocks and the session idle monitor."""
        for station in self._stations.values():
            thread = threading.Thread(
                target=self._run_clock, args=(station,), daemon=True,
                name=f"hoverbot-clock-{station.id}",
            )
            thread.start()
            self._threads.append(thread)
        monitor = threading.Thread(
            target=self._run_idle_monitor, daemon=True, name="hoverbot-idle-monitor"
        )
        monitor.start()
        self._threads.append(monitor)

    def shutdown(self) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=2.0)
        for station in self._stations.values():
            station.command_log.close()

    def _run_clock(self, station: Station) -> None:
        dt = station.sim_config.dt
        while not self._stop.is_set():
            if self.config.realtime:
                if self._stop.wait(dt):
                    break
                station.step_once()
            else:
                for _ in range(FAST_CLOCK_BATCH):
                    station.step_once()
                if self._stop.wait(FAST_CLOCK_SLEEP_S):
                    break

    def _run_idle_monitor(self) -> None:
        interval = min(1.0, max(0.05, self.config.idle_timeout_s / 4))
        while not self._stop.wait(interval):
            now = time.monotonic()
            with self._sessions_lock:
                expired = [
                    s.session_id
                    for s in self._sessions.values()
                    if now - s.last_activity > self.config.idle_timeout_s
                ]
            for session_id in expired:
                log.info("session %s idle-expired; releasing", session_id)
                try:
                    self.release_station(session_id)
                except InvalidSession:
                    pass  # raced with an explicit release

    # -- registry / sessions -------------------------------------------------

    def station_ids(self) -> list[str]:
        return sorted(self._stations)

    def station_count(self) -> int:
        return len(self._stations)

    def _station(self, station_id: str) -> Station:
        try:
            return self._stations[station_id]
        except KeyError:
            raise UnknownStation(f"unknown station {station_id!r}") from None

    def _session(self, session_id: str) -> Session:
        with self._sessions_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise InvalidSession(f"invalid session {session_id!r}")
        return session

    def select_station(self, station_id: str) -> Session:
        """Acquire exclusive control. Raises StationBusy if already held."""
        station = self._station(station_id)
        with station.lock:
            if station.active_session_id is not None:
                raise StationBusy(f"station {station_id!r} is controlled by another session")
            now = time.monotonic()
            session = Session(
                session_id=secrets.token_hex(16),
                station_id=station_id,
                opened_at=now,
                last_activity=now,
            )
            station.active_session_id = session.session_id
            with self._sessions_lock:
                self._sessions[session.session_id] = session
        return session

    def release_station(self, session_id: str) -> None:
        """Close a session. If the vehicle is airborne or landing, a dead-man
        STOP is injected and the sim is settled to the ground before the
        station can be selected again."""
        session = self._session(session_id)
        station = self._station(session.station_id)
        with station.lock:
            if station.active_session_id != session_id:
                raise InvalidSession(f"invalid session {session_id!r}")
            if station.sim.flight_state in (FlightState.AIRBORNE, FlightState.LANDING):
                self._dispatch_locked(station, session, Command.STOP, injected=True)
                station.settle_to_ground()
            station.active_session_id = None
            with self._sessions_lock:
                self._sessions.pop(session_id, None)

    # -- dispatch ------------------------------------------------------------

    def dispatch_command(self, session_id: str, command: Command) -> DispatchReport:
        session = self._session(session_id)
        station = self._station(session.station_id)
        with station.lock:
            if station.active_session_id != session_id:
                raise InvalidSession(f"invalid session {session_id!r}")
            session.last_activity = time.monotonic()
            session.command_count += 1
            return self._dispatch_locked(station, session, command)

    def _dispatch_locked(
        self,
        station: Station,
        session: Session,
        command: Command,
        injected: bool = False,
    ) -> DispatchReport:
        # (1) state-machine pre-check: an illegal command never touches the radio
        precheck = apply_command(station.sim.flight_state, command)
        if isinstance(precheck, Rejected):
            self._append_entry(station, session, command, precheck, None, None, injected)
            return self._report(station, precheck)

        # (2) latch the one-hot pattern onto the port with a full handshake
        data_bits = port.encode_port(command)
        station.port, handshake = port.write_data(station.port, data_bits, station.port_tick)
        station.port_tick = handshake.ack_pulse_at + 1

        # (3) pulse frame for the radio
        frame = codec.encode_frame(command, DEFAULT_PULSE_RATE_HZ)

        # (4) radio hop at the vehicle's current distance; a dead-man stop is a
        # local failsafe, not a transmission, so it skips the lossy hop
        if injected:
            outcome: rf.TransmitOutcome = rf.Delivered(frame, 0.0)
        else:
            station.tx_sequence += 1
            distance = distance_to_station(station.sim, station.sim_config)
            outcome = rf.transmit(frame, distance, station.channel, station.tx_sequence)
        if isinstance(outcome, rf.Lost):
            self._append_entry(station, session, command, rf.Lost(), frame, None, injected)
            return self._report(station, rf.Lost())

        # (5) receiver side: decode, verify, actuate
        received = outcome.frame
        try:
            decoded = codec.decode_frame(received)
        except codec.BadSync:
            result: DecodeError = DecodeError("bad_sync")
        except codec.UnrecognizedCode:
            result = DecodeError("unrecognized_code")
        else:
            if decoded is not command:
                # corrupted past the snap tolerance into a different command;
                # refusing keeps the log replayable as ground truth
                result = DecodeError("command_mismatch")
            else:
                actuated = actuate(station.sim, decoded)
                if isinstance(actuated, Rejected):
                    self._append_entry(
                        station, session, command, actuated, frame, received, injected
                    )
                    return self._report(station, actuated)
                applied = Applied(station.sim.flight_state)
                self._append_entry(
                    station, session, command, applied, frame, received, injected
                )
                return self._report(station, applied)
        self._append_entry(station, session, command, result, frame, received, injected)
        return self._report(station, result)

    def _report(self, station: Station, result) -> DispatchReport:
        state = station.sim.flight_state
        return DispatchReport(result, state, frozenset(valid_commands(state)))

    def _append_entry(
        self,
        station: Station,
        session: Session,
        command: Command,
        result,
        frame_sent,
        frame_received,
        injected: bool,
    ) -> None:
        entry = LogEntry(
            sequence=station.command_log.last_sequence + 1,
            timestamp=datetime.now(timezone.utc).isoformat(),
            session_id=session.session_id,
            command=command,
            pipeline_result=result,
            frame_sent=frame_sent,
            frame_received=frame_received,
            injected=injected,
        )
        station.command_log.append(entry)

    # -- observers -----------------------------------------------------------

    def get_log(self, station_id: str, since_sequence: int = 0) -> list[LogEntry]:
        return self._station(station_id).command_log.entries_since(since_sequence)

    def subscribe_telemetry(self, station_id: str) -> TelemetrySubscription:
        return self._station(station_id).subscribe()

    def current_telemetry(self, station_id: str) -> Telemetry:
        return self._station(station_id).telemetry_now()

    def health(self) -> dict:
        return {"status": "ok", "stations": self.station_count()}


def replay_applied(entries: list[LogEntry]) -> FlightState:
    """Reconstruct the flight state by replaying Applied log entries through
    the command state machine.

    LANDING is transient and accepts no commands, so an Applied entry found
    after the replay state reaches LANDING proves the vehicle touched down in
    between; the replay settles to IDLE before applying it. The caller applies
    the same settling rule when comparing a trailing LANDING against a live
    sim that has already landed.

    Sims reset to idle when a service starts while the log persists, so pass
    the entries of one service lifetime (e.g. since the last restart).
    """
    state = initial_state()
    for entry in entries:
        if not isinstance(entry.pipeline_result, Applied):
            continue
        if state is FlightState.LANDING:
            state = FlightState.IDLE
        result = apply_command(state, entry.command)
        if not isinstance(result, Accepted):
            raise ValueError(
                f"log is incoherent: entry {entry.sequence} applied "
                f"{entry.command.value} from {state.value}"
            )
        state = result.next_state
    return state
