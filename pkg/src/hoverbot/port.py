"""Emulated standard parallel printer port (SPP), the PC-side output stage.

Models the three register groups of a legacy printer port: 8 data bits owned
by the host, device-owned status bits (busy, ack, paper_out, select, error)
and host-owned control bits (strobe, auto_feed, init, select_in). Ground pins
carry no state and are not modeled; transfers are host-to-device only, no
bidirectional/EPP/ECP modes.

Commands travel one-hot on data pins D0..D5 so any corruption is trivially
detectable. Writes simulate the classic strobe -> busy -> ack handshake on an
integer tick clock (1 tick = 1 us nominal) and record its timing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from hoverbot.commands import Command

__all__ = [
    "COMMAND_TO_DATA_BITS",
    "BUSY_TICKS",
    "ACK_TICKS",
    "TICK_MICROSECONDS",
    "StatusBits",
    "ControlBits",
    "HandshakeRecord",
    "PortImage",
    "NotOneHot",
    "PortBusy",
    "encode_port",
    "decode_port",
    "write_data",
    "read_status",
    "handshake_trace",
]

# One-hot command pattern on the data register; 0x00 is the idle bus.
COMMAND_TO_DATA_BITS = {
    Command.START: 0x01,
    Command.READY: 0x02,
    Command.FLY: 0x04,
    Command.LEFT: 0x08,
    Command.RIGHT: 0x10,
    Command.STOP: 0x20,
}
_DATA_BITS_TO_COMMAND = {bits: command for command, bits in COMMAND_TO_DATA_BITS.items()}

# Handshake timing defaults, in ticks.
BUSY_TICKS = 2
ACK_TICKS = 1
TICK_MICROSECONDS = 1.0


class NotOneHot(ValueError):
    """Data byte is not one of the six one-hot command patterns."""


class PortBusy(RuntimeError):
    """Write attempted while the device side is still consuming the last byte."""


@dataclass(frozen=True)
class StatusBits:
    """Device-owned status pins. The host only ever reads these."""

    busy: bool = False
    ack: bool = False
    paper_out: bool = False
    select: bool = False
    error: bool = False


@dataclass(frozen=True)
class ControlBits:
    """Host-owned control pins."""

    strobe: bool = False
    auto_feed: bool = False
    init: bool = False
    select_in: bool = False


@dataclass(frozen=True)
class HandshakeRecord:
    """Timing of one strobe/busy/ack cycle.

    Always satisfies strobe_asserted_at < busy_interval[0] <= busy_interval[1]
    < ack_pulse_at; busy_interval is inclusive on both ends.
    """

    strobe_asserted_at: int
    busy_interval: tuple[int, int]
    ack_pulse_at: int


@dataclass(frozen=True)
class PortImage:
    """Snapshot of the emulated port registers.

    At rest the data register holds one one-hot command pattern or 0x00.
    The last completed handshake is kept so status can be sampled at any
    tick inside it.
    """

    data: int = 0x00
    status: StatusBits = StatusBits()
    control: ControlBits = ControlBits()
    last_handshake: HandshakeRecord | None = None


def encode_port(command: Command) -> int:
    """One-hot data byte for a command; exactly one bit set, D0..D5."""
    return COMMAND_TO_DATA_BITS[command]


def decode_port(byte: int) -> Command:
    """Inverse of encode_port.

    Raises NotOneHot for 0x00 (idle bus), multi-bit patterns, and bits above
    D5; raises ValueError if the value does not fit in 8 bits.
    """
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"data byte out of range: {byte}")
    try:
        return _DATA_BITS_TO_COMMAND[byte]
    except KeyError:
        raise NotOneHot(f"0x{byte:02x} is not a one-hot command byte") from None


def write_data(
    port: PortImage,
    byte: int,
    tick: int = 0,
    *,
    busy_ticks: int = BUSY_TICKS,
) -> tuple[PortImage, HandshakeRecord]:
    """Latch a byte into the data register and simulate one full handshake.

    The strobe is asserted at `tick`, the device holds busy for `busy_ticks`
    ticks, then pulses ack; the returned image has the handshake complete and
    busy clear. Status bits other than busy/ack are untouched.

    Raises PortBusy if the device is still mid-handshake at `tick`, either
    because the busy bit is set or because `tick` falls inside the previous
    write's strobe..ack window.
    """
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"data byte out of range: {byte}")
    if busy_ticks < 1:
        raise ValueError("busy_ticks must be at least 1")
    if port.status.busy:
        raise PortBusy("port busy: device has not acknowledged the previous byte")
    last = port.last_handshake
    if last is not None and tick <= last.ack_pulse_at:
        raise PortBusy(
            f"port busy: handshake in progress until tick {last.ack_pulse_at}"
        )
    record = HandshakeRecord(
        strobe_asserted_at=tick,
        busy_interval=(tick + 1, tick + busy_ticks),
        ack_pulse_at=tick + busy_ticks + 1,
    )
    written = replace(port, data=byte, last_handshake=record)
    return written, record


def read_status(port: PortImage, at_tick: int | None = None) -> StatusBits:
    """Sample the device-owned status bits, without side effects.

    With no tick this is the at-rest view. Given a tick it reconstructs busy
    and ack from the port's last recorded handshake, so the middle of a write
    reads busy=True and the ack tick reads ack=True.
    """
    if at_tick is None or port.last_handshake is None:
        return port.status
    handshake = port.last_handshake
    busy_start, busy_end = handshake.busy_interval
    return replace(
        port.status,
        busy=busy_start <= at_tick <= busy_end,
        ack=at_tick == handshake.ack_pulse_at,
    )


def handshake_trace(record: HandshakeRecord) -> list[str]:
    """Append-only log lines for one handshake: `tick,event` with events
    strobe, busy+, busy-, ack."""
    return [
        f"{record.strobe_asserted_at},strobe",
        f"{record.busy_interval[0]},busy+",
        f"{record.busy_interval[1]},busy-",
        f"{record.ack_pulse_at},ack",
    ]
