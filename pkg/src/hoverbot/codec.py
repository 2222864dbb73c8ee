"""Pulse-count radio codec in the style of TX-2B/RX-2 remote-control chip
pairs, plus a validator for the transmitter's electrical operating envelope.

A frame is a burst of 4 long sync pulses followed by N short code pulses at
an audio-band pulse rate. Each command gets its own pulse count, spaced at
least 6 apart so the receiver can snap a count corrupted by up to +/-2 pulses
back to the right command and refuse anything more ambiguous.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType

from hoverbot.commands import Command

__all__ = [
    "SYNC_PULSES",
    "MIN_PULSE_RATE_HZ",
    "MAX_PULSE_RATE_HZ",
    "MIN_CODE_PULSES",
    "MAX_CODE_PULSES",
    "SNAP_TOLERANCE",
    "MIN_CODE_DISTANCE",
    "PulseFrame",
    "CodeTable",
    "DEFAULT_CODE_TABLE",
    "ElectricalSpec",
    "Violation",
    "RateOutOfBand",
    "BadSync",
    "UnrecognizedCode",
    "encode_frame",
    "decode_frame",
    "frame_duration",
    "validate_electrical",
    "estimate_runtime",
]

SYNC_PULSES = 4
MIN_PULSE_RATE_HZ = 500.0
MAX_PULSE_RATE_HZ = 1000.0
MIN_CODE_PULSES = 1
MAX_CODE_PULSES = 64
SNAP_TOLERANCE = 2
MIN_CODE_DISTANCE = 6

# Electrical envelope of the transmitter chip.
VDD_RANGE_V = (2.4, 5.0)
I_OPERATING_RANGE_MA = (0.5, 1.0)
I_QUIESCENT_MAX_UA = 3.0
I_DRIVE_MIN_MA = 2.5
F_AUDIO_RANGE_HZ = (MIN_PULSE_RATE_HZ, MAX_PULSE_RATE_HZ)


class RateOutOfBand(ValueError):
    """Pulse rate outside the chip's audio output band."""


class BadSync(ValueError):
    """Frame does not carry the expected sync burst."""


class UnrecognizedCode(ValueError):
    """No code point lies within the snap tolerance of the received count."""


@dataclass(frozen=True)
class PulseFrame:
    """One radio frame: sync burst, code pulse count, pulse rate in Hz.

    Serializes as `sync:code:rate` on the wire and in logs.
    """

    sync_pulses: int
    code_pulses: int
    pulse_rate: float

    def __post_init__(self) -> None:
        if self.sync_pulses < 0:
            raise ValueError("sync_pulses must be non-negative")
        if not MIN_CODE_PULSES <= self.code_pulses <= MAX_CODE_PULSES:
            raise ValueError(
                f"code_pulses must be in [{MIN_CODE_PULSES}, {MAX_CODE_PULSES}], "
                f"got {self.code_pulses}"
            )
        if self.pulse_rate <= 0:
            raise ValueError("pulse_rate must be positive")

    @property
    def well_formed(self) -> bool:
        return (
            self.sync_pulses == SYNC_PULSES
            and MIN_PULSE_RATE_HZ <= self.pulse_rate <= MAX_PULSE_RATE_HZ
        )

    def as_text(self) -> str:
        return f"{self.sync_pulses}:{self.code_pulses}:{self.pulse_rate:g}"

    @classmethod
    def from_text(cls, text: str) -> "PulseFrame":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"malformed frame text: {text!r}")
        return cls(int(parts[0]), int(parts[1]), float(parts[2]))


@dataclass(frozen=True)
class CodeTable:
    """Command -> code pulse count, one entry per command.

    Counts must be pairwise at least MIN_CODE_DISTANCE apart so that a snap
    tolerance of SNAP_TOLERANCE can never mis-assign a corrupted count.
    """

    mapping: Mapping[Command, int]

    def __post_init__(self) -> None:
        missing = set(Command) - set(self.mapping)
        if missing:
            names = ", ".join(sorted(c.value for c in missing))
            raise ValueError(f"code table missing commands: {names}")
        counts = sorted(self.mapping.values())
        for count in counts:
            if not MIN_CODE_PULSES <= count <= MAX_CODE_PULSES:
                raise ValueError(f"code count {count} outside [1, 64]")
        for low, high in zip(counts, counts[1:]):
            if high - low < MIN_CODE_DISTANCE:
                raise ValueError(
                    f"code counts {low} and {high} closer than {MIN_CODE_DISTANCE}"
                )
        object.__setattr__(self, "mapping", MappingProxyType(dict(self.mapping)))

    def snap(self, code_pulses: int, tolerance: int = SNAP_TOLERANCE) -> Command | None:
        """Nearest command within `tolerance` pulses, or None."""
        best: tuple[int, Command] | None = None
        for command, count in self.mapping.items():
            distance = abs(code_pulses - count)
            if distance <= tolerance and (best is None or distance < best[0]):
                best = (distance, command)
        return None if best is None else best[1]


DEFAULT_CODE_TABLE = CodeTable(
    {
        Command.START: 7,
        Command.FLY: 16,
        Command.LEFT: 22,
        Command.RIGHT: 28,
        Command.STOP: 34,
        Command.READY: 40,
    }
)


def encode_frame(
    command: Command,
    rate: float,
    table: CodeTable = DEFAULT_CODE_TABLE,
) -> PulseFrame:
    """Build the frame for a command at the given pulse rate.

    Raises RateOutOfBand for rates outside [500, 1000] Hz (bounds inclusive).
    """
    if not MIN_PULSE_RATE_HZ <= rate <= MAX_PULSE_RATE_HZ:
        raise RateOutOfBand(
            f"pulse rate {rate:g} Hz outside "
            f"[{MIN_PULSE_RATE_HZ:g}, {MAX_PULSE_RATE_HZ:g}] Hz"
        )
    return PulseFrame(SYNC_PULSES, table.mapping[command], rate)


def decode_frame(frame: PulseFrame, table: CodeTable = DEFAULT_CODE_TABLE) -> Command:
    """Recover the command from a possibly corrupted frame.

    The code count is snapped to the nearest table entry within +/-2 pulses.
    Raises BadSync when the sync burst is wrong and UnrecognizedCode when no
    entry is close enough; exact inverse of encode_frame on clean frames.
    """
    if frame.sync_pulses != SYNC_PULSES:
        raise BadSync(
            f"expected {SYNC_PULSES} sync pulses, got {frame.sync_pulses}"
        )
    command = table.snap(frame.code_pulses)
    if command is None:
        raise UnrecognizedCode(
            f"no code point within {SNAP_TOLERANCE} of {frame.code_pulses}"
        )
    return command


def frame_duration(frame: PulseFrame) -> float:
    """Airtime of a well-formed frame in seconds: (sync + code) / rate."""
    if not frame.well_formed:
        raise ValueError(f"malformed frame: {frame.as_text()}")
    return (frame.sync_pulses + frame.code_pulses) / frame.pulse_rate


@dataclass(frozen=True)
class ElectricalSpec:
    """Electrical operating point of the transmitter chip.

    Units: vdd in volts, i_operating and i_drive in mA, i_quiescent in uA,
    f_audio in Hz. All fields must be non-negative.
    """

    vdd: float
    i_operating: float
    i_quiescent: float
    i_drive: float
    f_audio: float

    def __post_init__(self) -> None:
        for name in ("vdd", "i_operating", "i_quiescent", "i_drive", "f_audio"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Violation:
    """One violated electrical bound, with the offending value."""

    parameter: str
    value: float
    message: str


def validate_electrical(spec: ElectricalSpec) -> list[Violation]:
    """Check an operating point against the chip envelope.

    Returns an empty list when every bound holds, otherwise one Violation per
    broken bound. All bounds are inclusive.
    """
    violations: list[Violation] = []

    def check_min(parameter: str, value: float, minimum: float, unit: str) -> None:
        if value < minimum:
            violations.append(
                Violation(parameter, value, f"{parameter} {value:g} {unit} below minimum {minimum:g} {unit}")
            )

    def check_max(parameter: str, value: float, maximum: float, unit: str) -> None:
        if value > maximum:
            violations.append(
                Violation(parameter, value, f"{parameter} {value:g} {unit} above maximum {maximum:g} {unit}")
            )

    check_min("vdd", spec.vdd, VDD_RANGE_V[0], "V")
    check_max("vdd", spec.vdd, VDD_RANGE_V[1], "V")
    check_min("i_operating", spec.i_operating, I_OPERATING_RANGE_MA[0], "mA")
    check_max("i_operating", spec.i_operating, I_OPERATING_RANGE_MA[1], "mA")
    check_max("i_quiescent", spec.i_quiescent, I_QUIESCENT_MAX_UA, "uA")
    check_min("i_drive", spec.i_drive, I_DRIVE_MIN_MA, "mA")
    check_min("f_audio", spec.f_audio, F_AUDIO_RANGE_HZ[0], "Hz")
    check_max("f_audio", spec.f_audio, F_AUDIO_RANGE_HZ[1], "Hz")
    return violations


def estimate_runtime(
    capacity_mah: float,
    duty_fraction: float,
    spec: ElectricalSpec,
) -> float:
    """Battery life in hours for a transmit duty cycle.

    Average drain is duty * i_operating plus (1 - duty) * i_quiescent (the
    quiescent current converted from uA to mA). Raises ValueError when the
    average drain is zero, since runtime would be unbounded.
    """
    if not 0.0 <= duty_fraction <= 1.0:
        raise ValueError(f"duty_fraction must be in [0, 1], got {duty_fraction}")
    if capacity_mah <= 0:
        raise ValueError("capacity_mah must be positive")
    quiescent_ma = spec.i_quiescent / 1000.0
    drain_ma = duty_fraction * spec.i_operating + (1.0 - duty_fraction) * quiescent_ma
    if drain_ma <= 0:
        raise ValueError("average drain is zero; runtime is unbounded")
    return capacity_mah / drain_ma
