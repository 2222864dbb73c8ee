"""Simulated 49 MHz radio link between ground station and hoverbot.

Delivery degrades quadratically with distance up to a configured maximum
range, delivered frames can have their code pulse count smeared by gaussian
noise that grows with distance, and every outcome is a pure function of
(config seed, sequence number), so traffic replays bit-identically.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace

from hoverbot.codec import MAX_CODE_PULSES, MIN_CODE_PULSES, PulseFrame

__all__ = [
    "ChannelConfig",
    "Delivered",
    "Lost",
    "TransmitOutcome",
    "LinkQuality",
    "RadioBand",
    "RF_SPECTRUM",
    "OutOfSpectrum",
    "delivery_probability",
    "transmit",
    "link_status",
    "band_lookup",
    "channel_log_line",
]


@dataclass(frozen=True)
class ChannelConfig:
    """Radio link parameters.

    edge_loss is the loss probability at max_range_m; corrupt_sigma is the
    code-pulse standard deviation at max_range_m. The seed fixes the whole
    channel's randomness.
    """

    carrier_mhz: float = 49.0
    max_range_m: float = 15.0
    edge_loss: float = 0.0
    corrupt_sigma: float = 0.0
    latency_ms: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.carrier_mhz <= 0:
            raise ValueError("carrier_mhz must be positive")
        if self.max_range_m <= 0:
            raise ValueError("max_range_m must be positive")
        if not 0.0 <= self.edge_loss <= 1.0:
            raise ValueError("edge_loss must be in [0, 1]")
        if self.corrupt_sigma < 0:
            raise ValueError("corrupt_sigma must be non-negative")
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class Delivered:
    """Frame arrived after delay_ms; only code_pulses may differ from what
    was sent."""

    frame: PulseFrame
    delay_ms: float


@dataclass(frozen=True)
class Lost:
    pass


TransmitOutcome = Delivered | Lost


class LinkQuality(enum.Enum):
    GOOD = "good"
    DEGRADED = "degraded"
    OUT_OF_RANGE = "out_of_range"

    def __str__(self) -> str:
        return self.value


def delivery_probability(distance_m: float, cfg: ChannelConfig) -> float:
    """Chance a frame at this distance arrives: 1 - edge_loss * (d/R)^2,
    with the distance ratio clamped at 1 beyond max range."""
    if distance_m < 0:
        raise ValueError("distance must be non-negative")
    ratio_sq = min(1.0, (distance_m / cfg.max_range_m) ** 2)
    return min(1.0, max(0.0, 1.0 - cfg.edge_loss * ratio_sq))


def _draws(cfg: ChannelConfig, sequence: int) -> random.Random:
    # One generator per (seed, sequence): concurrent transmissions can never
    # race on shared generator state, and replays are bit-identical.
    return random.Random(f"{cfg.seed}:{sequence}")


def transmit(
    frame: PulseFrame,
    distance_m: float,
    cfg: ChannelConfig,
    sequence: int,
) -> TransmitOutcome:
    """Push one frame through the channel.

    The loss draw and the code-pulse perturbation are fully determined by
    (cfg.seed, sequence). Delivered frames keep their sync burst and pulse
    rate; the perturbed code count is clamped to the valid pulse range.
    """
    if sequence < 0:
        raise ValueError("sequence must be non-negative")
    rng = _draws(cfg, sequence)
    if rng.random() >= delivery_probability(distance_m, cfg):
        return Lost()
    sigma = cfg.corrupt_sigma * (distance_m / cfg.max_range_m)
    delta = round(rng.gauss(0.0, sigma))
    code = min(MAX_CODE_PULSES, max(MIN_CODE_PULSES, frame.code_pulses + delta))
    return Delivered(replace(frame, code_pulses=code), cfg.latency_ms)


def link_status(distance_m: float, cfg: ChannelConfig) -> LinkQuality:
    """Console-facing link indicator from the delivery probability."""
    probability = delivery_probability(distance_m, cfg)
    if probability >= 0.9:
        return LinkQuality.GOOD
    if probability >= 0.5:
        return LinkQuality.DEGRADED
    return LinkQuality.OUT_OF_RANGE


@dataclass(frozen=True)
class RadioBand:
    """One row of the RF spectrum table; the interval is [lower_hz, upper_hz)."""

    name: str
    abbreviation: str
    itu_number: int
    lower_hz: float
    upper_hz: float


RF_SPECTRUM: tuple[RadioBand, ...] = (
    RadioBand("Extremely low frequency", "ELF", 1, 3.0, 30.0),
    RadioBand("Super low frequency", "SLF", 2, 30.0, 300.0),
    RadioBand("Ultra low frequency", "ULF", 3, 300.0, 3e3),
    RadioBand("Very low frequency", "VLF", 4, 3e3, 30e3),
    RadioBand("Low frequency", "LF", 5, 30e3, 300e3),
    RadioBand("Medium frequency", "MF", 6, 300e3, 3e6),
    RadioBand("High frequency", "HF", 7, 3e6, 30e6),
    RadioBand("Very high frequency", "VHF", 8, 30e6, 300e6),
    RadioBand("Ultra high frequency", "UHF", 9, 300e6, 3e9),
    RadioBand("Super high frequency", "SHF", 10, 3e9, 30e9),
    RadioBand("Extremely high frequency", "EHF", 11, 30e9, 300e9),
)


class OutOfSpectrum(ValueError):
    """Frequency outside the tabulated 3 Hz .. 300 GHz range."""


def band_lookup(frequency_hz: float) -> RadioBand:
    """Spectrum table row whose interval contains the frequency."""
    for band in RF_SPECTRUM:
        if band.lower_hz <= frequency_hz < band.upper_hz:
            return band
    raise OutOfSpectrum(f"{frequency_hz:g} Hz is outside the tabulated spectrum")


def channel_log_line(
    sequence: int,
    distance_m: float,
    frame_sent: PulseFrame,
    outcome: TransmitOutcome,
) -> str:
    """One channel event as `seq,distance_m,outcome,code_sent,code_recv,delay_ms`;
    lost frames leave the receive fields empty."""
    if isinstance(outcome, Delivered):
        return (
            f"{sequence},{distance_m:g},delivered,"
            f"{frame_sent.code_pulses},{outcome.frame.code_pulses},{outcome.delay_ms:g}"
        )
    return f"{sequence},{distance_m:g},lost,{frame_sent.code_pulses},,"
