"""Service configuration: JSON file schema, defaults, and validation.

Expected shape:

    {
      "stations": [
        {"id": "alpha", "address": "hoverbot-alpha.local",
         "channel": {"carrier_mhz": 49.0, "max_range_m": 15.0,
                     "edge_loss": 0.0, "corrupt_sigma": 0.0,
                     "latency_ms": 0.0, "seed": 0},
         "sim": {"dt": 0.02, "climb_rate": 1.0, "descend_rate": 1.5,
                 "yaw_rate": 45.0, "ceiling": 15.0}}
      ],
      "listener": {"host": "127.0.0.1", "port": 8469},
      "session": {"idle_timeout_s": 60},
      "clock": {"realtime": true},
      "log_dir": "logs"
    }

channel, sim, listener, session, clock and log_dir are all optional and fall
back to the defaults above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from hoverbot.channel import ChannelConfig
from hoverbot.sim import SimConfig

__all__ = ["ConfigError", "StationConfig", "ServiceConfig", "load_config"]

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8469
DEFAULT_IDLE_TIMEOUT_S = 60.0
DEFAULT_LOG_DIR = "logs"


class ConfigError(Exception):
    """Configuration file missing, unparseable, or invalid."""


@dataclass(frozen=True)
class StationConfig:
    id: str
    address: str
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    sim: SimConfig = field(default_factory=SimConfig)


@dataclass(frozen=True)
class ServiceConfig:
    stations: tuple[StationConfig, ...]
    host: str = DEFAULT_HOST
    port: int = DEFAULT_PORT
    idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S
    realtime: bool = True
    log_dir: Path = Path(DEFAULT_LOG_DIR)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def _station_from_json(raw: dict, index: int) -> StationConfig:
    context = f"stations[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{context}: expected an object")
    station_id = _require(raw, "id", context)
    if not isinstance(station_id, str) or not station_id:
        raise ConfigError(f"{context}: id must be a non-empty string")
    address = raw.get("address", "")
    try:
        channel = ChannelConfig(**raw.get("channel", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: bad channel config: {exc}") from exc
    sim_raw = dict(raw.get("sim", {}))
    if "station_position" in sim_raw:
        sim_raw["station_position"] = tuple(sim_raw["station_position"])
    try:
        sim = SimConfig(**sim_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: bad sim config: {exc}") from exc
    return StationConfig(id=station_id, address=address, channel=channel, sim=sim)


def parse_config(raw: dict) -> ServiceConfig:
    """Validate a decoded config object. Raises ConfigError on any problem,
    naming duplicate station ids explicitly."""
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be an object")
    stations_raw = _require(raw, "stations", "config")
    if not isinstance(stations_raw, list):
        raise ConfigError("stations must be an array")
    stations = tuple(
        _station_from_json(entry, index) for index, entry in enumerate(stations_raw)
    )
    seen: set[str] = set()
    for station in stations:
        if station.id in seen:
            raise ConfigError(f"duplicate station id: {station.id!r}")
        seen.add(station.id)

    listener = raw.get("listener", {})
    session = raw.get("session", {})
    clock = raw.get("clock", {})
    try:
        return ServiceConfig(
            stations=stations,
            host=str(listener.get("host", DEFAULT_HOST)),
            port=int(listener.get("port", DEFAULT_PORT)),
            idle_timeout_s=float(session.get("idle_timeout_s", DEFAULT_IDLE_TIMEOUT_S)),
            realtime=bool(clock.get("realtime", True)),
            log_dir=Path(raw.get("log_dir", DEFAULT_LOG_DIR)),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"bad listener/session/clock config: {exc}") from exc


def load_config(path: str | Path) -> ServiceConfig:
    """Read and validate a config file. Raises ConfigError if the file is
    missing or does not parse."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
