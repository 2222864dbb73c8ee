"""HTTP wire protocol over the ground-control core.

Endpoints:
    GET    /health                        service liveness + station count
    POST   /stations/{id}/session         acquire exclusive control
    DELETE /sessions/{sid}                release (dead-man lands if airborne)
    POST   /sessions/{sid}/command        body {"command": "fly"} -> dispatch report
    GET    /stations/{id}/telemetry       server-sent events, one per sim step
    GET    /stations/{id}/log?since=N     log entries with sequence > N

init_service builds the whole stack from a config file: registry, bound
listener, per-station clocks. Startup is atomic; if the config is bad or the
port cannot be bound, nothing is left listening.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time
from pathlib import Path

import uvicorn
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from hoverbot.commands import UnknownCommand, parse_command
from hoverbot.service.config import ServiceConfig, load_config
from hoverbot.service.core import (
    GroundControl,
    InvalidSession,
    StationBusy,
    SubscriptionClosed,
    UnknownStation,
)
from hoverbot.service.wire import entry_to_json, report_to_json, telemetry_to_json

__all__ = ["BindError", "ServiceHandle", "create_app", "init_service"]

SSE_POLL_TIMEOUT_S = 0.5


class BindError(OSError):
    """Listener address could not be bound."""


class CommandBody(BaseModel):
    command: str


def create_app(control: GroundControl, console_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="hoverbot ground control", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownStation)
    def _unknown_station(_, exc: UnknownStation):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(InvalidSession)
    def _invalid_session(_, exc: InvalidSession):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(StationBusy)
    def _station_busy(_, exc: StationBusy):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.get("/health")
    def health():
        return control.health()

    @app.post("/stations/{station_id}/session")
    def open_session(station_id: str):
        session = control.select_station(station_id)
        return {"session_id": session.session_id, "station_id": station_id}

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str):
        control.release_station(session_id)
        return {"status": "released"}

    @app.post("/sessions/{session_id}/command")
    def dispatch(session_id: str, body: CommandBody):
        try:
            command = parse_command(body.command)
        except UnknownCommand as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        report = control.dispatch_command(session_id, command)
        return report_to_json(report)

    @app.get("/stations/{station_id}/log")
    def get_log(station_id: str, since: int = 0):
        return [entry_to_json(entry) for entry in control.get_log(station_id, since)]

    @app.get("/stations/{station_id}/telemetry")
    def stream_telemetry(station_id: str):
        subscription = control.subscribe_telemetry(station_id)

        def events():
            try:
                while True:
                    try:
                        sample = subscription.get(timeout=SSE_POLL_TIMEOUT_S)
                    except queue.Empty:
                        # keepalive comment; also lets client disconnects surface
                        yield ": keepalive\n\n"
                        continue
                    except SubscriptionClosed:
                        break
                    yield f"data: {json.dumps(telemetry_to_json(sample))}\n\n"
            finally:
                subscription.close()

        return StreamingResponse(events(), media_type="text/event-stream")

    if console_dir is not None:
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    return app


class ServiceHandle:
    """A running service: bound address, core access for tooling, shutdown."""

    def __init__(
        self,
        control: GroundControl,
        server: uvicorn.Server,
        thread: threading.Thread,
        host: str,
        port: int,
    ):
        self.control = control
        self._server = server
        self._thread = thread
        self.host = host
        self.port = port

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def shutdown(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5.0)
        self.control.shutdown()


def init_service(
    config_path: str | Path,
    *,
    listen: str | None = None,
    fast_clock: bool = False,
    log_dir: str | Path | None = None,
    console_dir: str | Path | None = None,
) -> ServiceHandle:
    """Load config, bind the listener, and start serving.

    Raises ConfigError for a missing/invalid config file and BindError when
    the address is taken; in both cases nothing is left running. `listen`,
    `fast_clock` and `log_dir` override their config-file counterparts.
    """
    config = load_config(config_path)
    host, port = config.host, config.port
    if listen is not None:
        host, _, port_text = listen.rpartition(":")
        if not host or not port_text.isdigit():
            raise ValueError(f"--listen expects host:port, got {listen!r}")
        port = int(port_text)
    if fast_clock:
        config = ServiceConfig(
            stations=config.stations,
            host=host,
            port=port,
            idle_timeout_s=config.idle_timeout_s,
            realtime=False,
            log_dir=config.log_dir,
        )

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
        sock.listen(128)
    except OSError as exc:
        sock.close()
        raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
    bound_port = sock.getsockname()[1]

    try:
        control = GroundControl(config, log_dir=Path(log_dir) if log_dir else None)
        app = create_app(control, console_dir=Path(console_dir) if console_dir else None)
    except Exception:
        sock.close()  # atomic startup: on any failure nothing listens
        raise
    server = uvicorn.Server(
        uvicorn.Config(
            app,
            log_level="warning",
            access_log=False,
            lifespan="off",
            timeout_graceful_shutdown=2,
        )
    )
    thread = threading.Thread(
        target=server.run, kwargs={"sockets": [sock]}, daemon=True,
        name="hoverbot-http",
    )
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started and thread.is_alive() and time.monotonic() < deadline:
        time.sleep(0.01)
    control.start()
    return ServiceHandle(control, server, thread, host, bound_port)
