"""Shared fixtures: config files, running services, and SSE reading."""

import json

import httpx
import pytest

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE_RESULTS[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_ACCEPTANCE_RESULTS.items()):
        name = nodeid.split("::")[-1].replace("test_criterion_", "")
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


def station_json(station_id="alpha", *, channel=None, sim=None):
    entry = {"id": station_id, "address": f"hoverbot-{station_id}.local"}
    if channel is not None:
        entry["channel"] = channel
    if sim is not None:
        entry["sim"] = sim
    return entry


def write_config(
    tmp_path,
    *,
    stations=None,
    realtime=True,
    idle_timeout_s=60.0,
    port=0,
    name="config.json",
):
    config = {
        "stations": stations if stations is not None else [station_json()],
        "listener": {"host": "127.0.0.1", "port": port},
        "session": {"idle_timeout_s": idle_timeout_s},
        "clock": {"realtime": realtime},
        "log_dir": str(tmp_path / "logs"),
    }
    path = tmp_path / name
    path.write_text(json.dumps(config, indent=2))
    return path


@pytest.fixture
def running_service(tmp_path):
    """A realtime-clock service with one lossless station, torn down after."""
    from hoverbot.service.http import init_service

    handle = init_service(write_config(tmp_path))
    yield handle
    handle.shutdown()


def read_sse(client: httpx.Client, url: str, count: int, timeout: float = 10.0):
    """Collect `count` SSE data payloads from a telemetry stream."""
    events = []
    with client.stream("GET", url, timeout=timeout) as response:
        assert response.status_code == 200
        for line in response.iter_lines():
            if line.startswith("data: "):
                events.append(json.loads(line[len("data: "):]))
                if len(events) >= count:
                    break
    return events
