import { describe, expect, it } from "vitest";

import { ServiceError } from "./client.js";
import type { ServiceClient, TelemetryHandlers, TelemetryStream } from "./client.js";
import { ConsoleController, INITIAL_ENABLED, flyCaption } from "./console.js";
import type { Command, DispatchReport, FlightState, LogEntry, Telemetry } from "./types.js";

// what the service reports as valid_next per state (mirrors its state machine)
const VALID_NEXT: Record<FlightState, Command[]> = {
  idle: ["start", "stop"],
  started: ["ready", "fly", "stop"],
  ready: ["fly", "ready", "stop"],
  airborne: ["fly", "left", "right", "stop"],
  landing: [],
};

function applied(state: FlightState): DispatchReport {
  return {
    pipeline_result: { status: "applied", new_state: state },
    new_state: state,
    valid_next: VALID_NEXT[state],
  };
}

function sample(state: FlightState, z = 0, extra: Partial<Telemetry> = {}): Telemetry {
  return {
    clock: 1.0,
    state,
    x: 0,
    y: 0,
    z,
    heading: 0,
    distance_to_station: z,
    link: "good",
    ...extra,
  };
}

class MockService implements ServiceClient {
  commands: Command[] = [];
  handlers: TelemetryHandlers | null = null;
  closedSessions: string[] = [];
  streamClosed = 0;
  logEntries: LogEntry[] = [];
  openSessionImpl: (stationId: string) => Promise<string> = async () => "session-1";
  sendCommandImpl: (sessionId: string, command: Command) => Promise<DispatchReport> =
    async () => applied("idle");

  openSession(stationId: string): Promise<string> {
    return this.openSessionImpl(stationId);
  }

  async closeSession(sessionId: string): Promise<void> {
    this.closedSessions.push(sessionId);
  }

  sendCommand(sessionId: string, command: Command): Promise<DispatchReport> {
    this.commands.push(command);
    return this.sendCommandImpl(sessionId, command);
  }

  async fetchLog(_stationId: string, since: number): Promise<LogEntry[]> {
    return this.logEntries.filter((entry) => entry.sequence > since);
  }

  streamTelemetry(_stationId: string, handlers: TelemetryHandlers): TelemetryStream {
    this.handlers = handlers;
    return { close: () => this.streamClosed++ };
  }

  push(telemetry: Telemetry): void {
    this.handlers?.onSample(telemetry);
  }
}

const flush = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

async function connected(mock = new MockService(), options = {}) {
  const controller = new ConsoleController(mock, options);
  await controller.connect("alpha");
  return { mock, controller };
}

describe("connect", () => {
  it("starts in waiting-for-command mode with the idle button set", async () => {
    const { controller } = await connected();
    const state = controller.getState();
    expect(state.phase).toBe("connected");
    expect([...state.enabled].sort()).toEqual([...INITIAL_ENABLED].sort());
    expect(state.lastOutcome).toBe("Waiting for Command");
  });

  it("shows a busy station verbatim and enables nothing", async () => {
    const mock = new MockService();
    mock.openSessionImpl = async () => {
      throw new ServiceError(409, "station 'alpha' is controlled by another session");
    };
    const { controller } = await connected(mock);
    const state = controller.getState();
    expect(state.phase).toBe("disconnected");
    expect(state.banner).toBe("station 'alpha' is controlled by another session");
    expect(state.enabled.size).toBe(0);
  });

  it("shows an unknown station verbatim", async () => {
    const mock = new MockService();
    mock.openSessionImpl = async () => {
      throw new ServiceError(404, "unknown station 'ghost'");
    };
    const { controller } = await connected(mock);
    expect(controller.getState().banner).toBe("unknown station 'ghost'");
  });

  it("shows a connection-failed banner when the service is down", async () => {
    const mock = new MockService();
    mock.openSessionImpl = async () => {
      throw new TypeError("fetch failed");
    };
    const { controller } = await connected(mock);
    expect(controller.getState().banner).toMatch(/connection failed/);
  });
});

describe("button enablement", () => {
  it("equals the service-reported valid_next for every state", async () => {
    for (const state of Object.keys(VALID_NEXT) as FlightState[]) {
      const mock = new MockService();
      mock.sendCommandImpl = async () => applied(state);
      const { controller } = await connected(mock);
      controller.press("start");
      await flush();
      expect([...controller.getState().enabled].sort()).toEqual(
        [...VALID_NEXT[state]].sort(),
      );
    }
  });

  it("never dispatches a disabled command", async () => {
    const { mock, controller } = await connected();
    controller.press("left"); // not in the idle set
    await flush();
    expect(mock.commands).toEqual([]);
  });

  it("re-arms the idle set when telemetry reports touchdown after landing", async () => {
    const mock = new MockService();
    mock.sendCommandImpl = async () => applied("landing");
    const { controller } = await connected(mock);
    controller.press("stop");
    await flush();
    expect(controller.getState().enabled.size).toBe(0);

    mock.push(sample("landing", 0.5));
    expect(controller.getState().enabled.size).toBe(0);
    mock.push(sample("idle", 0));
    expect([...controller.getState().enabled].sort()).toEqual(
      [...INITIAL_ENABLED].sort(),
    );
  });
});

describe("fly button caption", () => {
  it("follows the two-click takeoff flow", async () => {
    const mock = new MockService();
    const script: DispatchReport[] = [applied("started"), applied("ready"), applied("airborne")];
    mock.sendCommandImpl = async () => {
      const next = script.shift();
      if (!next) throw new Error("script exhausted");
      return next;
    };
    const { controller } = await connected(mock);
    expect(controller.getState().flyCaption).toBe("Fly");

    controller.press("start");
    await flush();
    expect(controller.getState().flyCaption).toBe("Arm");

    controller.press("fly");
    await flush();
    expect(controller.getState().flyCaption).toBe("Take Off");

    controller.press("fly");
    await flush();
    expect(controller.getState().flyCaption).toBe("Climb");
  });

  it("maps every state", () => {
    expect(flyCaption("started")).toBe("Arm");
    expect(flyCaption("ready")).toBe("Take Off");
    expect(flyCaption("airborne")).toBe("Climb");
    expect(flyCaption("idle")).toBe("Fly");
    expect(flyCaption("landing")).toBe("Fly");
    expect(flyCaption(null)).toBe("Fly");
  });
});

describe("dispatch serialization", () => {
  it("keeps at most one request in flight and never reorders", async () => {
    const mock = new MockService();
    const resolvers: Array<(report: DispatchReport) => void> = [];
    mock.sendCommandImpl = (_sid, _command) =>
      new Promise<DispatchReport>((resolve) => resolvers.push(resolve));
    const { controller } = await connected(mock);

    controller.press("start");
    controller.press("stop");
    await flush();
    expect(mock.commands).toEqual(["start"]); // second press is queued

    resolvers[0]!(applied("started"));
    await flush();
    expect(mock.commands).toEqual(["start", "stop"]);

    resolvers[1]!(applied("idle"));
    await flush();
    expect(controller.getState().flightState).toBe("idle");
  });
});

describe("dispatch outcomes", () => {
  it("lost shows the signal-lost indicator and applies valid_next unchanged", async () => {
    const mock = new MockService();
    mock.sendCommandImpl = async () => ({
      pipeline_result: { status: "lost" },
      new_state: "idle" as const,
      valid_next: VALID_NEXT.idle,
    });
    const { controller } = await connected(mock);
    const before = [...controller.getState().enabled].sort();
    controller.press("start");
    await flush();
    const state = controller.getState();
    expect(state.signalLost).toBe(true);
    expect([...state.enabled].sort()).toEqual(before);
    expect(state.lastOutcome).toMatch(/signal lost/);
  });

  it("rejections surface the service reason verbatim", async () => {
    const mock = new MockService();
    mock.sendCommandImpl = async () => ({
      pipeline_result: { status: "rejected", reason: "cannot steer before takeoff" },
      new_state: "idle" as const,
      valid_next: VALID_NEXT.idle,
    });
    const { controller } = await connected(mock);
    controller.press("start");
    await flush();
    expect(controller.getState().lastOutcome).toContain("cannot steer before takeoff");
  });

  it("an invalid session forces the reconnect flow", async () => {
    const mock = new MockService();
    mock.sendCommandImpl = async () => {
      throw new ServiceError(404, "invalid session 'session-1'");
    };
    const { controller } = await connected(mock);
    controller.press("start");
    controller.press("stop");
    await flush();
    const state = controller.getState();
    expect(state.phase).toBe("reconnect_required");
    expect(state.enabled.size).toBe(0);
    expect(mock.commands).toEqual(["start"]); // queued press dropped, not sent
  });
});

describe("telemetry rendering", () => {
  it("renders payload values verbatim", async () => {
    const { mock, controller } = await connected();
    const payload = sample("airborne", 3.2, { heading: 123, clock: 42.5, link: "degraded" });
    mock.push(payload);
    const state = controller.getState();
    expect(state.telemetry).toEqual(payload);
    expect(state.flightState).toBe("airborne");
  });

  it("flags stale data with the sample age once the stream goes quiet", async () => {
    let nowMs = 0;
    const mock = new MockService();
    const { controller } = await connected(mock, { now: () => nowMs });
    mock.push(sample("idle"));
    controller.tick();
    expect(controller.getState().stale).toBe(false);

    nowMs = 2500;
    controller.tick();
    const state = controller.getState();
    expect(state.stale).toBe(true);
    expect(state.staleAgeMs).toBe(2500);

    mock.push(sample("idle"));
    expect(controller.getState().stale).toBe(false);
  });
});

describe("log view", () => {
  it("tails new entries by sequence", async () => {
    const { mock, controller } = await connected();
    mock.logEntries = [
      {
        sequence: 1,
        timestamp: "t",
        session_id: "session-1",
        command: "start",
        pipeline_result: { status: "applied", new_state: "started" },
        frame_sent: "4:7:800",
        frame_received: "4:7:800",
        injected: false,
      },
    ];
    await controller.refreshLog();
    expect(controller.getState().logTail.map((e) => e.sequence)).toEqual([1]);

    mock.logEntries.push({
      sequence: 2,
      timestamp: "t",
      session_id: "session-1",
      command: "stop",
      pipeline_result: { status: "applied", new_state: "idle" },
      frame_sent: "4:34:800",
      frame_received: "4:34:800",
      injected: true,
    });
    await controller.refreshLog();
    expect(controller.getState().logTail.map((e) => e.sequence)).toEqual([1, 2]);
  });
});

describe("disconnect", () => {
  it("closes the stream, releases the session, and resets", async () => {
    const { mock, controller } = await connected();
    await controller.disconnect();
    expect(mock.streamClosed).toBe(1);
    expect(mock.closedSessions).toEqual(["session-1"]);
    expect(controller.getState().phase).toBe("disconnected");
  });
});
