/**
 * Console controller: all the panel's behavior, free of DOM so it can be
 * driven against a mocked service.
 *
 * Rules it enforces:
 * - buttons are enabled for exactly the service-reported valid_next set
 *   (the idle set {start, stop} before the first dispatch);
 * - at most one dispatch request is in flight, extra presses queue in order;
 * - everything rendered (state, altitude, link) comes verbatim out of a
 *   DispatchReport or a Telemetry payload.
 */

import { ServiceError } from "./client.js";
import type { ServiceClient, TelemetryStream } from "./client.js";
import type {
  Command,
  DispatchReport,
  FlightState,
  LogEntry,
  PipelineResult,
  Telemetry,
} from "./types.js";

/** What the service accepts from a freshly selected (idle) station. */
export const INITIAL_ENABLED: readonly Command[] = ["start", "stop"];

/** Telemetry silence after which the display flags itself stale. */
export const STALE_AFTER_MS = 2000;

/** Default flight ceiling; the altitude gauge clamps its fill at this mark. */
export const CEILING_M = 15;

const LOG_TAIL_LIMIT = 50;

export type Phase = "disconnected" | "connecting" | "connected" | "reconnect_required";

export interface ConsoleState {
  phase: Phase;
  stationId: string | null;
  session: string | null;
  enabled: ReadonlySet<Command>;
  flyCaption: string;
  flightState: FlightState | null;
  lastReport: DispatchReport | null;
  lastOutcome: string | null;
  signalLost: boolean;
  telemetry: Telemetry | null;
  stale: boolean;
  staleAgeMs: number | null;
  banner: string | null;
  logTail: LogEntry[];
}

function initialState(): ConsoleState {
  return {
    phase: "disconnected",
    stationId: null,
    session: null,
    enabled: new Set(),
    flyCaption: "Fly",
    flightState: null,
    lastReport: null,
    lastOutcome: null,
    signalLost: false,
    telemetry: null,
    stale: false,
    staleAgeMs: null,
    banner: null,
    logTail: [],
  };
}

/** The fly button says what pressing it will do from the current state. */
export function flyCaption(state: FlightState | null): string {
  switch (state) {
    case "started":
      return "Arm";
    case "ready":
      return "Take Off";
    case "airborne":
      return "Climb";
    default:
      return "Fly";
  }
}

function describeOutcome(command: Command, result: PipelineResult): string {
  switch (result.status) {
    case "applied":
      return `${command}: applied, now ${result.new_state}`;
    case "rejected":
      return `${command}: rejected (${result.reason})`;
    case "lost":
      return `${command}: signal lost`;
    case "decode_error":
      return `${command}: garbled in transit (${result.kind})`;
  }
}

export interface ControllerOptions {
  now?: () => number;
  staleAfterMs?: number;
  onChange?: (state: ConsoleState) => void;
}

export class ConsoleController {
  private state = initialState();
  private queue: Command[] = [];
  private inflight = false;
  private stream: TelemetryStream | null = null;
  private lastSampleAt: number | null = null;
  private lastLogSequence = 0;

  constructor(
    private readonly client: ServiceClient,
    private readonly options: ControllerOptions = {},
  ) {}

  getState(): ConsoleState {
    return this.state;
  }

  private now(): number {
    return (this.options.now ?? Date.now)();
  }

  private update(patch: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...patch };
    this.options.onChange?.(this.state);
  }

  async connect(stationId: string): Promise<void> {
    await this.disconnect();
    this.update({ ...initialState(), phase: "connecting", stationId });
    let session: string;
    try {
      session = await this.client.openSession(stationId);
    } catch (error) {
      const banner =
        error instanceof ServiceError
          ? error.message
          : "connection failed: service unreachable";
      this.update({ phase: "disconnected", banner });
      return;
    }
    this.stream = this.client.streamTelemetry(stationId, {
      onSample: (sample) => this.onTelemetry(sample),
      onDrop: () => {
        // EventSource retries by itself; until samples resume, tick() will
        // flag the display stale
      },
    });
    // waiting for command: a fresh exclusive session always starts grounded
    this.update({
      phase: "connected",
      session,
      enabled: new Set(INITIAL_ENABLED),
      banner: null,
      lastOutcome: "Waiting for Command",
    });
  }

  async disconnect(): Promise<void> {
    this.stream?.close();
    this.stream = null;
    this.queue = [];
    const { session } = this.state;
    if (session) {
      try {
        await this.client.closeSession(session);
      } catch {
        // releasing a dead session is fine
      }
    }
    this.lastSampleAt = null;
    this.lastLogSequence = 0;
    this.update(initialState());
  }

  /** Queue one button press; presses dispatch one at a time, in order. */
  press(command: Command): void {
    if (this.state.phase !== "connected") return;
    if (!this.state.enabled.has(command)) return;
    this.queue.push(command);
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inflight) return;
    const command = this.queue.shift();
    if (command === undefined || this.state.session === null) return;
    this.inflight = true;
    try {
      const report = await this.client.sendCommand(this.state.session, command);
      this.applyReport(command, report);
    } catch (error) {
      if (error instanceof ServiceError && error.status === 404) {
        // session expired or was released underneath us: force reconnect
        this.queue = [];
        this.stream?.close();
        this.stream = null;
        this.update({
          phase: "reconnect_required",
          session: null,
          enabled: new Set(),
          banner: "session lost; reconnect to the station",
        });
        return;
      }
      this.update({ banner: `command failed: ${(error as Error).message}` });
    } finally {
      this.inflight = false;
    }
    void this.pump();
  }

  private applyReport(command: Command, report: DispatchReport): void {
    this.update({
      enabled: new Set(report.valid_next),
      lastReport: report,
      flightState: report.new_state,
      flyCaption: flyCaption(report.new_state),
      signalLost: report.pipeline_result.status === "lost",
      lastOutcome: describeOutcome(command, report.pipeline_result),
      banner: null,
    });
  }

  private onTelemetry(sample: Telemetry): void {
    this.lastSampleAt = this.now();
    const patch: Partial<ConsoleState> = {
      telemetry: sample,
      flightState: sample.state,
      flyCaption: flyCaption(sample.state),
      stale: false,
      staleAgeMs: null,
    };
    // touchdown is the one transition the service never reports through a
    // dispatch report; once telemetry says the vehicle is back to idle, the
    // idle command set applies again (same constant as before first dispatch)
    if (sample.state === "idle" && this.state.lastReport?.new_state === "landing") {
      patch.enabled = new Set(INITIAL_ENABLED);
      patch.lastReport = null;
    }
    this.update(patch);
  }

  /** Periodic staleness check; call on an interval (and from tests). */
  tick(): void {
    if (this.state.phase !== "connected" || this.lastSampleAt === null) return;
    const age = this.now() - this.lastSampleAt;
    const limit = this.options.staleAfterMs ?? STALE_AFTER_MS;
    if (age > limit) {
      this.update({ stale: true, staleAgeMs: age });
    } else if (this.state.stale) {
      this.update({ stale: false, staleAgeMs: null });
    }
  }

  /** Pull new command-log entries; best effort, keeps the last 50. */
  async refreshLog(): Promise<void> {
    const { stationId, phase } = this.state;
    if (!stationId || (phase !== "connected" && phase !== "reconnect_required")) return;
    let entries: LogEntry[];
    try {
      entries = await this.client.fetchLog(stationId, this.lastLogSequence);
    } catch {
      return;
    }
    if (entries.length === 0) return;
    const last = entries[entries.length - 1];
    if (last) this.lastLogSequence = last.sequence;
    this.update({
      logTail: [...this.state.logTail, ...entries].slice(-LOG_TAIL_LIMIT),
    });
  }
}
