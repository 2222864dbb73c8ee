/**
 * HTTP client for the ground-control wire protocol: sessions, command
 * dispatch, the command log, and the server-sent telemetry stream.
 */

import type { Command, DispatchReport, LogEntry, Telemetry } from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface TelemetryHandlers {
  onSample(sample: Telemetry): void;
  onDrop(): void;
}

export interface TelemetryStream {
  close(): void;
}

/** The surface the console controller needs; mocked in tests. */
export interface ServiceClient {
  openSession(stationId: string): Promise<string>;
  closeSession(sessionId: string): Promise<void>;
  sendCommand(sessionId: string, command: Command): Promise<DispatchReport>;
  fetchLog(stationId: string, since: number): Promise<LogEntry[]>;
  streamTelemetry(stationId: string, handlers: TelemetryHandlers): TelemetryStream;
}

async function errorFrom(response: Response): Promise<ServiceError> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (typeof body.error === "string") message = body.error;
    else if (typeof body.detail === "string") message = body.detail;
  } catch {
    // non-JSON error body; keep the status message
  }
  return new ServiceError(response.status, message);
}

export class HttpServiceClient implements ServiceClient {
  constructor(private readonly baseUrl: string = "") {}

  async openSession(stationId: string): Promise<string> {
    const response = await fetch(
      `${this.baseUrl}/stations/${encodeURIComponent(stationId)}/session`,
      { method: "POST" },
    );
    if (!response.ok) throw await errorFrom(response);
    const body = await response.json();
    return body.session_id as string;
  }

  async closeSession(sessionId: string): Promise<void> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}`, {
      method: "DELETE",
    });
    if (!response.ok) throw await errorFrom(response);
  }

  async sendCommand(sessionId: string, command: Command): Promise<DispatchReport> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/command`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ command }),
    });
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as DispatchReport;
  }

  async fetchLog(stationId: string, since: number): Promise<LogEntry[]> {
    const response = await fetch(
      `${this.baseUrl}/stations/${encodeURIComponent(stationId)}/log?since=${since}`,
    );
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as LogEntry[];
  }

  streamTelemetry(stationId: string, handlers: TelemetryHandlers): TelemetryStream {
    // EventSource reconnects on its own; onDrop just flags the gap so the
    // console can show staleness until samples resume
    const source = new EventSource(
      `${this.baseUrl}/stations/${encodeURIComponent(stationId)}/telemetry`,
    );
    source.onmessage = (event) => {
      handlers.onSample(JSON.parse(event.data) as Telemetry);
    };
    source.onerror = () => handlers.onDrop();
    return { close: () => source.close() };
  }
}
