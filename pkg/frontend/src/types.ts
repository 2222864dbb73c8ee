/**
 * Wire types for the ground-control service protocol.
 * These mirror the JSON shapes the service emits; the console renders them
 * verbatim and holds no authoritative state of its own.
 */

export type Command = "start" | "ready" | "fly" | "left" | "right" | "stop";

export type FlightState = "idle" | "started" | "ready" | "airborne" | "landing";

export type LinkQuality = "good" | "degraded" | "out_of_range";

export type PipelineResult =
  | { status: "applied"; new_state: FlightState }
  | { status: "rejected"; reason: string }
  | { status: "lost" }
  | { status: "decode_error"; kind: string };

export interface DispatchReport {
  pipeline_result: PipelineResult;
  new_state: FlightState;
  valid_next: Command[];
}

export interface Telemetry {
  clock: number;
  state: FlightState;
  x: number;
  y: number;
  z: number;
  heading: number;
  distance_to_station: number;
  link: LinkQuality;
}

export interface LogEntry {
  sequence: number;
  timestamp: string;
  session_id: string;
  command: Command;
  pipeline_result: PipelineResult;
  frame_sent: string | null;
  frame_received: string | null;
  injected: boolean;
}

export const ALL_COMMANDS: readonly Command[] = [
  "start",
  "ready",
  "fly",
  "left",
  "right",
  "stop",
];
