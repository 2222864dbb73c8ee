/**
 * DOM wiring for the operator console. All behavior lives in
 * ConsoleController; this file only renders its state and forwards input.
 */

import { HttpServiceClient } from "./client.js";
import { CEILING_M, ConsoleController } from "./console.js";
import type { ConsoleState } from "./console.js";
import { ALL_COMMANDS } from "./types.js";
import type { Command } from "./types.js";

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const stationInput = $<HTMLInputElement>("station-id");
const connectBtn = $<HTMLButtonElement>("connect");
const disconnectBtn = $<HTMLButtonElement>("disconnect");
const banner = $<HTMLDivElement>("banner");
const outcome = $<HTMLDivElement>("outcome");
const signalLost = $<HTMLSpanElement>("signal-lost");
const staleBadge = $<HTMLSpanElement>("stale");
const stateLabel = $<HTMLSpanElement>("flight-state");
const clockLabel = $<HTMLSpanElement>("clock");
const altitudeLabel = $<HTMLSpanElement>("altitude");
const altitudeFill = $<HTMLDivElement>("altitude-fill");
const headingLabel = $<HTMLSpanElement>("heading");
const distanceLabel = $<HTMLSpanElement>("distance");
const linkPill = $<HTMLSpanElement>("link");
const logBody = $<HTMLTableSectionElement>("log-body");

const buttons = new Map<Command, HTMLButtonElement>(
  ALL_COMMANDS.map((command) => [command, $<HTMLButtonElement>(`cmd-${command}`)]),
);

const controller = new ConsoleController(new HttpServiceClient(""), {
  onChange: render,
});

function render(state: ConsoleState): void {
  const connected = state.phase === "connected";
  connectBtn.disabled = state.phase === "connecting" || connected;
  disconnectBtn.disabled = !connected && state.phase !== "reconnect_required";
  stationInput.disabled = connected;

  banner.textContent = state.banner ?? "";
  banner.hidden = state.banner === null;
  outcome.textContent = state.lastOutcome ?? "";
  signalLost.hidden = !state.signalLost;
  staleBadge.hidden = !state.stale;
  if (state.stale && state.staleAgeMs !== null) {
    staleBadge.textContent = `stale: last sample ${(state.staleAgeMs / 1000).toFixed(1)} s ago`;
  }

  for (const [command, button] of buttons) {
    button.disabled = !connected || !state.enabled.has(command);
  }
  const flyButton = buttons.get("fly");
  if (flyButton) flyButton.textContent = state.flyCaption;

  stateLabel.textContent = state.flightState ?? "—";
  const sample = state.telemetry;
  if (sample) {
    clockLabel.textContent = sample.clock.toFixed(2);
    altitudeLabel.textContent = `${sample.z.toFixed(2)} m / ${CEILING_M} m`;
    // the gauge never renders above the ceiling mark
    altitudeFill.style.height = `${Math.min(1, sample.z / CEILING_M) * 100}%`;
    headingLabel.textContent = `${sample.heading.toFixed(0)}°`;
    distanceLabel.textContent = `${sample.distance_to_station.toFixed(2)} m`;
    linkPill.textContent = sample.link.replace(/_/g, " ");
    linkPill.dataset.quality = sample.link;
  }

  logBody.replaceChildren(
    ...state.logTail
      .slice()
      .reverse()
      .map((entry) => {
        const row = document.createElement("tr");
        const status = entry.pipeline_result.status;
        const detail =
          status === "rejected"
            ? entry.pipeline_result.reason
            : status === "decode_error"
              ? entry.pipeline_result.kind
              : "";
        row.innerHTML = `
          <td>${entry.sequence}</td>
          <td>${entry.command}${entry.injected ? " ⚠ auto" : ""}</td>
          <td class="status-${status}">${status}</td>
          <td>${detail}</td>`;
        return row;
      }),
  );
}

connectBtn.addEventListener("click", () => {
  void controller.connect(stationInput.value.trim() || "alpha");
});
disconnectBtn.addEventListener("click", () => void controller.disconnect());

for (const [command, button] of buttons) {
  button.addEventListener("click", () => controller.press(command));
}

// keyboard sugar over press(): arrows steer, space stops
document.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement) return;
  if (event.key === "ArrowLeft") controller.press("left");
  else if (event.key === "ArrowRight") controller.press("right");
  else if (event.key === " ") {
    event.preventDefault();
    controller.press("stop");
  }
});

setInterval(() => controller.tick(), 250);
setInterval(() => void controller.refreshLog(), 2000);

render(controller.getState());
