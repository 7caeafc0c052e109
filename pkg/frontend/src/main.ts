/** Cockpit wiring: socket lifecycle, keyboard, sliders, render loop. */

import { keyToCommand } from "./input.js";
import {
  applyServerMessage,
  checkStale,
  createViewState,
  markConnected,
  markDisconnected,
} from "./model.js";
import { encodeCommand, parseServerMessage, setGains } from "./protocol.js";
import type { Command } from "./protocol.js";
import { DEFAULT_GEOMETRY, drawScene, drawStrip } from "./render.js";

const view = createViewState();

function socketUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("ws");
  if (fromQuery) {
    return fromQuery;
  }
  const host = window.location.hostname || "localhost";
  return `ws://${host}:8765`;
}

let socket: WebSocket | null = null;
let retryMs = 250;

function connect(): void {
  view.status = "connecting";
  const ws = new WebSocket(socketUrl());
  socket = ws;
  ws.onopen = () => {
    retryMs = 250;
    markConnected(view, performance.now());
  };
  ws.onmessage = (event) => {
    const msg = parseServerMessage(String(event.data));
    if (msg) {
      applyServerMessage(view, msg, performance.now());
    }
  };
  ws.onclose = () => {
    if (socket === ws) {
      socket = null;
      markDisconnected(view);
      setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 2, 4000);
    }
  };
  ws.onerror = () => {
    ws.close();
  };
}

function send(command: Command): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(encodeCommand(command));
  }
}

// -- DOM ----------------------------------------------------------------

const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
const thetaCanvas = document.getElementById("theta-strip") as HTMLCanvasElement;
const posCanvas = document.getElementById("pos-strip") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const statusLine = document.getElementById("status") as HTMLSpanElement;
const readouts = {
  t: document.getElementById("ro-t")!,
  theta: document.getElementById("ro-theta")!,
  p: document.getElementById("ro-p")!,
  u: document.getElementById("ro-u")!,
  reference: document.getElementById("ro-ref")!,
};

window.addEventListener("keydown", (event) => {
  if (event.repeat && event.key === " ") {
    return; // a held space must not machine-gun pause/resume
  }
  const command = keyToCommand(event.key, {
    reference: view.reference,
    paused: view.paused,
  });
  if (!command) {
    return;
  }
  event.preventDefault();
  if (command.type === "pause") {
    view.paused = true;
  } else if (command.type === "resume") {
    if (view.fallen) {
      return; // the server refuses resume after a fall; reset instead
    }
    view.paused = false;
  } else if (command.type === "reset") {
    view.paused = false;
  }
  send(command);
});

for (const key of ["k_err", "k_d", "k_dd", "k_v"] as const) {
  const slider = document.getElementById(`gain-${key}`) as HTMLInputElement;
  const label = document.getElementById(`gain-${key}-value`)!;
  slider.value = String(view.gains[key]);
  label.textContent = slider.value;
  slider.addEventListener("input", () => {
    label.textContent = slider.value;
  });
  // one set_gains per released slider, not one per wiggle
  slider.addEventListener("change", () => {
    view.gains[key] = Number(slider.value);
    send(setGains(view.gains));
  });
}

// -- render loop ----------------------------------------------------------

const sceneCtx = sceneCanvas.getContext("2d")!;
const thetaCtx = thetaCanvas.getContext("2d")!;
const posCtx = posCanvas.getContext("2d")!;

function statusText(): string {
  if (view.paused && view.status === "live") {
    return view.fallen ? "fallen (press R to reset)" : "paused";
  }
  return view.status;
}

function frame(): void {
  checkStale(view, performance.now());

  drawScene(sceneCtx, view, DEFAULT_GEOMETRY);
  drawStrip(thetaCtx, view.theta, "#d4504c", 0.05);
  drawStrip(posCtx, view.pos, "#6ea0dc", 0.1);

  const dimmed = view.status === "stale" || view.status === "closed";
  document.body.classList.toggle("dimmed", dimmed);
  banner.textContent = view.banner ?? "";
  banner.style.display = view.banner ? "block" : "none";
  statusLine.textContent = statusText();

  if (view.latest) {
    readouts.t.textContent = view.latest.t.toFixed(2);
    readouts.theta.textContent = view.latest.theta.toFixed(4);
    readouts.p.textContent = view.latest.p.toFixed(4);
    readouts.u.textContent = view.latest.u.toFixed(3);
  }
  readouts.reference.textContent = view.reference.toFixed(3);

  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
