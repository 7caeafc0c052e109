/** View model: one mutable state the socket writes and the renderer reads.
 *
 * The server is authoritative: the displayed reference is whatever the last
 * state frame echoed, never the locally requested value.
 */

import type { GainSet, ServerMessage, StateFrame } from "./protocol.js";
import { SeriesBuffer } from "./ringbuffer.js";

export type ConnectionStatus = "connecting" | "live" | "stale" | "closed";

/** Frames arrive at 50 Hz; silence beyond this is a stalled stream. */
export const STALE_AFTER_MS = 500;

const CHART_WINDOW_SEC = 10;
const CHART_CAPACITY = 1024;

export interface ViewState {
  latest: StateFrame | null;
  status: ConnectionStatus;
  /** Last server-acknowledged reference position, meters. */
  reference: number;
  /** Client pause intent; suppresses the stale transition while quiet. */
  paused: boolean;
  /** True after a fall error until the next state frame. */
  fallen: boolean;
  banner: string | null;
  gains: GainSet;
  theta: SeriesBuffer;
  pos: SeriesBuffer;
  lastFrameAtMs: number | null;
}

export const DEFAULT_GAINS: GainSet = {
  k_err: -0.05,
  k_d: -11.4101,
  k_dd: -2.0515,
  k_v: 0.1117,
};

export function createViewState(): ViewState {
  return {
    latest: null,
    status: "connecting",
    reference: 0,
    paused: false,
    fallen: false,
    banner: null,
    gains: { ...DEFAULT_GAINS },
    theta: new SeriesBuffer(CHART_WINDOW_SEC, CHART_CAPACITY),
    pos: new SeriesBuffer(CHART_WINDOW_SEC, CHART_CAPACITY),
    lastFrameAtMs: null,
  };
}

/** Fold one server message into the view. */
export function applyServerMessage(
  view: ViewState,
  msg: ServerMessage,
  nowMs: number,
): void {
  if (msg.type === "state") {
    view.latest = msg;
    view.reference = msg.reference;
    view.theta.push(msg.t, msg.theta);
    view.pos.push(msg.t, msg.p);
    view.lastFrameAtMs = nowMs;
    view.status = "live";
    view.fallen = false;
    view.banner = null;
    return;
  }
  view.banner = msg.msg;
  if (msg.msg.includes("fallen")) {
    // the server pauses itself on a fall; resume is refused until reset
    view.fallen = true;
    view.paused = true;
  }
}

export function markConnected(view: ViewState, nowMs: number): void {
  view.status = "live";
  view.lastFrameAtMs = nowMs;
  view.banner = null;
}

export function markDisconnected(view: ViewState): void {
  view.status = "closed";
  view.banner = "disconnected, retrying";
}

/** Flip live -> stale after a quiet spell, unless the quiet is a pause. */
export function checkStale(view: ViewState, nowMs: number): void {
  if (view.status !== "live" || view.paused) {
    return;
  }
  if (view.lastFrameAtMs !== null && nowMs - view.lastFrameAtMs > STALE_AFTER_MS) {
    view.status = "stale";
  }
}
