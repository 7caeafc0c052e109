/** Keyboard-as-joystick: one key event maps to at most one command.
 *
 * Arrow nudges are based on the last server-acknowledged reference, so a
 * nudge past the server's clamp range simply comes back pinned.
 */

import type { Command } from "./protocol.js";
import { pause, reset, resume, setReference } from "./protocol.js";

/** Reference step per arrow press, meters. */
export const NUDGE_STEP = 0.02;

/** Server numbers carry at most 6 decimals; keep nudges on that grid. */
function onGrid(value: number): number {
  return Math.round(value * 1e6) / 1e6;
}

export interface InputContext {
  /** Last server-acknowledged reference, meters. */
  reference: number;
  /** Current pause intent (space toggles it). */
  paused: boolean;
}

/**
 * Map one key press to a command, or null for keys the cockpit ignores.
 * The caller flips its paused flag when it actually sends the command.
 */
export function keyToCommand(key: string, ctx: InputContext): Command | null {
  switch (key) {
    case "ArrowLeft":
      return setReference(onGrid(ctx.reference - NUDGE_STEP));
    case "ArrowRight":
      return setReference(onGrid(ctx.reference + NUDGE_STEP));
    case " ":
      return ctx.paused ? resume() : pause();
    case "r":
    case "R":
      return reset();
    default:
      return null;
  }
}
