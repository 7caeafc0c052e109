/** Wire schema shared with the telemetry server: the compatibility contract.
 *
 * Inbound (to the browser): state frames and error messages. Outbound:
 * set_reference, set_gains, pause, resume, reset. Everything is one JSON
 * text per WebSocket message.
 */

export interface StateFrame {
  type: "state";
  t: number;
  p: number;
  theta: number;
  p_dot: number;
  theta_dot: number;
  x_est: number;
  v_est: number;
  d: number;
  d_prime: number;
  u: number;
  reference: number;
}

export interface ErrorMessage {
  type: "error";
  msg: string;
}

export type ServerMessage = StateFrame | ErrorMessage;

export interface GainSet {
  k_err: number;
  k_d: number;
  k_dd: number;
  k_v: number;
}

export type Command =
  | { type: "set_reference"; value: number }
  | { type: "set_gains"; gains: GainSet }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" };

const STATE_FIELDS = [
  "t", "p", "theta", "p_dot", "theta_dot",
  "x_est", "v_est", "d", "d_prime", "u", "reference",
] as const;

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/** Parse one server message; null for anything that is not schema-valid. */
export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) {
    return null;
  }
  const obj = raw as Record<string, unknown>;
  if (obj.type === "error") {
    return typeof obj.msg === "string" ? { type: "error", msg: obj.msg } : null;
  }
  if (obj.type !== "state") {
    return null;
  }
  const frame: Record<string, number> = {};
  for (const field of STATE_FIELDS) {
    const v = obj[field];
    if (!isFiniteNumber(v)) {
      return null;
    }
    frame[field] = v;
  }
  return { type: "state", ...frame } as StateFrame;
}

export function setReference(value: number): Command {
  return { type: "set_reference", value };
}

export function setGains(gains: GainSet): Command {
  return { type: "set_gains", gains: { ...gains } };
}

export function pause(): Command {
  return { type: "pause" };
}

export function resume(): Command {
  return { type: "resume" };
}

export function reset(): Command {
  return { type: "reset" };
}

/** Serialize a command, refusing to emit anything schema-invalid. */
export function encodeCommand(command: Command): string {
  if (command.type === "set_reference") {
    if (!isFiniteNumber(command.value)) {
      throw new Error("set_reference value must be a finite number");
    }
    return JSON.stringify({ type: "set_reference", value: command.value });
  }
  if (command.type === "set_gains") {
    const g = command.gains;
    for (const key of ["k_err", "k_d", "k_dd", "k_v"] as const) {
      if (!isFiniteNumber(g[key])) {
        throw new Error(`set_gains ${key} must be a finite number`);
      }
    }
    return JSON.stringify({
      type: "set_gains",
      gains: { k_err: g.k_err, k_d: g.k_d, k_dd: g.k_dd, k_v: g.k_v },
    });
  }
  return JSON.stringify({ type: command.type });
}
