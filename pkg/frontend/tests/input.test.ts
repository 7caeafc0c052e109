import { describe, expect, it } from "vitest";
import { keyToCommand, NUDGE_STEP } from "../src/input.js";
import { encodeCommand } from "../src/protocol.js";

const AT_REST = { reference: 0, paused: false };

describe("keyToCommand", () => {
  it("ArrowRight from reference 0 sends exactly set_reference(0.02)", () => {
    const command = keyToCommand("ArrowRight", AT_REST);
    expect(command).toEqual({ type: "set_reference", value: NUDGE_STEP });
    // schema-valid on the wire, byte for byte
    expect(encodeCommand(command!)).toBe(
      '{"type":"set_reference","value":0.02}',
    );
  });

  it("ArrowLeft nudges down from the acknowledged reference", () => {
    expect(keyToCommand("ArrowLeft", { reference: 0.1, paused: false }))
      .toEqual({ type: "set_reference", value: 0.08 });
  });

  it("nudges stay on the wire's 6-decimal grid, no FP crumbs", () => {
    const command = keyToCommand("ArrowRight", { reference: 0.1, paused: false });
    expect(command).toEqual({ type: "set_reference", value: 0.12 });
    expect(encodeCommand(command!)).toBe(
      '{"type":"set_reference","value":0.12}',
    );
  });

  it("nudging past the range still sends; the server clamp echoes back", () => {
    // the cockpit does not know the range, so it asks and displays the echo
    const command = keyToCommand("ArrowRight", { reference: 0.5, paused: false });
    expect(command).toEqual({ type: "set_reference", value: 0.52 });
  });

  it("space toggles between pause and resume by current intent", () => {
    expect(keyToCommand(" ", { reference: 0, paused: false }))
      .toEqual({ type: "pause" });
    expect(keyToCommand(" ", { reference: 0, paused: true }))
      .toEqual({ type: "resume" });
  });

  it("R and r both reset", () => {
    expect(keyToCommand("R", AT_REST)).toEqual({ type: "reset" });
    expect(keyToCommand("r", AT_REST)).toEqual({ type: "reset" });
  });

  it("every other key maps to nothing", () => {
    for (const key of ["ArrowUp", "ArrowDown", "a", "Enter", "Escape", "1"]) {
      expect(keyToCommand(key, AT_REST)).toBeNull();
    }
  });

  it("one key event produces at most one command", () => {
    // the mapping is a pure function returning a single command or null,
    // so a press cannot fan out; pin the contract anyway
    const results = ["ArrowRight", " ", "r", "x"].map((k) =>
      keyToCommand(k, AT_REST),
    );
    expect(results.filter(Boolean)).toHaveLength(3);
  });
});
