import { describe, expect, it } from "vitest";
import { SeriesBuffer } from "../src/ringbuffer.js";

describe("SeriesBuffer", () => {
  it("keeps samples inside the window in order", () => {
    const buf = new SeriesBuffer(10, 1024);
    for (let i = 0; i <= 50; i++) {
      buf.push(i * 0.5, i);
    }
    const samples = buf.view();
    expect(samples[0].t).toBeGreaterThanOrEqual(25 - 10);
    expect(samples[samples.length - 1].t).toBe(25);
    for (let i = 1; i < samples.length; i++) {
      expect(samples[i].t).toBeGreaterThan(samples[i - 1].t);
    }
  });

  it("drops samples older than the window", () => {
    const buf = new SeriesBuffer(1.0, 1024);
    buf.push(0, 1);
    buf.push(0.5, 2);
    buf.push(2.0, 3); // cutoff 1.0: both earlier samples expire
    expect(buf.view().map((s) => s.v)).toEqual([3]);
  });

  it("never exceeds capacity even inside the window", () => {
    const buf = new SeriesBuffer(1e9, 8);
    for (let i = 0; i < 100; i++) {
      buf.push(i, i);
    }
    expect(buf.length).toBe(8);
    expect(buf.view()[0].v).toBe(92);
  });

  it("reports the value extent of the window", () => {
    const buf = new SeriesBuffer(10, 64);
    expect(buf.extent()).toBeNull();
    buf.push(0, -0.2);
    buf.push(1, 0.7);
    buf.push(2, 0.1);
    expect(buf.extent()).toEqual({ min: -0.2, max: 0.7 });
  });

  it("clear empties the buffer", () => {
    const buf = new SeriesBuffer(10, 64);
    buf.push(0, 1);
    buf.clear();
    expect(buf.length).toBe(0);
    expect(buf.extent()).toBeNull();
  });

  it("rejects nonsense construction", () => {
    expect(() => new SeriesBuffer(0, 10)).toThrow();
    expect(() => new SeriesBuffer(10, 0)).toThrow();
  });
});
