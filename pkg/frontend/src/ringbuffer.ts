/** Fixed-window time series for the strip charts: bounded, oldest-first. */

export interface Sample {
  t: number;
  v: number;
}

export class SeriesBuffer {
  private samples: Sample[] = [];

  constructor(
    readonly windowSec: number,
    readonly capacity: number,
  ) {
    if (windowSec <= 0 || capacity < 1) {
      throw new Error("SeriesBuffer needs windowSec > 0 and capacity >= 1");
    }
  }

  /** Append one sample and drop everything outside the window or capacity. */
  push(t: number, v: number): void {
    this.samples.push({ t, v });
    const cutoff = t - this.windowSec;
    let drop = 0;
    while (drop < this.samples.length - 1 && this.samples[drop].t < cutoff) {
      drop += 1;
    }
    const excess = this.samples.length - drop - this.capacity;
    if (excess > 0) {
      drop += excess;
    }
    if (drop > 0) {
      this.samples.splice(0, drop);
    }
  }

  view(): readonly Sample[] {
    return this.samples;
  }

  get length(): number {
    return this.samples.length;
  }

  clear(): void {
    this.samples.length = 0;
  }

  /** Value range over the window; null when empty. */
  extent(): { min: number; max: number } | null {
    if (this.samples.length === 0) {
      return null;
    }
    let min = this.samples[0].v;
    let max = min;
    for (const s of this.samples) {
      if (s.v < min) min = s.v;
      if (s.v > max) max = s.v;
    }
    return { min, max };
  }
}
