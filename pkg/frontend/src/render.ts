/** Canvas drawing: side view of the robot plus strip charts.
 *
 * Sign convention: positive tilt leans the chassis away from the front
 * sensor (top toward -x, front side at +x), which is what makes the front
 * beam read longer than the back beam under positive tilt.
 */

import type { ViewState } from "./model.js";
import type { SeriesBuffer } from "./ringbuffer.js";

/** Sensor mounting used for drawing; mirrors the default scenario. */
export interface DisplayGeometry {
  /** Wheel radius, m. */
  r: number;
  /** IR mount drop below the axle, m. */
  q: number;
  /** IR pair half-separation, m. */
  s: number;
}

export const DEFAULT_GEOMETRY: DisplayGeometry = { r: 0.0508, q: 0.02, s: 0.08 };

export interface Point {
  x: number;
  y: number;
}

export interface Beam {
  mount: Point;
  hit: Point;
  length: number;
}

export interface BeamPair {
  front: Beam;
  back: Beam;
}

/**
 * World-space IR beams for base position p and tilt theta.
 * Null when the geometry degenerates (fallen past the sensor domain).
 */
export function beamGeometry(
  geom: DisplayGeometry,
  p: number,
  theta: number,
): BeamPair | null {
  const c = Math.cos(theta);
  const sn = Math.sin(theta);
  if (c <= 0) {
    return null;
  }
  const frontLen = (geom.r - geom.q * c + geom.s * sn) / c;
  const backLen = (geom.r - geom.q * c - geom.s * sn) / c;
  if (frontLen <= 0 || backLen <= 0) {
    return null;
  }
  // axle at (p, r); mounts sit q below it along the body axis, +-s across
  const baseX = p + geom.q * sn;
  const baseY = geom.r - geom.q * c;
  const front: Point = { x: baseX + geom.s * c, y: baseY + geom.s * sn };
  const back: Point = { x: baseX - geom.s * c, y: baseY - geom.s * sn };
  return {
    front: {
      mount: front,
      hit: { x: front.x + frontLen * sn, y: 0 },
      length: frontLen,
    },
    back: {
      mount: back,
      hit: { x: back.x + backLen * sn, y: 0 },
      length: backLen,
    },
  };
}

const WORLD_HALF_SPAN = 1.0; // meters of world shown each side of origin
const CHASSIS_HEIGHT = 0.34;
const CHASSIS_HALF_WIDTH = 0.1;

interface Mapper {
  (pt: Point): [number, number];
}

function makeMapper(width: number, height: number): Mapper {
  const scale = width / (2 * WORLD_HALF_SPAN);
  const groundY = height - 40;
  return (pt) => [width / 2 + pt.x * scale, groundY - pt.y * scale];
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  geom: DisplayGeometry = DEFAULT_GEOMETRY,
): void {
  const { width, height } = ctx.canvas;
  const map = makeMapper(width, height);
  const scale = width / (2 * WORLD_HALF_SPAN);
  ctx.clearRect(0, 0, width, height);

  // ground
  ctx.strokeStyle = "#5a6472";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(...map({ x: -WORLD_HALF_SPAN, y: 0 }));
  ctx.lineTo(...map({ x: WORLD_HALF_SPAN, y: 0 }));
  ctx.stroke();

  // reference marker
  ctx.strokeStyle = "#e0b34c";
  ctx.lineWidth = 2;
  const [rx, ry] = map({ x: view.reference, y: 0 });
  ctx.beginPath();
  ctx.moveTo(rx, ry - 12);
  ctx.lineTo(rx, ry + 12);
  ctx.stroke();

  const frame = view.latest;
  if (!frame) {
    return;
  }
  const { p, theta } = frame;
  const c = Math.cos(theta);
  const sn = Math.sin(theta);

  // IR beams under the chassis
  const beams = beamGeometry(geom, p, theta);
  if (beams) {
    ctx.strokeStyle = "#d4504c";
    ctx.lineWidth = 1.5;
    for (const beam of [beams.front, beams.back]) {
      ctx.beginPath();
      ctx.moveTo(...map(beam.mount));
      ctx.lineTo(...map(beam.hit));
      ctx.stroke();
    }
  }

  // chassis: rectangle standing on the axle, rotated by theta
  const axle: Point = { x: p, y: geom.r };
  const up: Point = { x: -sn, y: c };
  const fwd: Point = { x: c, y: sn };
  const corner = (du: number, df: number): Point => ({
    x: axle.x + du * up.x + df * fwd.x,
    y: axle.y + du * up.y + df * fwd.y,
  });
  ctx.strokeStyle = "#9ecbff";
  ctx.fillStyle = "rgba(110, 160, 220, 0.25)";
  ctx.lineWidth = 2;
  ctx.beginPath();
  const corners = [
    corner(0, -CHASSIS_HALF_WIDTH),
    corner(0, CHASSIS_HALF_WIDTH),
    corner(CHASSIS_HEIGHT, CHASSIS_HALF_WIDTH),
    corner(CHASSIS_HEIGHT, -CHASSIS_HALF_WIDTH),
  ];
  ctx.moveTo(...map(corners[0]));
  for (const pt of corners.slice(1)) {
    ctx.lineTo(...map(pt));
  }
  ctx.closePath();
  ctx.fill();
  ctx.stroke();

  // wheel
  ctx.strokeStyle = "#cfd8e3";
  ctx.fillStyle = "#2d3642";
  ctx.lineWidth = 2;
  const [wx, wy] = map(axle);
  ctx.beginPath();
  ctx.arc(wx, wy, geom.r * scale, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
  // spoke so wheel rotation reads from base travel
  const spin = p / geom.r;
  ctx.beginPath();
  ctx.moveTo(wx, wy);
  ctx.lineTo(
    wx + geom.r * scale * Math.cos(spin),
    wy + geom.r * scale * Math.sin(spin),
  );
  ctx.stroke();
}

export function drawStrip(
  ctx: CanvasRenderingContext2D,
  buf: SeriesBuffer,
  color: string,
  minHalfRange: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#3a4450";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.stroke();

  const samples = buf.view();
  if (samples.length < 2) {
    return;
  }
  const extent = buf.extent();
  const half = Math.max(
    minHalfRange,
    Math.abs(extent!.min),
    Math.abs(extent!.max),
  );
  const tEnd = samples[samples.length - 1].t;
  const tStart = tEnd - buf.windowSec;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let started = false;
  for (const s of samples) {
    const x = ((s.t - tStart) / buf.windowSec) * width;
    const y = height / 2 - (s.v / half) * (height / 2 - 4);
    if (started) {
      ctx.lineTo(x, y);
    } else {
      ctx.moveTo(x, y);
      started = true;
    }
  }
  ctx.stroke();
}
