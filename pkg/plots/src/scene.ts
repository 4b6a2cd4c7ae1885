/**
 * Render-agnostic scene graph shared by the SVG and PNG backends.
 * Coordinates are finished pixel positions; builders do all the scaling.
 */

export type Mark =
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill: string }
  | { kind: "frame"; x: number; y: number; w: number; h: number; stroke: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; stroke: string }
  | { kind: "polyline"; points: [number, number][]; stroke: string }
  | { kind: "square"; x: number; y: number; size: number; fill: string }
  | {
      kind: "text";
      x: number;
      y: number;
      text: string;
      size: number;
      fill: string;
      anchor: "start" | "middle" | "end";
    }
  | { kind: "group"; cls: string; children: Mark[] };

export interface Scene {
  width: number;
  height: number;
  background: string;
  marks: Mark[];
}

/** Fixed-point, trailing-zero-free number format so output is hash-stable. */
export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  const s = r === 0 ? "0" : r.toString();
  return s;
}

export interface LinearScale {
  (v: number): number;
  min: number;
  max: number;
}

export function linearScale(min: number, max: number, outMin: number, outMax: number): LinearScale {
  const span = max - min || 1;
  const f = ((v: number) => outMin + ((v - min) / span) * (outMax - outMin)) as LinearScale;
  f.min = min;
  f.max = max;
  return f;
}
