// Hand-rolled SVG line plot: no chart dependency, fully testable as strings.

import type { SlicePayload } from "./api.js";

export interface PlotBox {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_BOX: PlotBox = { width: 560, height: 240, pad: 34 };

export interface PlotScale {
  x: (coord: number) => number;
  y: (value: number) => number;
  yMin: number;
  yMax: number;
}

// y range is symmetric about zero and covers the data, so a standing wave
// visibly oscillates inside a fixed frame instead of rescaling every poll
export function makeScale(payload: SlicePayload, box: PlotBox, yHint = 0): PlotScale {
  const xMin = payload.coords[0] ?? 0;
  const xMax = payload.coords[payload.coords.length - 1] ?? 1;
  const spanLimit = Math.max(
    yHint,
    ...payload.values.map((v) => Math.abs(v)),
    1e-12,
  );
  const yMin = -spanLimit;
  const yMax = spanLimit;
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  return {
    x: (c) => box.pad + ((c - xMin) / (xMax - xMin || 1)) * innerW,
    y: (v) => box.pad + (1 - (v - yMin) / (yMax - yMin)) * innerH,
    yMin,
    yMax,
  };
}

export function polylinePoints(payload: SlicePayload, scale: PlotScale): string {
  return payload.coords
    .map((c, i) => `${round2(scale.x(c))},${round2(scale.y(payload.values[i]))}`)
    .join(" ");
}

function round2(x: number): number {
  return Math.round(x * 100) / 100;
}

export function renderPlotSvg(
  payload: SlicePayload,
  box: PlotBox = DEFAULT_BOX,
  yHint = 0,
): string {
  const scale = makeScale(payload, box, yHint);
  const zero = scale.y(0);
  return `<svg viewBox="0 0 ${box.width} ${box.height}" class="plot">
  <line x1="${box.pad}" y1="${zero}" x2="${box.width - box.pad}" y2="${zero}" class="axis"/>
  <text x="4" y="${box.pad}" class="tick">${scale.yMax.toPrecision(3)}</text>
  <text x="4" y="${box.height - box.pad}" class="tick">${scale.yMin.toPrecision(3)}</text>
  <polyline points="${polylinePoints(payload, scale)}" fill="none" class="line"/>
  <text x="${box.pad}" y="${box.height - 8}" class="tick">iteration ${payload.iteration}, t = ${payload.time.toPrecision(6)}</text>
</svg>`;
}
