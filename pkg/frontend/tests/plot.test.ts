import { describe, expect, it } from "vitest";

import type { SlicePayload } from "../src/api.js";
import { DEFAULT_BOX, makeScale, polylinePoints, renderPlotSvg } from "../src/plot.js";

function sinePayload(n = 16, amplitude = 1): SlicePayload {
  return {
    name: "wavetoy::phi",
    coords: Array.from({ length: n }, (_, i) => i / n),
    values: Array.from({ length: n }, (_, i) =>
      amplitude * Math.sin((2 * Math.PI * i) / n),
    ),
    iteration: 42,
    time: 0.5,
  };
}

describe("plot geometry", () => {
  it("maps the coordinate range onto the padded box", () => {
    const payload = sinePayload();
    const scale = makeScale(payload, DEFAULT_BOX);
    expect(scale.x(payload.coords[0])).toBe(DEFAULT_BOX.pad);
    expect(scale.x(payload.coords[payload.coords.length - 1])).toBe(
      DEFAULT_BOX.width - DEFAULT_BOX.pad,
    );
  });

  it("keeps the value range symmetric so oscillation is visible", () => {
    const payload = sinePayload(16, 0.5);
    const scale = makeScale(payload, DEFAULT_BOX);
    expect(scale.yMax).toBeCloseTo(0.5, 10);
    expect(scale.yMin).toBeCloseTo(-0.5, 10);
    // zero sits on the midline
    expect(scale.y(0)).toBeCloseTo(DEFAULT_BOX.height / 2, 6);
  });

  it("a known payload produces the expected polyline points", () => {
    const payload: SlicePayload = {
      name: "f",
      coords: [0, 0.5, 1],
      values: [0, 1, 0],
      iteration: 1,
      time: 0,
    };
    const box = { width: 100, height: 100, pad: 10 };
    const points = polylinePoints(payload, makeScale(payload, box));
    // x spans 10..90; y: 0 -> midline 50, peak 1 -> top pad 10
    expect(points).toBe("10,50 50,10 90,50");
  });

  it("renders an svg with the polyline and the iteration stamp", () => {
    const svg = renderPlotSvg(sinePayload(), DEFAULT_BOX);
    expect(svg).toContain("<svg");
    expect(svg).toContain("<polyline");
    expect(svg).toContain("iteration 42");
  });

  it("honours a sticky amplitude hint so frames share a scale", () => {
    const small = sinePayload(16, 0.1);
    const scale = makeScale(small, DEFAULT_BOX, 1.0);
    expect(scale.yMax).toBe(1.0);
  });
});
