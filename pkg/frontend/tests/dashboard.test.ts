// Acceptance-level flow against the mocked server: the dashboard view
// renders snapshot fields, plots a slice payload, and a steer form edit
// PATCHes and comes back as server truth.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { scheduleLines, steerableRows, validateInput } from "../src/model.js";
import { renderPlotSvg } from "../src/plot.js";
import { renderDashboard, renderParamsForm, renderSchedule } from "../src/render.js";
import { MockServer } from "./mock_server.js";

async function buildView(server: MockServer) {
  const api = new ApiClient("http://mock/api/v1", server.fetch);
  const state = await api.getState();
  const slice = await api.getSlice("wavetoy::phi");
  const schedule = await api.getSchedule();
  return renderDashboard({
    state,
    scheduleHtml: renderSchedule(scheduleLines(schedule)),
    plotHtml: renderPlotSvg(slice),
    paramsHtml: renderParamsForm(steerableRows(state.params)),
    banner: "",
    selectedVariable: "wavetoy::phi",
  });
}

describe("dashboard view against the mocked server", () => {
  it("renders the snapshot fields", async () => {
    const html = await buildView(new MockServer());
    expect(html).toContain('data-field="iteration">12<');
    expect(html).toContain('data-field="time">0.1875<');
    expect(html).toContain('data-field="control" class="control-running"');
    expect(html).toContain("driver mol wavetoy io_ascii nanchecker");
    expect(html).toContain("wavetoy::phi.norm2");
  });

  it("plots the slice payload and lists the schedule", async () => {
    const html = await buildView(new MockServer());
    expect(html).toContain("<polyline");
    expect(html).toContain("iteration 12");
    expect(html).toContain("mol::MoL_Step");
    expect(html).toContain("group MoL_CalcRHS");
  });

  it("renders inputs only for steerable parameters", async () => {
    const html = await buildView(new MockServer());
    expect(html).toContain('name="io_ascii::out_every"');
    expect(html).not.toContain('name="wavetoy::amplitude"');
  });

  it("steer form round trip: edit, PATCH, re-render shows server truth", async () => {
    const server = new MockServer();
    const api = new ApiClient("http://mock/api/v1", server.fetch);
    let rows = steerableRows((await api.getState()).params);
    const every = rows.find((r) => r.name === "io_ascii::out_every")!;

    const checked = validateInput(every, "9");
    expect(checked.ok).toBe(true);
    if (!checked.ok) return;
    const result = await api.patchParam(every.name, checked.value);
    expect(result.applied_at_iteration).toBe(12);

    rows = steerableRows((await api.getState()).params);
    const after = rows.find((r) => r.name === "io_ascii::out_every")!;
    expect(after.value).toBe("9");
    expect(renderParamsForm(rows)).toContain('value="9"');
  });

  it("server rejections surface verbatim", async () => {
    const server = new MockServer();
    const api = new ApiClient("http://mock/api/v1", server.fetch);
    const failure = await api.patchParam("wavetoy::amplitude", 2).catch((e) => e);
    expect(failure.status).toBe(409);
    expect(failure.body.error).toBe("NotSteerable");
  });

  it("paused control state disables pause and enables step", async () => {
    const server = new MockServer();
    server.state.control = "paused";
    const html = await buildView(server);
    expect(html).toMatch(/data-action="pause" disabled/);
    expect(html).toMatch(/data-action="step" /);
    expect(html).not.toMatch(/data-action="step" disabled/);
  });
});
