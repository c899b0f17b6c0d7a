// Browser controller: polls the API, re-renders, and forwards form/control
// events. One in-flight poll per panel; when the simulation is paused the
// plot stops updating (the readout stays live so the freeze is visible).

import { ApiClient, ApiError, SlicePayload, StatePayload } from "./api.js";
import { scheduleLines, steerableRows, validateInput } from "./model.js";
import { renderDashboard, renderParamsForm, renderSchedule } from "./render.js";
import { renderPlotSvg } from "./plot.js";

export interface DashboardOptions {
  pollMs: number;
  maxBackoffMs: number;
}

export class Dashboard {
  private state: StatePayload | null = null;
  private slice: SlicePayload | null = null;
  private scheduleHtml = "";
  private banner = "";
  private selectedVariable = "";
  private failures = 0;
  private stopped = false;
  private polling = false;
  private yHint = 0;
  private notes = new Map<string, string>();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private options: DashboardOptions = { pollMs: 500, maxBackoffMs: 5000 },
  ) {}

  start(): void {
    void this.loadSchedule();
    const tick = async () => {
      if (this.stopped) return;
      await this.poll();
      const backoff = Math.min(
        this.options.pollMs * 2 ** this.failures,
        this.options.maxBackoffMs,
      );
      setTimeout(tick, this.failures ? backoff : this.options.pollMs);
    };
    void tick();
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.root.addEventListener("change", (event) => this.onChange(event));
  }

  stop(): void {
    this.stopped = true;
  }

  private async loadSchedule(): Promise<void> {
    try {
      const payload = await this.api.getSchedule();
      this.scheduleHtml = renderSchedule(scheduleLines(payload));
    } catch {
      this.scheduleHtml = "<p>schedule unavailable</p>";
    }
  }

  private async poll(): Promise<void> {
    if (this.polling) return;
    this.polling = true;
    try {
      const state = await this.api.getState();
      const wasPaused = this.state?.control === "paused";
      this.state = state;
      if (!this.selectedVariable && state.variables.length) {
        this.selectedVariable =
          state.variables.find((v) => v.kind === "GF")?.name ?? "";
      }
      // paused simulation: keep the last plot; the readout shows the freeze
      if (this.selectedVariable && !(wasPaused && state.control === "paused")) {
        this.slice = await this.api.getSlice(this.selectedVariable);
        this.yHint = Math.max(
          this.yHint,
          ...this.slice.values.map((v) => Math.abs(v)),
        );
      }
      this.failures = 0;
      this.banner = "";
    } catch {
      this.failures += 1;
      this.banner = `connection lost, retrying (attempt ${this.failures})`;
    } finally {
      this.polling = false;
      this.render();
    }
  }

  private render(): void {
    if (!this.state) {
      this.root.innerHTML = this.banner
        ? `<div class="banner">${this.banner}</div>`
        : "<p>connecting…</p>";
      return;
    }
    const focused = document.activeElement as HTMLInputElement | null;
    const focusName = focused?.name;
    const focusValue = focused?.value;
    this.root.innerHTML = renderDashboard({
      state: this.state,
      scheduleHtml: this.scheduleHtml,
      plotHtml: this.slice ? renderPlotSvg(this.slice, undefined, this.yHint) : "",
      paramsHtml: renderParamsForm(steerableRows(this.state.params)),
      banner: this.banner,
      selectedVariable: this.selectedVariable,
    });
    for (const [name, note] of this.notes) {
      const cell = this.root.querySelector(`[data-note="${name}"]`);
      if (cell) cell.textContent = note;
    }
    if (focusName) {
      const again = this.root.querySelector<HTMLInputElement>(`[name="${focusName}"]`);
      if (again) {
        again.value = focusValue ?? again.value;
        again.focus();
      }
    }
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    const action = target.getAttribute("data-action");
    if (action === "pause" || action === "resume" || action === "terminate") {
      void this.api.control(action).then(() => this.poll());
      return;
    }
    if (action === "step") {
      const n = Number(
        this.root.querySelector<HTMLInputElement>('[data-field="step-n"]')?.value ?? "1",
      );
      void this.api.control("step", Number.isInteger(n) && n > 0 ? n : 1)
        .then(() => this.poll());
      return;
    }
    const applyName = target.getAttribute("data-apply");
    if (applyName) void this.applyParam(applyName);
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLSelectElement;
    if (target.getAttribute("data-field") === "variable") {
      this.selectedVariable = target.value;
      this.yHint = 0;
      void this.poll();
    }
  }

  private async applyParam(name: string): Promise<void> {
    const field = this.root.querySelector<HTMLInputElement>(`[name="${name}"]`);
    if (!field || !this.state) return;
    const rows = steerableRows(this.state.params);
    const row = rows.find((r) => r.name === name);
    if (!row) return;
    const checked = validateInput(row, field.value);
    if (!checked.ok) {
      this.notes.set(name, checked.message);
      this.render();
      return;
    }
    try {
      const result = await this.api.patchParam(name, checked.value);
      this.notes.set(name, `applied at iteration ${result.applied_at_iteration}`);
    } catch (error) {
      // show the server's error verbatim and fall back to server truth
      this.notes.set(
        name,
        error instanceof ApiError ? (error.body.error ?? "error") : String(error),
      );
    }
    await this.poll();
  }
}
