// HTML renderers: pure string builders over the view models, so tests can
// assert on output without a browser.

import type { StatePayload, VariableRow } from "./api.js";
import {
  FormRow,
  ScheduleLine,
  StateSummary,
  summarizeState,
} from "./model.js";

export function renderHeader(summary: StateSummary): string {
  return `<div class="status">
  <span class="stat">iteration <b data-field="iteration">${summary.iteration}</b></span>
  <span class="stat">time <b data-field="time">${summary.time}</b></span>
  <span class="stat">state <b data-field="control" class="control-${summary.control}">${summary.control}</b></span>
  <span class="stat thorns">${escapeHtml(summary.thorns)}</span>
</div>`;
}

export function renderReductions(summary: StateSummary): string {
  if (!summary.reductions.length) return "";
  return `<div class="reductions">${summary.reductions
    .map((r) => `<code>${escapeHtml(r)}</code>`)
    .join(" ")}</div>`;
}

export function renderControls(control: string): string {
  const paused = control === "paused";
  return `<div class="controls">
  <button data-action="pause" ${paused ? "disabled" : ""}>pause</button>
  <button data-action="resume" ${paused ? "" : "disabled"}>resume</button>
  <button data-action="step" ${paused ? "" : "disabled"}>step</button>
  <input data-field="step-n" type="number" min="1" value="1" size="4">
  <button data-action="terminate" class="danger">terminate</button>
</div>`;
}

export function renderVariableSelect(variables: VariableRow[], selected: string): string {
  const fields = variables.filter((v) => v.kind === "GF");
  const options = fields
    .map(
      (v) =>
        `<option value="${escapeHtml(v.name)}" ${v.name === selected ? "selected" : ""}>` +
        `${escapeHtml(v.name)} [${v.shape.join("x")}]</option>`,
    )
    .join("");
  return `<select data-field="variable">${options}</select>`;
}

export function renderParamsForm(rows: FormRow[]): string {
  if (!rows.length) return "<p>no steerable parameters</p>";
  const inputs = rows
    .map((row) => {
      const control = row.choices
        ? `<select name="${escapeHtml(row.name)}">` +
          row.choices
            .map(
              (c) =>
                `<option value="${escapeHtml(c)}" ${c === row.value ? "selected" : ""}>${escapeHtml(c)}</option>`,
            )
            .join("") +
          "</select>"
        : `<input name="${escapeHtml(row.name)}" value="${escapeHtml(row.value)}">`;
      return `<tr title="${escapeHtml(row.description)}">
  <td><code>${escapeHtml(row.name)}</code></td>
  <td>${control}</td>
  <td class="range">${escapeHtml(row.rangeText)}</td>
  <td><button data-apply="${escapeHtml(row.name)}">apply</button></td>
  <td class="note" data-note="${escapeHtml(row.name)}"></td>
</tr>`;
    })
    .join("");
  return `<table class="params">${inputs}</table>`;
}

export function renderSchedule(lines: ScheduleLine[]): string {
  return `<pre class="schedule">${lines
    .map((l) => "  ".repeat(l.indent) + escapeHtml(l.text))
    .join("\n")}</pre>`;
}

export function renderBanner(message: string): string {
  return message ? `<div class="banner">${escapeHtml(message)}</div>` : "";
}

export interface DashboardView {
  state: StatePayload;
  scheduleHtml: string;
  plotHtml: string;
  paramsHtml: string;
  banner: string;
  selectedVariable: string;
}

export function renderDashboard(view: DashboardView): string {
  const summary = summarizeState(view.state);
  return `${renderBanner(view.banner)}
${renderHeader(summary)}
${renderControls(summary.control)}
<div class="panel plot-panel">
  <h2>variable ${renderVariableSelect(view.state.variables, view.selectedVariable)}</h2>
  <div data-field="plot">${view.plotHtml}</div>
  ${renderReductions(summary)}
</div>
<div class="panel">
  <h2>steerable parameters</h2>
  ${view.paramsHtml}
</div>
<div class="panel">
  <h2>schedule tree</h2>
  ${view.scheduleHtml}
</div>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
