// View models: everything the panels display, computed as plain data.
// The UI performs no physics; every number shown comes from a server payload.

import type { ParamRow, SchedulePayload, StatePayload } from "./api.js";

export interface StateSummary {
  iteration: string;
  time: string;
  control: string;
  thorns: string;
  reductions: string[];
}

export function summarizeState(state: StatePayload): StateSummary {
  const reductions = state.last_reductions
    ? Object.entries(state.last_reductions.values).map(
        ([name, value]) => `${name} = ${formatNumber(value)}`,
      )
    : [];
  return {
    iteration: String(state.iteration),
    time: formatNumber(state.time),
    control: state.control,
    thorns: state.active_thorns.join(" "),
    reductions,
  };
}

export function formatNumber(x: number): string {
  if (x === 0) return "0";
  const magnitude = Math.abs(x);
  if (magnitude >= 1e5 || magnitude < 1e-4) return x.toExponential(6);
  return String(Math.round(x * 1e9) / 1e9);
}

// -- steerable parameter form ------------------------------------------------

export interface FormRow {
  name: string;
  type: ParamRow["type"];
  value: string;
  choices: string[] | null; // keyword parameters render as a select
  rangeText: string;
  description: string;
}

export function steerableRows(params: ParamRow[]): FormRow[] {
  return params
    .filter((p) => p.steerable === "always")
    .map((p) => ({
      name: p.name,
      type: p.type,
      value: String(p.value),
      choices: Array.isArray(p.range) ? p.range : null,
      rangeText: rangeText(p),
      description: p.description,
    }));
}

function rangeText(p: ParamRow): string {
  if (Array.isArray(p.range)) return p.range.join(" | ");
  if (p.range && typeof p.range === "object") {
    const lo = p.range.lo === null ? "*" : String(p.range.lo);
    const hi = p.range.hi === null ? "*" : String(p.range.hi);
    return `${lo}:${hi}`;
  }
  return "";
}

export type Validation =
  | { ok: true; value: number | boolean | string }
  | { ok: false; message: string };

// Client-side typing only; the server still owns the range check.
export function validateInput(row: FormRow, raw: string): Validation {
  const text = raw.trim();
  if (row.type === "real" || row.type === "int") {
    const value = Number(text);
    if (text === "" || !Number.isFinite(value)) {
      return { ok: false, message: `${row.name} needs a number` };
    }
    if (row.type === "int" && !Number.isInteger(value)) {
      return { ok: false, message: `${row.name} needs an integer` };
    }
    return { ok: true, value };
  }
  if (row.type === "boolean") {
    if (text === "true" || text === "false") return { ok: true, value: text === "true" };
    return { ok: false, message: `${row.name} needs true or false` };
  }
  if (row.type === "keyword" && row.choices && !row.choices.includes(text)) {
    return { ok: false, message: `${row.name} must be one of ${row.choices.join(", ")}` };
  }
  return { ok: true, value: text };
}

// -- schedule tree -----------------------------------------------------------

export interface ScheduleLine {
  indent: number;
  text: string;
}

export function scheduleLines(payload: SchedulePayload): ScheduleLine[] {
  const lines: ScheduleLine[] = [];
  const sync = payload.schedule.sync ?? {};
  const describe = (key: string) =>
    key + (sync[key] ? `  [sync: ${sync[key].join(", ")}]` : "");
  for (const [bin, calls] of Object.entries(payload.schedule.bins)) {
    lines.push({ indent: 0, text: `${bin}` });
    for (const key of calls) lines.push({ indent: 1, text: describe(key) });
  }
  for (const [group, calls] of Object.entries(payload.schedule.groups)) {
    lines.push({ indent: 0, text: `group ${group}` });
    for (const key of calls) lines.push({ indent: 1, text: describe(key) });
  }
  return lines;
}

// -- plot statistics ---------------------------------------------------------

export function sliceAmplitude(values: number[]): number {
  return values.reduce((acc, v) => Math.max(acc, Math.abs(v)), 0);
}
