// Typed client for the steering API (/api/v1). The fetch function is
// injectable so tests can stand up a mocked server.

export interface ParamRow {
  name: string;
  type: "real" | "int" | "keyword" | "boolean" | "string";
  value: number | boolean | string;
  steerable: "never" | "always" | "recover";
  range: { lo: number | null; hi: number | null } | string[] | null;
  description: string;
}

export interface VariableRow {
  name: string;
  kind: "GF" | "SCALAR";
  shape: number[];
}

export interface StatePayload {
  iteration: number;
  time: number;
  control: "running" | "paused" | "terminating";
  active_thorns: string[];
  params: ParamRow[];
  variables: VariableRow[];
  last_reductions: {
    iteration: number;
    time: number;
    values: Record<string, number>;
  } | null;
}

export interface SlicePayload {
  name: string;
  coords: number[];
  values: number[];
  iteration: number;
  time: number;
}

export interface SchedulePayload {
  iteration: number;
  schedule: {
    bins: Record<string, string[]>;
    groups: Record<string, string[]>;
    sync: Record<string, string[]>;
  };
}

export interface PatchResult {
  status: string;
  applied_at_iteration?: number;
  error?: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: { error?: string; detail?: string },
  ) {
    super(body.error ?? `HTTP ${status}`);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  getState(): Promise<StatePayload> {
    return this.request<StatePayload>("/state");
  }

  getSchedule(): Promise<SchedulePayload> {
    return this.request<SchedulePayload>("/schedule");
  }

  getParams(): Promise<{ iteration: number; params: ParamRow[] }> {
    return this.request("/params");
  }

  getSlice(name: string, axis = 0, fix?: number[]): Promise<SlicePayload> {
    const fixPart = fix && fix.length ? `&fix=${fix.join(",")}` : "";
    return this.request<SlicePayload>(
      `/vars/${encodeURIComponent(name)}?axis=${axis}${fixPart}`,
    );
  }

  patchParam(name: string, value: number | boolean | string): Promise<PatchResult> {
    return this.request<PatchResult>(`/params/${encodeURIComponent(name)}`, {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ value }),
    });
  }

  control(
    action: "pause" | "resume" | "terminate" | "step",
    n?: number,
  ): Promise<PatchResult> {
    return this.request<PatchResult>("/control", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(n === undefined ? { action } : { action, n }),
    });
  }
}
