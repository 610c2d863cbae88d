// Typed client for the riskwarden HTTP service. The dashboard does no risk
// mathematics of its own: every number it shows comes verbatim from these
// responses.

export interface DriverPayload {
  kind: "probability" | "severity";
  value: number;
}

export interface ObservationPayload {
  t: number;
  kind: "probability" | "severity";
  value: number;
  note?: string | null;
}

export interface RiskPayload {
  id: string;
  name: string;
  sphere: string;
  origin: string;
  presence: "probable" | "existing";
  dynamics: string;
  band: string;
  score: number;
  score_str: string;
  driver: DriverPayload;
  status: "active" | "catastrophic" | "retired";
  dependencies: string[];
  history: ObservationPayload[];
}

export interface CrossingPayload {
  threshold: number;
  label: string;
  at_t: number;
}

export interface ReportEntry {
  id: string;
  name: string;
  sphere: string;
  origin: string;
  presence: string;
  dynamics: string;
  band: string;
  zone: string;
  admissibility: string;
  score: number;
  critical_value: number;
  crossings: CrossingPayload[];
}

export interface AlertPayload {
  risk_id: string | null;
  kind: string;
  message: string;
}

export interface AssessmentPayload {
  r_v: number;
  r_c: number;
  r: number;
  e_p: number;
  formatted: { r_v: string; r_c: string; r: string; e_p: string };
  entries: ReportEntry[];
  priorities: string[];
  alerts: AlertPayload[];
  strategic_review: string[];
}

export interface TransitionEventPayload {
  risk_id: string;
  t: number;
  kind: string;
  before: Record<string, unknown> | null;
  after: Record<string, unknown> | null;
}

export interface EventLogEntry {
  t: number;
  wall_time: string;
  risk_id: string;
  kind: string;
}

export interface Intervention {
  risk_id: string;
  new_driver?: number;
  remove?: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = "error";
    let message = response.statusText;
    try {
      const body = await response.json();
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  listRisks(): Promise<{ risks: RiskPayload[] }> {
    return fetch(`${this.baseUrl}/risks`).then((r) => parse(r));
  }

  assessment(): Promise<AssessmentPayload> {
    return fetch(`${this.baseUrl}/assessment`).then((r) => parse(r));
  }

  whatIf(interventions: Intervention[]): Promise<AssessmentPayload> {
    return fetch(`${this.baseUrl}/whatif`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ interventions }),
    }).then((r) => parse(r));
  }

  observe(
    riskId: string,
    observation: ObservationPayload,
  ): Promise<{ events: TransitionEventPayload[]; risk: RiskPayload }> {
    return fetch(`${this.baseUrl}/risks/${encodeURIComponent(riskId)}/observations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(observation),
    }).then((r) => parse(r));
  }

  eventsSince(cursor: number | null): Promise<{ events: EventLogEntry[] }> {
    const query = cursor === null ? "" : `?since=${cursor}`;
    return fetch(`${this.baseUrl}/events${query}`).then((r) => parse(r));
  }
}
