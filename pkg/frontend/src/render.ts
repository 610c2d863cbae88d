// Pure HTML renderers. Every figure is passed through verbatim from the
// service payloads; these functions format and arrange, never compute.

import type {
  AssessmentPayload,
  ReportEntry,
  RiskPayload,
  TransitionEventPayload,
} from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function admissibilityClass(admissibility: string): string {
  return `adm-${admissibility}`;
}

export function sparkline(history: { t: number; value: number }[]): string {
  if (history.length < 2) {
    return `<span class="sparkline-empty">–</span>`;
  }
  const ts = history.map((h) => h.t);
  const vs = history.map((h) => h.value);
  const tMin = Math.min(...ts);
  const tMax = Math.max(...ts);
  const vMin = Math.min(...vs);
  const vMax = Math.max(...vs);
  const w = 80;
  const h = 20;
  const points = history
    .map((p) => {
      const x = tMax === tMin ? 0 : ((p.t - tMin) / (tMax - tMin)) * w;
      const y = vMax === vMin ? h / 2 : h - ((p.value - vMin) / (vMax - vMin)) * h;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg class="sparkline" width="${w}" height="${h}" viewBox="0 0 ${w} ${h}">` +
    `<polyline fill="none" stroke="currentColor" points="${points}"/></svg>`
  );
}

function strategyBadge(entry: ReportEntry): string {
  return (
    `<span class="badge badge-${entry.presence}">` +
    `${escapeHtml(entry.origin)} · ${escapeHtml(entry.presence)} · ` +
    `${escapeHtml(entry.dynamics)}</span>`
  );
}

function countdown(entry: ReportEntry): string {
  if (entry.crossings.length === 0) return "";
  const next = entry.crossings[0];
  return (
    `<span class="countdown" title="forecast crossing">` +
    `reaches ${next.threshold} at t=${next.at_t.toFixed(2)}</span>`
  );
}

export function registerTable(
  risks: RiskPayload[],
  report: AssessmentPayload,
): string {
  if (risks.length === 0) {
    return (
      `<div class="empty-state">No risks registered yet.` +
      `<button data-action="add-risk">Add risk</button></div>`
    );
  }
  const entries = new Map(report.entries.map((e) => [e.id, e]));
  const sorted = [...risks].sort((a, b) => {
    // catastrophic risks pin to the top
    const ca = a.status === "catastrophic" ? 0 : 1;
    const cb = b.status === "catastrophic" ? 0 : 1;
    return ca - cb || a.id.localeCompare(b.id);
  });
  const rows = sorted
    .map((risk) => {
      const entry = entries.get(risk.id);
      const adm = entry ? entry.admissibility : "retired";
      const approaching =
        entry && entry.crossings.length > 0 ? " approaching-critical" : "";
      const catastrophic = risk.status === "catastrophic" ? " row-catastrophic" : "";
      const points = risk.history.map((o) => ({ t: o.t, value: o.value }));
      return (
        `<tr class="${admissibilityClass(adm)}${approaching}${catastrophic}" data-risk="${escapeHtml(risk.id)}">` +
        `<td>${escapeHtml(risk.id)}</td>` +
        `<td>${escapeHtml(risk.name)}</td>` +
        `<td>${entry ? strategyBadge(entry) : ""}</td>` +
        `<td class="num">${escapeHtml(risk.score_str)}</td>` +
        `<td>${escapeHtml(risk.band)}</td>` +
        `<td>${escapeHtml(adm)}</td>` +
        `<td>${sparkline(points)}</td>` +
        `<td>${entry ? countdown(entry) : ""}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="register-table"><thead><tr>` +
    `<th>id</th><th>name</th><th>strategy</th><th>x</th><th>band</th>` +
    `<th>admissibility</th><th>trend</th><th>forecast</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function epGauge(
  report: AssessmentPayload,
  alertThreshold: number,
): string {
  const ep = report.e_p;
  const inAlert = ep >= alertThreshold;
  if (report.entries.length === 0) {
    return (
      `<div class="gauge gauge-empty"><span class="gauge-value">0</span>` +
      `<span class="gauge-note">no significant risks</span></div>`
    );
  }
  const fraction = Math.max(0, Math.min(1, ep));
  return (
    `<div class="gauge${inAlert ? " gauge-alert" : ""}">` +
    `<div class="gauge-bar" style="width:${(fraction * 100).toFixed(1)}%"></div>` +
    `<div class="gauge-mark" style="left:${(alertThreshold * 100).toFixed(1)}%"></div>` +
    `<span class="gauge-value">E_p = ${report.formatted.e_p}</span>` +
    `<dl class="decomposition">` +
    `<dt>R_v</dt><dd>${report.formatted.r_v}</dd>` +
    `<dt>R_c</dt><dd>${report.formatted.r_c}</dd>` +
    `<dt>R</dt><dd>${report.formatted.r}</dd>` +
    `</dl></div>`
  );
}

// Priority classes mirror the service ordering; grouping uses the entry's
// own classification fields, no arithmetic happens here.
export const PRIORITY_GROUPS = [
  "existing growing",
  "probable growing (medium/high)",
  "probable growing (low)",
  "existing declining",
  "probable declining",
] as const;

export function priorityGroupOf(entry: ReportEntry): number {
  const growing = entry.dynamics !== "declining";
  if (entry.presence === "existing") return growing ? 0 : 3;
  if (growing) {
    return entry.band === "low" ? 2 : 1;
  }
  return 4;
}

export function priorityBoard(report: AssessmentPayload): string {
  if (report.priorities.length === 0) {
    return `<div class="empty-state">No significant risks to mitigate.</div>`;
  }
  const entries = new Map(report.entries.map((e) => [e.id, e]));
  const review = new Set(report.strategic_review);
  const groups: string[][] = PRIORITY_GROUPS.map(() => []);
  for (const id of report.priorities) {
    const entry = entries.get(id);
    if (!entry) continue;
    const flag = review.has(id)
      ? ` <span class="strategic-flag">revise strategic goals</span>`
      : "";
    groups[priorityGroupOf(entry)].push(
      `<li data-risk="${escapeHtml(id)}">${escapeHtml(id)} — ` +
        `${escapeHtml(entry.name)}${flag}</li>`,
    );
  }
  return groups
    .map((items, i) => {
      if (items.length === 0) return "";
      return (
        `<section class="priority-group priority-${i + 1}">` +
        `<h3>${PRIORITY_GROUPS[i]}</h3><ol>${items.join("")}</ol></section>`
      );
    })
    .join("");
}

export function whatifPanel(
  live: AssessmentPayload,
  hypothetical: AssessmentPayload | null,
): string {
  const hypo = hypothetical ?? live;
  const hypoClass = hypothetical ? "hypothetical" : "hypothetical identical";
  return (
    `<div class="whatif-panel">` +
    `<div class="live"><h3>live</h3><span class="ep">${live.formatted.e_p}</span>` +
    `<ol>${live.priorities.map((p) => `<li>${escapeHtml(p)}</li>`).join("")}</ol></div>` +
    `<div class="${hypoClass}"><h3>what-if</h3>` +
    `<span class="ep">${hypo.formatted.e_p}</span>` +
    `<ol>${hypo.priorities.map((p) => `<li>${escapeHtml(p)}</li>`).join("")}</ol></div>` +
    `<button data-action="reset-whatif">reset</button></div>`
  );
}

export function eventToast(event: TransitionEventPayload): string {
  const prominent =
    event.kind === "probable_to_existing" ||
    event.kind === "existing_to_catastrophic"
      ? " toast-prominent"
      : "";
  return (
    `<div class="toast${prominent}">` +
    `${escapeHtml(event.risk_id)}: ${escapeHtml(event.kind)} at t=${event.t}</div>`
  );
}

export function observeForm(risk: RiskPayload): string {
  const kind = risk.presence === "probable" ? "probability" : "severity";
  const [min, max] = kind === "probability" ? [0.01, 0.99] : [0, 1];
  return (
    `<form class="observe-form" data-risk="${escapeHtml(risk.id)}">` +
    `<input type="hidden" name="kind" value="${kind}"/>` +
    `<label>t <input name="t" type="number" step="any" required/></label>` +
    `<label>${kind} <input name="value" type="number" step="any" ` +
    `min="${min}" max="${max}" required/></label>` +
    `<label>note <input name="note" type="text"/></label>` +
    `<span class="field-error" hidden></span>` +
    `<button type="submit">record</button></form>`
  );
}

export function validateObservationValue(
  kind: "probability" | "severity",
  value: number,
): string | null {
  if (Number.isNaN(value)) return "value must be a number";
  if (kind === "probability" && (value < 0.01 || value > 0.99)) {
    return "probability must lie in [0.01, 0.99]";
  }
  if (kind === "severity" && (value < 0 || value > 1)) {
    return "severity must lie in [0, 1]";
  }
  return null;
}

export function clampDriver(
  kind: "probability" | "severity",
  value: number,
): number {
  const [min, max] = kind === "probability" ? [0.01, 0.99] : [0, 1];
  return Math.min(max, Math.max(min, value));
}
