// Client-side dashboard state. All values derive from server responses;
// the what-if draft is the only client-owned data and is never written
// back to the live register.

import type {
  AssessmentPayload,
  EventLogEntry,
  Intervention,
  RiskPayload,
} from "./api.js";

export interface WhatIfDraft {
  overrides: Map<string, number>; // risk id -> new driver value
  removals: Set<string>;
}

export function emptyDraft(): WhatIfDraft {
  return { overrides: new Map(), removals: new Set() };
}

export function draftInterventions(draft: WhatIfDraft): Intervention[] {
  const interventions: Intervention[] = [];
  for (const [riskId, value] of draft.overrides) {
    interventions.push({ risk_id: riskId, new_driver: value });
  }
  for (const riskId of draft.removals) {
    interventions.push({ risk_id: riskId, remove: true });
  }
  return interventions;
}

export function draftIsEmpty(draft: WhatIfDraft): boolean {
  return draft.overrides.size === 0 && draft.removals.size === 0;
}

export class EventFeed {
  // Cursor-based polling: the service filters on t >= since, so entries at
  // the cursor boundary can reappear. Seen keys guarantee each event
  // renders at most once.
  private seen = new Set<string>();
  cursor: number | null = null;

  absorb(entries: EventLogEntry[]): EventLogEntry[] {
    const fresh: EventLogEntry[] = [];
    for (const entry of entries) {
      const key = `${entry.t}|${entry.wall_time}|${entry.risk_id}|${entry.kind}`;
      if (this.seen.has(key)) continue;
      this.seen.add(key);
      fresh.push(entry);
      if (this.cursor === null || entry.t > this.cursor) {
        this.cursor = entry.t;
      }
    }
    return fresh;
  }
}

export interface DashboardState {
  risks: RiskPayload[];
  report: AssessmentPayload | null;
  hypothetical: AssessmentPayload | null;
  draft: WhatIfDraft;
  feed: EventFeed;
}

export function initialState(): DashboardState {
  return {
    risks: [],
    report: null,
    hypothetical: null,
    draft: emptyDraft(),
    feed: new EventFeed(),
  };
}
