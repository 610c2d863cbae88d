// Dashboard entry point: polls the event feed, refreshes the assessment
// after any mutation, and debounces what-if recomputation.

import { ApiClient } from "./api.js";
import {
  clampDriver,
  epGauge,
  eventToast,
  observeForm,
  priorityBoard,
  registerTable,
  validateObservationValue,
  whatifPanel,
} from "./render.js";
import {
  draftInterventions,
  draftIsEmpty,
  emptyDraft,
  initialState,
} from "./state.js";

const POLL_INTERVAL_MS = 2000;
const WHATIF_DEBOUNCE_MS = 300;
const EP_ALERT_THRESHOLD = 0.8;

declare global {
  interface Window {
    RISKWARDEN_SERVICE_URL?: string;
  }
}

const serviceUrl =
  window.RISKWARDEN_SERVICE_URL ?? `${location.protocol}//${location.host}`;
const api = new ApiClient(serviceUrl);
const state = initialState();

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing dashboard mount point #${id}`);
  return node;
}

function renderAll(): void {
  if (!state.report) return;
  byId("register").innerHTML = registerTable(state.risks, state.report);
  byId("gauge").innerHTML = epGauge(state.report, EP_ALERT_THRESHOLD);
  byId("priorities").innerHTML = priorityBoard(state.report);
  byId("whatif").innerHTML = whatifPanel(state.report, state.hypothetical);
  const forms = state.risks
    .filter((r) => r.status === "active")
    .map((r) => observeForm(r))
    .join("");
  byId("observe").innerHTML = forms;
}

function toast(html: string): void {
  const container = byId("toasts");
  const node = document.createElement("div");
  node.innerHTML = html;
  container.appendChild(node);
  setTimeout(() => node.remove(), 8000);
}

async function refresh(): Promise<void> {
  const [risks, report] = await Promise.all([api.listRisks(), api.assessment()]);
  state.risks = risks.risks;
  state.report = report;
  renderAll();
}

let whatifTimer: number | undefined;

function scheduleWhatIf(): void {
  if (whatifTimer !== undefined) clearTimeout(whatifTimer);
  whatifTimer = window.setTimeout(async () => {
    if (draftIsEmpty(state.draft)) {
      state.hypothetical = null;
    } else {
      state.hypothetical = await api.whatIf(draftInterventions(state.draft));
    }
    renderAll();
  }, WHATIF_DEBOUNCE_MS);
}

async function poll(): Promise<void> {
  try {
    const response = await api.eventsSince(state.feed.cursor);
    const fresh = state.feed.absorb(response.events);
    if (fresh.length > 0) {
      await refresh();
    }
  } catch (error) {
    console.error("event poll failed", error);
  }
}

async function submitObservation(form: HTMLFormElement): Promise<void> {
  const riskId = form.dataset.risk!;
  const data = new FormData(form);
  const kind = data.get("kind") as "probability" | "severity";
  const value = Number(data.get("value"));
  const errorSpan = form.querySelector(".field-error") as HTMLElement;
  const problem = validateObservationValue(kind, value);
  if (problem) {
    errorSpan.textContent = problem;
    errorSpan.hidden = false;
    return;
  }
  errorSpan.hidden = true;
  const result = await api.observe(riskId, {
    t: Number(data.get("t")),
    kind,
    value,
    note: (data.get("note") as string) || null,
  });
  for (const event of result.events) {
    toast(eventToast(event));
  }
  await refresh();
}

function wireEvents(): void {
  document.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.classList.contains("observe-form")) {
      event.preventDefault();
      void submitObservation(form);
    }
  });

  document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "reset-whatif") {
      state.draft = emptyDraft();
      state.hypothetical = null;
      renderAll();
    }
  });

  document.addEventListener("input", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.dataset.whatifDriver) {
      const riskId = input.dataset.whatifDriver;
      const risk = state.risks.find((r) => r.id === riskId);
      if (!risk) return;
      const kind = risk.driver.kind;
      const clamped = clampDriver(kind, Number(input.value));
      input.value = String(clamped);
      state.draft.overrides.set(riskId, clamped);
      scheduleWhatIf();
    }
    if (input.dataset.whatifRemove) {
      const riskId = input.dataset.whatifRemove;
      if (input.checked) state.draft.removals.add(riskId);
      else state.draft.removals.delete(riskId);
      scheduleWhatIf();
    }
  });
}

async function init(): Promise<void> {
  wireEvents();
  await refresh();
  await poll();
  setInterval(() => void poll(), POLL_INTERVAL_MS);
}

document.addEventListener("DOMContentLoaded", () => void init());
