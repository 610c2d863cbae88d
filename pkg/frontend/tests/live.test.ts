// Round-trip test against the real HTTP service: the what-if panel must
// show exactly the E_p string the service computed, with no client-side
// arithmetic in between. Skipped automatically if python3 is unavailable.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { whatifPanel } from "../src/render.js";

const PORT = 8765 + (process.pid % 500);
const BASE_URL = `http://127.0.0.1:${PORT}`;

function hasPython(): boolean {
  return spawnSync("python3", ["-c", "import riskwarden"]).status === 0;
}

function cli(registerPath: string, args: string[]): void {
  const result = spawnSync("riskwarden", ["--register", registerPath, ...args]);
  if (result.status !== 0) {
    throw new Error(`riskwarden ${args[0]} failed: ${result.stderr}`);
  }
}

// Probability whose score under the growing mapping is 0.8; together with
// an existing risk at severity 0 (score exactly 0.5) this gives E_p = 0.4.
function probabilityForScore08(): string {
  const result = spawnSync("python3", [
    "-c",
    "from riskwarden import inverse_probable, Dynamics; " +
      "print(repr(inverse_probable(0.8, Dynamics.GROWING)))",
  ]);
  if (result.status !== 0) throw new Error(String(result.stderr));
  return String(result.stdout).trim();
}

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE_URL}/healthz`);
      if (response.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not become healthy");
}

describe.skipIf(!hasPython())("live service round trip", () => {
  let workdir: string;
  let server: ChildProcess;
  const api = new ApiClient(BASE_URL);

  beforeAll(async () => {
    workdir = mkdtempSync(join(tmpdir(), "riskwarden-ui-"));
    const registerPath = join(workdir, "register.json");
    cli(registerPath, [
      "init", "--stage", "planning", "--periods", "6",
      "--taxonomy", "firm,macro",
    ]);
    cli(registerPath, [
      "add", "--id", "A", "--name", "legacy system outage",
      "--sphere", "firm", "--origin", "internal", "--presence", "existing",
      "--driver", "0",
    ]);
    cli(registerPath, [
      "add", "--id", "B", "--name", "supplier insolvency",
      "--sphere", "macro", "--origin", "external", "--presence", "probable",
      "--driver", probabilityForScore08(),
    ]);
    server = spawn(
      "riskwarden",
      ["--register", registerPath, "serve", "--addr", `127.0.0.1:${PORT}`],
      { stdio: "ignore" },
    );
    await waitForService();
  }, 30_000);

  afterAll(() => {
    server?.kill();
    if (workdir) rmSync(workdir, { recursive: true, force: true });
  });

  it("renders the hypothetical E_p exactly as the service computed it", async () => {
    const live = await api.assessment();
    expect(live.formatted.e_p).toBe("0.400000000000");

    const hypothetical = await api.whatIf([{ risk_id: "B", remove: true }]);
    expect(hypothetical.formatted.e_p).toBe("0.500000000000");

    const html = whatifPanel(live, hypothetical);
    const epSpans = [...html.matchAll(/<span class="ep">([^<]+)<\/span>/g)].map(
      (m) => m[1],
    );
    expect(epSpans).toEqual([live.formatted.e_p, hypothetical.formatted.e_p]);
  });

  it("never persists what-if scenarios", async () => {
    await api.whatIf([{ risk_id: "A", remove: true }]);
    const after = await api.assessment();
    expect(after.formatted.e_p).toBe("0.400000000000");
    const risks = await api.listRisks();
    expect(risks.risks.map((r) => r.id).sort()).toEqual(["A", "B"]);
  });

  it("surfaces driver overrides through the service, not local math", async () => {
    // override B's probability to the domain floor; the service decides
    // the resulting score and aggregate
    const live = await api.assessment();
    const lowered = await api.whatIf([{ risk_id: "B", new_driver: 0.01 }]);
    expect(lowered.e_p).toBeLessThan(live.e_p);
    const html = whatifPanel(live, lowered);
    expect(html).toContain(lowered.formatted.e_p);
  });
});
