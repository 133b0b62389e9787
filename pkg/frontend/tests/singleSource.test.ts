/**
 * Single source of numerical truth: drive all three panels against the
 * live service while recording the traffic, then check that every
 * rendered figure is a number that actually arrived in a response body.
 * No displayed CR, weight, index, ratio, or forecast value may be
 * computed locally.
 */

import { describe, expect, it } from "vitest";
import { mountForecastPanel } from "../src/forecastPanel";
import { mountMatrixEditor } from "../src/matrixEditor";
import { mountWhatIf } from "../src/whatif";
import {
  displayedMatchesTraffic,
  harvestNumbers,
  liveClient,
  mountRoot,
  sleep,
  type RecordedCall,
} from "./helpers";
import type { AllocateResponse, AnalyzeResponse } from "../src/types";

function lastBody<T>(traffic: RecordedCall[], suffix: string): T {
  const hit = traffic.filter((c) => c.url.endsWith(suffix)).at(-1);
  expect(hit, `expected traffic for ${suffix}`).toBeDefined();
  return hit!.responseBody as T;
}

describe("every displayed number comes from a service response", () => {
  it("audits the full console after driving all panels", async () => {
    const root = mountRoot();
    const traffic: RecordedCall[] = [];
    const client = liveClient(traffic);

    // judgment matrix: enter a non-trivial consistent matrix
    const editor = mountMatrixEditor(root, client, ["NoR", "TC", "NoS", "Cost"]);
    await editor.settled();
    for (const [i, j, v] of [
      [0, 1, "2"],
      [0, 2, "4"],
      [0, 3, "8"],
      [1, 2, "2"],
      [1, 3, "4"],
      [2, 3, "2"],
    ] as Array<[number, number, string]>) {
      const cell = root.querySelector<HTMLSelectElement>(
        `select[data-cell="${i},${j}"]`,
      )!;
      cell.value = v;
      cell.dispatchEvent(new Event("change"));
    }
    await sleep(400);
    await editor.settled();

    // what-if: bundled district allocation
    const whatif = mountWhatIf(root, client);
    await whatif.settled();
    await whatif.loadScenario("gongshu");

    // forecast: short run on the bundled synthetic series
    const forecast = mountForecastPanel(root, client);
    const set = (sel: string, v: string) => {
      const input = root.querySelector<HTMLInputElement>(sel)!;
      input.value = v;
      input.dispatchEvent(new Event("input"));
    };
    set("#horizon", "4");
    set("#fc-lookback", "5");
    set("#fc-hidden", "4");
    set("#fc-epochs", "1");
    await forecast.run();

    // harvest every number that came over the wire
    const wired = harvestNumbers(traffic.map((c) => c.responseBody));

    const metrics = [...document.querySelectorAll<HTMLElement>("[data-metric]")];
    expect(metrics.length).toBeGreaterThan(20);
    for (const node of metrics) {
      const text = node.textContent ?? "";
      expect(
        displayedMatchesTraffic(text, wired),
        `displayed "${text}" (${node.dataset.metric}) must match a response number`,
      ).toBe(true);
    }

    // spot-check direct field provenance, not just value coincidence
    const analyzed = lastBody<AnalyzeResponse>(traffic, "/ahp/analyze");
    expect(
      root.querySelector('[data-metric="consistency.cr"]')!.textContent,
    ).toBe(analyzed.consistency.cr.toFixed(4));
    expect(
      root.querySelector('[data-metric="consistency.lambda_max"]')!.textContent,
    ).toBe(analyzed.consistency.lambda_max.toFixed(4));

    const allocated = lastBody<AllocateResponse>(traffic, "/allocate");
    expect(root.querySelector('[data-metric="ratio.CenH"]')!.textContent).toBe(
      allocated.ratio.CenH.toFixed(1),
    );
    expect(
      root.querySelector('[data-metric="raw_index.ComH"]')!.textContent,
    ).toBe(allocated.raw_index.ComH.toFixed(6));

    const forecasted = forecast.lastResponse()!;
    expect(root.querySelector('[data-metric="seed"]')!.textContent).toBe(
      String(forecasted.seed),
    );
    expect(
      root.querySelector('[data-metric="last_observed_value"]')!.textContent,
    ).toBe(forecasted.last_observed_value.toFixed(1));
  });
});
