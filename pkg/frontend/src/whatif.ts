/**
 * What-if allocation panel.
 *
 * Loads a stored scenario, lets the planner nudge tier features and the
 * penalty rate locally, and re-runs the allocation on each edit. Edits
 * touch the stored scenario only through the explicit save button. The
 * result table renders the service's audit intermediates (raw index,
 * penalized index, ratio, tenths) without local arithmetic.
 */

import { ApiClient, RequestSequencer, ServiceError, debounce } from "./api";
import { clearBanner, el, fmtNum, showBanner } from "./dom";
import type {
  AllocateResponse,
  FeatureColumn,
  ScenarioDoc,
  TierFeatures,
  TierLabel,
} from "./types";
import { FEATURE_COLUMNS, TIER_LABELS } from "./types";

export const WHATIF_DEBOUNCE_MS = 300;

export interface WhatIfState {
  doc: ScenarioDoc | null;
  features: Record<TierLabel, TierFeatures>;
  penaltyRate: number;
  lastResult: AllocateResponse | null;
}

export interface WhatIfHandle {
  element: HTMLElement;
  state: WhatIfState;
  loadScenario: (id: string) => Promise<void>;
  save: () => Promise<void>;
  settled: () => Promise<void>;
}

function blankFeatures(): Record<TierLabel, TierFeatures> {
  const out = {} as Record<TierLabel, TierFeatures>;
  for (const t of TIER_LABELS) {
    out[t] = { NoR: 1, TC: 1, NoS: 1, Cost: 1 };
  }
  return out;
}

export function mountWhatIf(
  root: HTMLElement,
  client: ApiClient,
  debounceMs: number = WHATIF_DEBOUNCE_MS,
): WhatIfHandle {
  const state: WhatIfState = {
    doc: null,
    features: blankFeatures(),
    penaltyRate: 0.1,
    lastResult: null,
  };
  const seq = new RequestSequencer();

  const panel = el("section", { class: "panel", id: "whatif-panel" });
  panel.append(el("h2", {}, "What-if allocation"));

  const picker = el("select", { id: "scenario-pick" });
  panel.append(el("label", {}, "scenario ", picker));

  // editable tier features
  const grid = el("table", { class: "tier-features" });
  const head = el("tr", {}, el("th", {}, "tier"));
  for (const c of FEATURE_COLUMNS) head.append(el("th", {}, c));
  grid.append(head);
  const featureInputs = new Map<string, HTMLInputElement>();
  for (const t of TIER_LABELS) {
    const row = el("tr", {}, el("th", {}, t));
    for (const c of FEATURE_COLUMNS) {
      const input = el("input", {
        type: "number",
        step: "any",
        "data-feature": `${t}.${c}`,
        value: "1",
      });
      featureInputs.set(`${t}.${c}`, input);
      row.append(el("td", {}, input));
    }
    grid.append(row);
  }
  panel.append(grid);

  const penaltyInput = el("input", {
    type: "number",
    id: "penalty-rate",
    step: "0.01",
    min: "0",
    value: "0.1",
  });
  panel.append(el("label", {}, "penalty rate ", penaltyInput));

  const saveButton = el("button", { id: "whatif-save" }, "Save scenario");
  panel.append(saveButton);

  const resultWrap = el("div", { id: "whatif-result", hidden: true });
  panel.append(resultWrap);

  const inlineError = el("div", {
    id: "whatif-error",
    class: "inline-error",
    hidden: true,
  });
  panel.append(inlineError);

  const banner = el("div", {
    id: "whatif-banner",
    class: "banner",
    hidden: true,
  });
  panel.append(banner);

  let inFlight: Promise<void> = Promise.resolve();

  function render(res: AllocateResponse): void {
    state.lastResult = res;
    inlineError.hidden = true;

    const table = el("table", { class: "allocation" });
    const head = el(
      "tr",
      {},
      el("th", {}, "tier"),
      el("th", {}, "raw index"),
      el("th", {}, "penalized"),
      el("th", {}, "ratio"),
      el("th", {}, "tenths"),
    );
    table.append(head);
    for (const t of TIER_LABELS) {
      table.append(
        el(
          "tr",
          {},
          el("th", {}, t),
          el(
            "td",
            {},
            el("span", { "data-metric": `raw_index.${t}` }, fmtNum(res.raw_index[t], 6)),
          ),
          el(
            "td",
            {},
            el(
              "span",
              { "data-metric": `penalized_index.${t}` },
              fmtNum(res.penalized_index[t], 6),
            ),
          ),
          el(
            "td",
            {},
            el("span", { "data-metric": `ratio.${t}` }, fmtNum(res.ratio[t], 1)),
          ),
          el(
            "td",
            {},
            el(
              "span",
              { "data-metric": `ratio_tenths.${t}` },
              String(res.ratio_tenths[t]),
            ),
          ),
        ),
      );
    }

    const weightsLine = el("div", { class: "weights-line" }, "weights ");
    res.weights.forEach((w, k) => {
      if (k > 0) weightsLine.append(" : ");
      weightsLine.append(
        el("span", { "data-metric": `weights.${k}` }, fmtNum(w, 4)),
      );
    });

    const meta = el(
      "div",
      { class: "whatif-meta" },
      res.district ?? "(ad hoc)",
      " · penalty rate ",
      el("span", { "data-metric": "penalty_rate" }, fmtNum(res.penalty_rate, 2)),
    );

    resultWrap.replaceChildren(table, weightsLine, meta);
    resultWrap.hidden = false;
  }

  function readFeatures(): void {
    for (const t of TIER_LABELS) {
      for (const c of FEATURE_COLUMNS) {
        const raw = featureInputs.get(`${t}.${c}`)!.value;
        const v = Number(raw);
        if (Number.isFinite(v)) state.features[t][c as FeatureColumn] = v;
      }
    }
    const rate = Number(penaltyInput.value);
    if (Number.isFinite(rate) && rate >= 0) state.penaltyRate = rate;
  }

  async function rerun(): Promise<void> {
    const doc = state.doc;
    if (!doc) return;
    const ticket = seq.issue();
    try {
      const res = await client.allocate({
        scenario: {
          district: doc.district,
          weights: doc.weights,
          tiers: state.features,
          penalty_rate: state.penaltyRate,
          dataset_id: doc.dataset_id ?? null,
        },
      });
      if (!seq.isCurrent(ticket)) return;
      clearBanner(banner);
      render(res);
    } catch (err) {
      if (!seq.isCurrent(ticket)) return;
      if (err instanceof ServiceError) {
        // keep the previous result on degenerate or rejected input
        inlineError.textContent = `${err.code}: ${err.message}`;
        inlineError.hidden = false;
      } else {
        showBanner(banner, "service unreachable; showing last known result");
      }
    }
  }

  const scheduleRerun = debounce(() => {
    readFeatures();
    inFlight = rerun();
  }, debounceMs);

  for (const input of featureInputs.values()) {
    input.addEventListener("input", () => scheduleRerun());
  }
  penaltyInput.addEventListener("input", () => scheduleRerun());

  async function loadScenario(id: string): Promise<void> {
    const ticket = seq.issue();
    try {
      const doc = await client.getScenario(id);
      if (!seq.isCurrent(ticket)) return;
      state.doc = doc;
      state.penaltyRate = doc.penalty_rate ?? 0.1;
      penaltyInput.value = String(state.penaltyRate);
      for (const t of TIER_LABELS) {
        for (const c of FEATURE_COLUMNS) {
          const v = doc.tiers[t][c as FeatureColumn];
          state.features[t][c as FeatureColumn] = v;
          featureInputs.get(`${t}.${c}`)!.value = String(v);
        }
      }
      clearBanner(banner);
    } catch (err) {
      if (err instanceof ServiceError) {
        inlineError.textContent = `${err.code}: ${err.message}`;
        inlineError.hidden = false;
        return;
      }
      showBanner(banner, "service unreachable");
      return;
    }
    // show the stored scenario's allocation before any local edits
    const res = await client.allocate({ scenario_id: id });
    if (seq.isCurrent(ticket)) render(res);
  }

  async function save(): Promise<void> {
    const doc = state.doc;
    if (!doc) return;
    readFeatures();
    try {
      const updated = await client.replaceScenario(doc.id, {
        ...doc,
        tiers: state.features,
        penalty_rate: state.penaltyRate,
      });
      state.doc = updated;
      clearBanner(banner);
      showBanner(banner, `saved scenario '${updated.id}'`);
    } catch (err) {
      if (err instanceof ServiceError) {
        inlineError.textContent = `${err.code}: ${err.message}`;
        inlineError.hidden = false;
      } else {
        showBanner(banner, "service unreachable; scenario not saved");
      }
    }
  }

  saveButton.addEventListener("click", () => {
    inFlight = save();
  });

  picker.addEventListener("change", () => {
    inFlight = loadScenario(picker.value);
  });

  root.append(panel);

  inFlight = (async () => {
    try {
      const { scenarios } = await client.listScenarios();
      picker.replaceChildren(
        ...scenarios.map((s) =>
          el("option", { value: s.id }, `${s.id} (${s.district})`),
        ),
      );
      if (scenarios.length > 0) {
        picker.value = scenarios[0].id;
        await loadScenario(scenarios[0].id);
      }
    } catch {
      showBanner(banner, "service unreachable; no scenarios loaded");
    }
  })();

  return {
    element: panel,
    state,
    loadScenario,
    save,
    settled: async () => {
      await inFlight;
    },
  };
}
