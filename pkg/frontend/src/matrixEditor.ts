/**
 * Interactive judgment matrix panel.
 *
 * Upper-triangle cells take input from a Saaty picker (or a free-entry
 * number field when toggled); the mirrored lower cell re-renders in the
 * same tick, so the displayed matrix stays reciprocal at every
 * interaction point. Consistency feedback is fetched from the service
 * after a short idle period; the badge, weights, and report values are
 * rendered from the response as-is.
 */

import { ApiClient, RequestSequencer, ServiceError, debounce } from "./api";
import { clearBanner, el, fmtNum, showBanner } from "./dom";
import { MatrixModel, SAATY_CHOICES, saatyLabel } from "./matrix";
import type { AnalyzeResponse } from "./types";

export const CONSISTENCY_DEBOUNCE_MS = 300;

export interface MatrixEditorHandle {
  element: HTMLElement;
  model: MatrixModel;
  /** Resolves after the in-flight consistency call (if any) settles. */
  settled: () => Promise<void>;
}

function recipText(value: number): string {
  const anchor = saatyLabel(value);
  return anchor ?? fmtNum(value, 4);
}

export function mountMatrixEditor(
  root: HTMLElement,
  client: ApiClient,
  criteria: string[],
  debounceMs: number = CONSISTENCY_DEBOUNCE_MS,
): MatrixEditorHandle {
  const model = new MatrixModel(criteria);
  const seq = new RequestSequencer();
  const n = model.n;

  const panel = el("section", { class: "panel", id: "matrix-panel" });
  panel.append(el("h2", {}, "Judgment matrix"));

  const freeToggle = el("input", { type: "checkbox", id: "free-entry" });
  panel.append(
    el(
      "label",
      { class: "free-toggle" },
      freeToggle,
      " free entry (off-scale values allowed)",
    ),
  );

  // matrix grid
  const table = el("table", { class: "matrix" });
  const head = el("tr", {}, el("th", {}));
  for (const c of model.criteria) head.append(el("th", {}, c));
  table.append(head);

  const recipCells = new Map<string, HTMLTableCellElement>();
  const selects = new Map<string, HTMLSelectElement>();
  const frees = new Map<string, HTMLInputElement>();

  for (let i = 0; i < n; i++) {
    const row = el("tr", {}, el("th", {}, model.criteria[i]));
    for (let j = 0; j < n; j++) {
      const key = `${i},${j}`;
      if (i === j) {
        row.append(el("td", { class: "diag" }, "1"));
      } else if (i < j) {
        const select = el("select", {
          class: "judgment",
          "data-cell": key,
        });
        for (const c of SAATY_CHOICES) {
          const opt = el("option", { value: String(c.value) }, c.label);
          if (c.value === 1) opt.selected = true;
          select.append(opt);
        }
        const free = el("input", {
          type: "number",
          step: "any",
          min: "0",
          class: "judgment-free",
          "data-cell": key,
          value: "1",
          hidden: true,
        });
        selects.set(key, select);
        frees.set(key, free);
        row.append(el("td", {}, select, free));
      } else {
        const cell = el("td", { class: "recip", "data-cell": key }, "1");
        recipCells.set(key, cell);
        row.append(cell);
      }
    }
    table.append(row);
  }
  panel.append(table);

  // consistency verdict
  const crValue = el("span", { "data-metric": "consistency.cr" });
  const verdict = el("span", { class: "verdict" });
  const badge = el(
    "span",
    { id: "cr-badge", class: "badge pending" },
    "CR ",
    crValue,
    " ",
    verdict,
  );
  const scaleWarn = el(
    "span",
    { id: "scale-warn", class: "warn", hidden: true, title: "" },
    "⚠",
  );
  panel.append(
    el(
      "div",
      { class: "consistency" },
      badge,
      scaleWarn,
      el("span", { class: "threshold" }, "pass needs CR < 0.10"),
    ),
  );

  // report details
  const lambdaOut = el("span", { "data-metric": "consistency.lambda_max" });
  const ciOut = el("span", { "data-metric": "consistency.ci" });
  const riOut = el("span", { "data-metric": "consistency.ri" });
  const weightsOut = el("span", { id: "weights-out" });
  const report = el(
    "dl",
    { class: "report", hidden: true },
    el("dt", {}, "lambda_max"),
    el("dd", {}, lambdaOut),
    el("dt", {}, "CI"),
    el("dd", {}, ciOut),
    el("dt", {}, "RI"),
    el("dd", {}, riOut),
    el("dt", {}, "weights"),
    el("dd", {}, weightsOut),
  );
  panel.append(report);

  const warningsList = el("ul", { id: "matrix-warnings" });
  panel.append(warningsList);

  const banner = el("div", {
    id: "matrix-banner",
    class: "banner",
    hidden: true,
  });
  panel.append(banner);

  let inFlight: Promise<void> = Promise.resolve();

  function render(res: AnalyzeResponse): void {
    model.acceptReport(res);
    crValue.textContent = fmtNum(res.consistency.cr, 4);
    verdict.textContent = res.consistency.passes ? "pass" : "fail";
    badge.className = `badge ${res.consistency.passes ? "pass" : "fail"}`;
    lambdaOut.textContent = fmtNum(res.consistency.lambda_max, 4);
    ciOut.textContent = fmtNum(res.consistency.ci, 4);
    riOut.textContent = fmtNum(res.consistency.ri, 2);
    weightsOut.replaceChildren();
    res.weights.forEach((w, k) => {
      if (k > 0) weightsOut.append(" : ");
      weightsOut.append(
        el("span", { "data-metric": `weights.${k}` }, fmtNum(w, 4)),
      );
    });
    report.hidden = false;
    warningsList.replaceChildren(
      ...res.warnings.map((w) => el("li", { class: "warning" }, w)),
    );
    scaleWarn.hidden = res.warnings.length === 0;
    scaleWarn.title = res.warnings.join("\n");
  }

  function renderRejected(err: ServiceError): void {
    badge.className = "badge fail";
    verdict.textContent = "invalid";
    warningsList.replaceChildren(el("li", { class: "warning" }, err.message));
  }

  async function refresh(): Promise<void> {
    const ticket = seq.issue();
    try {
      const res = await client.analyze({
        criteria: model.criteria,
        entries: model.entries(),
      });
      if (!seq.isCurrent(ticket)) return;
      clearBanner(banner);
      render(res);
    } catch (err) {
      if (!seq.isCurrent(ticket)) return;
      if (err instanceof ServiceError) {
        clearBanner(banner);
        renderRejected(err);
      } else {
        showBanner(banner, "service unreachable; showing last known verdict");
      }
    }
  }

  const scheduleRefresh = debounce(() => {
    inFlight = refresh();
  }, debounceMs);

  function onEdit(i: number, j: number, raw: string): void {
    const v = Number(raw);
    if (!Number.isFinite(v) || v <= 0) return;
    model.set(i, j, v);
    // mirror cell updates in the same tick as the edit
    const mirror = recipCells.get(`${j},${i}`);
    if (mirror) mirror.textContent = recipText(model.at(j, i));
    badge.className = "badge pending";
    verdict.textContent = "checking";
    scheduleRefresh();
  }

  for (const [key, select] of selects) {
    const [i, j] = key.split(",").map(Number);
    select.addEventListener("change", () => {
      frees.get(key)!.value = select.value;
      onEdit(i, j, select.value);
    });
  }
  for (const [key, free] of frees) {
    const [i, j] = key.split(",").map(Number);
    free.addEventListener("input", () => onEdit(i, j, free.value));
  }

  freeToggle.addEventListener("change", () => {
    const freeMode = freeToggle.checked;
    for (const [key, select] of selects) {
      select.hidden = freeMode;
      frees.get(key)!.hidden = !freeMode;
    }
  });

  root.append(panel);
  // initial verdict for the all-ones matrix
  inFlight = refresh();

  return {
    element: panel,
    model,
    settled: async () => {
      await inFlight;
    },
  };
}
