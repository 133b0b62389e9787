/**
 * Forecast panel: runs the service forecaster for a dataset and renders
 * the returned curve plus its training-loss sparkline as inline SVG.
 *
 * Chart geometry is scaled for the viewport, but every number printed
 * next to the chart (seed, anchor value, final point) comes straight
 * from the forecast response.
 */

import { ApiClient, RequestSequencer, ServiceError } from "./api";
import { clearBanner, el, fmtNum, showBanner } from "./dom";
import type { ForecastResponse } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const CHART_W = 560;
const CHART_H = 180;
const SPARK_W = 200;
const SPARK_H = 40;

export interface ForecastHandle {
  element: HTMLElement;
  run: () => Promise<void>;
  lastResponse: () => ForecastResponse | null;
  settled: () => Promise<void>;
}

function polylinePoints(
  values: number[],
  width: number,
  height: number,
  lo: number,
  hi: number,
  x0 = 0,
  xSpanCount?: number,
): string {
  const span = hi - lo || 1;
  const count = xSpanCount ?? values.length;
  const step = count > 1 ? width / (count - 1) : 0;
  return values
    .map((v, k) => {
      const x = x0 + k * step;
      const y = height - ((v - lo) / span) * height;
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

export function mountForecastPanel(
  root: HTMLElement,
  client: ApiClient,
): ForecastHandle {
  const seq = new RequestSequencer();

  const panel = el("section", { class: "panel", id: "forecast-panel" });
  panel.append(el("h2", {}, "Demand forecast"));

  const datasetInput = el("input", {
    id: "dataset-pick",
    value: "synthetic-national",
    list: "dataset-ids",
  });
  const datasetList = el("datalist", { id: "dataset-ids" });
  datasetList.append(el("option", { value: "synthetic-national" }));
  const horizonInput = el("input", {
    id: "horizon",
    type: "number",
    min: "1",
    max: "365",
    value: "90",
  });
  const lookbackInput = el("input", {
    id: "fc-lookback",
    type: "number",
    min: "2",
    max: "365",
    value: "30",
  });
  const hiddenInput = el("input", {
    id: "fc-hidden",
    type: "number",
    min: "1",
    max: "256",
    value: "32",
  });
  const epochsInput = el("input", {
    id: "fc-epochs",
    type: "number",
    min: "1",
    max: "2000",
    value: "200",
  });
  const seedInput = el("input", {
    id: "fc-seed",
    type: "number",
    value: "0",
  });
  const runButton = el("button", { id: "forecast-run" }, "Run forecast");

  panel.append(
    el("div", { class: "forecast-controls" },
      el("label", {}, "dataset ", datasetInput),
      datasetList,
      el("label", {}, "horizon ", horizonInput),
      runButton,
    ),
    el(
      "details",
      { class: "advanced" },
      el("summary", {}, "training settings"),
      el("label", {}, "lookback ", lookbackInput),
      el("label", {}, "hidden size ", hiddenInput),
      el("label", {}, "epochs ", epochsInput),
      el("label", {}, "seed ", seedInput),
    ),
  );

  const meta = el("div", { id: "forecast-meta", hidden: true });
  const chart = document.createElementNS(SVG_NS, "svg");
  chart.setAttribute("id", "forecast-chart");
  chart.setAttribute("viewBox", `0 0 ${CHART_W} ${CHART_H}`);
  chart.setAttribute("width", String(CHART_W));
  chart.setAttribute("height", String(CHART_H));
  const spark = document.createElementNS(SVG_NS, "svg");
  spark.setAttribute("id", "loss-spark");
  spark.setAttribute("viewBox", `0 0 ${SPARK_W} ${SPARK_H}`);
  spark.setAttribute("width", String(SPARK_W));
  spark.setAttribute("height", String(SPARK_H));
  const sparkWrap = el("div", { class: "spark-wrap", hidden: true }, "train loss ");
  sparkWrap.append(spark);

  const inlineError = el("div", {
    id: "forecast-error",
    class: "inline-error",
    hidden: true,
  });
  const banner = el("div", {
    id: "forecast-banner",
    class: "banner",
    hidden: true,
  });
  panel.append(meta, chart, sparkWrap, inlineError, banner);

  let last: ForecastResponse | null = null;
  let inFlight: Promise<void> = Promise.resolve();

  function render(res: ForecastResponse): void {
    last = res;
    inlineError.hidden = true;

    // curve: observed anchor then the forecast points, one x step per day
    const curve = [res.last_observed_value, ...res.values];
    const lo = Math.min(...curve);
    const hi = Math.max(...curve);
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("class", "forecast-line");
    line.setAttribute("fill", "none");
    line.setAttribute("points", polylinePoints(curve, CHART_W, CHART_H, lo, hi));
    const anchor = document.createElementNS(SVG_NS, "circle");
    anchor.setAttribute("class", "anchor");
    anchor.setAttribute("r", "3");
    const first = polylinePoints([curve[0]], CHART_W, CHART_H, lo, hi).split(",");
    anchor.setAttribute("cx", first[0]);
    anchor.setAttribute("cy", first[1]);
    chart.replaceChildren(line, anchor);

    const losses = res.loss_curve;
    if (losses.length > 0) {
      const llo = Math.min(...losses);
      const lhi = Math.max(...losses);
      const sline = document.createElementNS(SVG_NS, "polyline");
      sline.setAttribute("fill", "none");
      sline.setAttribute("class", "loss-line");
      sline.setAttribute(
        "points",
        polylinePoints(losses, SPARK_W, SPARK_H, llo, lhi),
      );
      spark.replaceChildren(sline);
      sparkWrap.hidden = false;
    } else {
      spark.replaceChildren();
      sparkWrap.hidden = true;
    }

    meta.replaceChildren(
      "dataset ",
      el("span", { class: "dataset-id" }, res.dataset_id),
      " · seed ",
      el("span", { "data-metric": "seed" }, String(res.seed)),
      " · last observed ",
      el("span", { class: "date" }, res.last_observed_date),
      " = ",
      el(
        "span",
        { "data-metric": "last_observed_value" },
        fmtNum(res.last_observed_value, 1),
      ),
      " · ",
      el("span", { class: "horizon-echo" }, `${res.dates.length} day forecast`),
      " ending ",
      el("span", { class: "date" }, res.dates[res.dates.length - 1]),
      " at ",
      el(
        "span",
        { "data-metric": `values.${res.values.length - 1}` },
        fmtNum(res.values[res.values.length - 1], 1),
      ),
    );
    meta.hidden = false;
  }

  async function run(): Promise<void> {
    const ticket = seq.issue();
    try {
      const res = await client.forecast({
        dataset_id: datasetInput.value.trim(),
        horizon: Number(horizonInput.value),
        training: {
          lookback: Number(lookbackInput.value),
          hidden_size: Number(hiddenInput.value),
          epochs: Number(epochsInput.value),
          seed: Number(seedInput.value),
        },
      });
      if (!seq.isCurrent(ticket)) return;
      clearBanner(banner);
      render(res);
    } catch (err) {
      if (!seq.isCurrent(ticket)) return;
      if (err instanceof ServiceError) {
        // insufficient data and friends: explain, keep previous chart
        inlineError.textContent = `${err.code}: ${err.message}`;
        inlineError.hidden = false;
      } else {
        showBanner(banner, "service unreachable; showing last forecast");
      }
    }
  }

  runButton.addEventListener("click", () => {
    inFlight = run();
  });

  root.append(panel);

  return {
    element: panel,
    run: () => {
      inFlight = run();
      return inFlight;
    },
    lastResponse: () => last,
    settled: async () => {
      await inFlight;
    },
  };
}
