import "./style.css";
import { ApiClient } from "./api";
import { mountMatrixEditor } from "./matrixEditor";
import { mountWhatIf } from "./whatif";
import { mountForecastPanel } from "./forecastPanel";
import { FEATURE_COLUMNS } from "./types";

// the only configuration: where the planning service lives
const API_BASE: string =
  import.meta.env.VITE_API_BASE ?? "http://127.0.0.1:8000/api/v1";

function init(): void {
  const app = document.querySelector<HTMLDivElement>("#app");
  if (!app) throw new Error("missing #app mount point");

  const client = new ApiClient(API_BASE);

  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "Allocation planner";
  const sub = document.createElement("p");
  sub.className = "api-base";
  sub.textContent = `service: ${API_BASE}`;
  header.append(title, sub);
  app.append(header);

  mountMatrixEditor(app, client, [...FEATURE_COLUMNS]);
  mountWhatIf(app, client);
  mountForecastPanel(app, client);
}

init();
