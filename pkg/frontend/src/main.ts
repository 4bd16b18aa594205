import { ApiClient, CountUnavailable } from "./api.js";
import {
  renderAnalysisPanel,
  renderConflictPanel,
  renderErrorBanner,
  renderModelList,
  renderStatusBar,
  renderTree,
} from "./render.js";
import { SessionController, nextDecision } from "./session.js";
import type { AnalysisReport, ModelTree } from "./types.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8551");

const sidebar = document.getElementById("sidebar")!;
const treeHost = document.getElementById("tree")!;
const panelHost = document.getElementById("panels")!;

let controller: SessionController | null = null;
let tree: ModelTree | null = null;
let analysis: AnalysisReport | null = null;
let countTooLarge = false;
let activeModel: string | undefined;

function redraw(): void {
  if (!controller || !tree) return;
  const view = controller.current;
  treeHost.innerHTML =
    renderStatusBar(view.state) + renderTree(tree, view.state, analysis?.dead ?? []);
  panelHost.innerHTML =
    (view.conflict ? renderConflictPanel(view.conflict, view.offending?.feature) : "") +
    renderAnalysisPanel(analysis, countTooLarge);
}

async function openModel(name: string): Promise<void> {
  activeModel = name;
  try {
    tree = await api.tree(name);
    controller = await SessionController.start(api, name);
    analysis = null;
    countTooLarge = false;
    redraw();
    sidebar.innerHTML = renderModelList(await api.models(), activeModel);
    try {
      analysis = await api.analysis(name, true);
    } catch (error) {
      if (error instanceof CountUnavailable) {
        analysis = await api.analysis(name, false);
        countTooLarge = true;
      } else {
        throw error;
      }
    }
    redraw();
  } catch (error) {
    treeHost.innerHTML = renderErrorBanner(String(error));
  }
}

sidebar.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>("[data-model]");
  if (button?.dataset.model) void openModel(button.dataset.model);
});

treeHost.addEventListener("click", (event) => {
  const el = (event.target as HTMLElement).closest<HTMLElement>("[data-feature]");
  if (!el?.dataset.feature || !controller) return;
  event.preventDefault();
  const id = el.dataset.feature;
  const current = controller.current.state.features[id]?.state ?? "undecided";
  controller
    .decide(id, nextDecision(current))
    .then(redraw)
    .catch((error) => {
      panelHost.innerHTML = renderErrorBanner(String(error)) + panelHost.innerHTML;
    });
});

panelHost.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (button?.dataset.action === "undo-conflict" && controller) {
    void controller.undoConflict().then(redraw);
  }
});

async function boot(): Promise<void> {
  try {
    const models = await api.models();
    sidebar.innerHTML = renderModelList(models);
    const first = models[0];
    if (first) await openModel(first.name);
  } catch (error) {
    sidebar.innerHTML = renderErrorBanner(
      `Cannot reach the fmcheck service: ${String(error)}`);
  }
}

void boot();
