/** Contract tests against recorded API fixtures.
 *
 * The fixtures under tests/fixtures/ are verbatim {status, body} snapshots
 * of the live service driven through the scripted scenario (see
 * scripts/record_ui_fixtures.py in the repository root). A stubbed fetch
 * replays them here, so these tests need no network and no server — yet
 * every string the UI renders is traceable to a recorded response field.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ApiClient, CountUnavailable } from "../src/api.js";
import {
  escapeHtml,
  renderAnalysisPanel,
  renderConflictPanel,
  renderModelList,
  renderStatusBar,
  renderTree,
} from "../src/render.js";
import { SessionController, nextDecision } from "../src/session.js";
import type { AnalysisReport, ModelSummary, ModelTree, SessionState } from "../src/types.js";

interface Recorded {
  status: number;
  body: unknown;
}

function fixture(name: string): Recorded {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as Recorded;
}

const MODELS = fixture("models");
const TREE = fixture("tree_cad_partial");
const SESSION_CREATED = fixture("session_created");
const SELECT_V231 = fixture("decide_select_v2.3.1");
const CONFLICT_V12 = fixture("decide_select_v1.2_conflict");
const ANALYSIS_CAD = fixture("analysis_cad_partial");
const ANALYSIS_DEAD = fixture("analysis_dead_feature");
const ANALYSIS_VOID = fixture("analysis_void");
const ANALYSIS_WIDE = fixture("analysis_wide_count");

function respond(recorded: Recorded): Response {
  return new Response(JSON.stringify(recorded.body), {
    status: recorded.status,
    headers: { "content-type": "application/json" },
  });
}

/** Routes requests to recorded responses; decide calls shift from a queue. */
function fakeFetch(decideQueue: Recorded[]): (url: string, init?: RequestInit) => Promise<Response> {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (method === "POST" && path === "/api/sessions") return respond(SESSION_CREATED);
    if (method === "POST" && /^\/api\/sessions\/[^/]+\/decide$/.test(path)) {
      const next = decideQueue.shift();
      if (!next) throw new Error("unexpected decide call");
      return respond(next);
    }
    if (path === "/api/models") return respond(MODELS);
    if (path === "/api/models/CADPartial/tree") return respond(TREE);
    if (path === "/api/models/CADPartial/analysis?count=true") return respond(ANALYSIS_CAD);
    if (path === "/api/models/Wide/analysis?count=true") return respond(ANALYSIS_WIDE);
    throw new Error(`no fixture for ${method} ${path}`);
  };
}

function client(decideQueue: Recorded[] = []): ApiClient {
  return new ApiClient("http://service", fakeFetch(decideQueue));
}

const tree = TREE.body as ModelTree;

describe("fresh session", () => {
  it("renders all 14 features with the mandatory chain forced in", async () => {
    const controller = await SessionController.start(client(), "CADPartial");
    const html = renderTree(tree, controller.current.state);
    expect(html.match(/data-feature=/g)).toHaveLength(14);
    for (const fid of ["CAD", "v1", "v2", "v3"]) {
      expect(html).toContain(`data-feature="${fid}"`);
    }
    const state = controller.current.state;
    expect(state.features["CAD"]?.state).toBe("forced-selected");
    expect(html).toContain("state-forced-selected");
    expect(html).toContain("state-undecided");
  });

  it("lists the cross-tree dependencies with jump links", () => {
    const html = renderTree(tree, (SESSION_CREATED.body as { state: SessionState }).state);
    expect(html).toContain(">v2.3.1</a> requires <a");
    expect(html).toContain(`href="#feature-v1_1"`);
  });
});

describe("decision propagation display", () => {
  it("shows v1.1 forced-selected with its requires reason after selecting v2.3.1", async () => {
    const controller = await SessionController.start(client([SELECT_V231]), "CADPartial");
    const view = await controller.decide("v2.3.1", "select");
    const v11 = view.state.features["v1.1"];
    expect(v11?.state).toBe("forced-selected");
    const html = renderTree(tree, view.state);
    // The reason string is rendered exactly as the service sent it.
    expect(v11?.reason).toBeTruthy();
    expect(v11?.reason).toContain("requires");
    expect(html).toContain(`title="${escapeHtml(v11?.reason ?? "")}"`);
    const v11Node = html.slice(html.indexOf("feature-v1_1"));
    expect(v11Node).toContain("state-forced-selected");
  });

  it("keeps the status bar on the recorded extensible flag", async () => {
    const controller = await SessionController.start(client([SELECT_V231]), "CADPartial");
    const view = await controller.decide("v2.3.1", "select");
    expect(view.state.extensible).toBe(true);
    expect(renderStatusBar(view.state)).toContain("extensible");
  });
});

describe("conflict handling", () => {
  async function controllerInConflict() {
    const controller = await SessionController.start(
      client([SELECT_V231, CONFLICT_V12]), "CADPartial");
    await controller.decide("v2.3.1", "select");
    const before = controller.current;
    const after = await controller.decide("v1.2", "select");
    return { controller, before, after };
  }

  it("renders the conflict panel citing the xor group under v1", async () => {
    const { after } = await controllerInConflict();
    expect(after.conflict).not.toBeNull();
    const html = renderConflictPanel(after.conflict!, after.offending?.feature);
    expect(html).toContain("Conflict on v1.1");
    expect(html).toContain("xor group under v1");
    expect(html).toContain("requires: v2.3.1");
    expect(html).toContain(`data-action="undo-conflict"`);
  });

  it("does not record the rejected decision in the log", async () => {
    const { controller } = await controllerInConflict();
    expect(controller.decisionLog).toEqual([{ feature: "v2.3.1", decision: "select" }]);
  });

  it("undo returns to the pre-conflict snapshot", async () => {
    const { controller, before } = await controllerInConflict();
    const restored = await controller.undoConflict();
    expect(restored.conflict).toBeNull();
    expect(renderTree(tree, restored.state)).toBe(renderTree(tree, before.state));
  });
});

describe("decision log replay", () => {
  it("reproduces the rendered state exactly", async () => {
    const first = await SessionController.start(client([SELECT_V231]), "CADPartial");
    await first.decide("v2.3.1", "select");

    const second = await SessionController.start(client([SELECT_V231]), "CADPartial");
    await second.replay(first.decisionLog);

    expect(renderTree(tree, second.current.state))
      .toBe(renderTree(tree, first.current.state));
    expect(second.decisionLog).toEqual(first.decisionLog);
  });
});

describe("stale responses", () => {
  it("a slow response overtaken by a newer decision is discarded", async () => {
    let releaseFirst!: () => void;
    const gate = new Promise<void>((resolve) => (releaseFirst = resolve));
    let call = 0;
    const racer = new ApiClient("http://service", async (url, init) => {
      const method = init?.method ?? "GET";
      if (method === "POST" && url.endsWith("/api/sessions")) return respond(SESSION_CREATED);
      call += 1;
      if (call === 1) {
        await gate; // first decide stalls until after the second lands
        return respond(SELECT_V231);
      }
      return respond(CONFLICT_V12);
    });
    const controller = await SessionController.start(racer, "CADPartial");
    const slow = controller.decide("v2.3.1", "select");
    const fast = await controller.decide("v1.2", "select");
    expect(fast.conflict).not.toBeNull();
    releaseFirst();
    const stale = await slow;
    // The late response must not overwrite the newer view.
    expect(stale).toBe(controller.current);
    expect(controller.current.conflict).not.toBeNull();
  });
});

describe("analysis panel", () => {
  it("highlights core features of the corpus model", () => {
    const html = renderAnalysisPanel(ANALYSIS_CAD.body as AnalysisReport);
    for (const fid of ["CAD", "v1", "v2", "v3"]) {
      expect(html).toContain(`<strong>${fid}</strong>`);
    }
    expect(html).toContain("(none)"); // no dead features
    expect(html).toContain(">56<");
  });

  it("strikes dead features through", () => {
    const html = renderAnalysisPanel(ANALYSIS_DEAD.body as AnalysisReport);
    expect(html).toContain("<s>A</s>");
  });

  it("shows the void warning on a void model", () => {
    const html = renderAnalysisPanel(ANALYSIS_VOID.body as AnalysisReport);
    expect(html).toContain("Void model");
    expect(html).toContain("no valid product");
  });

  it("explains when counting is unavailable", async () => {
    expect(ANALYSIS_WIDE.status).toBe(422);
    await expect(client().analysis("Wide", true)).rejects.toBeInstanceOf(CountUnavailable);
    const html = renderAnalysisPanel(
      { model: "Wide", void: false, dead: [], core: ["Root"], product_count: null },
      true);
    expect(html).toContain("model too large to count");
  });
});

describe("model list", () => {
  it("renders every model with its counts", () => {
    const html = renderModelList(MODELS.body as ModelSummary[], "CADPartial");
    expect(html).toContain("CADPartial");
    expect(html).toContain("14 features, 2 constraints");
    expect(html).toContain(`class="active"`);
  });

  it("shows the onboarding placeholder when empty", () => {
    expect(renderModelList([])).toContain("No models loaded");
  });
});

describe("tri-state click cycling", () => {
  it("cycles undecided -> select -> deselect -> undecide", () => {
    expect(nextDecision("undecided")).toBe("select");
    expect(nextDecision("user-selected")).toBe("deselect");
    expect(nextDecision("user-deselected")).toBe("undecide");
    expect(nextDecision("forced-selected")).toBe("select");
    expect(nextDecision("forced-deselected")).toBe("select");
  });
});
