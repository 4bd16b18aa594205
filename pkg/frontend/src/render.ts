import type {
  AnalysisReport,
  ConflictJson,
  ConflictVia,
  ModelSummary,
  ModelTree,
  SessionState,
  TreeNode,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function featureAnchor(id: string): string {
  return `feature-${id.replace(/[^A-Za-z0-9_]/g, "_")}`;
}

const STATE_GLYPHS: Record<string, string> = {
  "user-selected": "◉",   // chosen by the user
  "user-deselected": "◌",
  "forced-selected": "✓", // propagated
  "forced-deselected": "✗",
  undecided: "○",
};

export function describeVia(via: ConflictVia): string {
  switch (via.type) {
    case "root":
      return `root ${via.root}`;
    case "group":
      return `${via.kind} group under ${via.parent}`;
    case "constraint":
      return `${via.kind}: ${via.source} → ${via.target}`;
  }
}

export function renderModelList(models: ModelSummary[], active?: string): string {
  if (models.length === 0) {
    return `<p class="placeholder">No models loaded. Start the service over a directory
      of <code>.fm</code> files to begin configuring.</p>`;
  }
  const items = models
    .map((m) => {
      const cls = m.name === active ? ' class="active"' : "";
      return `<li${cls}><button data-model="${escapeHtml(m.name)}">${escapeHtml(m.name)}</button>
        <small>${m.feature_count} features, ${m.constraint_count} constraints</small></li>`;
    })
    .join("\n");
  return `<ul class="model-list">${items}</ul>`;
}

function renderNode(node: TreeNode, state: SessionState, dead: ReadonlySet<string>): string {
  const feature = state.features[node.id];
  const decision = feature?.state ?? "undecided";
  const glyph = STATE_GLYPHS[decision] ?? "?";
  const reason = feature?.reason;
  const classes = ["feature", `state-${decision}`];
  if (dead.has(node.id)) classes.push("dead");
  const tooltip = reason ? ` title="${escapeHtml(reason)}"` : "";
  const label =
    `<span id="${featureAnchor(node.id)}" class="${classes.join(" ")}"` +
    `${tooltip} data-feature="${escapeHtml(node.id)}">` +
    `<span class="glyph">${glyph}</span> ${escapeHtml(node.display_name)}` +
    (reason ? `<span class="reason">${escapeHtml(reason)}</span>` : "") +
    `</span>`;
  if (node.groups.length === 0) {
    return `<li>${label}</li>`;
  }
  const groups = node.groups
    .map((group) => {
      const children = group.children.map((c) => renderNode(c, state, dead)).join("\n");
      return `<div class="group"><span class="badge kind-${group.kind.replace("?", "-opt")}">` +
        `${escapeHtml(group.kind)}</span><ul>${children}</ul></div>`;
    })
    .join("\n");
  return `<li><details open><summary>${label}</summary>${groups}</details></li>`;
}

export function renderTree(tree: ModelTree, state: SessionState, dead: Iterable<string> = []): string {
  const deadSet = new Set(dead);
  const constraints = tree.constraints
    .map(
      (c) =>
        `<li><a href="#${featureAnchor(c.source)}">${escapeHtml(c.source)}</a> ` +
        `${c.kind} <a href="#${featureAnchor(c.target)}">${escapeHtml(c.target)}</a></li>`,
    )
    .join("\n");
  return `<div class="tree-pane">
    <ul class="feature-tree">${renderNode(tree.root, state, deadSet)}</ul>
    <aside class="constraints">
      <h3>Dependencies</h3>
      <ul>${constraints || "<li>(none)</li>"}</ul>
    </aside>
  </div>`;
}

export function renderStatusBar(state: SessionState): string {
  const extensible = state.extensible
    ? `<span class="ok">extensible: a valid product is still reachable</span>`
    : `<span class="bad">not extensible: no valid product from here</span>`;
  const complete =
    state.complete_valid === null
      ? ""
      : state.complete_valid
        ? `<span class="ok">complete configuration: valid product</span>`
        : `<span class="bad">complete configuration: invalid</span>`;
  return `<div class="status-bar">${extensible}${complete}</div>`;
}

export function renderConflictPanel(conflict: ConflictJson, offending?: string): string {
  const steps = conflict.chain
    .map(
      (step) =>
        `<li><a href="#${featureAnchor(step.feature)}">${escapeHtml(step.feature)}</a> ` +
        `${step.value ? "must be selected" : "must be deselected"} ` +
        `<em>(${escapeHtml(describeVia(step.via))})</em></li>`,
    )
    .join("\n");
  const undoLabel = offending ? `Undo ${escapeHtml(offending)}` : "Undo last decision";
  return `<div class="conflict-panel" role="alert">
    <h3>Conflict on ${escapeHtml(conflict.feature)}</h3>
    <p>The last decision forces <strong>${escapeHtml(conflict.feature)}</strong> both ways:</p>
    <ol>${steps}</ol>
    <button data-action="undo-conflict">${undoLabel}</button>
  </div>`;
}

export function renderAnalysisPanel(report: AnalysisReport | null, countTooLarge = false): string {
  if (report === null) {
    return `<div class="analysis-panel"><p class="placeholder">analysis pending…</p></div>`;
  }
  if (report.void) {
    return `<div class="analysis-panel void-warning" role="alert">
      <h3>Void model</h3>
      <p>The constraints admit <strong>no valid product at all</strong>; every
      analysis below is vacuous until the model is fixed.</p>
    </div>`;
  }
  const dead = report.dead.length
    ? report.dead.map((f) => `<s>${escapeHtml(f)}</s>`).join(", ")
    : "(none)";
  const core = report.core.length
    ? report.core.map((f) => `<strong>${escapeHtml(f)}</strong>`).join(", ")
    : "(none)";
  const count = countTooLarge
    ? "model too large to count"
    : report.product_count === null
      ? "not requested"
      : String(report.product_count);
  return `<div class="analysis-panel">
    <h3>Analysis</h3>
    <dl>
      <dt>void</dt><dd>no</dd>
      <dt>dead features</dt><dd class="dead-list">${dead}</dd>
      <dt>core features</dt><dd class="core-list">${core}</dd>
      <dt>products</dt><dd>${count}</dd>
    </dl>
  </div>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}
