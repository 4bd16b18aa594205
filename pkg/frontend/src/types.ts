/** Payload shapes of the fmcheck HTTP API. The UI computes no logic of its
 * own: every decision state, reason and conflict shown on screen is read
 * verbatim from these structures. */

export type GroupKindKeyword = "mandatory" | "optional" | "xor" | "xor?" | "or" | "or?";

export interface ModelSummary {
  name: string;
  feature_count: number;
  constraint_count: number;
}

export interface TreeNode {
  id: string;
  display_name: string;
  groups: { kind: GroupKindKeyword; children: TreeNode[] }[];
}

export interface ConstraintJson {
  kind: "requires" | "excludes";
  source: string;
  target: string;
}

export interface ModelTree {
  name: string;
  root: TreeNode;
  constraints: ConstraintJson[];
}

export type DecisionState =
  | "user-selected"
  | "user-deselected"
  | "forced-selected"
  | "forced-deselected"
  | "undecided";

export interface FeatureState {
  state: DecisionState;
  reason: string | null;
}

export type ConflictVia =
  | { type: "root"; root: string }
  | { type: "group"; parent: string; kind: GroupKindKeyword }
  | { type: "constraint"; kind: "requires" | "excludes"; source: string; target: string };

export interface ConflictStep {
  feature: string;
  value: boolean;
  via: ConflictVia;
  text: string;
}

export interface ConflictJson {
  feature: string;
  forced_value: boolean;
  chain: ConflictStep[];
}

export interface SessionState {
  session_id: string;
  model: string;
  features: Record<string, FeatureState>;
  extensible: boolean;
  complete_valid: boolean | null;
  conflict: ConflictJson | null;
}

export interface AnalysisReport {
  model: string;
  void: boolean;
  dead: string[];
  core: string[];
  product_count: number | null;
}

export type Decision = "select" | "deselect" | "undecide";

/** One entry of the session's decision log; replaying the log reproduces
 * the state, which is also how undo works. */
export interface LogEntry {
  feature: string;
  decision: Decision;
}
