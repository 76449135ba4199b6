/** Workspace state and its pure transition functions.
 *
 * Buffer edits bump a generation counter; responses carry the generation
 * of the buffers they were computed from and are dropped when stale, so a
 * result panel is never shown for buffers newer than the request that
 * produced it.
 */

import type { ApiErrorBody, AttributeInfo, ModuleInfo } from "./api.js";

export type ViewTab = "prop" | "smtlib" | "script" | "result";

export interface VerificationResult {
  kind: "check" | "verify";
  verdict: string;
  model: Record<string, string> | null;
  wallMs: number;
  script: string;
}

export interface CompiledViews {
  prop: { odd: string; cod?: string } | null;
  smtlib: { odd: string; cod?: string } | null;
  stale: boolean;
}

export interface WorkspaceState {
  oddText: string;
  codText: string;
  generation: number;
  modules: ModuleInfo[];
  attributes: AttributeInfo[];
  selected: string[];
  includeCod: boolean;
  wantModel: boolean;
  lastResult: VerificationResult | null;
  parseError: ApiErrorBody | null;
  views: CompiledViews;
  viewTab: ViewTab;
  backendDown: boolean;
  requestError: ApiErrorBody | null;
  busy: boolean;
}

export function initialState(): WorkspaceState {
  return {
    oddText: "",
    codText: "",
    generation: 0,
    modules: [],
    attributes: [],
    selected: [],
    includeCod: true,
    wantModel: false,
    lastResult: null,
    parseError: null,
    views: { prop: null, smtlib: null, stale: false },
    viewTab: "prop",
    backendDown: false,
    requestError: null,
    busy: false,
  };
}

/** The unique sink of the reference DAG, or null when there is none. */
export function uniqueSink(modules: ModuleInfo[]): string | null {
  const referenced = new Set<string>();
  for (const module of modules) {
    for (const ref of module.references) referenced.add(ref);
  }
  const sinks = modules.filter((m) => !referenced.has(m.name));
  return sinks.length === 1 ? sinks[0]!.name : null;
}

export function editOdd(state: WorkspaceState, text: string): WorkspaceState {
  if (text === state.oddText) return state;
  return {
    ...state,
    oddText: text,
    generation: state.generation + 1,
    lastResult: null,
    requestError: null,
    views: { ...state.views, stale: true },
  };
}

export function editCod(state: WorkspaceState, text: string): WorkspaceState {
  if (text === state.codText) return state;
  return {
    ...state,
    codText: text,
    generation: state.generation + 1,
    lastResult: null,
    requestError: null,
    views: { ...state.views, stale: true },
  };
}

/** Apply a parse response; dropped when the buffers have moved on. */
export function applyParse(
  state: WorkspaceState,
  generation: number,
  modules: ModuleInfo[],
  attributes: AttributeInfo[],
): WorkspaceState {
  if (generation !== state.generation) return state;
  const names = new Set(modules.map((m) => m.name));
  let selected = state.selected.filter((name) => names.has(name));
  if (selected.length === 0) {
    const sink = uniqueSink(modules);
    if (sink !== null) selected = [sink];
  }
  return {
    ...state,
    modules,
    attributes,
    selected,
    parseError: null,
    backendDown: false,
  };
}

export function applyParseError(
  state: WorkspaceState,
  generation: number,
  error: ApiErrorBody,
): WorkspaceState {
  if (generation !== state.generation) return state;
  return { ...state, modules: [], attributes: [], selected: [], parseError: error };
}

export function applyViews(
  state: WorkspaceState,
  generation: number,
  prop: { odd: string; cod?: string },
  smtlib: { odd: string; cod?: string },
): WorkspaceState {
  if (generation !== state.generation) return state;
  return { ...state, views: { prop, smtlib, stale: false } };
}

export function applyResult(
  state: WorkspaceState,
  generation: number,
  result: VerificationResult,
): WorkspaceState {
  if (generation !== state.generation) return state;
  return { ...state, lastResult: result, requestError: null, viewTab: "result", busy: false };
}

export function applyRequestError(
  state: WorkspaceState,
  generation: number,
  error: ApiErrorBody,
): WorkspaceState {
  if (generation !== state.generation) return state;
  return { ...state, requestError: error, busy: false };
}

export function toggleModule(state: WorkspaceState, name: string): WorkspaceState {
  const selected = state.selected.includes(name)
    ? state.selected.filter((n) => n !== name)
    : [...state.selected, name];
  return { ...state, selected };
}

export function setIncludeCod(state: WorkspaceState, include: boolean): WorkspaceState {
  return { ...state, includeCod: include };
}

export function setWantModel(state: WorkspaceState, want: boolean): WorkspaceState {
  return { ...state, wantModel: want };
}

export function setTab(state: WorkspaceState, tab: ViewTab): WorkspaceState {
  return { ...state, viewTab: tab };
}

export function setBackendDown(state: WorkspaceState, down: boolean): WorkspaceState {
  return { ...state, backendDown: down, busy: down ? false : state.busy };
}

export function setBusy(state: WorkspaceState, busy: boolean): WorkspaceState {
  return { ...state, busy };
}

/** Badge tone for a verdict; anything unexpected renders amber. */
export function verdictTone(verdict: string): "good" | "bad" | "warn" {
  if (verdict === "within-odd" || verdict === "consistent") return "good";
  if (verdict === "violation" || verdict === "inconsistent") return "bad";
  return "warn";
}
