/** Workbench wiring: debounced parse-on-edit, explicit one-click
 * verification with single-flight request replacement, and compiled-view
 * refresh. The backend base URL comes from `window.VERIODD_API_BASE`, a
 * `?api=` query parameter, or defaults to same-origin. */

import { ApiClient, ApiError, BackendUnreachable } from "./api.js";
import {
  applyParse,
  applyParseError,
  applyRequestError,
  applyResult,
  applyViews,
  editCod,
  editOdd,
  initialState,
  setBackendDown,
  setBusy,
  setIncludeCod,
  setTab,
  setWantModel,
  toggleModule,
  WorkspaceState,
} from "./state.js";
import { buildSkeleton, render } from "./ui.js";

const PARSE_DEBOUNCE_MS = 400;

export function apiBase(win: Window = window): string {
  const override = (win as unknown as { VERIODD_API_BASE?: string }).VERIODD_API_BASE;
  if (override) return override;
  const param = new URLSearchParams(win.location.search).get("api");
  if (param) return param;
  return win.location.origin;
}

export class Workbench {
  state: WorkspaceState = initialState();
  private parseTimer: ReturnType<typeof setTimeout> | null = null;
  private inflightVerify: AbortController | null = null;

  constructor(
    readonly root: HTMLElement,
    readonly client: ApiClient,
    readonly debounceMs: number = PARSE_DEBOUNCE_MS,
  ) {
    buildSkeleton(root, {
      onOddInput: (text) => this.edit(editOdd(this.state, text)),
      onCodInput: (text) => this.edit(editCod(this.state, text)),
      onToggleModule: (name) => this.update(toggleModule(this.state, name)),
      onIncludeCod: (include) => this.update(setIncludeCod(this.state, include)),
      onWantModel: (want) => this.update(setWantModel(this.state, want)),
      onVerify: () => void this.runVerification(),
      onTab: (tab) => this.update(setTab(this.state, tab)),
    });
    this.update(this.state);
  }

  private update(next: WorkspaceState): void {
    this.state = next;
    render(this.root, this.state, {
      onOddInput: (text) => this.edit(editOdd(this.state, text)),
      onCodInput: (text) => this.edit(editCod(this.state, text)),
      onToggleModule: (name) => this.update(toggleModule(this.state, name)),
      onIncludeCod: (include) => this.update(setIncludeCod(this.state, include)),
      onWantModel: (want) => this.update(setWantModel(this.state, want)),
      onVerify: () => void this.runVerification(),
      onTab: (tab) => this.update(setTab(this.state, tab)),
    });
  }

  private edit(next: WorkspaceState): void {
    this.update(next);
    if (this.parseTimer !== null) clearTimeout(this.parseTimer);
    this.parseTimer = setTimeout(() => {
      this.parseTimer = null;
      void this.refreshParse();
    }, this.debounceMs);
  }

  /** Parse the buffers and refresh both compiled views. */
  async refreshParse(): Promise<void> {
    const generation = this.state.generation;
    const odd = this.state.oddText;
    const cod = this.state.codText.trim() ? this.state.codText : undefined;
    try {
      const parsed = await this.client.parse(odd, cod);
      this.update(applyParse(this.state, generation, parsed.modules, parsed.attributes));
    } catch (error) {
      if (error instanceof ApiError) {
        this.update(applyParseError(this.state, generation, error.body));
        return;
      }
      if (error instanceof BackendUnreachable) {
        this.update(setBackendDown(this.state, true));
        return;
      }
      throw error;
    }
    try {
      const [prop, smtlib] = await Promise.all([
        this.client.compile(odd, "prop", cod),
        this.client.compile(odd, "smtlib", cod),
      ]);
      this.update(applyViews(
        this.state, generation,
        { odd: prop.oddText, cod: prop.codText },
        { odd: smtlib.oddText, cod: smtlib.codText },
      ));
    } catch (error) {
      if (error instanceof BackendUnreachable) {
        this.update(setBackendDown(this.state, true));
        return;
      }
      if (!(error instanceof ApiError)) throw error;
    }
  }

  /** One click: /api/verify when the COD is included, /api/check otherwise.
   * A later click aborts and replaces the in-flight request. */
  async runVerification(): Promise<void> {
    if (this.state.selected.length === 0) return;
    this.inflightVerify?.abort();
    const controller = new AbortController();
    this.inflightVerify = controller;
    const generation = this.state.generation;
    const { oddText, codText, selected, includeCod, wantModel } = this.state;
    this.update(setBusy(this.state, true));
    try {
      const useCod = includeCod && codText.trim() !== "";
      const response = useCod
        ? await this.client.verify(oddText, codText, selected, wantModel, controller.signal)
        : await this.client.check(oddText, selected, wantModel, controller.signal);
      this.update(applyResult(this.state, generation, {
        kind: useCod ? "verify" : "check",
        verdict: response.verdict,
        model: response.model,
        wallMs: response.wallMs,
        script: response.script,
      }));
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") return;
      if (error instanceof ApiError) {
        this.update(applyRequestError(this.state, generation, error.body));
        return;
      }
      if (error instanceof BackendUnreachable) {
        this.update(setBackendDown(this.state, true));
        return;
      }
      throw error;
    } finally {
      if (this.inflightVerify === controller) this.inflightVerify = null;
    }
  }

}

export function mount(root: HTMLElement, base: string = apiBase()): Workbench {
  return new Workbench(root, new ApiClient(base));
}

declare global {
  interface Window {
    veriodd?: Workbench;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.veriodd = mount(document.getElementById("app")!);
}
