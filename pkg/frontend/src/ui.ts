/** DOM skeleton and rendering. All displayed formulas, scripts, and
 * verdicts are inserted as textContent, byte-for-byte as returned. */

import type { WorkspaceState, ViewTab } from "./state.js";
import { verdictTone } from "./state.js";

export interface Handlers {
  onOddInput(text: string): void;
  onCodInput(text: string): void;
  onToggleModule(name: string): void;
  onIncludeCod(include: boolean): void;
  onWantModel(want: boolean): void;
  onVerify(): void;
  onTab(tab: ViewTab): void;
}

const TABS: { id: ViewTab; label: string }[] = [
  { id: "prop", label: "Propositional" },
  { id: "smtlib", label: "SMT-LIB" },
  { id: "script", label: "Script" },
  { id: "result", label: "Result" },
];

export function buildSkeleton(root: HTMLElement, handlers: Handlers): void {
  root.innerHTML = `
    <header class="topbar">
      <h1>ODD/COD Verification Workbench</h1>
      <div id="banner" class="banner" hidden></div>
    </header>
    <main class="layout">
      <section class="editors">
        <div class="editor-pane">
          <label for="odd-editor">ODD specification</label>
          <textarea id="odd-editor" spellcheck="false"
            placeholder="module_name:&#10;  INCLUDE_AND:&#10;    attribute: > 12 m"></textarea>
          <div id="odd-markers" class="markers"></div>
        </div>
        <div class="editor-pane">
          <label for="cod-editor">COD situation</label>
          <textarea id="cod-editor" spellcheck="false"
            placeholder="attribute: = 13"></textarea>
        </div>
      </section>
      <section class="controls">
        <div class="control-group">
          <h2>Modules</h2>
          <div id="module-list" class="module-list"></div>
        </div>
        <div class="control-group">
          <h2>Attributes</h2>
          <table id="attribute-table" class="attribute-table">
            <thead><tr><th>name</th><th>sort</th><th>unit</th></tr></thead>
            <tbody></tbody>
          </table>
        </div>
        <div class="control-group run-controls">
          <label><input type="checkbox" id="include-cod" checked> include COD</label>
          <label><input type="checkbox" id="want-model"> request model</label>
          <button id="verify-button">Verify</button>
          <span id="verdict-badge" class="badge" hidden></span>
        </div>
      </section>
      <section class="views">
        <nav id="tabs" class="tabs"></nav>
        <div id="view-body" class="view-body"></div>
      </section>
    </main>
  `;

  oddEditor(root).addEventListener("input", () =>
    handlers.onOddInput(oddEditor(root).value));
  codEditor(root).addEventListener("input", () =>
    handlers.onCodInput(codEditor(root).value));
  byId<HTMLInputElement>(root, "include-cod").addEventListener("change", (event) =>
    handlers.onIncludeCod((event.target as HTMLInputElement).checked));
  byId<HTMLInputElement>(root, "want-model").addEventListener("change", (event) =>
    handlers.onWantModel((event.target as HTMLInputElement).checked));
  byId<HTMLButtonElement>(root, "verify-button").addEventListener("click", () =>
    handlers.onVerify());

  const tabs = byId<HTMLElement>(root, "tabs");
  for (const tab of TABS) {
    const button = document.createElement("button");
    button.dataset.tab = tab.id;
    button.textContent = tab.label;
    button.addEventListener("click", () => handlers.onTab(tab.id));
    tabs.appendChild(button);
  }
}

export function oddEditor(root: HTMLElement): HTMLTextAreaElement {
  return byId(root, "odd-editor");
}

export function codEditor(root: HTMLElement): HTMLTextAreaElement {
  return byId(root, "cod-editor");
}

function byId<T extends HTMLElement>(root: HTMLElement, id: string): T {
  const found = root.querySelector<T>(`#${id}`);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

export function render(root: HTMLElement, state: WorkspaceState, handlers: Handlers): void {
  renderBanner(root, state);
  renderModules(root, state, handlers);
  renderAttributes(root, state);
  renderMarkers(root, state);
  renderBadge(root, state);
  renderTabs(root, state);
  renderViewBody(root, state);
  byId<HTMLInputElement>(root, "include-cod").checked = state.includeCod;
  byId<HTMLInputElement>(root, "want-model").checked = state.wantModel;
  byId<HTMLButtonElement>(root, "verify-button").disabled =
    state.selected.length === 0 || state.busy;
}

function renderBanner(root: HTMLElement, state: WorkspaceState): void {
  const banner = byId<HTMLElement>(root, "banner");
  banner.hidden = !state.backendDown;
  banner.textContent = state.backendDown
    ? "Backend unreachable; editing still works, verification is paused."
    : "";
}

function renderModules(root: HTMLElement, state: WorkspaceState, handlers: Handlers): void {
  const list = byId<HTMLElement>(root, "module-list");
  list.innerHTML = "";
  for (const module of state.modules) {
    const label = document.createElement("label");
    label.className = "module-item";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.className = "module-checkbox";
    box.dataset.module = module.name;
    box.checked = state.selected.includes(module.name);
    box.addEventListener("change", () => handlers.onToggleModule(module.name));
    label.appendChild(box);
    label.appendChild(document.createTextNode(" " + module.name));
    if (module.references.length > 0) {
      const refs = document.createElement("span");
      refs.className = "module-refs";
      refs.textContent = ` → ${module.references.join(", ")}`;
      label.appendChild(refs);
    }
    list.appendChild(label);
  }
  if (state.modules.length === 0) {
    const empty = document.createElement("p");
    empty.className = "placeholder";
    empty.textContent = "No modules parsed yet.";
    list.appendChild(empty);
  }
}

function renderAttributes(root: HTMLElement, state: WorkspaceState): void {
  const body = byId<HTMLTableElement>(root, "attribute-table")
    .querySelector("tbody")!;
  body.innerHTML = "";
  for (const attribute of state.attributes) {
    const row = document.createElement("tr");
    for (const text of [attribute.name, attribute.sort, attribute.unit ?? ""]) {
      const cell = document.createElement("td");
      cell.textContent = text;
      row.appendChild(cell);
    }
    body.appendChild(row);
  }
}

function renderMarkers(root: HTMLElement, state: WorkspaceState): void {
  const markers = byId<HTMLElement>(root, "odd-markers");
  markers.innerHTML = "";
  const diagnostics = state.parseError?.diagnostics ?? [];
  for (const diagnostic of diagnostics) {
    const marker = document.createElement("div");
    marker.className = "marker";
    marker.dataset.line = String(diagnostic.line);
    marker.textContent =
      `line ${diagnostic.line}:${diagnostic.col} — ${diagnostic.message}`;
    markers.appendChild(marker);
  }
  if (state.parseError && diagnostics.length === 0) {
    const marker = document.createElement("div");
    marker.className = "marker";
    marker.textContent = state.parseError.message;
    markers.appendChild(marker);
  }
}

function renderBadge(root: HTMLElement, state: WorkspaceState): void {
  const badge = byId<HTMLElement>(root, "verdict-badge");
  if (!state.lastResult) {
    badge.hidden = true;
    badge.textContent = "";
    badge.className = "badge";
    return;
  }
  badge.hidden = false;
  badge.textContent = state.lastResult.verdict;
  badge.className = `badge badge-${verdictTone(state.lastResult.verdict)}`;
}

function renderTabs(root: HTMLElement, state: WorkspaceState): void {
  for (const button of byId<HTMLElement>(root, "tabs").querySelectorAll("button")) {
    button.classList.toggle("active", button.dataset.tab === state.viewTab);
  }
}

function renderViewBody(root: HTMLElement, state: WorkspaceState): void {
  const body = byId<HTMLElement>(root, "view-body");
  body.innerHTML = "";
  if (state.requestError) {
    body.appendChild(renderError(state.requestError));
  }
  switch (state.viewTab) {
    case "prop":
      body.appendChild(renderCompiled(state, state.views.prop, "prop-pane"));
      break;
    case "smtlib":
      body.appendChild(renderCompiled(state, state.views.smtlib, "smtlib-pane"));
      break;
    case "script":
      body.appendChild(renderScript(state));
      break;
    case "result":
      body.appendChild(renderResult(state));
      break;
  }
}

function renderError(error: { code: string; message: string; diagnostics?: { line: number; col: number; message: string }[] }): HTMLElement {
  const box = document.createElement("div");
  box.className = "error-box";
  const head = document.createElement("strong");
  head.textContent = `${error.code}: ${error.message}`;
  box.appendChild(head);
  for (const diagnostic of error.diagnostics ?? []) {
    const line = document.createElement("div");
    line.textContent = `line ${diagnostic.line}:${diagnostic.col} — ${diagnostic.message}`;
    box.appendChild(line);
  }
  return box;
}

function renderCompiled(
  state: WorkspaceState,
  view: { odd: string; cod?: string } | null,
  paneId: string,
): HTMLElement {
  const pane = document.createElement("pre");
  pane.id = paneId;
  pane.className = "code-pane" + (state.views.stale ? " stale" : "");
  if (view === null) {
    pane.textContent = "";
    pane.classList.add("placeholder");
  } else {
    pane.textContent = view.cod !== undefined
      ? view.odd + "\n" + view.cod
      : view.odd;
  }
  if (state.views.stale) {
    const badge = document.createElement("div");
    badge.className = "stale-badge";
    badge.textContent = "stale";
    const wrap = document.createElement("div");
    wrap.appendChild(badge);
    wrap.appendChild(pane);
    return wrap;
  }
  return pane;
}

function renderScript(state: WorkspaceState): HTMLElement {
  const pane = document.createElement("pre");
  pane.id = "script-pane";
  pane.className = "code-pane";
  pane.textContent = state.lastResult?.script ?? "";
  return pane;
}

function renderResult(state: WorkspaceState): HTMLElement {
  const wrap = document.createElement("div");
  wrap.id = "result-pane";
  if (!state.lastResult) {
    wrap.className = "placeholder";
    wrap.textContent = "No verification run yet.";
    return wrap;
  }
  const result = state.lastResult;
  const line = document.createElement("p");
  line.textContent =
    `${result.kind === "verify" ? "Conformance" : "Consistency"}: ` +
    `${result.verdict} in ${result.wallMs.toFixed(1)} ms ` +
    `(modules: ${state.selected.join(", ")})`;
  wrap.appendChild(line);
  if (result.model) {
    const table = document.createElement("table");
    table.id = "model-table";
    table.className = "attribute-table";
    for (const [name, value] of Object.entries(result.model)) {
      const row = document.createElement("tr");
      const key = document.createElement("td");
      key.textContent = name;
      const val = document.createElement("td");
      val.textContent = value;
      row.appendChild(key);
      row.appendChild(val);
      table.appendChild(row);
    }
    wrap.appendChild(table);
  }
  return wrap;
}
