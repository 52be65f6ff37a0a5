/** Session controller: owns the DOM, serializes server calls, renders only server state. */

import { ApiClient, ApiError } from "./api.js";
import { renderPairingLines, renderStructure } from "./board.js";
import type { Panel } from "./board.js";
import { circularLayout } from "./layout.js";
import { clickCheck, displayPanelOf, selectionRule, submitCheck } from "./legality.js";
import type { Preset } from "./presets.js";
import { prettyFormula } from "./sexpr.js";
import type { Hint, Mode, SessionState } from "./types.js";
import { validateStructure } from "./types.js";

const BOARD_WIDTH = 340;
const BOARD_HEIGHT = 280;
const BOARD_GAP = 80;
const CUSTOM_OPTION = "__custom__";

const TEMPLATE = `
<section class="controls">
  <label>preset
    <select id="preset-select"></select>
  </label>
  <label>mode
    <select id="mode-select">
      <option value="human-spoiler">you play Spoiler</option>
      <option value="human-duplicator">you play Duplicator</option>
    </select>
  </label>
  <label>clock
    <input id="clock-input" type="number" min="0" max="9" value="2">
  </label>
  <button id="new-session">start session</button>
  <button id="end-session" disabled>end session</button>
</section>
<p id="preset-description" class="description"></p>
<details id="custom-wrap">
  <summary>custom structures (JSON)</summary>
  <div class="custom-grid">
    <label>left structure
      <textarea id="custom-left" rows="5" spellcheck="false"></textarea>
    </label>
    <label>right structure
      <textarea id="custom-right" rows="5" spellcheck="false"></textarea>
    </label>
  </div>
  <p class="description">Used when the preset box is set to “custom”. Format:
  {"signature": [["lt", 2]], "universe": 3, "relations": {"lt": [[0, 1], [0, 2], [1, 2]]}}</p>
</details>
<div id="error-banner" class="banner error" hidden></div>
<div id="notice" class="banner notice" hidden></div>
<section id="game" hidden>
  <div id="status-strip">
    <span id="session-meta"></span>
    <span id="clock-display" data-clock=""></span>
    <span id="turn-indicator" data-awaiting="none"></span>
    <span id="verdict-banner" data-status="" data-holds=""></span>
  </div>
  <div class="board-titles">
    <span id="title-left"></span>
    <span id="title-right"></span>
  </div>
  <svg id="board-svg" viewBox="0 0 ${2 * BOARD_WIDTH + BOARD_GAP} ${BOARD_HEIGHT}"
       width="100%" role="img">
    <defs>
      <marker id="arrowhead" markerWidth="8" markerHeight="8" refX="7" refY="3"
              orient="auto" markerUnits="strokeWidth">
        <path d="M0,0 L7,3 L0,6 Z" fill="context-stroke"></path>
      </marker>
    </defs>
    <g id="pairing-lines"></g>
    <g id="board-left"></g>
    <g id="board-right" transform="translate(${BOARD_WIDTH + BOARD_GAP}, 0)"></g>
  </svg>
  <div class="move-bar">
    <span class="chips-label">challenge to answer:</span>
    <span id="pending-chips" class="chips"></span>
  </div>
  <div class="move-bar">
    <span class="chips-label">your selection:</span>
    <span id="selection-chips" class="chips"></span>
    <button id="submit-move">submit move</button>
    <button id="clear-selection">clear</button>
    <button id="hint-button">hint</button>
  </div>
  <div id="hint-panel" hidden>
    <p id="hint-text"></p>
    <pre id="hint-formula" hidden></pre>
    <button id="use-hint" hidden>use this move</button>
  </div>
  <h3 class="history-heading">rounds</h3>
  <ol id="history-list"></ol>
</section>
`;

export class App {
  private state: SessionState | null = null;
  private selection: number[] = [];
  private hint: Hint | null = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly presets: Preset[],
  ) {
    this.root.innerHTML = TEMPLATE;
    this.populatePresets();
    this.wireEvents();
    this.render();
  }

  /** Resolves once every queued server interaction has settled. */
  whenIdle(): Promise<void> {
    return this.chain;
  }

  get session(): SessionState | null {
    return this.state;
  }

  private el<T extends HTMLElement = HTMLElement>(id: string): T {
    const found = this.root.querySelector<T>(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
  }

  private svgGroup(id: string): SVGGElement {
    const found = this.root.querySelector<SVGGElement>(`#${id}`);
    if (!found) throw new Error(`missing svg group #${id}`);
    return found;
  }

  private op(action: () => Promise<void>): Promise<void> {
    const run = this.chain.then(action).catch((err) => this.showError(err));
    this.chain = run;
    return run;
  }

  private populatePresets(): void {
    const select = this.el<HTMLSelectElement>("preset-select");
    for (const preset of this.presets) {
      const option = document.createElement("option");
      option.value = preset.id;
      option.textContent = preset.label;
      select.appendChild(option);
    }
    const custom = document.createElement("option");
    custom.value = CUSTOM_OPTION;
    custom.textContent = "custom (JSON below)";
    select.appendChild(custom);
    this.applyPresetDefaults();
  }

  private applyPresetDefaults(): void {
    const preset = this.selectedPreset();
    if (!preset) {
      this.el("preset-description").textContent =
        "Paste two structure JSON objects below, then start the session.";
      return;
    }
    this.el<HTMLSelectElement>("mode-select").value = preset.mode;
    this.el<HTMLInputElement>("clock-input").value = String(preset.clock);
    this.el("preset-description").textContent = preset.description;
  }

  private selectedPreset(): Preset | null {
    const id = this.el<HTMLSelectElement>("preset-select").value;
    return this.presets.find((p) => p.id === id) ?? null;
  }

  private wireEvents(): void {
    this.el<HTMLSelectElement>("preset-select").addEventListener("change", () =>
      this.applyPresetDefaults(),
    );
    this.el<HTMLButtonElement>("new-session").addEventListener("click", () => this.newSession());
    this.el<HTMLButtonElement>("end-session").addEventListener("click", () => this.endSession());
    this.el<HTMLButtonElement>("submit-move").addEventListener("click", () => this.submitMove());
    this.el<HTMLButtonElement>("clear-selection").addEventListener("click", () => {
      this.selection = [];
      this.clearNotice();
      this.render();
    });
    this.el<HTMLButtonElement>("hint-button").addEventListener("click", () => this.requestHint());
    this.el<HTMLButtonElement>("use-hint").addEventListener("click", () => this.useHint());
  }

  newSession(): Promise<void> {
    return this.op(async () => {
      const mode = this.el<HTMLSelectElement>("mode-select").value as Mode;
      const clock = Number(this.el<HTMLInputElement>("clock-input").value);
      const preset = this.selectedPreset();
      let left;
      let right;
      if (preset) {
        left = preset.left;
        right = preset.right;
      } else {
        left = validateStructure(
          JSON.parse(this.el<HTMLTextAreaElement>("custom-left").value),
          "left structure",
        );
        right = validateStructure(
          JSON.parse(this.el<HTMLTextAreaElement>("custom-right").value),
          "right structure",
        );
      }
      this.clearMessages();
      this.state = await this.api.createSession({ left, right, clock, mode });
      this.selection = [];
      this.hint = null;
      this.render();
    });
  }

  endSession(): Promise<void> {
    return this.op(async () => {
      if (!this.state) return;
      await this.api.deleteSession(this.state.id);
      this.state = null;
      this.selection = [];
      this.hint = null;
      this.clearMessages();
      this.render();
    });
  }

  refreshSession(): Promise<void> {
    return this.op(async () => {
      if (!this.state) return;
      this.state = await this.api.getSession(this.state.id);
      this.render();
    });
  }

  clickElement(panel: Panel, element: number): void {
    const check = clickCheck(this.state, this.selection, panel, element);
    if (!check.ok) {
      this.notice(`blocked: ${check.reason}`);
      return;
    }
    this.selection.push(element);
    this.clearNotice();
    this.render();
  }

  submitMove(): Promise<void> {
    const check = submitCheck(this.state, this.selection);
    if (!check.ok) {
      this.notice(`blocked: ${check.reason}`);
      return this.chain;
    }
    return this.op(async () => {
      if (!this.state) return;
      const move = [...this.selection];
      this.state = await this.api.postMove(this.state.id, move);
      this.selection = [];
      this.hint = null;
      this.clearMessages();
      this.render();
    });
  }

  requestHint(): Promise<void> {
    return this.op(async () => {
      if (!this.state) return;
      this.hint = await this.api.getHint(this.state.id);
      this.render();
    });
  }

  private useHint(): void {
    if (!this.state || !this.hint) return;
    const humanSide = this.state.mode === "human-spoiler" ? "spoiler" : "duplicator";
    if (this.hint.side !== humanSide || this.state.awaiting !== humanSide) {
      this.notice("blocked: the hint move belongs to the engine's side");
      return;
    }
    this.selection = [...this.hint.move];
    this.clearNotice();
    this.render();
  }

  private showError(err: unknown): void {
    const banner = this.el("error-banner");
    banner.hidden = false;
    banner.textContent =
      err instanceof ApiError
        ? `server error [${err.code}]: ${err.message}`
        : `error: ${err instanceof Error ? err.message : String(err)}`;
  }

  private notice(text: string): void {
    const banner = this.el("notice");
    banner.hidden = false;
    banner.textContent = text;
  }

  private clearNotice(): void {
    const banner = this.el("notice");
    banner.hidden = true;
    banner.textContent = "";
  }

  private clearMessages(): void {
    this.clearNotice();
    const banner = this.el("error-banner");
    banner.hidden = true;
    banner.textContent = "";
  }

  private render(): void {
    const game = this.el("game");
    this.el<HTMLButtonElement>("end-session").disabled = this.state === null;
    if (!this.state) {
      game.hidden = true;
      return;
    }
    game.hidden = false;
    this.renderStatus(this.state);
    this.renderBoards(this.state);
    this.renderChips(this.state);
    this.renderHint(this.state);
    this.renderHistory(this.state);
  }

  private renderStatus(state: SessionState): void {
    this.el("session-meta").textContent = `session ${state.id} · ${state.mode}`;

    const clock = this.el("clock-display");
    clock.dataset.clock = String(state.clock);
    clock.textContent = `clock ${state.clock} of ${state.initial_clock}`;

    const turn = this.el("turn-indicator");
    turn.dataset.awaiting = state.awaiting ?? "none";
    const humanSide = state.mode === "human-spoiler" ? "spoiler" : "duplicator";
    if (state.awaiting === null) {
      turn.textContent = "game over";
    } else if (state.awaiting === humanSide) {
      turn.textContent =
        humanSide === "spoiler"
          ? "your turn: pick a challenge on the highlighted board"
          : "your turn: pick a reply, one element per challenged element";
    } else {
      turn.textContent = "engine is moving";
    }

    const verdict = this.el("verdict-banner");
    verdict.dataset.status = state.status;
    verdict.dataset.holds = String(state.verdict.holds);
    if (state.status === "spoiler-won") {
      verdict.textContent = "Spoiler won";
    } else if (state.status === "duplicator-survived") {
      verdict.textContent = "Duplicator survived";
    } else {
      verdict.textContent = `in progress · relation ${state.verdict.holds ? "holds" : "fails"}`;
    }
  }

  private renderBoards(state: SessionState): void {
    const pos = state.position;
    const original = pos.orientation === "original";
    const leftBoard = {
      structure: original ? pos.left : pos.right,
      tuple: original ? pos.left_tuple : pos.right_tuple,
    };
    const rightBoard = {
      structure: original ? pos.right : pos.left,
      tuple: original ? pos.right_tuple : pos.left_tuple,
    };
    const rule = selectionRule(state);
    const challengePanel = displayPanelOf(state, "right");
    const highlight =
      state.pending_challenge !== null && state.status === "in-progress"
        ? state.pending_challenge
        : [];

    const leftPoints = circularLayout(leftBoard.structure, BOARD_WIDTH, BOARD_HEIGHT);
    const rightPoints = circularLayout(rightBoard.structure, BOARD_WIDTH, BOARD_HEIGHT);

    renderStructure(this.svgGroup("board-left"), leftBoard.structure, leftPoints, {
      panel: "left",
      pinned: leftBoard.tuple,
      selection: rule.panel === "left" ? this.selection : [],
      highlight: challengePanel === "left" ? highlight : [],
      clickable: rule.panel === "left",
      onElementClick: (element) => this.clickElement("left", element),
    });
    renderStructure(this.svgGroup("board-right"), rightBoard.structure, rightPoints, {
      panel: "right",
      pinned: rightBoard.tuple,
      selection: rule.panel === "right" ? this.selection : [],
      highlight: challengePanel === "right" ? highlight : [],
      clickable: rule.panel === "right",
      onElementClick: (element) => this.clickElement("right", element),
    });
    renderPairingLines(
      this.svgGroup("pairing-lines"),
      leftPoints,
      leftBoard.tuple,
      { x: 0, y: 0 },
      rightPoints,
      rightBoard.tuple,
      { x: BOARD_WIDTH + BOARD_GAP, y: 0 },
    );

    const titleLeft = this.el("title-left");
    const titleRight = this.el("title-right");
    titleLeft.textContent = `left structure (${leftBoard.structure.universe} elements)`;
    titleRight.textContent = `right structure (${rightBoard.structure.universe} elements)`;
    titleLeft.classList.toggle("active-panel", rule.panel === "left");
    titleRight.classList.toggle("active-panel", rule.panel === "right");
    if (rule.panel === "left") titleLeft.textContent += " · your move goes here";
    if (rule.panel === "right") titleRight.textContent += " · your move goes here";
  }

  private renderChips(state: SessionState): void {
    const pending = this.el("pending-chips");
    pending.replaceChildren();
    for (const element of state.pending_challenge ?? []) {
      pending.appendChild(chip(String(element)));
    }
    if ((state.pending_challenge ?? []).length === 0) {
      pending.appendChild(chip(state.pending_challenge === null ? "—" : "empty tuple"));
    }

    const chips = this.el("selection-chips");
    chips.replaceChildren();
    for (const element of this.selection) chips.appendChild(chip(String(element)));
    if (this.selection.length === 0) chips.appendChild(chip("empty tuple"));

    this.el<HTMLButtonElement>("submit-move").disabled =
      !submitCheck(state, this.selection).ok;
    this.el<HTMLButtonElement>("hint-button").disabled = state.status !== "in-progress";
  }

  private renderHint(state: SessionState): void {
    const panel = this.el("hint-panel");
    if (!this.hint) {
      panel.hidden = true;
      return;
    }
    panel.hidden = false;
    this.el("hint-text").textContent =
      `${this.hint.side} hint (${this.hint.label}): ${this.hint.explanation} — move (${this.hint.move.join(", ")})`;
    const formulaEl = this.el("hint-formula");
    if (this.hint.formula) {
      formulaEl.hidden = false;
      formulaEl.textContent = prettyFormula(this.hint.formula);
    } else {
      formulaEl.hidden = true;
      formulaEl.textContent = "";
    }
    const humanSide = state.mode === "human-spoiler" ? "spoiler" : "duplicator";
    this.el<HTMLButtonElement>("use-hint").hidden =
      this.hint.side !== humanSide || state.awaiting !== humanSide;
  }

  private renderHistory(state: SessionState): void {
    const list = this.el("history-list");
    list.replaceChildren();
    state.history.forEach((entry, index) => {
      const item = document.createElement("li");
      const tupleText = entry.tuple.length > 0 ? `(${entry.tuple.join(", ")})` : "(empty)";
      item.textContent =
        `${entry.side} (${entry.by}) into ${entry.into}: ${tupleText}` +
        (entry.label ? ` · ${entry.label}` : "");
      item.dataset.index = String(index);
      list.appendChild(item);
    });
  }
}

function chip(text: string): HTMLSpanElement {
  const span = document.createElement("span");
  span.className = "chip";
  span.textContent = text;
  return span;
}
