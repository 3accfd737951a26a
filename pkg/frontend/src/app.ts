// The writing workbench: editor pane on the left, one summary card per
// paragraph in the sidebar, level buttons in the toolbar, and a background
// update indicator. All document state lives on the server; this component
// renders it and forwards interactions.

import {
  ApiClient,
  Card,
  CardCell,
  LevelName,
  MergeSuggestion,
} from "./api";
import { HighlightSpan, renderBackdrop } from "./highlight";
import { splitParagraphBlocks } from "./paragraphs";

export interface AppOptions {
  debounceMs?: number;
  statusPollMs?: number;
  highlightMs?: number;
}

export const LEVELS: { name: LevelName; label: string }[] = [
  { name: "original", label: "Original" },
  { name: "central", label: "Central sentence" },
  { name: "summary", label: "Summary" },
  { name: "keywords", label: "Keywords" },
];

interface MergeState {
  aIndex: number;
  bIndex: number;
  suggestion: MergeSuggestion;
}

export function cellText(cell: CardCell): string {
  if ("text" in cell) return cell.text;
  if ("keywords" in cell) return cell.keywords.join(", ");
  return cell.summary;
}

export class App {
  readonly root: HTMLElement;
  readonly client: ApiClient;

  sessionId = "";
  level: LevelName = "original";
  cards: Card[] = [];
  mergeState: MergeState | null = null;
  pending = 0;

  private editor!: HTMLTextAreaElement;
  private backdrop!: HTMLDivElement;
  private sidebar!: HTMLDivElement;
  private toolbar!: HTMLDivElement;
  private indicator!: HTMLSpanElement;

  private readonly debounceMs: number;
  private readonly statusPollMs: number;
  private readonly highlightMs: number;

  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private statusTimer: ReturnType<typeof setInterval> | null = null;
  private editorFlashTimer: ReturnType<typeof setTimeout> | null = null;
  private cardFlashTimer: ReturnType<typeof setTimeout> | null = null;

  private cardsSeq = 0;
  private renderedRevision = -1;
  private dragFrom: number | null = null;

  constructor(root: HTMLElement, client: ApiClient, options: AppOptions = {}) {
    this.root = root;
    this.client = client;
    this.debounceMs = options.debounceMs ?? 500;
    this.statusPollMs = options.statusPollMs ?? 500;
    this.highlightMs = options.highlightMs ?? 1000;
  }

  async init(): Promise<void> {
    const session = await this.client.createSession();
    this.sessionId = session.session_id;
    this.buildSkeleton();
    this.statusTimer = setInterval(() => void this.pollStatus(), this.statusPollMs);
    await this.refreshCards();
  }

  destroy(): void {
    if (this.statusTimer) clearInterval(this.statusTimer);
    if (this.debounceTimer) clearTimeout(this.debounceTimer);
  }

  private buildSkeleton(): void {
    this.root.innerHTML = `
      <div class="toolbar">
        <div class="levels"></div>
        <span class="indicator" title="background updates">✓</span>
      </div>
      <div class="workspace">
        <div class="editor-pane">
          <div class="backdrop" aria-hidden="true"></div>
          <textarea class="editor" spellcheck="false"
            placeholder="Write here; paragraphs are separated by blank lines."></textarea>
        </div>
        <div class="sidebar"></div>
      </div>`;
    this.editor = this.root.querySelector(".editor")!;
    this.backdrop = this.root.querySelector(".backdrop")!;
    this.sidebar = this.root.querySelector(".sidebar")!;
    this.toolbar = this.root.querySelector(".levels")!;
    this.indicator = this.root.querySelector(".indicator")!;

    for (const { name, label } of LEVELS) {
      const button = document.createElement("button");
      button.className = "level-button";
      button.dataset.level = name;
      button.textContent = label;
      button.addEventListener("click", () => void this.setLevel(name));
      this.toolbar.appendChild(button);
    }

    this.editor.addEventListener("input", () => this.handleInput());
    this.editor.addEventListener("click", () => this.highlightCardAtCaret());
    this.editor.addEventListener("scroll", () => {
      this.backdrop.scrollTop = this.editor.scrollTop;
    });
    this.paintBackdrop([]);
    this.updateToolbar();
  }

  // -- text editing ---------------------------------------------------------

  handleInput(): void {
    if (this.mergeState) return;
    if (this.debounceTimer) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => void this.syncText(), this.debounceMs);
    this.paintBackdrop([]);
  }

  async syncText(): Promise<void> {
    this.debounceTimer = null;
    await this.client.putText(this.sessionId, this.editor.value);
    await this.refreshCards();
  }

  /** Pending debounce flushed immediately (used by tests and blur). */
  async flushPendingEdit(): Promise<void> {
    if (this.debounceTimer) {
      clearTimeout(this.debounceTimer);
      await this.syncText();
    }
  }

  // -- cards ---------------------------------------------------------------

  async setLevel(level: LevelName): Promise<void> {
    if (this.mergeState) return;
    this.level = level;
    this.updateToolbar();
    await this.refreshCards();
  }

  async refreshCards(): Promise<void> {
    const seq = ++this.cardsSeq;
    const response = await this.client.getCards(this.sessionId, this.level);
    // Drop stale responses: a newer fetch started, or an older revision came back.
    if (seq !== this.cardsSeq || response.revision < this.renderedRevision) return;
    this.renderedRevision = response.revision;
    this.cards = response.cards;
    this.renderCards();
  }

  renderCards(): void {
    this.sidebar.innerHTML = "";
    for (const card of this.cards) {
      this.sidebar.appendChild(this.buildCard(card));
    }
    if (this.mergeState) {
      this.renderMergeOverlay();
    } else {
      this.root.classList.remove("merge-mode");
      this.editor.readOnly = false;
      for (const button of this.toolbar.querySelectorAll("button")) {
        (button as HTMLButtonElement).disabled = false;
      }
    }
  }

  private buildCard(card: Card): HTMLElement {
    const element = document.createElement("div");
    element.className = "card";
    element.dataset.index = String(card.index);
    element.draggable = true;

    const header = document.createElement("div");
    header.className = "card-header";
    header.textContent = `¶ ${card.index + 1}`;

    const content = document.createElement("div");
    content.className = "card-content";
    content.textContent = cellText(card.content);

    const footer = document.createElement("div");
    footer.className = "card-footer";
    const copy = document.createElement("button");
    copy.className = "card-copy";
    copy.textContent = "Copy to clipboard";
    copy.addEventListener("click", (event) => {
      event.stopPropagation();
      void this.copyCard(card.index);
    });
    const remove = document.createElement("button");
    remove.className = "card-delete";
    remove.textContent = "Delete";
    remove.addEventListener("click", (event) => {
      event.stopPropagation();
      void this.deleteCard(card.index);
    });
    footer.append(copy, remove);

    element.append(header, content, footer);
    element.addEventListener("click", () => this.clickCard(card.index));
    element.addEventListener("dragstart", (event) => {
      if (this.mergeState) {
        event.preventDefault();
        return;
      }
      this.dragFrom = card.index;
      event.dataTransfer?.setData("text/plain", String(card.index));
    });
    element.addEventListener("dragover", (event) => event.preventDefault());
    element.addEventListener("drop", (event) => {
      event.preventDefault();
      if (this.dragFrom === null || this.mergeState) return;
      const from = this.dragFrom;
      this.dragFrom = null;
      if (from === card.index) return;
      // Dropping onto the upper/lower edge reorders; onto the body merges.
      const target = event.currentTarget as HTMLElement;
      const rect = target.getBoundingClientRect();
      const ratio = rect.height > 0 ? (event.clientY - rect.top) / rect.height : 0.5;
      if (ratio < 0.25 || ratio > 0.75) {
        void this.reorderCards(from, card.index);
      } else {
        void this.startMerge(from, card.index);
      }
    });
    return element;
  }

  // -- interactions ----------------------------------------------------------

  clickCard(index: number): void {
    if (this.mergeState) return;
    const blocks = splitParagraphBlocks(this.editor.value);
    const block = blocks[index];
    if (!block) return;
    this.scrollEditorTo(block.start);
    this.paintBackdrop([{ start: block.start, end: block.end, kind: "flash" }]);
    if (this.editorFlashTimer) clearTimeout(this.editorFlashTimer);
    this.editorFlashTimer = setTimeout(() => this.paintBackdrop([]), this.highlightMs);
  }

  highlightCardAtCaret(): void {
    if (this.mergeState) return;
    const caret = this.editor.selectionStart ?? 0;
    const blocks = splitParagraphBlocks(this.editor.value);
    const block = blocks.find((b) => caret >= b.start && caret <= b.end);
    if (!block) return;
    for (const element of this.sidebar.querySelectorAll(".card")) {
      element.classList.toggle("card-flash", element.getAttribute("data-index") === String(block.index));
    }
    if (this.cardFlashTimer) clearTimeout(this.cardFlashTimer);
    this.cardFlashTimer = setTimeout(() => {
      for (const element of this.sidebar.querySelectorAll(".card-flash")) {
        element.classList.remove("card-flash");
      }
    }, this.highlightMs);
  }

  async copyCard(index: number): Promise<void> {
    if (this.mergeState) return;
    const card = this.cards.find((c) => c.index === index);
    if (!card) return;
    await navigator.clipboard?.writeText(cellText(card.content));
  }

  async deleteCard(index: number): Promise<void> {
    if (this.mergeState) return;
    const response = await this.client.deleteCard(this.sessionId, index);
    this.editor.value = response.text;
    this.paintBackdrop([]);
    await this.refreshCards();
  }

  async reorderCards(from: number, to: number): Promise<void> {
    if (this.mergeState) return;
    const response = await this.client.reorder(this.sessionId, from, to);
    this.editor.value = response.text;
    this.paintBackdrop([]);
    await this.refreshCards();
  }

  // -- merge mode -------------------------------------------------------------

  async startMerge(aIndex: number, bIndex: number): Promise<void> {
    if (this.mergeState) return;
    await this.flushPendingEdit();
    const suggestion = await this.client.mergePreview(this.sessionId, aIndex, bIndex);
    this.mergeState = { aIndex, bIndex, suggestion };
    this.renderCards();
    this.paintMergeSpans();
  }

  cancelMerge(): void {
    this.mergeState = null;
    this.paintBackdrop([]);
    this.renderCards();
  }

  async acceptMerge(): Promise<void> {
    const state = this.mergeState;
    if (!state) return;
    const response = await this.client.mergeAccept(
      this.sessionId,
      state.aIndex,
      state.bIndex,
      state.suggestion,
    );
    this.mergeState = null;
    this.editor.value = response.text;
    this.paintBackdrop([]);
    await this.refreshCards();
  }

  private renderMergeOverlay(): void {
    const state = this.mergeState!;
    this.root.classList.add("merge-mode");
    this.editor.readOnly = true;
    for (const button of this.toolbar.querySelectorAll("button")) {
      (button as HTMLButtonElement).disabled = true;
    }
    for (const element of this.sidebar.querySelectorAll(".card")) {
      element.classList.add("card-muted");
      (element as HTMLElement).draggable = false;
      for (const button of element.querySelectorAll("button")) {
        (button as HTMLButtonElement).disabled = true;
      }
    }

    const banner = document.createElement("div");
    banner.className = "merge-banner";
    banner.textContent = "Merge suggestion: accept or cancel to continue.";

    const mergeCard = document.createElement("div");
    mergeCard.className = "card merge-card";
    const content = document.createElement("div");
    content.className = "card-content";
    content.textContent = state.suggestion.merged;
    const footer = document.createElement("div");
    footer.className = "card-footer";
    const accept = document.createElement("button");
    accept.className = "merge-accept";
    accept.textContent = "Replace";
    accept.addEventListener("click", () => void this.acceptMerge());
    const copy = document.createElement("button");
    copy.className = "merge-copy";
    copy.textContent = "Copy to clipboard";
    copy.addEventListener("click", () => {
      void navigator.clipboard?.writeText(state.suggestion.merged);
    });
    const cancel = document.createElement("button");
    cancel.className = "merge-cancel";
    cancel.textContent = "Cancel";
    cancel.addEventListener("click", () => this.cancelMerge());
    footer.append(accept, copy, cancel);
    mergeCard.append(content, footer);

    this.sidebar.prepend(banner, mergeCard);
  }

  private paintMergeSpans(): void {
    const state = this.mergeState;
    if (!state) return;
    const blocks = splitParagraphBlocks(this.editor.value);
    const byPid: Record<string, number> = { A: state.aIndex, B: state.bIndex };
    const spans: HighlightSpan[] = [];
    const add = (tuples: [string, number, number, number][], kind: "retained" | "cut") => {
      for (const [pid, , start, end] of tuples) {
        const block = blocks[byPid[pid]];
        if (!block) continue;
        spans.push({ start: block.start + start, end: block.start + end, kind });
      }
    };
    add(state.suggestion.retained_spans, "retained");
    add(state.suggestion.cut_spans, "cut");
    this.paintBackdrop(spans);
  }

  // -- status / painting -------------------------------------------------------

  async pollStatus(): Promise<void> {
    const status = await this.client.getStatus(this.sessionId);
    this.pending = status.pending;
    this.indicator.textContent = status.pending > 0 ? "⟳" : "✓";
    this.indicator.classList.toggle("spinning", status.pending > 0);
  }

  private paintBackdrop(spans: HighlightSpan[]): void {
    this.backdrop.innerHTML = renderBackdrop(this.editor.value, spans);
  }

  private scrollEditorTo(offset: number): void {
    // Approximate: hard-wrapped line count times the computed line height.
    const line = this.editor.value.slice(0, offset).split("\n").length - 1;
    const lineHeight = parseFloat(getComputedStyle(this.editor).lineHeight) || 20;
    this.editor.scrollTop = line * lineHeight;
    this.backdrop.scrollTop = this.editor.scrollTop;
  }

  private updateToolbar(): void {
    for (const button of this.toolbar.querySelectorAll(".level-button")) {
      button.classList.toggle(
        "active",
        (button as HTMLElement).dataset.level === this.level,
      );
    }
  }
}
