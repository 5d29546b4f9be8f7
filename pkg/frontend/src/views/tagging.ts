/** Pragmatic tagging: review sentences in reading order, one of six
 * labels per sentence via click or hotkeys 1..6, progress indicator.
 * A sentence badge turns "saved" only after the service confirmed the
 * record; queued records show as "unsynced". */

import { labelKey, SessionState } from "../state.js";
import { sentencesInOrder } from "../graphutil.js";
import { PRAGMATIC_LABELS } from "../types.js";
import type { GraphJson, GraphNode, PragmaticLabel, PragmaticRecord } from "../types.js";

export class TaggingView {
  readonly sentences: GraphNode[];
  private labels = new Map<string, string>();
  private root: HTMLElement | null = null;

  constructor(
    private readonly session: SessionState,
    reviewDoc: string,
    reviewGraph: GraphJson,
    savedRecords: PragmaticRecord[],
  ) {
    this.sentences = sentencesInOrder(reviewGraph, reviewDoc);
    for (const record of savedRecords) {
      if (record.annotator === session.annotator) {
        this.labels.set(record.node, record.label);
        session.markSaved(labelKey({ kind: "pragmatic", ...record }));
      }
    }
    session.onChange(() => this.refresh());
  }

  labeledCount(): number {
    return this.sentences.filter((s) => this.labels.has(s.id)).length;
  }

  labelOf(sentenceId: string): string | undefined {
    return this.labels.get(sentenceId);
  }

  current(): GraphNode | undefined {
    return this.sentences[this.session.cursor];
  }

  moveCursor(delta: number): void {
    const max = this.sentences.length - 1;
    this.session.cursor = Math.min(max, Math.max(0, this.session.cursor + delta));
    this.refresh();
  }

  assign(label: PragmaticLabel): Promise<void> {
    const sentence = this.current();
    if (!sentence) return Promise.resolve();
    this.labels.set(sentence.id, label);
    const done = this.session.enqueue({
      kind: "pragmatic",
      node: sentence.id,
      label,
      annotator: this.session.annotator,
    });
    this.moveCursor(1);
    return done;
  }

  handleKey(event: KeyboardEvent): void {
    const index = Number(event.key) - 1;
    if (index >= 0 && index < PRAGMATIC_LABELS.length) {
      void this.assign(PRAGMATIC_LABELS[index]);
    } else if (event.key === "ArrowDown" || event.key === "j") {
      this.moveCursor(1);
    } else if (event.key === "ArrowUp" || event.key === "k") {
      this.moveCursor(-1);
    }
  }

  render(root: HTMLElement): void {
    this.root = root;
    this.refresh();
  }

  refresh(): void {
    if (!this.root) return;
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.classList.add("tagging-view");

    const progress = doc.createElement("div");
    progress.dataset.test = "progress";
    progress.className = "progress";
    progress.textContent = `${this.labeledCount()}/${this.sentences.length} labeled`;
    if (this.session.status === "offline") {
      const retry = doc.createElement("button");
      retry.dataset.test = "retry";
      retry.textContent = "offline - retry sync";
      retry.addEventListener("click", () => void this.session.retry());
      progress.append(" ", retry);
    }
    this.root.append(progress);

    const list = doc.createElement("ol");
    list.className = "sentences";
    this.sentences.forEach((sentence, i) => {
      const item = doc.createElement("li");
      item.dataset.sentenceId = sentence.id;
      if (i === this.session.cursor) item.classList.add("current");

      const text = doc.createElement("span");
      text.className = "text";
      text.textContent = sentence.content;
      item.append(text);

      const label = this.labels.get(sentence.id);
      if (label) {
        const badge = doc.createElement("span");
        const state = this.session.recordState(
          labelKey({ kind: "pragmatic", node: sentence.id, label, annotator: this.session.annotator }),
        );
        badge.dataset.test = "badge";
        badge.className = state === "saved" ? "badge saved" : "badge unsynced";
        badge.textContent = state === "saved" ? label : `${label} (unsynced)`;
        item.append(" ", badge);
      }

      const buttons = doc.createElement("span");
      buttons.className = "label-buttons";
      PRAGMATIC_LABELS.forEach((name, k) => {
        const button = doc.createElement("button");
        button.dataset.label = name;
        button.textContent = `${k + 1} ${name}`;
        button.addEventListener("click", () => {
          this.session.cursor = i;
          void this.assign(name);
        });
        buttons.append(button);
      });
      item.append(" ", buttons);
      list.append(item);
    });
    this.root.append(list);
  }
}
