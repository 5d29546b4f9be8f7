/** Suggestion-based implicit linking.
 *
 * Left pane: the current review sentence with its neighbours.  Right
 * pane: the suggested paper sentences exactly in service order (the UI
 * never re-ranks), each with linked / not-linked toggles and a
 * jump-to-context control into the full paper pane.  Any paper sentence
 * can also be selected manually through the search box; manual pairs
 * post with source=manual.  Labeling every suggestion advances to the
 * next review sentence. */

import type { ApiClient } from "../api.js";
import { labelKey, SessionState } from "../state.js";
import { ancestorAt, attrEscape, nodeIndex, sentencesInOrder } from "../graphutil.js";
import type { GraphJson, GraphNode, LinkRecord, SuggestionSet } from "../types.js";

type Verdict = "linked" | "not-linked";

export class LinkingView {
  readonly reviewSentences: GraphNode[];
  readonly paperSentences: GraphNode[];
  private verdicts = new Map<string, Verdict>(); // "review|paper"
  private suggestions: SuggestionSet | null = null;
  private fetchError: string | null = null;
  private searchTerm = "";
  private focusedParagraph: string | null = null;
  private root: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly session: SessionState,
    reviewDoc: string,
    reviewGraph: GraphJson,
    paperDoc: string,
    private readonly paperGraph: GraphJson,
    savedRecords: LinkRecord[],
  ) {
    this.reviewSentences = sentencesInOrder(reviewGraph, reviewDoc);
    this.paperSentences = sentencesInOrder(paperGraph, paperDoc);
    for (const record of savedRecords) {
      if (record.annotator === session.annotator) {
        this.verdicts.set(`${record.review}|${record.paper}`, record.verdict);
        session.markSaved(labelKey({ kind: "link", ...record }));
      }
    }
    session.onChange(() => this.refresh());
  }

  current(): GraphNode | undefined {
    return this.reviewSentences[this.session.cursor];
  }

  currentSuggestions(): SuggestionSet | null {
    return this.suggestions;
  }

  verdictOf(review: string, paper: string): Verdict | undefined {
    return this.verdicts.get(`${review}|${paper}`);
  }

  async loadSuggestions(): Promise<void> {
    const sentence = this.current();
    if (!sentence) return;
    this.suggestions = null;
    this.fetchError = null;
    try {
      this.suggestions = await this.api.suggestions(this.session.projectId, sentence.id);
    } catch (err) {
      this.fetchError = err instanceof Error ? err.message : String(err);
    }
    this.refresh();
  }

  /** All current suggestions carry a verdict (queued or saved). */
  allSuggestionsLabeled(): boolean {
    const sentence = this.current();
    if (!sentence || !this.suggestions) return false;
    return this.suggestions.candidates.every((c) =>
      this.verdicts.has(`${sentence.id}|${c.node}`),
    );
  }

  setVerdict(paperNode: string, verdict: Verdict, source: "suggested" | "manual" = "suggested"):
      Promise<void> {
    const sentence = this.current();
    if (!sentence) return Promise.resolve();
    this.verdicts.set(`${sentence.id}|${paperNode}`, verdict);
    const done = this.session.enqueue({
      kind: "link",
      review: sentence.id,
      paper: paperNode,
      verdict,
      annotator: this.session.annotator,
      source,
    });
    if (source === "suggested" && this.allSuggestionsLabeled()) {
      this.advance();
    } else {
      this.refresh();
    }
    return done;
  }

  advance(): void {
    if (this.session.cursor < this.reviewSentences.length - 1) {
      this.session.cursor += 1;
    }
    this.suggestions = null;
    this.focusedParagraph = null;
    void this.loadSuggestions();
  }

  jumpToContext(paperNode: string): void {
    this.focusedParagraph =
      ancestorAt(this.paperGraph, paperNode, "paragraph") ?? paperNode;
    this.refresh();
    const target = this.root?.querySelector(
      `[data-paragraph-id="${attrEscape(this.focusedParagraph)}"]`,
    );
    (target as HTMLElement | null)?.scrollIntoView?.({ block: "center" });
  }

  search(term: string): GraphNode[] {
    this.searchTerm = term;
    const needle = term.toLowerCase();
    if (!needle) return [];
    return this.paperSentences.filter((s) => s.content.toLowerCase().includes(needle));
  }

  render(root: HTMLElement): void {
    this.root = root;
    this.refresh();
  }

  refresh(): void {
    if (!this.root) return;
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.classList.add("linking-view");

    const left = doc.createElement("section");
    left.className = "review-pane";
    const sentence = this.current();
    const context = doc.createElement("div");
    context.dataset.test = "review-context";
    for (const offset of [-1, 0, 1]) {
      const neighbour = this.reviewSentences[this.session.cursor + offset];
      if (!neighbour) continue;
      const p = doc.createElement("p");
      p.textContent = neighbour.content;
      if (offset === 0) {
        p.className = "current";
        p.dataset.test = "current-sentence";
        p.dataset.sentenceId = neighbour.id;
      }
      context.append(p);
    }
    left.append(context);

    const right = doc.createElement("section");
    right.className = "suggestion-pane";
    if (this.fetchError) {
      const error = doc.createElement("div");
      error.dataset.test = "suggestion-error";
      error.textContent = `suggestions unavailable: ${this.fetchError}`;
      const retry = doc.createElement("button");
      retry.dataset.test = "suggestion-retry";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.loadSuggestions());
      error.append(" ", retry);
      right.append(error);
    } else if (this.suggestions && sentence) {
      const byId = nodeIndex(this.paperGraph);
      const list = doc.createElement("ol");
      list.dataset.test = "suggestions";
      for (const candidate of this.suggestions.candidates) {
        const item = doc.createElement("li");
        item.dataset.candidateId = candidate.node;
        const text = doc.createElement("span");
        text.textContent = byId.get(candidate.node)?.content ?? candidate.node;
        item.append(text);
        const verdict = this.verdicts.get(`${sentence.id}|${candidate.node}`);
        for (const choice of ["linked", "not-linked"] as const) {
          const button = doc.createElement("button");
          button.dataset.verdict = choice;
          button.textContent = choice;
          if (verdict === choice) {
            const saved = this.session.recordState(labelKey({
              kind: "link", review: sentence.id, paper: candidate.node,
              verdict: choice, annotator: this.session.annotator, source: "suggested",
            }));
            button.className = saved === "saved" ? "chosen saved" : "chosen unsynced";
          }
          button.addEventListener("click", () => void this.setVerdict(candidate.node, choice));
          item.append(" ", button);
        }
        const jump = doc.createElement("button");
        jump.dataset.test = "jump";
        jump.textContent = "context";
        jump.addEventListener("click", () => this.jumpToContext(candidate.node));
        item.append(" ", jump);
        list.append(item);
      }
      right.append(list);
    } else {
      const loading = doc.createElement("div");
      loading.dataset.test = "suggestions-loading";
      loading.textContent = "loading suggestions…";
      right.append(loading);
    }

    // manual pair selection
    const manual = doc.createElement("div");
    manual.className = "manual-select";
    const input = doc.createElement("input");
    input.dataset.test = "manual-search";
    input.value = this.searchTerm;
    input.placeholder = "search paper sentences…";
    input.addEventListener("input", () => {
      this.searchTerm = input.value;
      this.refresh();
      this.root?.querySelector<HTMLInputElement>('[data-test="manual-search"]')?.focus();
    });
    manual.append(input);
    if (this.searchTerm) {
      const hits = doc.createElement("ul");
      hits.dataset.test = "manual-hits";
      for (const hit of this.search(this.searchTerm).slice(0, 8)) {
        const item = doc.createElement("li");
        const button = doc.createElement("button");
        button.dataset.manualId = hit.id;
        button.textContent = hit.content;
        button.addEventListener("click", () =>
          void this.setVerdict(hit.id, "linked", "manual"));
        item.append(button);
        hits.append(item);
      }
      manual.append(hits);
    }
    right.append(manual);

    // full paper pane for jump-to-context
    const paper = doc.createElement("section");
    paper.className = "paper-pane";
    const byParagraph = new Map<string, GraphNode[]>();
    for (const s of this.paperSentences) {
      const para = ancestorAt(this.paperGraph, s.id, "paragraph") ?? s.id;
      byParagraph.set(para, [...(byParagraph.get(para) ?? []), s]);
    }
    for (const [para, sents] of byParagraph) {
      const block = doc.createElement("p");
      block.dataset.paragraphId = para;
      if (para === this.focusedParagraph) block.classList.add("focused");
      block.textContent = sents.map((s) => s.content).join(" ");
      paper.append(block);
    }

    this.root.append(left, right, paper);
  }
}
