/** Revision diff and explicit-link inspection.
 *
 * Side-by-side aligned paragraph/section rows with added, deleted and
 * modified highlighting; explicit anchors render as chips that focus
 * their resolved target row, with unresolved chips styled separately
 * and the reason in the tooltip.  If the alignment or explicit layer is
 * missing, the view explains what is absent instead of rendering an
 * empty shell. */

import { ApiClient, ApiError } from "../api.js";
import { ancestorAt, attrEscape, nodeIndex, structureOrder } from "../graphutil.js";
import type { AlignmentJson, ExplicitLinkRow, GraphJson } from "../types.js";

export class DiffView {
  alignment: AlignmentJson | null = null;
  explicit: ExplicitLinkRow[] = [];
  missingLayer: string | null = null;
  private oldGraph: GraphJson | null = null;
  private newGraph: GraphJson | null = null;
  private focusedRow: string | null = null;
  private root: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly projectId: string,
    private readonly paperDoc: string,
  ) {}

  async load(from = "v1", to = "v2"): Promise<void> {
    this.missingLayer = null;
    try {
      this.alignment = await this.api.alignment(this.projectId, from, to);
      this.oldGraph = await this.api.document(
        this.projectId, this.paperDoc, Number(from.replace(/^v/, "")));
      this.newGraph = await this.api.document(
        this.projectId, this.paperDoc, Number(to.replace(/^v/, "")));
    } catch (err) {
      if (err instanceof ApiError && (err.status === 404 || err.status === 409)) {
        this.missingLayer = `no aligned revision available (${err.detail})`;
      } else {
        throw err;
      }
    }
    try {
      this.explicit = (await this.api.explicitLinks(this.projectId)).links;
    } catch {
      this.explicit = [];
    }
    this.refresh();
  }

  /** Chip targets may be sentences or payload nodes; focus the nearest
   * paragraph or section row that represents them in the table. */
  focusTarget(nodeId: string): void {
    let rowId = nodeId;
    if (this.oldGraph) {
      const kind = nodeIndex(this.oldGraph).get(nodeId)?.kind;
      if (kind && kind !== "paragraph" && kind !== "section-title") {
        rowId =
          ancestorAt(this.oldGraph, nodeId, "paragraph") ??
          ancestorAt(this.oldGraph, nodeId, "section-title") ??
          nodeId;
      }
    }
    this.focusedRow = rowId;
    this.refresh();
    const row = this.root?.querySelector(`[data-node-id="${attrEscape(rowId)}"]`);
    (row as HTMLElement | null)?.scrollIntoView?.({ block: "center" });
  }

  render(root: HTMLElement): void {
    this.root = root;
    this.refresh();
  }

  refresh(): void {
    if (!this.root) return;
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.classList.add("diff-view");

    if (this.missingLayer) {
      const empty = doc.createElement("div");
      empty.dataset.test = "empty-state";
      empty.textContent = this.missingLayer;
      this.root.append(empty);
      return;
    }
    if (!this.alignment || !this.oldGraph || !this.newGraph) {
      const loading = doc.createElement("div");
      loading.dataset.test = "diff-loading";
      loading.textContent = "loading alignment…";
      this.root.append(loading);
      return;
    }

    // explicit-anchor chips
    const chips = doc.createElement("div");
    chips.dataset.test = "anchor-chips";
    for (const row of this.explicit) {
      const chip = doc.createElement("button");
      chip.dataset.test = "chip";
      chip.textContent = `${row.type}: ${row.surface}`;
      if (row.target) {
        chip.className = "chip resolved";
        const target = row.target;
        chip.addEventListener("click", () => this.focusTarget(target));
      } else {
        chip.className = "chip unresolved";
        chip.title = row.reason ?? "unresolved";
      }
      chips.append(chip);
    }
    this.root.append(chips);

    const oldById = nodeIndex(this.oldGraph);
    const oldOf = new Map(this.alignment.edges.map((e) => [e.new, e]));
    const added = new Set(this.alignment.added);
    const modified = new Set(this.alignment.modified.map((e) => e.new));

    const table = doc.createElement("table");
    table.dataset.test = "diff-table";
    for (const node of structureOrder(this.newGraph, this.paperDoc)) {
      const row = doc.createElement("tr");
      row.dataset.nodeId = node.id;
      const oldCell = doc.createElement("td");
      const newCell = doc.createElement("td");
      newCell.textContent = node.content;
      const edge = oldOf.get(node.id);
      if (edge) {
        oldCell.textContent = oldById.get(edge.old)?.content ?? edge.old;
        oldCell.dataset.nodeId = edge.old;
        row.className = modified.has(node.id) ? "diff-modified" : "diff-unchanged";
      } else if (added.has(node.id)) {
        row.className = "diff-added";
      }
      if (node.id === this.focusedRow ||
          (edge && edge.old === this.focusedRow)) {
        row.classList.add("focused");
      }
      row.append(oldCell, newCell);
      table.append(row);
    }
    for (const nodeId of this.alignment.deleted) {
      const row = doc.createElement("tr");
      row.className = "diff-deleted";
      row.dataset.nodeId = nodeId;
      if (nodeId === this.focusedRow) row.classList.add("focused");
      const oldCell = doc.createElement("td");
      oldCell.textContent = oldById.get(nodeId)?.content ?? nodeId;
      row.append(oldCell, doc.createElement("td"));
      table.append(row);
    }
    this.root.append(table);
  }
}
