/** Client-side helpers over graph JSON: reading order, hierarchy lookups. */

import type { GraphJson, GraphNode } from "./types.js";

/** Escape a value for use inside a double-quoted attribute selector. */
export function attrEscape(value: string): string {
  return value.replace(/["\\]/g, "\\$&");
}

export function nodeIndex(graph: GraphJson): Map<string, GraphNode> {
  return new Map(graph.nodes.map((n) => [n.id, n]));
}

/** Leaf nodes of one document in next-chain order. */
export function readingOrder(graph: GraphJson, doc: string): string[] {
  const inDoc = new Set(
    graph.nodes.filter((n) => n.doc === doc).map((n) => n.id),
  );
  const hasChildren = new Set<string>();
  for (const e of graph.edges) {
    if (e.kind === "parent" && inDoc.has(e.dst)) hasChildren.add(e.dst);
  }
  const leaves = graph.nodes
    .filter((n) => n.doc === doc && !hasChildren.has(n.id))
    .map((n) => n.id);
  const next = new Map<string, string>();
  const hasIncoming = new Set<string>();
  for (const e of graph.edges) {
    if (e.kind === "next" && inDoc.has(e.src)) {
      next.set(e.src, e.dst);
      hasIncoming.add(e.dst);
    }
  }
  if (leaves.length <= 1) return leaves;
  const head = leaves.find((id) => !hasIncoming.has(id));
  if (!head) return leaves;
  const order: string[] = [];
  let cursor: string | undefined = head;
  const seen = new Set<string>();
  while (cursor && !seen.has(cursor)) {
    order.push(cursor);
    seen.add(cursor);
    cursor = next.get(cursor);
  }
  return order;
}

export function sentencesInOrder(graph: GraphJson, doc: string): GraphNode[] {
  const byId = nodeIndex(graph);
  return readingOrder(graph, doc)
    .map((id) => byId.get(id)!)
    .filter((n) => n.kind === "sentence");
}

/** Nearest ancestor of the given kind via parent edges; reflexive. */
export function ancestorAt(
  graph: GraphJson,
  nodeId: string,
  kind: string,
): string | null {
  const byId = nodeIndex(graph);
  const parent = new Map<string, string>();
  for (const e of graph.edges) {
    if (e.kind === "parent") parent.set(e.src, e.dst);
  }
  let cursor: string | undefined = nodeId;
  while (cursor) {
    if (byId.get(cursor)?.kind === kind) return cursor;
    cursor = parent.get(cursor);
  }
  return null;
}

/** Paragraph/section-title nodes in tree order (matches the aligner). */
export function structureOrder(graph: GraphJson, doc: string): GraphNode[] {
  return graph.nodes.filter(
    (n) => n.doc === doc && (n.kind === "paragraph" || n.kind === "section-title"),
  );
}
