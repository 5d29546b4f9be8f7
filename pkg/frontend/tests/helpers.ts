/** Shared test doubles: a tiny two-document graph pair and an in-memory
 * service stand-in for the view tests. */

import type { ApiClient } from "../src/api.js";
import type {
  GraphJson,
  PostLabelBody,
  StoredLabels,
  SuggestionSet,
} from "../src/types.js";

export function reviewGraph(): GraphJson {
  const sentences = Array.from({ length: 12 }, (_, i) => `Review sentence ${i + 1}.`);
  const nodes = [
    { id: "rv:r", doc: "rv", kind: "review-report", content: "", meta: {} },
    { id: "rv:p", doc: "rv", kind: "paragraph", content: sentences.join(" "), meta: {} },
    ...sentences.map((content, i) => ({
      id: `rv:s${i + 1}`, doc: "rv", kind: "sentence", content, meta: {},
    })),
  ];
  const edges = [
    { id: "e1", src: "rv:p", dst: "rv:r", kind: "parent" as const },
    ...sentences.map((_, i) => ({
      id: `ep${i}`, src: `rv:s${i + 1}`, dst: "rv:p", kind: "parent" as const,
    })),
    ...sentences.slice(1).map((_, i) => ({
      id: `en${i}`, src: `rv:s${i + 1}`, dst: `rv:s${i + 2}`, kind: "next" as const,
    })),
  ];
  return { documents: [{ id: "rv", version: 1 }], nodes, edges };
}

export function paperGraph(): GraphJson {
  const nodes = [
    { id: "pp:t", doc: "pp", kind: "article-title", content: "T", meta: {} },
    { id: "pp:sec1", doc: "pp", kind: "section-title", content: "Methods", meta: {} },
    { id: "pp:p1", doc: "pp", kind: "paragraph", content: "First paper paragraph.", meta: {} },
    { id: "pp:p1.s1", doc: "pp", kind: "sentence", content: "Alpha paper sentence.", meta: {} },
    { id: "pp:p1.s2", doc: "pp", kind: "sentence", content: "Beta paper sentence.", meta: {} },
    { id: "pp:p2", doc: "pp", kind: "paragraph", content: "Second paper paragraph.", meta: {} },
    { id: "pp:p2.s1", doc: "pp", kind: "sentence", content: "Gamma paper sentence.", meta: {} },
  ];
  const edges = [
    { id: "e1", src: "pp:sec1", dst: "pp:t", kind: "parent" as const },
    { id: "e2", src: "pp:p1", dst: "pp:sec1", kind: "parent" as const },
    { id: "e3", src: "pp:p1.s1", dst: "pp:p1", kind: "parent" as const },
    { id: "e4", src: "pp:p1.s2", dst: "pp:p1", kind: "parent" as const },
    { id: "e5", src: "pp:p2", dst: "pp:sec1", kind: "parent" as const },
    { id: "e6", src: "pp:p2.s1", dst: "pp:p2", kind: "parent" as const },
    { id: "e7", src: "pp:p1.s1", dst: "pp:p1.s2", kind: "next" as const },
    { id: "e8", src: "pp:p1.s2", dst: "pp:p2.s1", kind: "next" as const },
  ];
  return { documents: [{ id: "pp", version: 1 }], nodes, edges };
}

export class FakeService {
  posted: PostLabelBody[] = [];
  failNext = 0;
  suggestionOrder = ["pp:p2.s1", "pp:p1.s1", "pp:p1.s2"];

  async postLabel(_project: string, body: PostLabelBody): Promise<Record<string, unknown>> {
    if (this.failNext > 0) {
      this.failNext -= 1;
      throw new Error("connection refused");
    }
    this.posted.push(body);
    return { ...body, ts: this.posted.length };
  }

  async suggestions(_project: string, sentence: string): Promise<SuggestionSet> {
    return {
      review_sentence: sentence,
      m: 3,
      candidates: this.suggestionOrder.map((node) => ({ node, methods: ["bm25"] })),
      method_order: ["bm25"],
    };
  }

  async labels(_project: string): Promise<StoredLabels> {
    return { pragmatics: [], links: [] };
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}
