/** Wire types mirroring the annotation service's JSON payloads. */

export interface DocumentRef {
  id: string;
  version: number;
}

export interface GraphNode {
  id: string;
  doc: string;
  kind: string;
  content: string;
  meta: Record<string, string>;
  payload?: string;
}

export interface GraphEdge {
  id: string;
  src: string;
  dst: string;
  kind: "next" | "parent" | "link";
  subtype?: string;
  provenance?: string;
}

export interface GraphJson {
  documents: DocumentRef[];
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export const PRAGMATIC_LABELS = [
  "Recap",
  "Weakness",
  "Strength",
  "Todo",
  "Structure",
  "Other",
] as const;
export type PragmaticLabel = (typeof PRAGMATIC_LABELS)[number];

export interface ProjectInfo {
  id: string;
  paper: string;
  versions: number[];
  reviews: string[];
  annotators: string[];
  suggestion: { methods: string[]; m: number };
}

export interface SuggestionCandidate {
  node: string;
  methods: string[];
}

export interface SuggestionSet {
  review_sentence: string;
  m: number;
  candidates: SuggestionCandidate[];
  method_order: string[];
}

export interface PragmaticRecord {
  node: string;
  label: string;
  annotator: string;
  ts: number;
}

export interface LinkRecord {
  review: string;
  paper: string;
  verdict: "linked" | "not-linked";
  annotator: string;
  ts: number;
  source: "suggested" | "manual";
}

export interface StoredLabels {
  pragmatics: PragmaticRecord[];
  links: LinkRecord[];
}

export interface AlignmentEdge {
  new: string;
  old: string;
  score: number;
}

export interface AlignmentJson {
  document: string;
  old_version: number;
  new_version: number;
  metric: string;
  threshold: number;
  objective: number;
  edges: AlignmentEdge[];
  added: string[];
  deleted: string[];
  modified: AlignmentEdge[];
  unchanged: AlignmentEdge[];
}

export interface ExplicitLinkRow {
  sentence: string;
  start: number;
  end: number;
  type: string;
  surface: string;
  normalized: string;
  target: string | null;
  reason?: string;
}

export type PostLabelBody =
  | { kind: "pragmatic"; node: string; label: string; annotator: string }
  | {
      kind: "link";
      review: string;
      paper: string;
      verdict: "linked" | "not-linked";
      annotator: string;
      source: "suggested" | "manual";
    };
