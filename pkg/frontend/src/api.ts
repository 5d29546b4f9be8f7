/** Thin typed client for the annotation service; the UI talks to the
 * service exclusively through this module. */

import type {
  AlignmentJson,
  ExplicitLinkRow,
  GraphJson,
  PostLabelBody,
  ProjectInfo,
  StoredLabels,
  SuggestionSet,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface ApiConfig {
  baseUrl: string;
  token?: string;
}

export class ApiClient {
  constructor(private readonly config: ApiConfig) {}

  private headers(json = false): Record<string, string> {
    const h: Record<string, string> = {};
    if (this.config.token) h["Authorization"] = `Bearer ${this.config.token}`;
    if (json) h["Content-Type"] = "application/json";
    return h;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.config.baseUrl + path, {
      headers: this.headers(),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as T;
  }

  listProjects(): Promise<{ projects: string[] }> {
    return this.get("/projects");
  }

  projectInfo(projectId: string): Promise<ProjectInfo> {
    return this.get(`/projects/${projectId}`);
  }

  document(projectId: string, doc: string, version?: number): Promise<GraphJson> {
    const suffix = version === undefined ? "" : `?version=${version}`;
    return this.get(`/projects/${projectId}/documents/${doc}${suffix}`);
  }

  suggestions(projectId: string, sentence: string): Promise<SuggestionSet> {
    return this.get(
      `/projects/${projectId}/suggestions?sentence=${encodeURIComponent(sentence)}`,
    );
  }

  labels(projectId: string): Promise<StoredLabels> {
    return this.get(`/projects/${projectId}/labels`);
  }

  alignment(projectId: string, from: string, to: string): Promise<AlignmentJson> {
    return this.get(`/projects/${projectId}/alignment?from=${from}&to=${to}`);
  }

  explicitLinks(projectId: string): Promise<{ links: ExplicitLinkRow[] }> {
    return this.get(`/projects/${projectId}/links/explicit`);
  }

  /** Resolves only on a 201; anything else rejects, so callers can keep
   * the record queued rather than showing it as saved. */
  async postLabel(
    projectId: string,
    body: PostLabelBody,
  ): Promise<Record<string, unknown>> {
    const response = await fetch(`${this.config.baseUrl}/projects/${projectId}/labels`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
    if (response.status !== 201) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as Record<string, unknown>;
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}
