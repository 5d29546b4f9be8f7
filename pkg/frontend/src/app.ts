/** Application shell: loads one project from the service, wires the
 * three views, and owns the tab switching plus global hotkeys.  The UI
 * holds no truth of its own: a full reload rebuilds identical state
 * from the service stores. */

import { ApiClient } from "./api.js";
import { SessionState } from "./state.js";
import { DiffView } from "./views/diff.js";
import { LinkingView } from "./views/linking.js";
import { TaggingView } from "./views/tagging.js";
import type { GraphJson } from "./types.js";

export interface AppConfig {
  baseUrl: string;
  token?: string;
  projectId: string;
  annotator: string;
  reviewDoc?: string; // defaults to the project's first review
}

export class App {
  readonly api: ApiClient;
  session!: SessionState;
  tagging!: TaggingView;
  linking!: LinkingView;
  diff!: DiffView;
  reviewDoc!: string;
  paperDoc!: string;
  reviewGraph!: GraphJson;
  paperGraph!: GraphJson;
  private activeView: "tagging" | "linking" | "diff" = "tagging";

  constructor(private readonly config: AppConfig) {
    this.api = new ApiClient({ baseUrl: config.baseUrl, token: config.token });
  }

  async load(): Promise<void> {
    const info = await this.api.projectInfo(this.config.projectId);
    this.paperDoc = info.paper;
    this.reviewDoc = this.config.reviewDoc ?? info.reviews[0];
    if (!this.reviewDoc) throw new Error("project has no review documents");
    this.reviewGraph = await this.api.document(this.config.projectId, this.reviewDoc);
    this.paperGraph = await this.api.document(this.config.projectId, this.paperDoc);
    const stored = await this.api.labels(this.config.projectId);

    this.session = new SessionState(this.api, this.config.projectId, this.config.annotator);
    this.tagging = new TaggingView(this.session, this.reviewDoc, this.reviewGraph,
                                   stored.pragmatics);
    this.linking = new LinkingView(this.api, this.session, this.reviewDoc,
                                   this.reviewGraph, this.paperDoc, this.paperGraph,
                                   stored.links);
    this.diff = new DiffView(this.api, this.config.projectId, this.paperDoc);
  }

  mount(root: HTMLElement): void {
    const doc = root.ownerDocument;
    root.textContent = "";

    const tabs = doc.createElement("nav");
    const panel = doc.createElement("main");
    panel.dataset.test = "panel";
    for (const name of ["tagging", "linking", "diff"] as const) {
      const button = doc.createElement("button");
      button.dataset.tab = name;
      button.textContent = name;
      button.addEventListener("click", () => void this.show(name, panel));
      tabs.append(button);
    }
    root.append(tabs, panel);
    void this.show(this.activeView, panel);

    doc.addEventListener("keydown", (event) => {
      if ((event.target as HTMLElement | null)?.tagName === "INPUT") return;
      if (this.activeView === "tagging") this.tagging.handleKey(event);
    });
  }

  async show(name: "tagging" | "linking" | "diff", panel: HTMLElement): Promise<void> {
    this.activeView = name;
    if (name === "tagging") {
      this.tagging.render(panel);
    } else if (name === "linking") {
      this.linking.render(panel);
      await this.linking.loadSuggestions();
    } else {
      this.diff.render(panel);
      await this.diff.load();
    }
  }
}

export async function start(config: AppConfig, root: HTMLElement): Promise<App> {
  const app = new App(config);
  await app.load();
  app.mount(root);
  return app;
}
