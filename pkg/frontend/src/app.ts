import { ApiError, Client } from "./api.js";
import { levelCommand, levelTargets } from "./affordances.js";
import { buildCaption, buildFooter, buildGrid, type AxisKind } from "./grid.js";
import { buildToolbar } from "./toolbar.js";
import type { CommandDoc, NTableDoc, SchemaSummary } from "./types.js";

export interface AppOptions {
  /** Service root, "" when the page is served from the same origin. */
  base?: string;
  /** Dataset to open; defaults to the first one the service lists. */
  schema?: string;
  client?: Client;
}

/**
 * The pivot application.
 *
 * Every rendering comes from one interchange document returned by the
 * service; nothing is computed from cell values on this side. A failed
 * operation shows its error code and message and leaves the grid as it was.
 */
export class App {
  readonly client: Client;
  summary!: SchemaSummary;
  sessionId = "";
  /** The document currently rendered. */
  doc: NTableDoc | null = null;
  splits: string[] = [];
  /** Split tab being viewed, or null for the session's working table. */
  viewing: string | null = null;

  private readonly schemaName?: string;
  private readonly owner: Document;
  private readonly toastEl: HTMLElement;
  private menu: HTMLElement | null = null;
  private last: Promise<void> = Promise.resolve();

  constructor(readonly root: HTMLElement, options: AppOptions = {}) {
    this.client = options.client ?? new Client(options.base ?? "");
    this.schemaName = options.schema;
    this.owner = root.ownerDocument;
    this.toastEl = this.owner.createElement("div");
    this.toastEl.className = "toast";
    this.toastEl.hidden = true;
  }

  /** Opens a session on the chosen dataset and renders its initial table. */
  async start(): Promise<void> {
    const schemas = await this.client.schemas();
    const summary =
      this.schemaName === undefined
        ? schemas[0]
        : schemas.find((s) => s.name === this.schemaName);
    if (summary === undefined) {
      throw new Error(
        this.schemaName === undefined
          ? "the service lists no datasets"
          : `the service has no dataset named ${this.schemaName}`,
      );
    }
    this.summary = summary;
    const handle = await this.client.createSession(summary.name);
    this.sessionId = handle.id;
    this.doc = await this.client.ntable(this.sessionId);
    this.splits = await this.client.splits(this.sessionId);
    this.render();
  }

  /** Sends one command; on success renders the document it returned. */
  apply(cmd: CommandDoc): Promise<void> {
    return this.track(async () => {
      try {
        const doc = await this.client.op(this.sessionId, cmd);
        this.splits = await this.client.splits(this.sessionId);
        this.viewing =
          cmd.variant === "split" || cmd.variant === "tsplit"
            ? (this.splits[0] ?? null)
            : null;
        this.doc = doc;
        this.showError(null);
        this.render();
      } catch (err) {
        this.showError(err);
      }
    });
  }

  /** Reverts the last state change and renders the restored document. */
  undo(): Promise<void> {
    return this.track(async () => {
      try {
        const doc = await this.client.undo(this.sessionId);
        this.splits = await this.client.splits(this.sessionId);
        this.viewing = null;
        this.doc = doc;
        this.showError(null);
        this.render();
      } catch (err) {
        this.showError(err);
      }
    });
  }

  /** Shows one split result, or the working table for null. */
  view(name: string | null): Promise<void> {
    return this.track(async () => {
      try {
        this.doc = await this.client.ntable(this.sessionId, name ?? undefined);
        this.viewing = name;
        this.showError(null);
        this.render();
      } catch (err) {
        this.showError(err);
      }
    });
  }

  /** Resolves when every action started so far has finished. */
  async settle(): Promise<void> {
    let tail;
    do {
      tail = this.last;
      await tail;
    } while (tail !== this.last);
  }

  private track(fn: () => Promise<void>): Promise<void> {
    const job = this.last.then(fn);
    this.last = job;
    return job;
  }

  private showError(err: unknown): void {
    if (err === null) {
      this.toastEl.textContent = "";
      this.toastEl.hidden = true;
      return;
    }
    const text =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.toastEl.textContent = text;
    this.toastEl.hidden = false;
  }

  private onAxis(axis: AxisKind, anchor: HTMLElement): void {
    if (this.doc === null) {
      return;
    }
    const axisDoc = axis === "col" ? this.doc.colAxis : this.doc.rowAxis;
    this.menu?.remove();
    const menu = this.owner.createElement("div");
    menu.className = "menu";
    for (const target of levelTargets(this.summary, axisDoc)) {
      const button = this.owner.createElement("button");
      button.textContent = `${target.op.toUpperCase()} ${target.level}`;
      button.dataset.op = target.op;
      button.dataset.level = target.level;
      button.addEventListener("click", () => {
        this.menu?.remove();
        this.menu = null;
        void this.apply(levelCommand(axisDoc, target));
      });
      menu.append(button);
    }
    anchor.insertAdjacentElement("afterend", menu);
    this.menu = menu;
  }

  private buildTabs(): HTMLElement {
    const tabs = this.owner.createElement("div");
    tabs.className = "tabs";
    const names: (string | null)[] = [null, ...this.splits];
    for (const name of names) {
      const tab = this.owner.createElement("button");
      tab.className = "tab" + (name === this.viewing ? " active" : "");
      tab.textContent = name ?? "current";
      tab.dataset.ctx = name ?? "";
      tab.addEventListener("click", () => void this.view(name));
      tabs.append(tab);
    }
    return tabs;
  }

  private render(): void {
    if (this.doc === null) {
      return;
    }
    this.menu = null;
    const doc = this.doc;
    const pieces: (HTMLElement | null)[] = [
      buildToolbar(this.owner, this.summary, doc, this.splits, {
        apply: (cmd) => void this.apply(cmd),
        undo: () => void this.undo(),
      }),
      this.toastEl,
      this.splits.length > 0 ? this.buildTabs() : null,
      buildCaption(this.owner, doc),
      buildGrid(this.owner, doc, (axis, anchor) => this.onAxis(axis, anchor)),
      buildFooter(this.owner, doc),
    ];
    this.root.replaceChildren(...pieces.filter((el): el is HTMLElement => el !== null));
  }
}
