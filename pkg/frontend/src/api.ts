import type {
  ApiErrorBody,
  CommandDoc,
  NTableDoc,
  SchemaSummary,
  SessionHandle,
} from "./types.js";

/** An error response from the service, with its machine-readable code. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly location?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/**
 * Thin client for the analysis service.
 *
 * Requests are serialized: each call waits for the previous one to finish,
 * so a burst of clicks cannot interleave operations on the session.
 */
export class Client {
  private chain: Promise<unknown> = Promise.resolve();

  constructor(readonly base: string = "") {}

  schemas(): Promise<SchemaSummary[]> {
    return this.enqueue("GET", "/schemas");
  }

  createSession(schema: string): Promise<SessionHandle> {
    return this.enqueue("POST", "/sessions", { schema });
  }

  deleteSession(id: string): Promise<void> {
    return this.enqueue("DELETE", `/sessions/${id}`);
  }

  ntable(id: string, ctx?: string): Promise<NTableDoc> {
    return this.enqueue("GET", `/sessions/${id}/ntable${ctxQuery(ctx)}`);
  }

  op(id: string, command: CommandDoc): Promise<NTableDoc> {
    return this.enqueue("POST", `/sessions/${id}/op`, { command });
  }

  opText(id: string, text: string): Promise<NTableDoc> {
    return this.enqueue("POST", `/sessions/${id}/op`, { text });
  }

  undo(id: string): Promise<NTableDoc> {
    return this.enqueue("POST", `/sessions/${id}/undo`, {});
  }

  async splits(id: string): Promise<string[]> {
    const body: { splits: string[] } = await this.enqueue(
      "GET",
      `/sessions/${id}/splits`,
    );
    return body.splits;
  }

  async sql(id: string, ctx?: string): Promise<string> {
    return this.enqueue("GET", `/sessions/${id}/sql${ctxQuery(ctx)}`, undefined, "text");
  }

  /** Resolves once every request enqueued so far has settled. */
  async idle(): Promise<void> {
    let tail;
    do {
      tail = this.chain;
      await tail.catch(() => undefined);
    } while (tail !== this.chain);
  }

  private enqueue<T>(
    method: string,
    path: string,
    body?: unknown,
    parse: "json" | "text" = "json",
  ): Promise<T> {
    const run = () => this.send<T>(method, path, body, parse);
    const next = this.chain.then(run, run);
    this.chain = next.catch(() => undefined);
    return next;
  }

  private async send<T>(
    method: string,
    path: string,
    body: unknown,
    parse: "json" | "text",
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    if (parse === "text") {
      return (await response.text()) as T;
    }
    return (await response.json()) as T;
  }
}

function ctxQuery(ctx?: string): string {
  return ctx === undefined ? "" : `?ctx=${encodeURIComponent(ctx)}`;
}

async function toApiError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody | undefined;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = undefined;
  }
  if (body === undefined || typeof body.code !== "string") {
    return new ApiError(response.status, "HttpError", `HTTP ${response.status}`);
  }
  return new ApiError(response.status, body.code, body.message, body.location);
}
