/** Thin client over the chat service. HTTP covers every operation; turns
 * prefer a WebSocket stream and fall back to HTTP posts when the socket
 * cannot be opened.
 */

import {
  isErrorFrame,
  type ArticleInfo,
  type BotReply,
  type DebugSnapshot,
  type SessionOpened,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public readonly code: number, message: string) {
    super(message);
    this.name = "ServiceError";
  }
}

export class SessionEndedError extends ServiceError {
  constructor() {
    super(409, "session has already ended");
    this.name = "SessionEndedError";
  }
}

async function parseFailure(res: Response): Promise<never> {
  if (res.status === 409) {
    throw new SessionEndedError();
  }
  let detail = res.statusText || `request failed (${res.status})`;
  try {
    const body = (await res.json()) as { detail?: string };
    if (body && typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    /* non-JSON failure body; keep the status text */
  }
  throw new ServiceError(res.status, detail);
}

export class ServiceClient {
  constructor(public readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path);
    if (!res.ok) {
      await parseFailure(res);
    }
    return (await res.json()) as T;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!res.ok) {
      await parseFailure(res);
    }
    return (await res.json()) as T;
  }

  listArticles(): Promise<ArticleInfo[]> {
    return this.get<ArticleInfo[]>("/articles");
  }

  createSession(articleId: string, seed?: number): Promise<SessionOpened> {
    const body = seed === undefined ? {} : { seed };
    return this.post<SessionOpened>(
      `/articles/${encodeURIComponent(articleId)}/sessions`,
      body,
    );
  }

  sendMessage(sessionId: string, text: string): Promise<BotReply> {
    return this.post<BotReply>(
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      { text },
    );
  }

  fetchDebug(sessionId: string): Promise<DebugSnapshot> {
    return this.get<DebugSnapshot>(
      `/sessions/${encodeURIComponent(sessionId)}/debug`,
    );
  }
}

/** One reply channel for a session: send a turn, get the bot reply. */
export interface Transport {
  readonly kind: "websocket" | "http";
  send(text: string): Promise<BotReply>;
  close(): void;
}

export type TransportFactory = (
  client: ServiceClient,
  sessionId: string,
) => Promise<Transport>;

class HttpTransport implements Transport {
  readonly kind = "http";

  constructor(
    private readonly client: ServiceClient,
    private readonly sessionId: string,
  ) {}

  send(text: string): Promise<BotReply> {
    return this.client.sendMessage(this.sessionId, text);
  }

  close(): void {}
}

class WsTransport implements Transport {
  readonly kind = "websocket";

  constructor(private readonly socket: WebSocket) {}

  send(text: string): Promise<BotReply> {
    return new Promise<BotReply>((resolve, reject) => {
      const settle = (fn: () => void) => {
        this.socket.removeEventListener("message", onMessage);
        this.socket.removeEventListener("close", onClose);
        this.socket.removeEventListener("error", onError);
        fn();
      };
      const onMessage = (event: MessageEvent) => {
        let payload: unknown;
        try {
          payload = JSON.parse(String(event.data));
        } catch {
          settle(() => reject(new ServiceError(0, "malformed server frame")));
          return;
        }
        if (isErrorFrame(payload)) {
          settle(() =>
            reject(
              payload.code === 409
                ? new SessionEndedError()
                : new ServiceError(payload.code, payload.error),
            ),
          );
          return;
        }
        settle(() => resolve(payload as BotReply));
      };
      const onClose = () =>
        settle(() => reject(new ServiceError(0, "connection closed")));
      const onError = () =>
        settle(() => reject(new ServiceError(0, "connection error")));
      this.socket.addEventListener("message", onMessage);
      this.socket.addEventListener("close", onClose);
      this.socket.addEventListener("error", onError);
      this.socket.send(JSON.stringify({ text }));
    });
  }

  close(): void {
    this.socket.close();
  }
}

function websocketUrl(baseUrl: string, sessionId: string): string {
  const path = `/sessions/${encodeURIComponent(sessionId)}/stream`;
  const base = baseUrl || globalThis.location?.origin || "";
  return base.replace(/^http/, "ws") + path;
}

/** Open the preferred WebSocket stream; fall back to HTTP on any failure. */
export function openTransport(
  client: ServiceClient,
  sessionId: string,
  timeoutMs = 1500,
): Promise<Transport> {
  return new Promise<Transport>((resolve) => {
    const fallBack = () => resolve(new HttpTransport(client, sessionId));
    let socket: WebSocket;
    try {
      socket = new WebSocket(websocketUrl(client.baseUrl, sessionId));
    } catch {
      fallBack();
      return;
    }
    let settled = false;
    const timer = setTimeout(() => {
      if (!settled) {
        settled = true;
        socket.close();
        fallBack();
      }
    }, timeoutMs);
    socket.addEventListener("open", () => {
      if (!settled) {
        settled = true;
        clearTimeout(timer);
        resolve(new WsTransport(socket));
      }
    });
    socket.addEventListener("error", () => {
      if (!settled) {
        settled = true;
        clearTimeout(timer);
        fallBack();
      }
    });
  });
}
