/** Shared fakes for unit tests: canned service data and a no-network client. */

import type { Transport } from "../src/client.js";
import type {
  ArticleInfo,
  BotReply,
  DebugSnapshot,
  SessionOpened,
} from "../src/types.js";

export const ARTICLES: ArticleInfo[] = [
  { article_id: "space-race", title: "The billionaires fuelling a space race" },
];

export function reply(partial: Partial<BotReply> = {}): BotReply {
  return {
    session_id: "abc123",
    text: "The article says something interesting.",
    strategy: "ChainMove",
    node_ids: ["s1"],
    phase: "Present",
    turn: 1,
    ...partial,
  };
}

export function opened(partial: Partial<SessionOpened> = {}): SessionOpened {
  const base = reply({
    text: "Hi there! Shall we go through this article together?",
    strategy: "ChainMove",
    node_ids: ["s0"],
    phase: "Propose",
    turn: 0,
  });
  return { ...base, opening: base.text, article_id: "space-race", ...partial };
}

export function debugSnapshot(
  partial: Partial<DebugSnapshot> = {},
): DebugSnapshot {
  return {
    session_id: "abc123",
    article_id: "space-race",
    phase: "Propose",
    cursor: 0,
    presented_sentences: [0],
    presented_comments: [],
    offered_questions: [],
    pending: null,
    opinion_exchange_done: false,
    last_presented: 0,
    turn_index: 1,
    seed: 7,
    chain: [0, 1, 2],
    sentences: [
      { position: 0, text: "The title sentence", eligible: true },
      { position: 1, text: "The first body sentence", eligible: true },
      { position: 2, text: "The second body sentence", eligible: true },
      { position: 3, text: "An off-chain sentence", eligible: true },
    ],
    ...partial,
  };
}

/** Structural stand-in for ServiceClient; every call is overridable. */
export class FakeClient {
  baseUrl = "";
  listArticlesImpl: () => Promise<ArticleInfo[]> = async () => ARTICLES;
  createSessionImpl: (articleId: string, seed?: number) => Promise<SessionOpened> =
    async () => opened();
  sendMessageImpl: (sessionId: string, text: string) => Promise<BotReply> =
    async () => reply();
  fetchDebugImpl: (sessionId: string) => Promise<DebugSnapshot> = async () =>
    debugSnapshot();

  listArticles(): Promise<ArticleInfo[]> {
    return this.listArticlesImpl();
  }
  createSession(articleId: string, seed?: number): Promise<SessionOpened> {
    return this.createSessionImpl(articleId, seed);
  }
  sendMessage(sessionId: string, text: string): Promise<BotReply> {
    return this.sendMessageImpl(sessionId, text);
  }
  fetchDebug(sessionId: string): Promise<DebugSnapshot> {
    return this.fetchDebugImpl(sessionId);
  }
}

export class FakeTransport implements Transport {
  readonly kind = "http";
  sent: string[] = [];
  sendImpl: (text: string) => Promise<BotReply> = async () => reply();
  closed = false;

  send(text: string): Promise<BotReply> {
    this.sent.push(text);
    return this.sendImpl(text);
  }
  close(): void {
    this.closed = true;
  }
}

/** Let queued microtasks and zero-delay timers run. */
export async function flush(times = 4): Promise<void> {
  for (let i = 0; i < times; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export async function until(
  condition: () => boolean,
  timeoutMs = 5000,
): Promise<void> {
  const started = Date.now();
  while (!condition()) {
    if (Date.now() - started > timeoutMs) {
      throw new Error("condition not met in time");
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}
