/** Pure view state: every change flows through reduce(), which is the only
 * place UI state is computed. The message list is append-only within a
 * session and article-pane highlighting is derived solely from server debug
 * snapshots, never from client-side guesses about the dialog.
 */

import type { ArticleInfo, BotReply, DebugSnapshot } from "./types.js";

export type Speaker = "user" | "bot";

export interface ChatMessage {
  speaker: Speaker;
  text: string;
  /** Server strategy label, rendered verbatim as the badge. */
  strategy?: string;
  turn?: number;
}

export type ConnectionStatus =
  | "idle"
  | "connecting"
  | "websocket"
  | "http"
  | "error";

export interface ArticleSentence {
  position: number;
  text: string;
  presented: boolean;
  onChain: boolean;
  current: boolean;
}

export interface ChatViewState {
  articles: ArticleInfo[];
  sessionId: string | null;
  articleId: string | null;
  messages: ChatMessage[];
  sentences: ArticleSentence[];
  connection: ConnectionStatus;
  inFlight: boolean;
  ended: boolean;
  banner: string | null;
}

export const initialState: ChatViewState = {
  articles: [],
  sessionId: null,
  articleId: null,
  messages: [],
  sentences: [],
  connection: "idle",
  inFlight: false,
  ended: false,
  banner: null,
};

export type ChatEvent =
  | { kind: "articles_loaded"; articles: ArticleInfo[] }
  | { kind: "session_started"; sessionId: string; articleId: string; opening: BotReply }
  | { kind: "user_sent"; text: string }
  | { kind: "reply_received"; reply: BotReply }
  | { kind: "debug_updated"; debug: DebugSnapshot }
  | { kind: "session_ended" }
  | { kind: "connection_changed"; status: ConnectionStatus }
  | { kind: "request_failed"; message: string }
  | { kind: "banner_cleared" };

export function reduce(state: ChatViewState, event: ChatEvent): ChatViewState {
  switch (event.kind) {
    case "articles_loaded":
      return { ...state, articles: event.articles, banner: null };

    case "session_started":
      return {
        ...state,
        sessionId: event.sessionId,
        articleId: event.articleId,
        messages: [botMessage(event.opening)],
        sentences: [],
        inFlight: false,
        ended: false,
        banner: null,
      };

    case "user_sent":
      return {
        ...state,
        messages: [...state.messages, { speaker: "user", text: event.text }],
        inFlight: true,
      };

    case "reply_received":
      return {
        ...state,
        messages: [...state.messages, botMessage(event.reply)],
        inFlight: false,
        ended: state.ended || event.reply.phase === "Ended",
      };

    case "debug_updated":
      return { ...state, sentences: deriveSentences(event.debug) };

    case "session_ended":
      return { ...state, ended: true, inFlight: false };

    case "connection_changed":
      return { ...state, connection: event.status };

    case "request_failed":
      return { ...state, banner: event.message, inFlight: false };

    case "banner_cleared":
      return { ...state, banner: null };
  }
}

function botMessage(reply: BotReply): ChatMessage {
  return {
    speaker: "bot",
    text: reply.text,
    strategy: reply.strategy,
    turn: reply.turn,
  };
}

function deriveSentences(debug: DebugSnapshot): ArticleSentence[] {
  const presented = new Set(debug.presented_sentences);
  const chain = new Set(debug.chain);
  return debug.sentences.map((s) => ({
    position: s.position,
    text: s.text,
    presented: presented.has(s.position),
    onChain: chain.has(s.position),
    current: s.position === debug.last_presented,
  }));
}

/** Whether the composer may submit right now. */
export function canSend(state: ChatViewState, draft: string): boolean {
  return (
    state.sessionId !== null &&
    !state.inFlight &&
    !state.ended &&
    draft.trim().length > 0
  );
}
