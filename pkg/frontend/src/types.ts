/** Wire types mirrored from the chat service HTTP/WebSocket API. */

export interface ArticleInfo {
  article_id: string;
  title: string;
}

export interface BotReply {
  session_id: string;
  text: string;
  strategy: string;
  node_ids: string[];
  phase: string;
  turn: number;
}

export interface SessionOpened extends BotReply {
  opening: string;
  article_id: string;
}

export interface SentenceInfo {
  position: number;
  text: string;
  eligible: boolean;
}

export interface DebugSnapshot {
  session_id: string;
  article_id: string;
  phase: string;
  cursor: number;
  presented_sentences: number[];
  presented_comments: Array<string | number>;
  offered_questions: string[];
  pending: unknown;
  opinion_exchange_done: boolean;
  last_presented: number | null;
  turn_index: number;
  seed: number;
  chain: number[];
  sentences: SentenceInfo[];
}

export interface ErrorFrame {
  error: string;
  code: number;
}

export function isErrorFrame(value: unknown): value is ErrorFrame {
  return (
    typeof value === "object" &&
    value !== null &&
    "error" in value &&
    "code" in value
  );
}
