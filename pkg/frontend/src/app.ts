/** DOM wiring: renders ChatViewState into the page and maps user gestures to
 * service calls. All state transitions go through the pure reducer; the DOM
 * is rebuilt from state after every event, so the UI is a function of the
 * server reply stream.
 */

import {
  openTransport,
  ServiceClient,
  SessionEndedError,
  type Transport,
  type TransportFactory,
} from "./client.js";
import {
  canSend,
  initialState,
  reduce,
  type ChatEvent,
  type ChatViewState,
} from "./state.js";

export interface AppOptions {
  /** Overridable in tests; defaults to WebSocket-preferred openTransport. */
  transportFactory?: TransportFactory;
  /** Fixed seed forwarded to session creation (testing aid). */
  seed?: number;
}

export interface App {
  getState(): ChatViewState;
  /** Resolves when the initial article listing has been attempted. */
  ready: Promise<void>;
}

export function createApp(
  root: HTMLElement,
  client: ServiceClient,
  options: AppOptions = {},
): App {
  const transportFactory =
    options.transportFactory ?? ((c, sid) => openTransport(c, sid));

  let state = initialState;
  let transport: Transport | null = null;
  let retryAction: (() => void) | null = null;

  root.innerHTML = `
    <div class="app">
      <header class="top">
        <h1>newsgraph chat</h1>
        <span class="connection"></span>
      </header>
      <div class="banner" hidden>
        <span class="banner-text"></span>
        <button type="button" class="retry-button">Retry</button>
      </div>
      <main class="panes">
        <section class="chat">
          <div class="messages" aria-live="polite"></div>
          <div class="end-notice" hidden>The conversation has ended.</div>
          <form class="composer">
            <input class="composer-input" type="text"
                   placeholder="Say something" autocomplete="off">
            <button type="submit" class="send-button" disabled>Send</button>
          </form>
        </section>
        <aside class="article-pane">
          <div class="article-controls">
            <select class="article-select"></select>
            <button type="button" class="start-button">Start session</button>
          </div>
          <ol class="sentences"></ol>
        </aside>
      </main>
    </div>
  `;

  const el = {
    connection: root.querySelector<HTMLSpanElement>(".connection")!,
    banner: root.querySelector<HTMLDivElement>(".banner")!,
    bannerText: root.querySelector<HTMLSpanElement>(".banner-text")!,
    retryButton: root.querySelector<HTMLButtonElement>(".retry-button")!,
    messages: root.querySelector<HTMLDivElement>(".messages")!,
    endNotice: root.querySelector<HTMLDivElement>(".end-notice")!,
    composer: root.querySelector<HTMLFormElement>(".composer")!,
    input: root.querySelector<HTMLInputElement>(".composer-input")!,
    sendButton: root.querySelector<HTMLButtonElement>(".send-button")!,
    select: root.querySelector<HTMLSelectElement>(".article-select")!,
    startButton: root.querySelector<HTMLButtonElement>(".start-button")!,
    sentences: root.querySelector<HTMLOListElement>(".sentences")!,
  };

  function dispatch(event: ChatEvent): void {
    state = reduce(state, event);
    render();
  }

  function render(): void {
    el.connection.textContent = state.connection;
    el.banner.hidden = state.banner === null;
    el.bannerText.textContent = state.banner ?? "";
    renderMessages();
    renderSentences();
    renderArticleOptions();
    el.endNotice.hidden = !state.ended;
    el.input.disabled = state.sessionId === null || state.ended;
    el.sendButton.disabled = !canSend(state, el.input.value);
    el.startButton.disabled =
      state.articles.length === 0 || state.connection === "connecting";
  }

  function renderMessages(): void {
    el.messages.textContent = "";
    for (const message of state.messages) {
      const bubble = document.createElement("div");
      bubble.className = `message ${message.speaker}`;
      const text = document.createElement("p");
      text.className = "text";
      text.textContent = message.text;
      bubble.appendChild(text);
      if (message.speaker === "bot" && message.strategy) {
        const badge = document.createElement("span");
        badge.className = "badge";
        badge.textContent = message.strategy;
        bubble.appendChild(badge);
      }
      el.messages.appendChild(bubble);
    }
    el.messages.scrollTop = el.messages.scrollHeight;
  }

  function renderSentences(): void {
    el.sentences.textContent = "";
    for (const sentence of state.sentences) {
      const item = document.createElement("li");
      const classes = ["sentence"];
      if (sentence.presented) classes.push("presented");
      if (sentence.onChain) classes.push("on-chain");
      if (sentence.current) classes.push("current");
      item.className = classes.join(" ");
      item.dataset.position = String(sentence.position);
      item.textContent = sentence.text;
      el.sentences.appendChild(item);
    }
  }

  function renderArticleOptions(): void {
    const ids = state.articles.map((a) => a.article_id);
    const current = Array.from(el.select.options).map((o) => o.value);
    if (ids.join("\n") === current.join("\n")) {
      return;
    }
    const selected = el.select.value;
    el.select.textContent = "";
    for (const article of state.articles) {
      const option = document.createElement("option");
      option.value = article.article_id;
      option.textContent = `${article.article_id}: ${article.title}`;
      el.select.appendChild(option);
    }
    if (ids.includes(selected)) {
      el.select.value = selected;
    }
  }

  function fail(error: unknown, retry: () => void): void {
    retryAction = retry;
    const message =
      error instanceof Error ? error.message : "request failed";
    dispatch({ kind: "request_failed", message });
  }

  async function loadArticles(): Promise<void> {
    try {
      const articles = await client.listArticles();
      dispatch({ kind: "articles_loaded", articles });
    } catch (error) {
      fail(error, () => void loadArticles());
    }
  }

  async function refreshDebug(): Promise<void> {
    if (state.sessionId === null) {
      return;
    }
    try {
      const debug = await client.fetchDebug(state.sessionId);
      dispatch({ kind: "debug_updated", debug });
    } catch {
      /* stale highlights are better than a dead chat */
    }
  }

  async function startSession(): Promise<void> {
    const articleId = el.select.value;
    if (!articleId) {
      return;
    }
    transport?.close();
    transport = null;
    dispatch({ kind: "connection_changed", status: "connecting" });
    try {
      const opened = await client.createSession(articleId, options.seed);
      dispatch({
        kind: "session_started",
        sessionId: opened.session_id,
        articleId,
        opening: opened,
      });
      transport = await transportFactory(client, opened.session_id);
      dispatch({ kind: "connection_changed", status: transport.kind });
      await refreshDebug();
    } catch (error) {
      dispatch({ kind: "connection_changed", status: "error" });
      fail(error, () => void startSession());
    }
  }

  async function sendTurn(): Promise<void> {
    const text = el.input.value.trim();
    if (!canSend(state, text) || transport === null) {
      return;
    }
    el.input.value = "";
    dispatch({ kind: "user_sent", text });
    try {
      const reply = await transport.send(text);
      dispatch({ kind: "reply_received", reply });
      await refreshDebug();
    } catch (error) {
      if (error instanceof SessionEndedError) {
        dispatch({ kind: "session_ended" });
      } else {
        fail(error, () => {
          el.input.value = text;
          dispatch({ kind: "banner_cleared" });
          render();
        });
      }
    }
  }

  el.composer.addEventListener("submit", (event) => {
    event.preventDefault();
    void sendTurn();
  });
  el.input.addEventListener("input", () => {
    el.sendButton.disabled = !canSend(state, el.input.value);
  });
  el.startButton.addEventListener("click", () => void startSession());
  el.retryButton.addEventListener("click", () => {
    dispatch({ kind: "banner_cleared" });
    retryAction?.();
  });

  render();
  const ready = loadArticles();

  return {
    getState: () => state,
    ready,
  };
}
