import { beforeEach, describe, expect, it } from "vitest";

import { createApp, type App } from "../src/app.js";
import { SessionEndedError, type ServiceClient } from "../src/client.js";
import {
  debugSnapshot,
  FakeClient,
  FakeTransport,
  flush,
  opened,
  reply,
} from "./helpers.js";

interface Mounted {
  app: App;
  root: HTMLElement;
  client: FakeClient;
  transport: FakeTransport;
}

async function mount(
  configure?: (client: FakeClient, transport: FakeTransport) => void,
): Promise<Mounted> {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const client = new FakeClient();
  const transport = new FakeTransport();
  configure?.(client, transport);
  const app = createApp(root, client as unknown as ServiceClient, {
    transportFactory: async () => transport,
  });
  await app.ready;
  await flush();
  return { app, root, client, transport };
}

function q<T extends Element>(root: HTMLElement, selector: string): T {
  const found = root.querySelector<T>(selector);
  if (!found) {
    throw new Error(`missing element ${selector}`);
  }
  return found;
}

async function startSession(m: Mounted): Promise<void> {
  q<HTMLButtonElement>(m.root, ".start-button").click();
  await flush();
}

async function type(m: Mounted, text: string): Promise<void> {
  const input = q<HTMLInputElement>(m.root, ".composer-input");
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
  await flush(1);
}

async function submit(m: Mounted): Promise<void> {
  q<HTMLFormElement>(m.root, ".composer").dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }),
  );
  await flush();
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("article selection and session start", () => {
  it("renders the article listing into the selector", async () => {
    const m = await mount();
    const options = Array.from(
      q<HTMLSelectElement>(m.root, ".article-select").options,
    );
    expect(options.map((o) => o.value)).toEqual(["space-race"]);
    expect(options[0].textContent).toContain("billionaires");
  });

  it("renders the opening proposal and the debug-derived article pane", async () => {
    const m = await mount();
    await startSession(m);

    const bubbles = m.root.querySelectorAll(".message.bot");
    expect(bubbles).toHaveLength(1);
    expect(bubbles[0].querySelector(".text")?.textContent).toContain(
      "Shall we go through this article together?",
    );
    expect(bubbles[0].querySelector(".badge")?.textContent).toBe("ChainMove");

    const items = m.root.querySelectorAll(".sentence");
    expect(items).toHaveLength(4);
    expect(items[0].classList.contains("presented")).toBe(true);
    expect(items[0].classList.contains("current")).toBe(true);
    expect(items[1].classList.contains("presented")).toBe(false);
    expect(items[3].classList.contains("on-chain")).toBe(false);
  });

  it("shows a banner with a working retry when the service is down", async () => {
    let failures = 0;
    const m = await mount((client) => {
      client.listArticlesImpl = async () => {
        if (failures === 0) {
          failures += 1;
          throw new Error("service unreachable");
        }
        return [{ article_id: "space-race", title: "Space" }];
      };
    });

    const banner = q<HTMLDivElement>(m.root, ".banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("service unreachable");

    q<HTMLButtonElement>(m.root, ".retry-button").click();
    await flush();
    expect(banner.hidden).toBe(true);
    expect(
      q<HTMLSelectElement>(m.root, ".article-select").options,
    ).toHaveLength(1);
  });

  it("surfaces session-creation failures without crashing", async () => {
    const m = await mount((client) => {
      client.createSessionImpl = async () => {
        throw new Error("unknown article 'space-race'");
      };
    });
    await startSession(m);
    expect(q<HTMLDivElement>(m.root, ".banner").hidden).toBe(false);
    expect(q<HTMLSpanElement>(m.root, ".connection").textContent).toBe(
      "error",
    );
    expect(m.app.getState().sessionId).toBeNull();
  });

  it("keeps two mounted clients independent", async () => {
    const first = await mount((client) => {
      client.createSessionImpl = async () => opened({ session_id: "one" });
    });
    const second = await mount((client) => {
      client.createSessionImpl = async () => opened({ session_id: "two" });
    });
    await startSession(first);
    await startSession(second);
    expect(first.app.getState().sessionId).toBe("one");
    expect(second.app.getState().sessionId).toBe("two");
    expect(second.root.querySelectorAll(".message.bot")).toHaveLength(1);
  });
});

describe("sending turns", () => {
  it("disables send for empty input and enables it for text", async () => {
    const m = await mount();
    await startSession(m);
    const button = q<HTMLButtonElement>(m.root, ".send-button");
    expect(button.disabled).toBe(true);
    await type(m, "   ");
    expect(button.disabled).toBe(true);
    await type(m, "Sounds good!");
    expect(button.disabled).toBe(false);
  });

  it("renders the user bubble and the bot reply with a verbatim badge", async () => {
    const m = await mount((client, transport) => {
      transport.sendImpl = async () =>
        reply({ strategy: "QuestionRetrieval+QuestionEdge", turn: 1 });
      client.fetchDebugImpl = async () =>
        debugSnapshot({ presented_sentences: [0, 1], last_presented: 1 });
    });
    await startSession(m);
    await type(m, "What does Blue Origin do?");
    await submit(m);

    expect(m.transport.sent).toEqual(["What does Blue Origin do?"]);
    const user = m.root.querySelector(".message.user .text");
    expect(user?.textContent).toBe("What does Blue Origin do?");
    const badges = Array.from(m.root.querySelectorAll(".message.bot .badge"));
    expect(badges.at(-1)?.textContent).toBe("QuestionRetrieval+QuestionEdge");

    const items = m.root.querySelectorAll(".sentence");
    expect(items[1].classList.contains("presented")).toBe(true);
    expect(items[1].classList.contains("current")).toBe(true);
    expect(q<HTMLInputElement>(m.root, ".composer-input").value).toBe("");
  });

  it("allows only one in-flight turn per session", async () => {
    let release: (value: ReturnType<typeof reply>) => void = () => {};
    const m = await mount((_client, transport) => {
      transport.sendImpl = () =>
        new Promise<ReturnType<typeof reply>>((resolve) => {
          release = resolve;
        });
    });
    await startSession(m);
    await type(m, "first");
    await submit(m);
    expect(m.app.getState().inFlight).toBe(true);

    await type(m, "second");
    expect(q<HTMLButtonElement>(m.root, ".send-button").disabled).toBe(true);
    await submit(m);
    expect(m.transport.sent).toEqual(["first"]);

    release(reply());
    await flush();
    expect(m.app.getState().inFlight).toBe(false);
  });

  it("shows the end notice when the reply reaches the Ended phase", async () => {
    const m = await mount((_client, transport) => {
      transport.sendImpl = async () =>
        reply({ strategy: "Exit", phase: "Ended", text: "Okay, goodbye!" });
    });
    await startSession(m);
    await type(m, "stop");
    await submit(m);

    expect(q<HTMLDivElement>(m.root, ".end-notice").hidden).toBe(false);
    expect(q<HTMLInputElement>(m.root, ".composer-input").disabled).toBe(true);
    const badges = Array.from(m.root.querySelectorAll(".badge"));
    expect(badges.at(-1)?.textContent).toBe("Exit");
  });

  it("turns a terminal-state error into the end notice", async () => {
    const m = await mount((_client, transport) => {
      transport.sendImpl = async () => {
        throw new SessionEndedError();
      };
    });
    await startSession(m);
    await type(m, "hello?");
    await submit(m);

    expect(q<HTMLDivElement>(m.root, ".end-notice").hidden).toBe(false);
    expect(q<HTMLDivElement>(m.root, ".banner").hidden).toBe(true);
  });

  it("shows a banner and restores the draft on transport failure", async () => {
    const m = await mount((_client, transport) => {
      transport.sendImpl = async () => {
        throw new Error("connection lost");
      };
    });
    await startSession(m);
    await type(m, "are you there?");
    await submit(m);

    const banner = q<HTMLDivElement>(m.root, ".banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("connection lost");

    q<HTMLButtonElement>(m.root, ".retry-button").click();
    await flush();
    expect(q<HTMLInputElement>(m.root, ".composer-input").value).toBe(
      "are you there?",
    );
    expect(banner.hidden).toBe(true);
  });
});
