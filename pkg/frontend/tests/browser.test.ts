/** Scripted end-to-end drive of the real page against a live chat service.
 * Skipped unless WEBCHAT_BASE_URL points at a running server; scripts/
 * browser-test.sh starts one and runs this file.
 */

import { describe, expect, it } from "vitest";

import { createApp } from "../src/app.js";
import { ServiceClient } from "../src/client.js";
import { until } from "./helpers.js";

const BASE_URL = process.env.WEBCHAT_BASE_URL ?? "";
const ARTICLE = process.env.WEBCHAT_ARTICLE ?? "a3";

describe.skipIf(!BASE_URL)("live service conversation", () => {
  it(
    "opens a session, asks about an entity, and stops",
    async () => {
      const root = document.createElement("div");
      document.body.appendChild(root);
      const app = createApp(root, new ServiceClient(BASE_URL), { seed: 11 });
      await app.ready;

      const select = root.querySelector<HTMLSelectElement>(".article-select")!;
      await until(() => select.options.length > 0);
      select.value = ARTICLE;
      expect(select.value).toBe(ARTICLE);

      const badges = () =>
        Array.from(
          root.querySelectorAll(".message.bot .badge"),
          (badge) => badge.textContent,
        );

      root.querySelector<HTMLButtonElement>(".start-button")!.click();
      await until(() => root.querySelectorAll(".message.bot").length === 1);
      expect(badges()).toEqual(["ChainMove"]);
      const opening =
        root.querySelector(".message.bot .text")?.textContent ?? "";
      expect(opening.length).toBeGreaterThan(0);

      await until(() => root.querySelectorAll(".sentence").length > 0);
      expect(
        root.querySelectorAll(".sentence.presented").length,
      ).toBeGreaterThan(0);
      expect(app.getState().connection).toBe("websocket");

      const input = root.querySelector<HTMLInputElement>(".composer-input")!;
      const form = root.querySelector<HTMLFormElement>(".composer")!;
      const send = (text: string) => {
        input.value = text;
        input.dispatchEvent(new Event("input", { bubbles: true }));
        form.dispatchEvent(
          new Event("submit", { bubbles: true, cancelable: true }),
        );
      };

      send("tell me more about Jeff Bezos");
      await until(() => badges().length === 2);
      expect(badges()[1]).toBe("EntityRetrieval");
      expect(
        root.querySelector(".message.user .text")?.textContent,
      ).toBe("tell me more about Jeff Bezos");

      send("stop");
      await until(() => badges().length === 3);
      expect(badges()[2]).toBe("Exit");
      await until(
        () => !root.querySelector<HTMLDivElement>(".end-notice")!.hidden,
      );
      expect(input.disabled).toBe(true);
    },
    30000,
  );
});
