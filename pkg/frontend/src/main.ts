/** Page entry point. The service base URL defaults to the page origin and
 * can be overridden with ?api=http://host:port for split deployments.
 */

import { createApp } from "./app.js";
import { ServiceClient } from "./client.js";

function baseUrl(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? "";
}

const root = document.getElementById("app");
if (root) {
  createApp(root, new ServiceClient(baseUrl()));
}
