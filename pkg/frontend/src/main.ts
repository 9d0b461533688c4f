import { ApiClient } from "./api.js";
import { renderResults } from "./results.js";
import { renderSeedEntry } from "./seedEntry.js";
import { UiSession } from "./state.js";

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? "";
}

function boot(): void {
  const app = document.querySelector<HTMLElement>("#app");
  if (!app) throw new Error("missing #app container");
  const api = new ApiClient(apiBase());
  const session = new UiSession();
  renderSeedEntry(app, {
    api,
    session,
    onSessionOpened: () => renderResults(app, { api, session }),
  });
}

boot();
