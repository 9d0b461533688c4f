// Seed entry: paste or upload a bibliography, add papers via title search,
// then start the session.

import { ApiClient, ApiError, PaperItem } from "./api.js";
import { SeedStaging, UiSession } from "./state.js";

export interface SeedEntryDeps {
  api: ApiClient;
  session: UiSession;
  onSessionOpened: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderSeedEntry(container: HTMLElement, deps: SeedEntryDeps): void {
  const { api, session } = deps;
  const staging = new SeedStaging();
  container.replaceChildren();

  const panel = el("section", "seed-entry");
  panel.appendChild(el("h2", undefined, "Start from your bibliography"));

  const textarea = el("textarea");
  textarea.id = "bib-text";
  textarea.placeholder = "Paste BibTeX-style entries (title and year are used) ...";
  textarea.rows = 8;
  panel.appendChild(textarea);

  const fileRow = el("div", "row");
  const fileInput = el("input");
  fileInput.type = "file";
  fileInput.id = "bib-file";
  fileInput.addEventListener("change", () => {
    const file = fileInput.files && fileInput.files[0];
    if (!file) return;
    file.text().then((text) => {
      textarea.value = text;
      refresh();
    });
  });
  fileRow.appendChild(fileInput);
  panel.appendChild(fileRow);

  panel.appendChild(el("h3", undefined, "Or add papers by title"));
  const searchRow = el("div", "row");
  const searchBox = el("input");
  searchBox.id = "seed-search";
  searchBox.type = "search";
  searchBox.placeholder = "Search titles…";
  const searchBtn = el("button", undefined, "Search");
  searchBtn.id = "seed-search-go";
  searchRow.append(searchBox, searchBtn);
  panel.appendChild(searchRow);

  const searchResults = el("ul", "search-results");
  searchResults.id = "seed-search-results";
  panel.appendChild(searchResults);

  const notice = el("p", "notice");
  notice.id = "seed-notice";
  panel.appendChild(notice);

  const picksList = el("ul", "picks");
  picksList.id = "seed-picks";
  panel.appendChild(picksList);

  const errorBox = el("p", "error");
  errorBox.id = "seed-error";
  panel.appendChild(errorBox);

  const submit = el("button", "primary", "Find related papers");
  submit.id = "seed-submit";
  panel.appendChild(submit);

  function refresh(): void {
    submit.disabled = !staging.hasInput(textarea.value) || session.pending;
  }

  function renderPicks(): void {
    picksList.replaceChildren();
    for (const pick of staging.picks.values()) {
      const li = el("li", "pick", `${pick.title} (${pick.year ?? "?"})`);
      const rm = el("button", "small", "remove");
      rm.addEventListener("click", () => {
        staging.remove(pick.id);
        renderPicks();
        refresh();
      });
      li.appendChild(rm);
      picksList.appendChild(li);
    }
  }

  function addPick(paper: PaperItem): void {
    if (!staging.add(paper)) {
      notice.textContent = `"${paper.title}" is already in the seed list`;
      return;
    }
    notice.textContent = "";
    renderPicks();
    refresh();
  }

  async function runSearch(): Promise<void> {
    const q = searchBox.value.trim();
    if (!q) return;
    try {
      const results = await api.search(q);
      searchResults.replaceChildren();
      if (!results.length) {
        searchResults.appendChild(el("li", "empty", "no matches"));
      }
      for (const paper of results) {
        const li = el("li", "hit", `${paper.title} (${paper.year ?? "?"})`);
        const add = el("button", "small", "add");
        add.addEventListener("click", () => addPick(paper));
        li.appendChild(add);
        searchResults.appendChild(li);
      }
    } catch (err) {
      errorBox.textContent = err instanceof ApiError ? err.message : String(err);
    }
  }

  searchBtn.addEventListener("click", () => { void runSearch(); });
  searchBox.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void runSearch();
  });
  textarea.addEventListener("input", refresh);

  submit.addEventListener("click", async () => {
    if (!session.beginRequest()) return;
    refresh();
    errorBox.textContent = "";
    try {
      const resp = await api.bibliography(staging.bibliographyText(textarea.value));
      session.open(resp);
      deps.onSessionOpened();
    } catch (err) {
      if (err instanceof ApiError) {
        errorBox.textContent = err.status === 422
          ? `No entry could be resolved. Unmatched: ${err.unmatched.join("; ")}`
          : err.message;
      } else {
        errorBox.textContent = String(err);
      }
    } finally {
      session.endRequest();
      refresh();
    }
  });

  container.appendChild(panel);
  refresh();
}
