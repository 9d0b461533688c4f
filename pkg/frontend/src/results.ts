// Results view: paginated papers with relevant/irrelevant marking, the
// traditional-vs-recent slider, and venue/expert tabs.

import { ApiClient, ApiError, ListResponse, PageResponse } from "./api.js";
import { Target, UiSession } from "./state.js";

const ALGORITHMS = [
  "darwr", "paperrank", "katz", "dakatz", "cocitation", "cocoupling", "ccidf",
];

export interface ResultsDeps {
  api: ApiClient;
  session: UiSession;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderResults(container: HTMLElement, deps: ResultsDeps): void {
  const { api, session } = deps;
  container.replaceChildren();

  const panel = el("section", "results");
  panel.appendChild(el("h2", undefined, "Recommendations"));

  const seedsLine = el("p", "seeds",
    `Seeds: ${session.seeds.map((s) => s.title).join(" · ")}`);
  panel.appendChild(seedsLine);
  if (session.unmatched.length) {
    panel.appendChild(el("p", "banner warn",
      `Unmatched entries: ${session.unmatched.join("; ")}`));
  }

  // --- parameter controls --------------------------------------------------
  const controls = el("div", "controls");

  const sliderWrap = el("label", "slider");
  sliderWrap.append("traditional ");
  const slider = el("input");
  slider.id = "lambda-slider";
  slider.type = "range";
  slider.min = "0";
  slider.max = "1";
  slider.step = "0.05";
  slider.value = String(session.lambda);
  const sliderValue = el("span", "slider-value", session.lambda.toFixed(2));
  sliderWrap.append(slider, " ", sliderValue, " recent");
  slider.addEventListener("input", () => {
    session.lambda = Number(slider.value);
    sliderValue.textContent = session.lambda.toFixed(2);
  });
  controls.appendChild(sliderWrap);

  const algoSelect = el("select");
  algoSelect.id = "algorithm";
  for (const name of ALGORITHMS) {
    const opt = el("option", undefined, name);
    opt.value = name;
    algoSelect.appendChild(opt);
  }
  algoSelect.value = session.algorithm;
  algoSelect.addEventListener("change", () => {
    session.algorithm = algoSelect.value;
  });
  controls.appendChild(algoSelect);

  const advancedToggle = el("button", "small", "advanced");
  const advanced = el("div", "advanced");
  advanced.hidden = true;
  advancedToggle.addEventListener("click", () => {
    advanced.hidden = !advanced.hidden;
  });
  const dLabel = el("label", undefined, "damping d ");
  const dInput = el("input");
  dInput.id = "damping";
  dInput.type = "number";
  dInput.min = "0.05";
  dInput.max = "1";
  dInput.step = "0.05";
  dInput.value = String(session.d);
  dInput.addEventListener("change", () => {
    session.d = Number(dInput.value);
  });
  dLabel.appendChild(dInput);
  const kLabel = el("label", undefined, "page size ");
  const kInput = el("input");
  kInput.id = "page-size";
  kInput.type = "number";
  kInput.min = "1";
  kInput.max = "50";
  kInput.value = String(session.k);
  kInput.addEventListener("change", () => {
    session.k = Number(kInput.value);
  });
  kLabel.appendChild(kInput);
  advanced.append(dLabel, kLabel);
  controls.append(advancedToggle, advanced);
  panel.appendChild(controls);

  // --- tabs ------------------------------------------------------------------
  const tabs = el("div", "tabs");
  const tabButtons = new Map<Target, HTMLButtonElement>();
  for (const target of ["papers", "venues", "experts"] as Target[]) {
    const b = el("button", "tab", target);
    b.id = `tab-${target}`;
    b.addEventListener("click", () => { void query(target); });
    tabButtons.set(target, b);
    tabs.appendChild(b);
  }
  panel.appendChild(tabs);

  const errorBox = el("p", "error");
  errorBox.id = "results-error";
  panel.appendChild(errorBox);

  const list = el("div", "list");
  list.id = "results-list";
  panel.appendChild(list);

  const actions = el("div", "actions");
  const nextBtn = el("button", undefined, "Next page");
  nextBtn.id = "next-page";
  const refineBtn = el("button", "primary", "Refine with feedback");
  refineBtn.id = "refine";
  const clearBtn = el("button", "small", "Clear staged marks");
  clearBtn.id = "clear-staged";
  actions.append(nextBtn, refineBtn, clearBtn);
  panel.appendChild(actions);

  function setBusy(busy: boolean): void {
    for (const b of [nextBtn, refineBtn, clearBtn, advancedToggle, ...tabButtons.values()]) {
      b.disabled = busy;
    }
    refineBtn.disabled = busy || !session.hasStaged();
  }

  function markButtons(id: string): HTMLSpanElement {
    const wrap = el("span", "marks");
    const rel = el("button", "mark mark-relevant", "relevant");
    const irr = el("button", "mark mark-irrelevant", "irrelevant");
    const sync = () => {
      rel.classList.toggle("active", session.staged.get(id) === "relevant");
      irr.classList.toggle("active", session.staged.get(id) === "irrelevant");
      refineBtn.disabled = session.pending || !session.hasStaged();
    };
    rel.addEventListener("click", () => { session.stageMark(id, "relevant"); sync(); });
    irr.addEventListener("click", () => { session.stageMark(id, "irrelevant"); sync(); });
    sync();
    wrap.append(rel, irr);
    return wrap;
  }

  function renderPapers(): void {
    list.replaceChildren();
    const header = el("p", "page-header",
      `Page ${session.pageNumber}: ${session.pageItems.length} papers`);
    list.appendChild(header);
    if (!session.pageItems.length) {
      list.appendChild(el("p", "empty", "No more candidates."));
      return;
    }
    const table = el("table");
    const head = el("tr");
    for (const h of ["title", "year", "venue", "score", "feedback"]) {
      head.appendChild(el("th", undefined, h));
    }
    table.appendChild(head);
    for (const item of session.pageItems) {
      const tr = el("tr", "paper-row");
      tr.dataset.id = item.id;
      tr.appendChild(el("td", "title", item.title));
      tr.appendChild(el("td", undefined, item.year ? String(item.year) : "?"));
      tr.appendChild(el("td", undefined, item.venue ?? ""));
      tr.appendChild(el("td", undefined, (item.score ?? 0).toExponential(3)));
      const cell = el("td");
      cell.appendChild(markButtons(item.id));
      tr.appendChild(cell);
      table.appendChild(tr);
    }
    list.appendChild(table);
  }

  function renderNames(resp: ListResponse, kind: Target): void {
    list.replaceChildren();
    list.appendChild(el("p", "page-header", `Top ${resp.items.length} ${kind}`));
    const ol = el("ol");
    for (const item of resp.items) {
      ol.appendChild(el("li", undefined,
        `${item.name}  (${item.score.toExponential(3)})`));
    }
    list.appendChild(ol);
  }

  function showError(err: unknown, retry: () => void): void {
    if (err instanceof ApiError && err.status === 503) {
      errorBox.textContent = `The ranking timed out (${err.message}). `;
      const again = el("button", "small", "Retry");
      again.addEventListener("click", () => {
        errorBox.textContent = "";
        retry();
      });
      errorBox.appendChild(again);
    } else {
      errorBox.textContent = err instanceof ApiError ? err.message : String(err);
    }
  }

  async function query(target: Target): Promise<void> {
    if (!session.sessionId || !session.beginRequest()) return;
    session.target = target;
    for (const [t, b] of tabButtons) b.classList.toggle("active", t === target);
    setBusy(true);
    errorBox.textContent = "";
    try {
      const resp = await api.recommend({
        sessionId: session.sessionId,
        algorithm: session.algorithm,
        k: session.k,
        lambda: session.lambda,
        d: session.d,
        target,
      });
      if (target === "papers") {
        const page = resp as PageResponse;
        session.recordPage(page.items, page.page);
        renderPapers();
      } else {
        renderNames(resp as ListResponse, target);
      }
    } catch (err) {
      showError(err, () => { void query(target); });
    } finally {
      session.endRequest();
      setBusy(false);
    }
  }

  async function refine(): Promise<void> {
    if (!session.sessionId || !session.hasStaged() || !session.beginRequest()) return;
    setBusy(true);
    errorBox.textContent = "";
    const { relevant, irrelevant } = session.stagedLists();
    try {
      const resp = await api.feedback(session.sessionId, relevant, irrelevant);
      session.clearStaged();
      session.recordPage(resp.page);
      renderPapers();
    } catch (err) {
      showError(err, () => { void refine(); });
    } finally {
      session.endRequest();
      setBusy(false);
    }
  }

  nextBtn.addEventListener("click", () => { void query("papers"); });
  refineBtn.addEventListener("click", () => { void refine(); });
  clearBtn.addEventListener("click", () => {
    session.clearStaged();
    renderPapers();
    refineBtn.disabled = true;
  });

  container.appendChild(panel);
  void query("papers");
}
