// Client-side session state: seed staging before a session exists, then a
// mirror of the server session with feedback staging and parameter state.

import type { BibliographyResponse, PaperItem } from "./api.js";

export type Mark = "relevant" | "irrelevant";
export type Target = "papers" | "venues" | "experts";

const BRACES = /[{}]/g;

/** Seeds collected before the session starts: pasted bibliography text plus
 * papers picked through title search. */
export class SeedStaging {
  picks = new Map<string, PaperItem>();

  /** Returns false (no-op) when the paper is already staged. */
  add(paper: PaperItem): boolean {
    if (this.picks.has(paper.id)) return false;
    this.picks.set(paper.id, paper);
    return true;
  }

  remove(id: string): void {
    this.picks.delete(id);
  }

  hasInput(pastedText: string): boolean {
    return pastedText.trim().length > 0 || this.picks.size > 0;
  }

  /** Pasted text plus one synthesized entry per picked paper. */
  bibliographyText(pastedText: string): string {
    const parts = pastedText.trim() ? [pastedText.trim()] : [];
    let i = 0;
    for (const p of this.picks.values()) {
      const title = p.title.replace(BRACES, " ");
      const year = p.year ? `, year={${p.year}}` : "";
      parts.push(`@misc{pick${i}, title={${title}}${year}}`);
      i += 1;
    }
    return parts.join("\n");
  }
}

/** Mirror of one server-side feedback session. */
export class UiSession {
  sessionId: string | null = null;
  seeds: PaperItem[] = [];
  unmatched: string[] = [];
  pageItems: PaperItem[] = [];
  pageNumber = 0;
  displayed = new Set<string>();
  staged = new Map<string, Mark>();
  algorithm = "darwr";
  lambda = 0.5;
  d = 0.75;
  k = 10;
  target: Target = "papers";
  pending = false;

  /** Single in-flight request per session: returns false while one runs. */
  beginRequest(): boolean {
    if (this.pending) return false;
    this.pending = true;
    return true;
  }

  endRequest(): void {
    this.pending = false;
  }

  open(resp: BibliographyResponse): void {
    this.sessionId = resp.session_id;
    this.seeds = resp.seeds;
    this.unmatched = resp.unmatched;
    this.pageItems = [];
    this.pageNumber = 0;
    this.displayed.clear();
    this.staged.clear();
  }

  /** Record a freshly displayed page. The server never re-sends a shown
   * paper; surface any repeat loudly instead of rendering it. */
  recordPage(items: PaperItem[], pageNumber?: number): void {
    for (const item of items) {
      if (this.displayed.has(item.id)) {
        throw new Error(`server re-sent already displayed paper ${item.id}`);
      }
      this.displayed.add(item.id);
    }
    this.pageItems = items;
    this.pageNumber = pageNumber ?? this.pageNumber + 1;
  }

  /** Toggle a staged mark. Marking one way clears the other, so the staged
   * sets stay disjoint; marking the same way twice clears the mark. */
  stageMark(id: string, mark: Mark): Mark | null {
    if (!this.displayed.has(id)) {
      throw new Error(`cannot mark paper ${id}: never displayed`);
    }
    if (this.staged.get(id) === mark) {
      this.staged.delete(id);
      return null;
    }
    this.staged.set(id, mark);
    return mark;
  }

  stagedLists(): { relevant: string[]; irrelevant: string[] } {
    const relevant: string[] = [];
    const irrelevant: string[] = [];
    for (const [id, mark] of this.staged) {
      (mark === "relevant" ? relevant : irrelevant).push(id);
    }
    return { relevant, irrelevant };
  }

  hasStaged(): boolean {
    return this.staged.size > 0;
  }

  clearStaged(): void {
    this.staged.clear();
  }

  meanDisplayedYear(): number | null {
    const years = this.pageItems.map((p) => p.year).filter((y): y is number => !!y);
    if (!years.length) return null;
    return years.reduce((a, b) => a + b, 0) / years.length;
  }
}
