/** Client-side session state.
 *
 * The model owns no numbers of its own: every card field, ranking key,
 * and chart value below is a direct copy or fixed transform of a
 * service response field, so contract tests can hold it against the
 * recorded payloads field-for-field.
 */

import {
  ApiClient,
  Candidate,
  CreateSessionBody,
  Posterior,
  PreferenceRecord,
} from "./api.js";

/** Two-sided 95% normal quantile used for every band in the UI. */
export const Z95 = 1.959963984540054;

export interface Card {
  index: number;
  action: number[];
  y: number;
  mean: number;
  lo: number;
  hi: number;
  /** Ranking key: quantitative score plus posterior mean. */
  score: number;
}

export interface PosteriorView {
  grid: number[][];
  mean: number[];
  lo: number[];
  hi: number[];
  /** hi - lo per grid point; the band-narrowing assertions read this. */
  bandWidth: number[];
  history: PreferenceRecord[];
}

export interface HistoryEntry {
  winner: number;
  loser: number;
}

export function toCard(c: Candidate): Card {
  const half = Z95 * Math.sqrt(Math.max(c.posterior_var, 0));
  return {
    index: c.index,
    action: c.action,
    y: c.y,
    mean: c.posterior_mean,
    lo: c.posterior_mean - half,
    hi: c.posterior_mean + half,
    score: c.y + c.posterior_mean,
  };
}

/** Descending by score; exact ties keep the lower candidate index first. */
export function rankCards(cards: Card[]): Card[] {
  return [...cards].sort((a, b) => b.score - a.score || a.index - b.index);
}

export function toPosteriorView(p: Posterior): PosteriorView {
  const lo = p.mean.map((m, i) => m - Z95 * Math.sqrt(Math.max(p.var[i], 0)));
  const hi = p.mean.map((m, i) => m + Z95 * Math.sqrt(Math.max(p.var[i], 0)));
  return {
    grid: p.grid,
    mean: p.mean,
    lo,
    hi,
    bandWidth: hi.map((h, i) => h - lo[i]),
    history: p.history,
  };
}

export interface CreateFormInput {
  problem: string;
  sigma: string;
  m: string;
  seed: string;
}

/** Field-level validation for the start form; null means submittable. */
export function validateCreateForm(input: CreateFormInput): string | null {
  if (!input.problem.trim()) return "pick a problem";
  const sigma = Number(input.sigma);
  if (!Number.isFinite(sigma) || sigma < 0) return "sigma must be a number >= 0";
  const m = Number(input.m);
  if (!Number.isInteger(m) || m < 1) return "m must be a positive integer";
  const seed = Number(input.seed);
  if (!Number.isInteger(seed)) return "seed must be an integer";
  return null;
}

export class SessionModel {
  sessionId = "";
  problem = "";
  sigma = 0;
  m = 0;
  candidates: Candidate[] = [];
  /** Serving indices per batch, in arrival order. */
  batches: number[][] = [];
  history: HistoryEntry[] = [];
  posterior: PosteriorView | null = null;
  /** At most one mutation in flight; reads piggyback on it. */
  busy = false;

  constructor(private readonly api: ApiClient) {}

  async start(body: CreateSessionBody): Promise<void> {
    const created = await this.api.createSession(body);
    this.sessionId = created.session_id;
    this.problem = created.problem;
    this.sigma = created.sigma;
    this.m = created.m;
    this.candidates = created.candidates;
    this.batches = [created.candidates.map((c) => c.index)];
    this.history = [];
    await this.refreshPosterior();
  }

  /** Rebuild the view for an existing session (page refresh). */
  async restore(sessionId: string): Promise<void> {
    const state = await this.api.getSession(sessionId);
    this.sessionId = state.session_id;
    this.problem = state.problem;
    this.sigma = state.sigma;
    this.m = state.m;
    const listing = await this.api.getCandidates(sessionId);
    this.candidates = listing.candidates;
    this.batches = [];
    for (let b = 0; b < state.batch_count; b += 1) {
      const start = b * state.m;
      this.batches.push(
        listing.candidates.slice(start, start + state.m).map((c) => c.index),
      );
    }
    this.history = [];
    await this.refreshPosterior();
    for (const rec of this.posterior?.history ?? []) {
      const winner = this.indexOfAction(rec.winner);
      const loser = this.indexOfAction(rec.loser);
      if (winner >= 0 && loser >= 0) this.history.push({ winner, loser });
    }
  }

  private indexOfAction(action: number[]): number {
    const hit = this.candidates.find((c) =>
      c.action.length === action.length &&
      c.action.every((x, k) => x === action[k]),
    );
    return hit ? hit.index : -1;
  }

  private async refreshPosterior(): Promise<void> {
    this.posterior = toPosteriorView(await this.api.getPosterior(this.sessionId));
  }

  allCards(): Card[] {
    return this.candidates.map(toCard);
  }

  /** Cards of the most recent batch, in served order. */
  latestBatchCards(): Card[] {
    const latest = this.batches[this.batches.length - 1] ?? [];
    const byIndex = new Map(this.candidates.map((c) => [c.index, c]));
    return latest.map((i) => toCard(byIndex.get(i)!));
  }

  rankedCards(): Card[] {
    return rankCards(this.allCards());
  }

  rankOf(index: number): number {
    return this.rankedCards().findIndex((c) => c.index === index);
  }

  /** 95% band width at the grid point nearest the action. */
  bandWidthAt(action: number[]): number {
    const p = this.posterior;
    if (!p) return NaN;
    let best = 0;
    let bestDist = Infinity;
    p.grid.forEach((g, i) => {
      const d = g.reduce((s, x, k) => s + (x - action[k]) ** 2, 0);
      if (d < bestDist) {
        bestDist = d;
        best = i;
      }
    });
    return p.bandWidth[best];
  }

  /** Submit a pairwise preference.  Returns false when blocked (same
   * card twice, or a mutation already in flight — duplicate clicks
   * debounce to nothing rather than double-posting). */
  async prefer(winner: number, loser: number): Promise<boolean> {
    if (winner === loser || this.busy) return false;
    this.busy = true;
    try {
      const summary = await this.api.postPreference(this.sessionId, winner, loser);
      this.candidates = summary.summary;
      this.history.push({ winner, loser });
      await this.refreshPosterior();
      return true;
    } finally {
      this.busy = false;
    }
  }

  async nextBatch(): Promise<boolean> {
    if (this.busy) return false;
    this.busy = true;
    try {
      const batch = await this.api.nextBatch(this.sessionId);
      this.candidates = this.candidates.concat(batch.candidates);
      this.batches.push(batch.candidates.map((c) => c.index));
      return true;
    } finally {
      this.busy = false;
    }
  }
}
