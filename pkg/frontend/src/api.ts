/** Typed client for the curation session HTTP API. */

export interface Candidate {
  index: number;
  action: number[];
  y: number;
  posterior_mean: number;
  posterior_var: number;
}

export interface SessionCreated {
  session_id: string;
  problem: string;
  sigma: number;
  m: number;
  seed: number;
  batch_index: number;
  candidates: Candidate[];
}

export interface SessionState {
  session_id: string;
  problem: string;
  sigma: number;
  m: number;
  seed: number;
  status: string;
  batch_count: number;
  preference_count: number;
  candidate_count: number;
}

export interface CandidateListing {
  candidates: Candidate[];
}

export interface PreferenceSummary {
  preference_count: number;
  summary: Candidate[];
}

export interface Batch {
  batch_index: number;
  candidates: Candidate[];
}

export interface PreferenceRecord {
  winner: number[];
  loser: number[];
}

export interface Posterior {
  grid: number[][];
  mean: number[];
  var: number[];
  history: PreferenceRecord[];
}

export interface CreateSessionBody {
  problem: string;
  sigma?: number;
  m?: number;
  seed?: number;
  kernel?: { variant: string; h?: number; kappa?: number; sigma2?: number };
  dis_n?: number;
  dis_t?: number;
  sigma2_dis?: number;
}

/** Service errors carry the machine-readable code from the error body;
 * network failures use code "unreachable" and status 0. */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("unreachable", 0, `service unreachable: ${String(err)}`);
    }
    const doc = (await resp.json().catch(() => ({}))) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        typeof doc.code === "string" ? doc.code : "http_error",
        resp.status,
        typeof doc.message === "string" ? doc.message : `HTTP ${resp.status}`,
      );
    }
    return doc as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", "/sessions", body);
  }

  getSession(id: string): Promise<SessionState> {
    return this.request<SessionState>("GET", `/sessions/${id}`);
  }

  getCandidates(id: string): Promise<CandidateListing> {
    return this.request<CandidateListing>("GET", `/sessions/${id}/candidates`);
  }

  postPreference(id: string, winner: number, loser: number): Promise<PreferenceSummary> {
    return this.request<PreferenceSummary>("POST", `/sessions/${id}/preferences`, {
      winner,
      loser,
    });
  }

  nextBatch(id: string): Promise<Batch> {
    return this.request<Batch>("POST", `/sessions/${id}/next-batch`);
  }

  getPosterior(id: string): Promise<Posterior> {
    return this.request<Posterior>("GET", `/sessions/${id}/posterior`);
  }
}
