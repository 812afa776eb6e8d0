// Typed client for the hazident review API. Pure module: the fetch
// implementation is injected so tests can run without a server.

export type Verdict = 'hazardous' | 'not_hazardous' | 'unsure';
export type EventStatus = Verdict | 'pending';

export interface RunSummary {
  run_id: string;
  created_at: string;
  config_name: string;
  config_version: string;
  event_count: number;
  relevant_count: number;
}

export interface EventSummary {
  id: string;
  mode: string;
  skill: string | null;
  skill_name: string | null;
  malfunction_id: string | null;
  malfunction: string | null;
  scene_id: string;
  failure_count: number;
  relevant: boolean;
  drop_reasons: string[];
  status: EventStatus;
}

export interface EventPage {
  total: number;
  offset: number;
  limit: number;
  events: EventSummary[];
}

export interface HazardTriangle {
  hazardous_element: string;
  initiating_mechanism: string;
  target: string;
}

export interface Assessment {
  seq: number;
  event_id: string;
  status: Verdict;
  rationale: string;
  assessor: string;
}

export interface EventDetail {
  event: { id: string; mode: string; [key: string]: unknown };
  mode_name: string;
  card: [string, string][];
  card_text: string;
  triangle: HazardTriangle;
  assessment: Assessment | null;
}

export interface ModeProgress {
  mode: string;
  mode_name: string;
  relevant: number;
  assessed: number;
  hazardous: number;
}

export interface Progress {
  total: number;
  relevant: number;
  assessed: number;
  remaining: number;
  by_status: Record<Verdict, number>;
  by_mode: ModeProgress[];
}

export interface EventQuery {
  mode?: string;
  status?: EventStatus;
  relevant?: boolean;
  offset?: number;
  limit?: number;
}

/** Error body shape shared by every API error response. */
export interface ApiErrorBody {
  code: string;
  message: string;
  entity: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly entity: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = 'ApiError';
    this.status = status;
    this.code = body.code;
    this.entity = body.entity;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody = {
    code: `http-${response.status}`,
    message: response.statusText || `request failed with ${response.status}`,
    entity: '',
  };
  try {
    const parsed = (await response.json()) as Partial<ApiErrorBody>;
    if (parsed && typeof parsed.code === 'string') {
      body = { code: parsed.code, message: parsed.message ?? '', entity: parsed.entity ?? '' };
    }
  } catch {
    // non-JSON error body; keep the synthetic one
  }
  return new ApiError(response.status, body);
}

export class ReviewApi {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = '', fetchImpl: FetchLike = (input, init) => fetch(input, init)) {
    // Trailing slash would double up when paths are appended.
    this.baseUrl = baseUrl.endsWith('/') ? baseUrl.slice(0, -1) : baseUrl;
    this.fetchImpl = fetchImpl;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw await asError(response);
    return (await response.json()) as T;
  }

  eventsPath(runId: string, query: EventQuery = {}): string {
    const params = new URLSearchParams();
    if (query.mode !== undefined) params.set('mode', query.mode);
    if (query.status !== undefined) params.set('status', query.status);
    if (query.relevant !== undefined) params.set('relevant', String(query.relevant));
    if (query.offset !== undefined) params.set('offset', String(query.offset));
    if (query.limit !== undefined) params.set('limit', String(query.limit));
    const suffix = params.toString();
    return `/runs/${runId}/events` + (suffix ? `?${suffix}` : '');
  }

  async listRuns(): Promise<RunSummary[]> {
    const body = await this.get<{ runs: RunSummary[] }>('/runs');
    return body.runs;
  }

  listEvents(runId: string, query: EventQuery = {}): Promise<EventPage> {
    return this.get<EventPage>(this.eventsPath(runId, query));
  }

  eventDetail(runId: string, eventId: string): Promise<EventDetail> {
    return this.get<EventDetail>(`/runs/${runId}/events/${eventId}`);
  }

  progress(runId: string): Promise<Progress> {
    return this.get<Progress>(`/runs/${runId}/progress`);
  }

  async putAssessment(
    runId: string,
    eventId: string,
    verdict: Verdict,
    rationale = '',
    assessor = '',
  ): Promise<Assessment> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/runs/${runId}/events/${eventId}/assessment`,
      {
        method: 'PUT',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ status: verdict, rationale, assessor }),
      },
    );
    if (!response.ok) throw await asError(response);
    const body = (await response.json()) as { assessment: Assessment };
    return body.assessment;
  }
}
