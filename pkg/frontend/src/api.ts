/** Typed client for the read-only analysis service. The dashboard never
 * computes statistics itself: every number it renders comes from one of
 * these response documents. */

export interface KeyDoc {
  config_id: string;
  hardware_type: string;
  metric_class: string;
  benchmark: string;
  parameters: Record<string, string>;
}

export interface ObservationDoc {
  timestamp: string;
  machine_id: string;
  value: number;
}

export interface SeriesDoc {
  key: KeyDoc;
  unit: string;
  dropped_count: number;
  observations: ObservationDoc[];
}

export interface SegmentDoc {
  start_index: number;
  end_index: number;
  start_time: string;
  end_time: string;
  mean: number;
  duration_days: number;
  count: number;
}

export interface ChangepointDoc {
  index: number;
  timestamp: string;
  pre_mean: number;
  post_mean: number;
  percent_change: number | null;
}

export interface SegmentationDoc {
  key: KeyDoc;
  k: number;
  beta: number;
  standardized: boolean;
  sigma_hat: number;
  total_cost: number;
  n: number;
  warnings: string[];
  segments: SegmentDoc[];
  changepoints: ChangepointDoc[];
}

export interface HistogramDoc {
  edges: number[];
  counts: number[];
  underflow: number;
  overflow: number;
}

export interface ClassSummaryDoc {
  metric_class: string;
  configurations: number;
  changepoints: number;
  ratio: number;
  change_histogram: HistogramDoc;
  duration_histogram: HistogramDoc;
  undefined_changes: number;
  stable_configurations: string[];
}

export interface SummaryDoc {
  k: number;
  beta: number | string;
  classes: ClassSummaryDoc[];
}

export interface TimelineBucketDoc {
  day: string;
  metric_class: string;
  count: number;
  positive: number;
  negative: number;
  undefined: number;
}

export interface TimelineDoc {
  k: number;
  buckets: TimelineBucketDoc[];
}

export interface EventDoc {
  date: string;
  description: string;
  hardware_scope: string[];
  expected_direction: Record<string, string>;
}

export interface MatchedChangepointDoc {
  config_id: string;
  index: number;
  timestamp: string;
  percent_change: number | null;
}

export interface EventClassStatsDoc {
  metric_class: string;
  matched: number;
  mean_change: number | null;
  max_abs_change: number | null;
}

export interface EventAttributionDoc {
  event: EventDoc;
  window_days: number;
  matched_count: number;
  matched: MatchedChangepointDoc[];
  per_class: EventClassStatsDoc[];
}

export interface EventsDoc {
  k: number;
  events: EventAttributionDoc[];
}

export interface SweepRowDoc {
  k: number;
  counts: Record<string, number>;
  total: number;
  seconds: number;
}

export interface SweepDoc {
  k_grid: number[];
  rows: SweepRowDoc[];
  failures: { config_id: string; error: string }[];
}

export interface ApiErrorDoc {
  error: string;
  detail: string;
}

/** Base URL of the analysis service. Empty string means same-origin; an
 * inline script in index.html may set `window.API_BASE_URL` before the app
 * module loads. */
export function apiBaseUrl(): string {
  const override = (globalThis as { API_BASE_URL?: unknown }).API_BASE_URL;
  return typeof override === "string" ? override.replace(/\/$/, "") : "";
}

export function segmentationUrl(config: string, k: number): string {
  const params = new URLSearchParams({ config, k: String(k) });
  return `${apiBaseUrl()}/segmentation?${params.toString()}`;
}

export function seriesUrl(config: string): string {
  return `${apiBaseUrl()}/series?${new URLSearchParams({ config }).toString()}`;
}

export function configsUrl(): string {
  return `${apiBaseUrl()}/configs`;
}

export function summaryUrl(k: number): string {
  return `${apiBaseUrl()}/summary?${new URLSearchParams({ k: String(k) }).toString()}`;
}

export function timelineUrl(k: number): string {
  return `${apiBaseUrl()}/timeline?${new URLSearchParams({ k: String(k) }).toString()}`;
}

export function eventsUrl(k: number, windowDays: number): string {
  const params = new URLSearchParams({ k: String(k), window: String(windowDays) });
  return `${apiBaseUrl()}/events?${params.toString()}`;
}

export function sweepUrl(): string {
  return `${apiBaseUrl()}/sweep`;
}

/** Fetch one API document; rejects with the service's error detail on 4xx. */
export async function fetchJson(url: string): Promise<unknown> {
  const response = await fetch(url);
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as ApiErrorDoc;
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new Error(detail);
  }
  return response.json();
}
