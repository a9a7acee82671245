/** View state for the dashboard, round-trippable through the URL fragment
 * so any exploration is shareable as a plain link. */

export const PANELS = ["scatter", "histograms", "timeline", "events", "sweep"] as const;
export type Panel = (typeof PANELS)[number];

export const K_MIN = 0.3;
export const K_MAX = 1.0;
export const K_STEP = 0.05;
export const DEFAULT_K = 0.6;
export const DEFAULT_WINDOW_DAYS = 3;

export interface ViewState {
  /** Selected configuration id, or null before the config list loads. */
  config: string | null;
  /** Biweight saturation threshold; slider value in [K_MIN, K_MAX]. */
  k: number;
  panel: Panel;
  /** Event-attribution date window in days. */
  windowDays: number;
}

export function defaultState(): ViewState {
  return { config: null, k: DEFAULT_K, panel: "scatter", windowDays: DEFAULT_WINDOW_DAYS };
}

/** Snap K to the slider grid and clamp it into the supported range. */
export function clampK(k: number): number {
  if (!Number.isFinite(k)) return DEFAULT_K;
  const snapped = K_MIN + Math.round((k - K_MIN) / K_STEP) * K_STEP;
  const bounded = Math.min(K_MAX, Math.max(K_MIN, snapped));
  return Number(bounded.toFixed(2));
}

function isPanel(value: string): value is Panel {
  return (PANELS as readonly string[]).includes(value);
}

/** Serialize to a URL fragment, e.g. `#panel=scatter&k=0.6&window=3&config=...`. */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("panel", state.panel);
  params.set("k", String(state.k));
  params.set("window", String(state.windowDays));
  if (state.config !== null) params.set("config", state.config);
  return "#" + params.toString();
}

/** Parse a URL fragment; missing or malformed fields fall back to defaults. */
export function decodeState(fragment: string): ViewState {
  const state = defaultState();
  const raw = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  if (raw === "") return state;
  const params = new URLSearchParams(raw);
  const panel = params.get("panel");
  if (panel !== null && isPanel(panel)) state.panel = panel;
  const k = params.get("k");
  if (k !== null) state.k = clampK(Number(k));
  const window = params.get("window");
  if (window !== null) {
    const days = Number(window);
    if (Number.isInteger(days) && days >= 0) state.windowDays = days;
  }
  const config = params.get("config");
  if (config !== null && config !== "") state.config = config;
  return state;
}
