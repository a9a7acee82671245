/** Browser bootstrap: wires the controls to the API and keeps the current
 * view state mirrored in the URL fragment. */

import {
  configsUrl,
  eventsUrl,
  fetchJson,
  segmentationUrl,
  seriesUrl,
  summaryUrl,
  sweepUrl,
  timelineUrl,
  type KeyDoc,
  type SegmentationDoc,
  type SeriesDoc,
} from "./api.js";
import { PanelLoader } from "./controller.js";
import {
  renderError,
  renderEvents,
  renderScatter,
  renderSummary,
  renderSweep,
  renderTimeline,
} from "./render.js";
import {
  clampK,
  decodeState,
  encodeState,
  K_MAX,
  K_MIN,
  K_STEP,
  PANELS,
  type Panel,
  type ViewState,
} from "./state.js";

interface ScatterDocs {
  series: SeriesDoc;
  segmentation: SegmentationDoc;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

export function bootstrap(): void {
  const configSelect = el<HTMLSelectElement>("config-select");
  const slider = el<HTMLInputElement>("k-slider");
  const kValue = el<HTMLSpanElement>("k-value");
  const windowInput = el<HTMLInputElement>("window-input");
  const tabs = el<HTMLElement>("tabs");
  const panelHost = el<HTMLElement>("panel");
  const banner = el<HTMLElement>("banner");

  slider.min = String(K_MIN);
  slider.max = String(K_MAX);
  slider.step = String(K_STEP);

  let state: ViewState = decodeState(location.hash);

  // The raw series for a configuration does not depend on K, so slider moves
  // reuse the cached series and issue only the segmentation request.
  const seriesCache = new Map<string, Promise<SeriesDoc>>();
  const fetchScatter = async (url: string): Promise<unknown> => {
    const config = new URL(url, "http://localhost").searchParams.get("config") ?? "";
    let series = seriesCache.get(config);
    if (series === undefined) {
      series = fetchJson(seriesUrl(config)) as Promise<SeriesDoc>;
      seriesCache.set(config, series);
      series.catch(() => seriesCache.delete(config));
    }
    const segmentation = (await fetchJson(url)) as SegmentationDoc;
    return { series: await series, segmentation } satisfies ScatterDocs;
  };

  const loaders: Record<Panel, PanelLoader> = {
    scatter: new PanelLoader(fetchScatter),
    histograms: new PanelLoader(fetchJson),
    timeline: new PanelLoader(fetchJson),
    events: new PanelLoader(fetchJson),
    sweep: new PanelLoader(fetchJson),
  };

  const show = (html: string): void => {
    banner.innerHTML = "";
    panelHost.innerHTML = html;
  };
  const showError = (err: Error): void => {
    // Keep the previous view; surface the failure in the banner only.
    banner.innerHTML = renderError(err.message);
  };

  const panelUrl = (panel: Panel): string | null => {
    switch (panel) {
      case "scatter":
        return state.config === null ? null : segmentationUrl(state.config, state.k);
      case "histograms":
        return summaryUrl(state.k);
      case "timeline":
        return timelineUrl(state.k);
      case "events":
        return eventsUrl(state.k, state.windowDays);
      case "sweep":
        return sweepUrl();
    }
  };

  const renderDoc = (panel: Panel, doc: unknown): string => {
    switch (panel) {
      case "scatter": {
        const docs = doc as ScatterDocs;
        return renderScatter(docs.series, docs.segmentation);
      }
      case "histograms":
        return renderSummary(doc as never);
      case "timeline":
        return renderTimeline(doc as never);
      case "events":
        return renderEvents(doc as never);
      case "sweep":
        return renderSweep(doc as never);
    }
  };

  const refresh = (debounced: boolean): void => {
    const panel = state.panel;
    const url = panelUrl(panel);
    if (url === null) return;
    const apply = (doc: unknown): void => {
      if (panel === state.panel) show(renderDoc(panel, doc));
    };
    if (debounced) loaders[panel].request(url, apply, showError);
    else loaders[panel].requestNow(url, apply, showError);
  };

  const syncControls = (): void => {
    slider.value = String(state.k);
    kValue.textContent = state.k.toFixed(2);
    windowInput.value = String(state.windowDays);
    if (state.config !== null) configSelect.value = state.config;
    for (const button of tabs.querySelectorAll<HTMLButtonElement>("button[data-panel]")) {
      button.classList.toggle("active", button.dataset.panel === state.panel);
    }
  };
  const syncHash = (): void => {
    history.replaceState(null, "", encodeState(state));
  };

  configSelect.addEventListener("change", () => {
    state.config = configSelect.value;
    syncHash();
    refresh(false);
  });
  slider.addEventListener("input", () => {
    state.k = clampK(Number(slider.value));
    kValue.textContent = state.k.toFixed(2);
    syncHash();
    refresh(true);
  });
  windowInput.addEventListener("change", () => {
    const days = Number(windowInput.value);
    if (Number.isInteger(days) && days >= 0) {
      state.windowDays = days;
      syncHash();
      if (state.panel === "events") refresh(true);
    }
  });
  tabs.addEventListener("click", (ev) => {
    const button = (ev.target as HTMLElement).closest<HTMLButtonElement>("button[data-panel]");
    if (button === null) return;
    state.panel = button.dataset.panel as Panel;
    syncControls();
    syncHash();
    refresh(false);
  });
  window.addEventListener("hashchange", () => {
    state = decodeState(location.hash);
    syncControls();
    refresh(false);
  });

  for (const panel of PANELS) {
    const button = tabs.querySelector(`button[data-panel="${panel}"]`);
    if (button === null) throw new Error(`missing tab for panel ${panel}`);
  }

  fetchJson(configsUrl()).then((docs) => {
    const keys = docs as KeyDoc[];
    configSelect.innerHTML = keys
      .map((key) => `<option value="${key.config_id}">${key.config_id}</option>`)
      .join("");
    if (state.config === null && keys.length > 0) state.config = keys[0].config_id;
    syncControls();
    syncHash();
    refresh(false);
  }, showError);
}

bootstrap();
