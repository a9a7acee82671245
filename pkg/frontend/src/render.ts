/** Pure renderers: API documents in, markup strings out. Nothing here
 * computes a statistic — every number on screen is copied from a JSON
 * field, so tests can compare the DOM directly against fixtures. */

import type {
  EventsDoc,
  HistogramDoc,
  SegmentationDoc,
  SeriesDoc,
  SummaryDoc,
  SweepDoc,
  TimelineDoc,
} from "./api.js";

const WIDTH = 720;
const HEIGHT = 320;
const PAD = 40;

const CLASS_LABEL: Record<string, string> = { cpu: "CPU", memory: "Mem", disk: "Disk" };
const DIRECTION_ARROW: Record<string, string> = { up: "↑", down: "↓", mixed: "↕" };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function scale(value: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi === lo) return (outLo + outHi) / 2;
  return outLo + ((value - lo) / (hi - lo)) * (outHi - outLo);
}

function round1(x: number): string {
  return String(Math.round(x * 10) / 10);
}

export function renderError(message: string): string {
  return `<div class="error-banner" role="alert">${esc(message)}</div>`;
}

/** Scatter of observations with one horizontal mean line per segment and a
 * vertical marker per changepoint. Marker/line positions carry the source
 * JSON values as data attributes. */
export function renderScatter(series: SeriesDoc, segmentation: SegmentationDoc): string {
  const times = series.observations.map((o) => Date.parse(o.timestamp));
  const values = series.observations.map((o) => o.value);
  const tLo = Math.min(...times);
  const tHi = Math.max(...times);
  const vLo = Math.min(...values);
  const vHi = Math.max(...values);
  const x = (t: number) => round1(scale(t, tLo, tHi, PAD, WIDTH - PAD));
  const y = (v: number) => round1(scale(v, vLo, vHi, HEIGHT - PAD, PAD));

  const points = series.observations
    .map((o) => `<circle class="obs" cx="${x(Date.parse(o.timestamp))}" cy="${y(o.value)}" r="2"/>`)
    .join("");
  const means = segmentation.segments
    .map(
      (s) =>
        `<line class="segment-mean" x1="${x(Date.parse(s.start_time))}" x2="${x(
          Date.parse(s.end_time),
        )}" y1="${y(s.mean)}" y2="${y(s.mean)}" data-mean="${s.mean}"/>`,
    )
    .join("");
  const markers = segmentation.changepoints
    .map(
      (c) =>
        `<line class="changepoint" x1="${x(Date.parse(c.timestamp))}" x2="${x(
          Date.parse(c.timestamp),
        )}" y1="${PAD}" y2="${HEIGHT - PAD}" data-timestamp="${esc(c.timestamp)}" data-index="${c.index}"/>`,
    )
    .join("");
  const warnings = segmentation.warnings
    .map((w) => `<p class="warning">${esc(w)}</p>`)
    .join("");

  return (
    `<figure class="scatter" data-config="${esc(segmentation.key.config_id)}" data-n="${segmentation.n}">` +
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">` +
    `<text class="axis-unit" x="8" y="16">${esc(series.unit)}</text>` +
    points +
    means +
    markers +
    `</svg>` +
    warnings +
    `</figure>`
  );
}

export function renderHistogram(hist: HistogramDoc, title: string): string {
  const peak = Math.max(1, hist.underflow, hist.overflow, ...hist.counts);
  const bar = (count: number, label: string, cls: string) =>
    `<div class="bar ${cls}" data-count="${count}" title="${esc(label)}: ${count}"` +
    ` style="height:${round1((count / peak) * 100)}%"></div>`;
  const bars = [
    bar(hist.underflow, `< ${hist.edges[0]}`, "underflow"),
    ...hist.counts.map((c, i) => bar(c, `[${hist.edges[i]}, ${hist.edges[i + 1]})`, "bin")),
    bar(hist.overflow, `>= ${hist.edges[hist.edges.length - 1]}`, "overflow"),
  ].join("");
  return `<div class="histogram"><h4>${esc(title)}</h4><div class="bars">${bars}</div></div>`;
}

export function renderSummary(summary: SummaryDoc): string {
  const sections = summary.classes
    .map(
      (c) =>
        `<section class="class-summary" data-class="${esc(c.metric_class)}"` +
        ` data-changepoints="${c.changepoints}" data-configurations="${c.configurations}">` +
        `<h3>${esc(CLASS_LABEL[c.metric_class] ?? c.metric_class)}` +
        ` <span class="ratio">r = ${c.ratio}</span></h3>` +
        `<p>${c.changepoints} changepoints across ${c.configurations} configurations;` +
        ` ${c.undefined_changes} undefined changes;` +
        ` ${c.stable_configurations.length} stable configurations</p>` +
        renderHistogram(c.change_histogram, "Relative change (%)") +
        renderHistogram(c.duration_histogram, "Steady-state duration (days)") +
        `</section>`,
    )
    .join("");
  return `<div class="summary" data-k="${summary.k}">${sections}</div>`;
}

export function renderTimeline(timeline: TimelineDoc): string {
  if (timeline.buckets.length === 0) {
    return `<div class="timeline empty"><p class="empty-note">no changepoints</p></div>`;
  }
  const peak = Math.max(...timeline.buckets.map((b) => b.count));
  const bars = timeline.buckets
    .map(
      (b) =>
        `<div class="bar class-${esc(b.metric_class)}" data-day="${esc(b.day)}"` +
        ` data-class="${esc(b.metric_class)}" data-count="${b.count}"` +
        ` data-positive="${b.positive}" data-negative="${b.negative}"` +
        ` title="${esc(b.day)} ${esc(b.metric_class)}: ${b.count}"` +
        ` style="height:${round1((b.count / peak) * 100)}%"></div>`,
    )
    .join("");
  return `<div class="timeline" data-k="${timeline.k}"><div class="bars">${bars}</div></div>`;
}

export function renderEvents(events: EventsDoc): string {
  const rows = events.events
    .map((a) => {
      const directions = Object.entries(a.event.expected_direction)
        .map(
          ([cls, dir]) =>
            `<span class="direction" data-class="${esc(cls)}" data-direction="${esc(dir)}">` +
            `${esc(CLASS_LABEL[cls] ?? cls)} ${DIRECTION_ARROW[dir] ?? "?"}</span>`,
        )
        .join(" / ");
      const scope =
        a.event.hardware_scope.length === 0 ? "fleet-wide" : a.event.hardware_scope.join(", ");
      const perClass = a.per_class
        .map(
          (pc) =>
            `<span class="class-stat" data-class="${esc(pc.metric_class)}" data-matched="${pc.matched}">` +
            `${esc(pc.metric_class)}: ${pc.matched}` +
            (pc.mean_change === null ? "" : ` (mean ${pc.mean_change}%)`) +
            `</span>`,
        )
        .join(" ");
      return (
        `<tr class="event" data-date="${esc(a.event.date)}" data-matched="${a.matched_count}">` +
        `<td>${esc(a.event.date)}</td>` +
        `<td>${esc(a.event.description)}</td>` +
        `<td>${esc(scope)}</td>` +
        `<td>${directions}</td>` +
        `<td class="matched-count">${a.matched_count}</td>` +
        `<td>${perClass}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="events" data-k="${events.k}">` +
    `<thead><tr><th>Date</th><th>Event</th><th>Scope</th><th>Expected</th>` +
    `<th>Matched</th><th>Per class</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

/** Trade-off curves: changepoint count vs K and sweep wall-clock vs K. */
export function renderSweep(sweep: SweepDoc): string {
  const ks = sweep.rows.map((r) => r.k);
  const kLo = Math.min(...ks);
  const kHi = Math.max(...ks);
  const totalHi = Math.max(1, ...sweep.rows.map((r) => r.total));
  const secondsHi = Math.max(...sweep.rows.map((r) => r.seconds), 1e-9);
  const x = (k: number) => round1(scale(k, kLo, kHi, PAD, WIDTH - PAD));

  const countPts = sweep.rows
    .map((r) => `${x(r.k)},${round1(scale(r.total, 0, totalHi, HEIGHT - PAD, PAD))}`)
    .join(" ");
  const timePts = sweep.rows
    .map((r) => `${x(r.k)},${round1(scale(r.seconds, 0, secondsHi, HEIGHT - PAD, PAD))}`)
    .join(" ");
  const markers = sweep.rows
    .map(
      (r) =>
        `<circle class="sweep-point" cx="${x(r.k)}"` +
        ` cy="${round1(scale(r.total, 0, totalHi, HEIGHT - PAD, PAD))}" r="3"` +
        ` data-k="${r.k}" data-total="${r.total}" data-seconds="${r.seconds}"/>`,
    )
    .join("");
  const failures = sweep.failures
    .map((f) => `<p class="warning">${esc(f.config_id)}: ${esc(f.error)}</p>`)
    .join("");

  return (
    `<figure class="sweep">` +
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">` +
    `<polyline class="count-curve" fill="none" points="${countPts}"/>` +
    `<polyline class="time-curve" fill="none" points="${timePts}"/>` +
    markers +
    `</svg>` +
    `<figcaption>changepoints vs K (solid) and sweep seconds vs K (dashed)</figcaption>` +
    failures +
    `</figure>`
  );
}
