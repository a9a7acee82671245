// @vitest-environment happy-dom
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import type {
  EventsDoc,
  SegmentationDoc,
  SeriesDoc,
  SummaryDoc,
  SweepDoc,
  TimelineDoc,
} from "../src/api.js";
import {
  renderError,
  renderEvents,
  renderHistogram,
  renderScatter,
  renderSummary,
  renderSweep,
  renderTimeline,
} from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

function mount(html: string): HTMLElement {
  const host = document.createElement("div");
  host.innerHTML = html;
  return host;
}

const segMulti = fixture<SegmentationDoc>("segmentation_multi.json");
const seriesMulti = fixture<SeriesDoc>("series_multi.json");
const segOne = fixture<SegmentationDoc>("segmentation_one.json");
const seriesOne = fixture<SeriesDoc>("series_one.json");
const segSingle = fixture<SegmentationDoc>("segmentation_single.json");
const summary = fixture<SummaryDoc>("summary.json");
const timeline = fixture<TimelineDoc>("timeline.json");
const timelineEmpty = fixture<TimelineDoc>("timeline_empty.json");
const events = fixture<EventsDoc>("events.json");
const sweep = fixture<SweepDoc>("sweep.json");

describe("renderScatter", () => {
  it("draws one mean line per segment and one marker per changepoint", () => {
    const host = mount(renderScatter(seriesMulti, segMulti));
    expect(segMulti.segments).toHaveLength(3);
    expect(host.querySelectorAll(".segment-mean")).toHaveLength(3);
    expect(host.querySelectorAll(".changepoint")).toHaveLength(2);
  });

  it("marks changepoints with the exact timestamps from the response", () => {
    const host = mount(renderScatter(seriesMulti, segMulti));
    const marked = [...host.querySelectorAll(".changepoint")].map(
      (node) => node.getAttribute("data-timestamp"),
    );
    expect(marked).toEqual(segMulti.changepoints.map((c) => c.timestamp));
  });

  it("renders a single-segment response as one line and no markers", () => {
    const host = mount(renderScatter(seriesOne, segSingle));
    expect(host.querySelectorAll(".segment-mean")).toHaveLength(1);
    expect(host.querySelectorAll(".changepoint")).toHaveLength(0);
  });

  it("copies segment means verbatim from the response", () => {
    const host = mount(renderScatter(seriesOne, segOne));
    const means = [...host.querySelectorAll(".segment-mean")].map(
      (node) => Number(node.getAttribute("data-mean")),
    );
    expect(means).toEqual(segOne.segments.map((s) => s.mean));
  });

  it("labels the axis with the series unit and plots every observation", () => {
    const host = mount(renderScatter(seriesOne, segOne));
    expect(host.querySelector(".axis-unit")?.textContent).toBe(seriesOne.unit);
    expect(host.querySelectorAll(".obs")).toHaveLength(seriesOne.observations.length);
  });

  it("matches the reference markup", () => {
    expect(renderScatter(seriesMulti, segMulti)).toMatchSnapshot();
  });
});

describe("renderHistogram / renderSummary", () => {
  it("bar counts conserve the histogram totals", () => {
    for (const cls of summary.classes) {
      for (const hist of [cls.change_histogram, cls.duration_histogram]) {
        const host = mount(renderHistogram(hist, "t"));
        const shown = [...host.querySelectorAll(".bar")].map(
          (node) => Number(node.getAttribute("data-count")),
        );
        const total =
          hist.underflow + hist.overflow + hist.counts.reduce((a, b) => a + b, 0);
        expect(shown.reduce((a, b) => a + b, 0)).toBe(total);
        expect(host.querySelectorAll(".bin")).toHaveLength(hist.counts.length);
      }
    }
  });

  it("renders per-class counts straight from the summary document", () => {
    const host = mount(renderSummary(summary));
    for (const cls of summary.classes) {
      const section = host.querySelector(`.class-summary[data-class="${cls.metric_class}"]`);
      expect(section?.getAttribute("data-changepoints")).toBe(String(cls.changepoints));
      expect(section?.getAttribute("data-configurations")).toBe(String(cls.configurations));
      expect(section?.textContent).toContain(`r = ${cls.ratio}`);
    }
  });

  it("matches the reference markup", () => {
    expect(renderSummary(summary)).toMatchSnapshot();
  });
});

describe("renderTimeline", () => {
  it("draws one bar per day-class bucket with the response counts", () => {
    const host = mount(renderTimeline(timeline));
    const bars = [...host.querySelectorAll(".bar")];
    expect(bars).toHaveLength(timeline.buckets.length);
    bars.forEach((bar, i) => {
      expect(bar.getAttribute("data-day")).toBe(timeline.buckets[i].day);
      expect(Number(bar.getAttribute("data-count"))).toBe(timeline.buckets[i].count);
    });
  });

  it("notes when there are no changepoints", () => {
    const host = mount(renderTimeline(timelineEmpty));
    expect(host.querySelectorAll(".bar")).toHaveLength(0);
    expect(host.querySelector(".empty-note")?.textContent).toBe("no changepoints");
  });
});

describe("renderEvents", () => {
  it("shows expected directions as class arrows", () => {
    const host = mount(renderEvents(events));
    const bios = [...host.querySelectorAll("tr.event")].find(
      (row) => row.textContent?.includes("BIOS"),
    );
    expect(bios).toBeDefined();
    expect(bios?.textContent).toContain("CPU ↓");
    expect(bios?.textContent).toContain("Mem ↑");
  });

  it("reports matched counts straight from the response", () => {
    const host = mount(renderEvents(events));
    const rows = [...host.querySelectorAll("tr.event")];
    expect(rows).toHaveLength(events.events.length);
    rows.forEach((row, i) => {
      expect(row.querySelector(".matched-count")?.textContent).toBe(
        String(events.events[i].matched_count),
      );
    });
  });

  it("labels an empty hardware scope as fleet-wide", () => {
    const fleetWide: EventsDoc = {
      k: 0.6,
      events: [
        {
          event: {
            date: "2021-06-10",
            description: "OS upgrade",
            hardware_scope: [],
            expected_direction: { disk: "mixed" },
          },
          window_days: 3,
          matched_count: 0,
          matched: [],
          per_class: [],
        },
      ],
    };
    const host = mount(renderEvents(fleetWide));
    expect(host.textContent).toContain("fleet-wide");
    expect(host.textContent).toContain("Disk ↕");
  });

  it("matches the reference markup", () => {
    expect(renderEvents(events)).toMatchSnapshot();
  });
});

describe("renderSweep", () => {
  it("plots one point per grid row with the response totals", () => {
    const host = mount(renderSweep(sweep));
    const points = [...host.querySelectorAll(".sweep-point")];
    expect(points).toHaveLength(sweep.rows.length);
    points.forEach((pt, i) => {
      expect(Number(pt.getAttribute("data-k"))).toBe(sweep.rows[i].k);
      expect(Number(pt.getAttribute("data-total"))).toBe(sweep.rows[i].total);
    });
    expect(host.querySelectorAll(".count-curve")).toHaveLength(1);
    expect(host.querySelectorAll(".time-curve")).toHaveLength(1);
  });
});

describe("renderError", () => {
  it("escapes markup in the message", () => {
    const host = mount(renderError('<script>alert("x")</script>'));
    expect(host.querySelector(".error-banner")).not.toBeNull();
    expect(host.querySelector("script")).toBeNull();
  });
});
