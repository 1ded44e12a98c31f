// Delivery-time chart: series extraction from run logs and pure SVG
// geometry.  Previous runs stay overlaid so a capacity tweak can be read
// directly against the last attempt.

import type { LogRecordJson } from './types.js';

export interface SeriesPoint {
  send: number;
  delivery: number;
}

export interface Series {
  run: string;
  label: string;
  points: SeriesPoint[];
}

/** Pair each sent/delivered record per message and group by task label,
 * ordered by send time; undelivered and dropped messages are skipped. */
export function deliverySeries(run: string, records: LogRecordJson[]): Series[] {
  const sentAt = new Map<number, { time: number; label: string }>();
  const byLabel = new Map<string, SeriesPoint[]>();
  for (const record of records) {
    if (record.kind === 'sent') {
      sentAt.set(record.message_id, { time: record.time, label: record.task_label });
    } else if (record.kind === 'delivered') {
      const sent = sentAt.get(record.message_id);
      if (!sent) continue;
      const points = byLabel.get(sent.label) ?? [];
      points.push({ send: sent.time, delivery: record.time - sent.time });
      byLabel.set(sent.label, points);
    }
  }
  const series: Series[] = [];
  for (const [label, points] of byLabel) {
    points.sort((a, b) => a.send - b.send);
    series.push({ run, label, points });
  }
  series.sort((a, b) => a.label.localeCompare(b.label));
  return series;
}

export interface ChartGeometry {
  width: number;
  height: number;
  lines: Array<{ key: string; label: string; run: string; points: string; color: string }>;
  xTicks: Array<{ x: number; value: number }>;
  yTicks: Array<{ y: number; value: number }>;
}

const PALETTE = [
  '#4cc9f0',
  '#f9a03f',
  '#90be6d',
  '#f94144',
  '#b07cff',
  '#f9c74f',
  '#43aa8b',
  '#ff70a6',
];

const MARGIN = { left: 46, right: 12, top: 10, bottom: 24 };

function niceTicks(max: number, count: number): number[] {
  if (max <= 0) return [0];
  const rawStep = max / count;
  const magnitude = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * magnitude).find((s) => s >= rawStep) ?? rawStep;
  const ticks: number[] = [];
  for (let v = 0; v <= max + 1e-9; v += step) ticks.push(Number(v.toFixed(6)));
  return ticks;
}

/** Lay the series out in pixel space; one polyline per (run, label). */
export function chartGeometry(series: Series[], width = 640, height = 260): ChartGeometry {
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const allPoints = series.flatMap((s) => s.points);
  const maxSend = Math.max(1, ...allPoints.map((p) => p.send));
  const maxDelivery = Math.max(1, ...allPoints.map((p) => p.delivery));
  const sx = (v: number) => MARGIN.left + (v / maxSend) * innerW;
  const sy = (v: number) => MARGIN.top + innerH - (v / maxDelivery) * innerH;

  const lines = series.map((s, index) => ({
    key: `${s.run}/${s.label}`,
    label: s.label,
    run: s.run,
    color: PALETTE[index % PALETTE.length],
    points: s.points.map((p) => `${sx(p.send).toFixed(1)},${sy(p.delivery).toFixed(1)}`).join(' '),
  }));
  return {
    width,
    height,
    lines,
    xTicks: niceTicks(maxSend, 6).map((value) => ({ x: sx(value), value })),
    yTicks: niceTicks(maxDelivery, 5).map((value) => ({ y: sy(value), value })),
  };
}

/** Worst delivery per label, handy for the cockpit readout. */
export function maxDelivery(series: Series[]): Map<string, number> {
  const out = new Map<string, number>();
  for (const s of series) {
    for (const p of s.points) {
      out.set(s.label, Math.max(out.get(s.label) ?? 0, p.delivery));
    }
  }
  return out;
}
