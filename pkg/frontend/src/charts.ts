import { DIRECTIONS, OBJECTIVE_LABELS, OBJECTIVE_NAMES } from "./types.js";
import type { ObjectiveName, SolutionEntry } from "./types.js";

export const CLUSTER_COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
];

export interface ViewFlags {
  discarded: Set<number>;
  hovered: number | null;
  selected: number | null;
  finalChoice: number | null;
}

export const emptyFlags = (): ViewFlags => ({
  discarded: new Set(),
  hovered: null,
  selected: null,
  finalChoice: null,
});

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function pointClass(id: number, flags: ViewFlags): string {
  const classes = ["mark"];
  if (flags.discarded.has(id)) classes.push("dim");
  if (flags.hovered === id) classes.push("hot");
  if (flags.selected === id) classes.push("picked");
  if (flags.finalChoice === id) classes.push("final");
  return classes.join(" ");
}

/**
 * Direction-aware axis scale used purely for display: maps a value onto
 * [0, 1] where 1 is the best value attained in the front, so "up is better"
 * reads uniformly across axes.
 */
export function axisScale(values: number[], direction: "min" | "max"): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (hi === lo) return () => 0.5;
  return (v) => {
    const t = (v - lo) / (hi - lo);
    return direction === "max" ? t : 1 - t;
  };
}

/** 2-D projection scatter, one circle per solution, colored by cluster. */
export function scatterSvg(
  solutions: SolutionEntry[],
  flags: ViewFlags,
  width = 460,
  height = 320,
): string {
  const pad = 24;
  const xs = solutions.map((s) => s.pca[0]);
  const ys = solutions.map((s) => s.pca[1]);
  const sx = spanScale(xs, pad, width - pad);
  const sy = spanScale(ys, height - pad, pad); // svg y grows downward
  const circles = solutions
    .map((s) => {
      const color = CLUSTER_COLORS[s.cluster % CLUSTER_COLORS.length];
      return (
        `<circle class="${pointClass(s.id, flags)}" data-id="${s.id}" ` +
        `cx="${sx(s.pca[0]).toFixed(1)}" cy="${sy(s.pca[1]).toFixed(1)}" r="7" ` +
        `fill="${color}"><title>solution ${s.id} (rank ${s.rank})</title></circle>`
      );
    })
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="scatter" role="img">` +
    `<rect class="canvas" width="${width}" height="${height}"/>` +
    circles +
    `</svg>`
  );
}

function spanScale(values: number[], out0: number, out1: number): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (hi === lo) return () => (out0 + out1) / 2;
  return (v) => out0 + ((v - lo) / (hi - lo)) * (out1 - out0);
}

/** Parallel-coordinates plot: one polyline per solution over the six axes. */
export function parallelSvg(
  solutions: SolutionEntry[],
  flags: ViewFlags,
  width = 640,
  height = 320,
): string {
  const padX = 56;
  const padTop = 26;
  const padBottom = 18;
  const innerH = height - padTop - padBottom;
  const step = (width - 2 * padX) / (OBJECTIVE_NAMES.length - 1);
  const scales = OBJECTIVE_NAMES.map((name) =>
    axisScale(
      solutions.map((s) => s.objectives[name]),
      DIRECTIONS[name],
    ),
  );
  const axisX = (j: number) => padX + j * step;
  const yOf = (t: number) => padTop + (1 - t) * innerH;

  const axes = OBJECTIVE_NAMES.map((name, j) => {
    const x = axisX(j).toFixed(1);
    return (
      `<line class="axis" x1="${x}" y1="${padTop}" x2="${x}" y2="${padTop + innerH}"/>` +
      `<text class="axis-label" x="${x}" y="${padTop - 10}" text-anchor="middle">` +
      esc(OBJECTIVE_LABELS[name]) +
      `</text>`
    );
  }).join("");

  const lines = solutions
    .map((s) => {
      const pts = OBJECTIVE_NAMES.map((name, j) => {
        const t = scales[j](s.objectives[name]);
        return `${axisX(j).toFixed(1)},${yOf(t).toFixed(1)}`;
      }).join(" ");
      const color = CLUSTER_COLORS[s.cluster % CLUSTER_COLORS.length];
      return (
        `<polyline class="${pointClass(s.id, flags)}" data-id="${s.id}" ` +
        `points="${pts}" fill="none" stroke="${color}"/>`
      );
    })
    .join("");

  return (
    `<svg viewBox="0 0 ${width} ${height}" class="parallel" role="img">` +
    `<rect class="canvas" width="${width}" height="${height}"/>` +
    axes +
    lines +
    `</svg>`
  );
}

export interface BarItem {
  label: string;
  value: number;
  display?: string;
}

/** Horizontal bar list; the largest value spans the full track. */
export function barListHtml(items: BarItem[], cssClass = "bars"): string {
  const max = Math.max(...items.map((i) => i.value), 0);
  const rows = items
    .map((i) => {
      const pct = max > 0 ? (100 * i.value) / max : 0;
      return (
        `<div class="bar-row"><span class="bar-label">${esc(i.label)}</span>` +
        `<span class="bar-track"><span class="bar-fill" style="width:${pct.toFixed(1)}%"></span></span>` +
        `<span class="bar-value">${esc(i.display ?? String(i.value))}</span></div>`
      );
    })
    .join("");
  return `<div class="${cssClass}">${rows}</div>`;
}

/** Radar of one solution's objectives, normalized against the front. */
export function radarSvg(solution: SolutionEntry, all: SolutionEntry[], size = 220): string {
  const c = size / 2;
  const radius = c - 30;
  const scales = OBJECTIVE_NAMES.map((name) =>
    axisScale(
      all.map((s) => s.objectives[name]),
      DIRECTIONS[name],
    ),
  );
  const angle = (j: number) => (Math.PI * 2 * j) / OBJECTIVE_NAMES.length - Math.PI / 2;
  const point = (j: number, t: number) =>
    `${(c + Math.cos(angle(j)) * radius * t).toFixed(1)},${(c + Math.sin(angle(j)) * radius * t).toFixed(1)}`;
  const grid = [0.33, 0.66, 1]
    .map(
      (t) =>
        `<polygon class="grid" points="${OBJECTIVE_NAMES.map((_, j) => point(j, t)).join(" ")}"/>`,
    )
    .join("");
  const labels = OBJECTIVE_NAMES.map((name, j) => {
    const [x, y] = point(j, 1.22).split(",");
    return `<text class="radar-label" x="${x}" y="${y}" text-anchor="middle">${esc(
      OBJECTIVE_LABELS[name as ObjectiveName],
    )}</text>`;
  }).join("");
  const shape = OBJECTIVE_NAMES.map((name, j) =>
    point(j, scales[j](solution.objectives[name])),
  ).join(" ");
  return (
    `<svg viewBox="0 0 ${size} ${size}" class="radar" role="img">` +
    grid +
    labels +
    `<polygon class="shape" points="${shape}"/>` +
    `</svg>`
  );
}
