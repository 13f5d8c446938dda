import { OBJECTIVE_NAMES } from "./types.js";
import type { RankResult, SolutionEntry } from "./types.js";
import type { ViewFlags } from "./charts.js";

const fmt = (v: number) => (Number.isInteger(v) ? String(v) : v.toFixed(4));

/**
 * Solution table ordered exactly by the latest ranking response. Rows carry
 * data-id attributes so hover/selection can link back to the charts.
 */
export function tableHtml(
  solutions: SolutionEntry[],
  ranking: RankResult[],
  flags: ViewFlags,
): string {
  const byId = new Map(solutions.map((s) => [s.id, s]));
  const header =
    "<tr><th>rank</th><th>id</th><th>PS</th>" +
    OBJECTIVE_NAMES.map((n) => `<th>${n.replace(/_/g, " ")}</th>`).join("") +
    "<th></th></tr>";
  const rows = ranking
    .map((r) => {
      const s = byId.get(r.id);
      if (!s) return "";
      const classes = [];
      if (flags.discarded.has(r.id)) classes.push("dim");
      if (flags.hovered === r.id) classes.push("hot");
      if (flags.selected === r.id) classes.push("picked");
      const badge = flags.finalChoice === r.id ? `<span class="badge">final</span>` : "";
      const psBar =
        `<span class="ps-cell"><span class="ps-bar" style="width:${(r.ps * 100).toFixed(1)}%"></span>` +
        `<span class="ps-num">${r.ps.toFixed(4)}</span></span>`;
      return (
        `<tr class="${classes.join(" ")}" data-id="${r.id}">` +
        `<td>${r.rank}</td><td>${r.id}</td><td>${psBar}</td>` +
        OBJECTIVE_NAMES.map((n) => `<td>${fmt(s.objectives[n])}</td>`).join("") +
        `<td>${badge}</td></tr>`
      );
    })
    .join("");
  return `<table class="solutions"><thead>${header}</thead><tbody>${rows}</tbody></table>`;
}

/** The id order a rendered table displays, for view-consistency checks. */
export function tableOrder(html: string): number[] {
  const out: number[] = [];
  const re = /<tr[^>]*data-id="(\d+)"/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(html)) !== null) out.push(Number(m[1]));
  return out;
}
