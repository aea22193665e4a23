/**
 * Phase-diagram figure: ground-state energy against the chemical-potential
 * difference K with the critical boundaries marked, plus an optional
 * QMI-per-bipartition heatmap strip when tomography metrics are supplied.
 */
import { CriticalPoint, QmiMetrics, ScanRow } from "./schemas.js";
import { SvgCanvas, blueShade, fmt, linearScale } from "./svg.js";

export const WIDTH = 640;

const COLORS = {
  exact: "#555555",
  measured: "#d95f02",
  critical: "#7570b3",
};

export interface QmiColumn {
  k: number;
  metrics: QmiMetrics;
}

export function renderPhaseDiagram(
  rows: ScanRow[],
  criticalPoints: CriticalPoint[],
  qmiColumns: QmiColumn[] = [],
): string {
  const hasHeatmap = qmiColumns.length > 0;
  const plotHeight = 360;
  const heatmapHeight = hasHeatmap ? 140 : 0;
  const height = plotHeight + heatmapHeight + 40;
  const box = { left: 70, right: WIDTH - 20, top: 30, bottom: plotHeight - 40 };

  const xScale = linearScale(rows.map((r) => r.k), [box.left, box.right]);
  const energies = rows.flatMap((r) => [r.energy, r.energyExact]);
  const yScale = linearScale(energies, [box.bottom, box.top]);

  const svg = new SvgCanvas(WIDTH, height);
  svg.axes(box, xScale, yScale, "K", "energy");

  svg.polyline(
    rows.map((r) => [xScale(r.k), yScale(r.energyExact)]),
    COLORS.exact,
  );
  for (const r of rows) {
    const x = xScale(r.k);
    if (r.energyStderr > 0) {
      svg.line(x, yScale(r.energy - r.energyStderr), x, yScale(r.energy + r.energyStderr), COLORS.measured);
    }
    svg.circle(x, yScale(r.energy), 2.5, COLORS.measured);
  }
  for (const cp of criticalPoints) {
    const x = xScale(cp.kCrit);
    svg.line(x, box.top, x, box.bottom, COLORS.critical, { "stroke-dasharray": "4,4" });
    svg.text(x - 24, box.top - 6, `K=${fmt(cp.kCrit)}`);
  }

  svg.circle(box.left + 12, 14, 3, COLORS.measured);
  svg.text(box.left + 20, 17, "scan energy");
  svg.line(box.left + 120, 14, box.left + 145, 14, COLORS.exact);
  svg.text(box.left + 150, 17, "exact");
  svg.line(box.left + 210, 14, box.left + 235, 14, COLORS.critical, { "stroke-dasharray": "4,4" });
  svg.text(box.left + 240, 17, "critical boundary");

  if (hasHeatmap) {
    renderQmiHeatmap(svg, qmiColumns, plotHeight);
  }
  return svg.render();
}

function renderQmiHeatmap(svg: SvgCanvas, columns: QmiColumn[], yOffset: number): void {
  const labels = Object.keys(columns[0].metrics.qmi).sort();
  for (const col of columns) {
    const have = Object.keys(col.metrics.qmi).sort();
    if (have.join() !== labels.join()) {
      throw new Error("QMI heatmap inputs disagree on bipartition labels");
    }
  }
  const sorted = [...columns].sort((a, b) => a.k - b.k);
  const left = 120;
  const cell = 36;
  const top = yOffset + 30;
  const maxQmi = Math.max(
    1e-9,
    ...sorted.flatMap((c) => labels.map((l) => c.metrics.qmi[l])),
  );
  svg.text(left, top - 10, "QMI per bipartition (bits)");
  labels.forEach((label, row) => {
    svg.text(left - 50, top + row * cell + cell / 2 + 3, label);
    sorted.forEach((col, i) => {
      const value = col.metrics.qmi[label];
      svg.rect(left + i * cell, top + row * cell, cell - 2, cell - 2, blueShade(value / maxQmi), {
        stroke: "#999",
      });
      svg.text(left + i * cell + 4, top + row * cell + cell / 2 + 3, fmt(value));
    });
  });
  sorted.forEach((col, i) => {
    svg.text(left + i * cell + 4, top + labels.length * cell + 14, `K=${fmt(col.k)}`);
  });
}
