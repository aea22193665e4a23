/**
 * Energy-trace figure: measured and statevector-simulated energies per
 * optimizer iteration, with the exact ground energy as a dashed reference.
 */
import { IterationRow, VqeSummary } from "./schemas.js";
import { SvgCanvas, linearScale } from "./svg.js";

export const WIDTH = 640;
export const HEIGHT = 400;

const COLORS = {
  measured: "#d95f02",
  simulated: "#1b9e77",
  exact: "#555555",
};

export function renderEnergyTrace(rows: IterationRow[], summary: VqeSummary): string {
  if (rows.length === 0) {
    throw new Error("energy trace needs at least one iteration row");
  }
  const box = { left: 70, right: WIDTH - 20, top: 30, bottom: HEIGHT - 50 };
  const xs = rows.map((r) => r.iteration);
  const energies = rows
    .flatMap((r) => [r.eMeasured, r.eSimulated])
    .concat([summary.eExact]);
  const xScale = linearScale(xs, [box.left, box.right]);
  const yScale = linearScale(energies, [box.bottom, box.top]);

  const svg = new SvgCanvas(WIDTH, HEIGHT);
  svg.axes(box, xScale, yScale, "iteration", "energy");

  svg.line(box.left, yScale(summary.eExact), box.right, yScale(summary.eExact), COLORS.exact, {
    "stroke-dasharray": "6,4",
  });

  svg.polyline(
    rows.map((r) => [xScale(r.iteration), yScale(r.eSimulated)]),
    COLORS.simulated,
  );
  for (const r of rows) {
    const x = xScale(r.iteration);
    if (r.stderr > 0) {
      svg.line(x, yScale(r.eMeasured - r.stderr), x, yScale(r.eMeasured + r.stderr), COLORS.measured);
    }
    svg.circle(x, yScale(r.eMeasured), 2.2, COLORS.measured);
  }

  svg.circle(box.left + 12, 14, 3, COLORS.measured);
  svg.text(box.left + 20, 17, "measured");
  svg.circle(box.left + 110, 14, 3, COLORS.simulated);
  svg.text(box.left + 118, 17, "simulated");
  svg.line(box.left + 210, 14, box.left + 235, 14, COLORS.exact, { "stroke-dasharray": "6,4" });
  svg.text(box.left + 240, 17, "exact ground energy");
  return svg.render();
}
