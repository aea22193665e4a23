/**
 * Density-matrix figure: grid of |rho_ij| magnitudes ordered from |0...0>
 * to |1...1> with qubit 0 as the most significant bit.
 */
import { DensityMatrixFile } from "./schemas.js";
import { SvgCanvas, blueShade, fmt } from "./svg.js";

export function renderDensityMatrix(rho: DensityMatrixFile): string {
  const dim = rho.magnitudes.length;
  const cell = dim <= 16 ? 26 : 12;
  const left = 70;
  const top = 60;
  const width = left + dim * cell + 30;
  const height = top + dim * cell + 40;
  const labels = Array.from({ length: dim }, (_, i) =>
    i.toString(2).padStart(rho.numQubits, "0"),
  );
  const maxMag = Math.max(1e-12, ...rho.magnitudes.flat());

  const svg = new SvgCanvas(width, height);
  svg.text(left, 20, `|rho| magnitudes, basis |${labels[0]}> ... |${labels[dim - 1]}>`);
  svg.text(left, 34, `max entry ${fmt(maxMag)}`);
  for (let i = 0; i < dim; i++) {
    // row = bra index, column = ket index
    svg.text(left - 44, top + i * cell + cell / 2 + 3, labels[i]);
    svg.text(left + i * cell + 2, top - 6, labels[i], {
      transform: `rotate(-60 ${left + i * cell + 2} ${top - 6})`,
      "font-size": "8",
    });
    for (let j = 0; j < dim; j++) {
      const value = rho.magnitudes[i][j];
      svg.rect(left + j * cell, top + i * cell, cell - 1, cell - 1, blueShade(value / maxMag), {
        stroke: "#ccc",
      });
      if (value / maxMag > 0.5) {
        svg.text(left + j * cell + 2, top + i * cell + cell / 2 + 3, fmt(value), {
          "font-size": "6",
        });
      }
    }
  }
  return svg.render();
}
