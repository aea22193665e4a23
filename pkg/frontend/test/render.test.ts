import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseArgs, renderFromArgs, runCli } from "../src/cli.js";
import { renderDensityMatrix } from "../src/densityMatrix.js";
import { renderEnergyTrace } from "../src/energyTrace.js";
import { renderPhaseDiagram } from "../src/phaseDiagram.js";
import {
  SchemaError,
  loadIterations,
  loadKcrit,
  loadMetrics,
  loadRho,
  loadScan,
  loadSummary,
} from "../src/schemas.js";

const FIXTURES = join(__dirname, "fixtures");
const fixture = (name: string) => join(FIXTURES, name);

describe("schema loaders", () => {
  it("parses the iteration log and summary", () => {
    const rows = loadIterations(fixture("iterations.csv"));
    expect(rows.length).toBe(26);
    expect(rows[0].iteration).toBe(0);
    const summary = loadSummary(fixture("summary.json"));
    expect(summary.eExact).toBeCloseTo(-30.5644, 3);
  });

  it("parses the scan and critical points", () => {
    const rows = loadScan(fixture("scan.csv"));
    expect(rows[0].k).toBe(-14);
    expect(rows[0].n0Rounded).toBe(2);
    const cps = loadKcrit(fixture("kcrit.json"));
    expect(cps.length).toBe(2);
    expect(Math.abs(cps[0].kCrit + 3.9456)).toBeLessThan(1e-3);
  });

  it("parses the density matrix into magnitudes", () => {
    const rho = loadRho(fixture("rho.json"));
    expect(rho.numQubits).toBe(4);
    expect(rho.magnitudes.length).toBe(16);
    const total = rho.magnitudes.reduce(
      (acc, row, i) => acc + row[i],
      0,
    );
    expect(total).toBeCloseTo(1.0, 6); // trace of a reconstructed state
  });

  it("parses QMI metrics", () => {
    const metrics = loadMetrics(fixture("metrics_K0.json"));
    expect(Object.keys(metrics.qmi).sort()).toEqual(["01|23", "02|13", "03|12"]);
    expect(metrics.fidelity).toBeGreaterThan(0.9);
  });

  it("rejects files with a wrong schema version", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const bad = join(dir, "summary.json");
    const payload = JSON.parse(readFileSync(fixture("summary.json"), "utf-8"));
    payload.schema_version = 99;
    writeFileSync(bad, JSON.stringify(payload));
    expect(() => loadSummary(bad)).toThrow(SchemaError);

    const badCsv = join(dir, "scan.csv");
    writeFileSync(badCsv, "K,energy\n0,1\n");
    expect(() => loadScan(badCsv)).toThrow(SchemaError);
  });
});

describe("renderers", () => {
  it("renders an energy trace with all three series", () => {
    const svg = renderEnergyTrace(
      loadIterations(fixture("iterations.csv")),
      loadSummary(fixture("summary.json")),
    );
    expect(svg).toContain("<svg");
    expect(svg).toContain("measured");
    expect(svg).toContain("simulated");
    expect(svg).toContain("exact ground energy");
    expect(svg).toContain("stroke-dasharray");
  });

  it("marks both critical boundaries in the phase diagram", () => {
    const svg = renderPhaseDiagram(
      loadScan(fixture("scan.csv")),
      loadKcrit(fixture("kcrit.json")),
    );
    expect(svg).toContain("K=-3.95");
    expect(svg).toContain("K=3.95");
    expect(svg).toContain("critical boundary");
  });

  it("adds the QMI heatmap when metrics are given", () => {
    const svg = renderPhaseDiagram(
      loadScan(fixture("scan.csv")),
      loadKcrit(fixture("kcrit.json")),
      [
        { k: -14, metrics: loadMetrics(fixture("metrics_Km14.json")) },
        { k: 0, metrics: loadMetrics(fixture("metrics_K0.json")) },
        { k: 10, metrics: loadMetrics(fixture("metrics_K10.json")) },
      ],
    );
    expect(svg).toContain("QMI per bipartition");
    expect(svg).toContain("01|23");
    expect(svg).toContain("K=-14.00");
  });

  it("renders a pure-projector density matrix with one dominant cell", () => {
    // |0101><0101| exactly: a single unit bar at the (0101, 0101) cell
    const dim = 16;
    const matrix = Array.from({ length: dim }, (_, i) =>
      Array.from({ length: dim }, (_, j) => (i === 5 && j === 5 ? [1, 0] : [0, 0])),
    );
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const path = join(dir, "rho.json");
    writeFileSync(
      path,
      JSON.stringify({ schema_version: 1, num_qubits: 4, matrix_re_im: matrix }),
    );
    const svg = renderDensityMatrix(loadRho(path));
    // exactly one cell is large enough to carry a value label
    const dominant = svg.match(/>1\.00</g) ?? [];
    expect(dominant.length).toBe(1);
    expect(svg).toContain("max entry 1.00");
    expect(svg).toContain("0101");
  });

  it("is deterministic: same inputs, same bytes", () => {
    const render = () =>
      renderEnergyTrace(
        loadIterations(fixture("iterations.csv")),
        loadSummary(fixture("summary.json")),
      );
    expect(render()).toBe(render());
  });
});

describe("command line", () => {
  it("renders all three figure kinds from a run directory with exit 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const argsPerKind: string[][] = [
      [
        "--kind", "energy-trace",
        "--iterations", fixture("iterations.csv"),
        "--summary", fixture("summary.json"),
        "--out", join(dir, "trace.svg"),
      ],
      [
        "--kind", "phase-diagram",
        "--scan", fixture("scan.csv"),
        "--kcrit", fixture("kcrit.json"),
        "--qmi", `-14=${fixture("metrics_Km14.json")}`,
        "--qmi", `0=${fixture("metrics_K0.json")}`,
        "--qmi", `10=${fixture("metrics_K10.json")}`,
        "--out", join(dir, "phase.svg"),
      ],
      [
        "--kind", "density-matrix",
        "--rho", fixture("rho.json"),
        "--out", join(dir, "rho.svg"),
      ],
    ];
    for (const argv of argsPerKind) {
      expect(runCli(argv)).toBe(0);
      const outFlag = argv[argv.indexOf("--out") + 1];
      expect(readFileSync(outFlag, "utf-8")).toContain("</svg>");
    }
  });

  it("exits nonzero on schema mismatch and bad flags", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "# schema_version=99\nK\n1\n");
    expect(
      runCli([
        "--kind", "phase-diagram",
        "--scan", bad,
        "--kcrit", fixture("kcrit.json"),
        "--out", join(dir, "x.svg"),
      ]),
    ).toBe(1);
    expect(runCli(["--kind", "nonsense", "--out", join(dir, "y.svg")])).toBe(1);
    expect(() => parseArgs(["--kind"])).toThrow();
  });

  it("requires the inputs for the chosen kind", () => {
    const args = parseArgs(["--kind", "energy-trace", "--out", "o.svg"]);
    expect(() => renderFromArgs(args)).toThrow(/requires --iterations/);
  });
});
