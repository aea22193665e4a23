/**
 * Figure renderer for schwinger-vqe result directories.
 *
 * Usage:
 *   render --kind energy-trace   --iterations PATH --summary PATH --out FILE
 *   render --kind phase-diagram  --scan PATH --kcrit PATH
 *                                [--qmi K=metrics.json ...] --out FILE
 *   render --kind density-matrix --rho PATH --out FILE
 *
 * Exits 0 on success and nonzero on missing inputs or schema mismatches.
 */
import { writeFileSync } from "node:fs";

import { renderDensityMatrix } from "./densityMatrix.js";
import { renderEnergyTrace } from "./energyTrace.js";
import { QmiColumn, renderPhaseDiagram } from "./phaseDiagram.js";
import {
  SchemaError,
  loadIterations,
  loadKcrit,
  loadMetrics,
  loadRho,
  loadScan,
  loadSummary,
} from "./schemas.js";

export interface CliArgs {
  kind: string;
  out: string;
  inputs: Record<string, string>;
  qmi: { k: number; path: string }[];
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { kind: "", out: "", inputs: {}, qmi: [] };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (!flag.startsWith("--")) {
      throw new Error(`unexpected argument ${flag}`);
    }
    const value = argv[++i];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    if (flag === "--kind") {
      args.kind = value;
    } else if (flag === "--out") {
      args.out = value;
    } else if (flag === "--qmi") {
      const eq = value.indexOf("=");
      if (eq <= 0) {
        throw new Error(`--qmi expects K=path, got ${value}`);
      }
      const k = Number(value.slice(0, eq));
      if (!Number.isFinite(k)) {
        throw new Error(`--qmi expects a numeric K, got ${value}`);
      }
      args.qmi.push({ k, path: value.slice(eq + 1) });
    } else {
      args.inputs[flag.slice(2)] = value;
    }
  }
  if (args.kind === "" || args.out === "") {
    throw new Error("--kind and --out are required");
  }
  return args;
}

function need(args: CliArgs, name: string): string {
  const value = args.inputs[name];
  if (value === undefined) {
    throw new Error(`--kind ${args.kind} requires --${name}`);
  }
  return value;
}

export function renderFromArgs(args: CliArgs): string {
  switch (args.kind) {
    case "energy-trace":
      return renderEnergyTrace(
        loadIterations(need(args, "iterations")),
        loadSummary(need(args, "summary")),
      );
    case "phase-diagram": {
      const columns: QmiColumn[] = args.qmi.map(({ k, path }) => ({
        k,
        metrics: loadMetrics(path),
      }));
      return renderPhaseDiagram(
        loadScan(need(args, "scan")),
        loadKcrit(need(args, "kcrit")),
        columns,
      );
    }
    case "density-matrix":
      return renderDensityMatrix(loadRho(need(args, "rho")));
    default:
      throw new Error(`unknown figure kind ${args.kind}`);
  }
}

export function runCli(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const svg = renderFromArgs(args);
    writeFileSync(args.out, svg + "\n");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    const prefix = err instanceof SchemaError ? "schema error" : "error";
    console.error(`${prefix}: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isMain) {
  process.exit(runCli(process.argv.slice(2)));
}
