/**
 * Parsers and validators for the result files produced by the schwinger-vqe
 * command-line tools. Every file carries a schema version; a mismatch is a
 * hard error so stale inputs fail fast instead of rendering nonsense.
 */
import { readFileSync } from "node:fs";

export const SUPPORTED_SCHEMA_VERSION = 1;

export class SchemaError extends Error {}

function checkVersion(version: unknown, source: string): void {
  if (version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaError(
      `${source}: schema_version ${String(version)} is not supported (expected ${SUPPORTED_SCHEMA_VERSION})`,
    );
  }
}

function asNumber(value: unknown, field: string, source: string): number {
  const n = Number(value);
  if (!Number.isFinite(n)) {
    throw new SchemaError(`${source}: field ${field} is not a finite number`);
  }
  return n;
}

/** Rows of a schema-stamped CSV, keyed by header name. */
export function parseCsv(path: string): Record<string, number>[] {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2 || !lines[0].startsWith("# schema_version=")) {
    throw new SchemaError(`${path}: missing schema_version comment`);
  }
  checkVersion(Number(lines[0].slice("# schema_version=".length)), path);
  const header = lines[1].split(",");
  return lines.slice(2).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`${path}: row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    const row: Record<string, number> = {};
    header.forEach((name, j) => {
      row[name] = asNumber(cells[j], name, path);
    });
    return row;
  });
}

function loadJson(path: string): Record<string, unknown> {
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new SchemaError(`${path}: not valid JSON (${String(err)})`);
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new SchemaError(`${path}: expected a JSON object`);
  }
  const obj = parsed as Record<string, unknown>;
  checkVersion(obj["schema_version"], path);
  return obj;
}

export interface IterationRow {
  iteration: number;
  eMeasured: number;
  stderr: number;
  eSimulated: number;
}

export function loadIterations(path: string): IterationRow[] {
  return parseCsv(path).map((row) => ({
    iteration: row["iteration"],
    eMeasured: row["E_measured"],
    stderr: row["stderr"],
    eSimulated: row["E_simulated"],
  }));
}

export interface VqeSummary {
  eExact: number;
  eMinMeasured: number;
  eMinSimulated: number;
}

export function loadSummary(path: string): VqeSummary {
  const obj = loadJson(path);
  return {
    eExact: asNumber(obj["E_exact"], "E_exact", path),
    eMinMeasured: asNumber(obj["E_min_measured"], "E_min_measured", path),
    eMinSimulated: asNumber(obj["E_min_simulated"], "E_min_simulated", path),
  };
}

export interface ScanRow {
  k: number;
  energy: number;
  energyStderr: number;
  energyExact: number;
  n0Rounded: number;
}

export function loadScan(path: string): ScanRow[] {
  const rows = parseCsv(path).map((row) => ({
    k: row["K"],
    energy: row["energy"],
    energyStderr: row["energy_stderr"],
    energyExact: row["energy_exact"],
    n0Rounded: row["N0_rounded"],
  }));
  if (rows.length === 0) {
    throw new SchemaError(`${path}: scan has no rows`);
  }
  return rows;
}

export interface CriticalPoint {
  kCrit: number;
  kCritStderr: number;
}

export function loadKcrit(path: string): CriticalPoint[] {
  const obj = loadJson(path);
  const list = obj["critical_points"];
  if (!Array.isArray(list)) {
    throw new SchemaError(`${path}: critical_points must be an array`);
  }
  return list.map((cp, i) => {
    const rec = cp as Record<string, unknown>;
    return {
      kCrit: asNumber(rec["K_crit"], `critical_points[${i}].K_crit`, path),
      kCritStderr: asNumber(rec["K_crit_stderr"], `critical_points[${i}].K_crit_stderr`, path),
    };
  });
}

export interface DensityMatrixFile {
  numQubits: number;
  /** magnitudes |rho_ij|, row-major */
  magnitudes: number[][];
}

export function loadRho(path: string): DensityMatrixFile {
  const obj = loadJson(path);
  const numQubits = asNumber(obj["num_qubits"], "num_qubits", path);
  const raw = obj["matrix_re_im"];
  const dim = 2 ** numQubits;
  if (!Array.isArray(raw) || raw.length !== dim) {
    throw new SchemaError(`${path}: matrix_re_im must have ${dim} rows`);
  }
  const magnitudes = raw.map((row, i) => {
    if (!Array.isArray(row) || row.length !== dim) {
      throw new SchemaError(`${path}: row ${i} must have ${dim} entries`);
    }
    return row.map((pair, j) => {
      if (!Array.isArray(pair) || pair.length !== 2) {
        throw new SchemaError(`${path}: entry (${i}, ${j}) must be an [re, im] pair`);
      }
      const re = asNumber(pair[0], `rho[${i}][${j}].re`, path);
      const im = asNumber(pair[1], `rho[${i}][${j}].im`, path);
      return Math.hypot(re, im);
    });
  });
  return { numQubits, magnitudes };
}

export interface QmiMetrics {
  /** bipartition label -> QMI in bits */
  qmi: Record<string, number>;
  fidelity: number;
}

export function loadMetrics(path: string): QmiMetrics {
  const obj = loadJson(path);
  const rawQmi = obj["qmi"];
  if (typeof rawQmi !== "object" || rawQmi === null) {
    throw new SchemaError(`${path}: qmi must be an object`);
  }
  const qmi: Record<string, number> = {};
  for (const [label, value] of Object.entries(rawQmi as Record<string, unknown>)) {
    qmi[label] = asNumber(value, `qmi[${label}]`, path);
  }
  return { qmi, fidelity: asNumber(obj["fidelity"], "fidelity", path) };
}
