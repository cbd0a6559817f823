/**
 * Strict reading of the run artifacts: CSV time series and JSON summaries.
 *
 * Cell values are kept as the exact strings found in the file. Rendering
 * parses them for coordinates but always carries the originals through to
 * the output, so a figure can be audited against its source columns.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface CsvTable {
  /** Column names from the header row, in file order. */
  readonly header: readonly string[];
  /** Raw cell strings per column, exactly as read. */
  readonly columns: ReadonlyMap<string, readonly string[]>;
  readonly rows: number;
}

export function parseCsv(text: string, source = "<string>"): CsvTable {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0 || lines[0] === "") {
    throw new SchemaError(`${source}: missing header row`);
  }
  const header = lines[0]!.split(",");
  if (header[0] !== "t") {
    throw new SchemaError(`${source}: first column must be "t", got "${header[0]}"`);
  }
  const seen = new Set<string>();
  for (const name of header) {
    if (name === "" || seen.has(name)) {
      throw new SchemaError(`${source}: blank or duplicate column name "${name}"`);
    }
    seen.add(name);
  }
  if (lines.length === 1) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const cells: string[][] = header.map(() => []);
  for (let i = 1; i < lines.length; i += 1) {
    const row = lines[i]!.split(",");
    if (row.length !== header.length) {
      throw new SchemaError(
        `${source}: row ${i} has ${row.length} cells, expected ${header.length}`,
      );
    }
    for (let j = 0; j < row.length; j += 1) {
      cells[j]!.push(row[j]!);
    }
  }
  const columns = new Map<string, readonly string[]>();
  header.forEach((name, j) => columns.set(name, cells[j]!));
  return { header, columns, rows: lines.length - 1 };
}

export function readCsv(path: string): CsvTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (error) {
    throw new SchemaError(`cannot read ${path}: ${(error as Error).message}`);
  }
  return parseCsv(text, path);
}

export function requireColumns(table: CsvTable, names: readonly string[], source: string): void {
  for (const name of names) {
    if (!table.columns.has(name)) {
      throw new SchemaError(
        `${source}: column "${name}" not in CSV header (${table.header.join(", ")})`,
      );
    }
  }
}

/** Numeric view of a column; rejects cells that do not parse as finite numbers. */
export function numericColumn(table: CsvTable, name: string, source: string): number[] {
  const raw = table.columns.get(name);
  if (raw === undefined) {
    throw new SchemaError(`${source}: column "${name}" not in CSV header`);
  }
  return raw.map((cell, i) => {
    const value = Number(cell);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`${source}: ${name}[${i}] = "${cell}" is not a finite number`);
    }
    return value;
  });
}
