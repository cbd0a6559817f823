import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import {
  numericColumn,
  parseCsv,
  readCsv,
  requireColumns,
  SchemaError,
} from "../src/schema.js";
import { makeTempDir, removeDir, syntheticCsv } from "./helpers.js";

describe("parseCsv", () => {
  it("keeps cells verbatim, one array per column", () => {
    const table = parseCsv("t,a,b\n0.0e+00,1.5e-01,2e+00\n1.0e+00,-3e-02,4e+00\n");
    expect(table.header).toEqual(["t", "a", "b"]);
    expect(table.rows).toBe(2);
    expect(table.columns.get("a")).toEqual(["1.5e-01", "-3e-02"]);
    expect(table.columns.get("t")).toEqual(["0.0e+00", "1.0e+00"]);
  });

  it("rejects a header-only file", () => {
    expect(() => parseCsv("t,a\n")).toThrow(SchemaError);
    expect(() => parseCsv("t,a\n")).toThrow(/no data rows/);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(/missing header/);
  });

  it("rejects ragged rows with the row number", () => {
    expect(() => parseCsv("t,a\n1,2\n3\n")).toThrow(/row 2 has 1 cells, expected 2/);
  });

  it("requires t as the first column", () => {
    expect(() => parseCsv("time,a\n1,2\n")).toThrow(/first column must be "t"/);
  });

  it("rejects duplicate column names", () => {
    expect(() => parseCsv("t,a,a\n1,2,3\n")).toThrow(/duplicate column/);
  });
});

describe("readCsv", () => {
  let dir: string;
  beforeEach(() => {
    dir = makeTempDir();
  });
  afterEach(() => {
    removeDir(dir);
  });

  it("reads a file written with the artifact format", () => {
    const path = join(dir, "x.csv");
    writeFileSync(path, syntheticCsv("t,a,b", 3), "utf8");
    const table = readCsv(path);
    expect(table.rows).toBe(3);
  });

  it("raises SchemaError for a missing file", () => {
    expect(() => readCsv(join(dir, "absent.csv"))).toThrow(SchemaError);
    expect(() => readCsv(join(dir, "absent.csv"))).toThrow(/cannot read/);
  });
});

describe("requireColumns / numericColumn", () => {
  const table = parseCsv("t,a\n0,1\n1,2\n");

  it("accepts present columns and names missing ones", () => {
    expect(() => requireColumns(table, ["t", "a"], "x.csv")).not.toThrow();
    expect(() => requireColumns(table, ["a", "ghost"], "x.csv")).toThrow(
      /column "ghost" not in CSV header/,
    );
  });

  it("parses numeric values and rejects non-finite cells", () => {
    expect(numericColumn(table, "a", "x.csv")).toEqual([1, 2]);
    const bad = parseCsv("t,a\n0,nonsense\n");
    expect(() => numericColumn(bad, "a", "x.csv")).toThrow(/not a finite number/);
  });
});
