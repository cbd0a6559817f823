import { existsSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";
import {
  FLOW_HEADER,
  makeTempDir,
  removeDir,
  syntheticCsv,
  writePresetArtifacts,
} from "./helpers.js";

let dir: string;
let out: string;
let logSpy: ReturnType<typeof vi.spyOn>;
let errorSpy: ReturnType<typeof vi.spyOn>;

beforeEach(() => {
  dir = makeTempDir();
  out = join(dir, "svg");
  writePresetArtifacts(dir);
  logSpy = vi.spyOn(console, "log").mockImplementation(() => {});
  errorSpy = vi.spyOn(console, "error").mockImplementation(() => {});
});
afterEach(() => {
  logSpy.mockRestore();
  errorSpy.mockRestore();
  removeDir(dir);
});

function stderrText(): string {
  return errorSpy.mock.calls.map((call) => call.join(" ")).join("\n");
}

describe("main", () => {
  it("renders a preset and reports the output path", () => {
    const code = main(["render", "--preset", "fig3_left", "--in", dir, "--out", out]);
    expect(code).toBe(0);
    expect(existsSync(join(out, "fig3_left.svg"))).toBe(true);
    expect(logSpy).toHaveBeenCalledWith(`wrote ${join(out, "fig3_left.svg")}`);
  });

  it("accepts the flags without the leading render token", () => {
    const code = main(["--preset", "fig4_left", "--in", dir, "--out", out]);
    expect(code).toBe(0);
    expect(existsSync(join(out, "fig4_left.svg"))).toBe(true);
  });

  it("renders from a standalone JSON spec", () => {
    const specPath = join(dir, "custom.json");
    writeFileSync(specPath, JSON.stringify({
      name: "custom",
      csv: join(dir, "fig3_left.csv"),
      out: join(out, "custom.svg"),
      panels: [
        {
          title: "internal energy",
          curves: [{ column: "exp_u" }, { column: "var_u", dash: "4 2" }],
        },
      ],
    }));
    const code = main(["render", "--spec", specPath]);
    expect(code).toBe(0);
    expect(existsSync(join(out, "custom.svg"))).toBe(true);
  });

  it("rejects unknown presets without writing anything", () => {
    const code = main(["render", "--preset", "fig99", "--in", dir, "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
    expect(stderrText()).toMatch(/unknown preset "fig99"/);
  });

  it("requires exactly one of --spec and --preset", () => {
    expect(main(["render"])).toBe(1);
    expect(
      main(["render", "--preset", "fig6", "--spec", "x.json", "--in", dir, "--out", out]),
    ).toBe(1);
    expect(stderrText()).toMatch(/exactly one of --spec or --preset/);
  });

  it("requires --in and --out alongside --preset", () => {
    const code = main(["render", "--preset", "fig6"]);
    expect(code).toBe(1);
    expect(stderrText()).toMatch(/--preset requires --in/);
  });

  it("rejects a dangling flag with no value", () => {
    const code = main(["render", "--preset"]);
    expect(code).toBe(1);
    expect(stderrText()).toMatch(/missing value for --preset/);
  });

  it("rejects unknown arguments", () => {
    const code = main(["render", "--presets", "fig6"]);
    expect(code).toBe(1);
    expect(stderrText()).toMatch(/unknown argument --presets/);
  });

  it("fails on a CSV missing a referenced column, writing no file", () => {
    const trimmed = FLOW_HEADER.split(",").filter((c) => c !== "bound_u_wdot");
    writeFileSync(join(dir, "fig3_left.csv"), syntheticCsv(trimmed.join(","), 4));
    const code = main(["render", "--preset", "fig3_left", "--in", dir, "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(join(out, "fig3_left.svg"))).toBe(false);
    expect(stderrText()).toMatch(/bound_u_wdot/);
  });

  it("fails on a header-only CSV, writing no file", () => {
    writeFileSync(join(dir, "fig6.csv"), "t,exp_beta_1\n");
    const code = main(["render", "--preset", "fig6", "--in", dir, "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(join(out, "fig6.svg"))).toBe(false);
    expect(stderrText()).toMatch(/no data rows/);
  });
});
