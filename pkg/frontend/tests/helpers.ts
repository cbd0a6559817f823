/** Shared fixtures: synthetic CSV artifacts with the real preset headers. */

import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const FLOW_HEADER =
  "t,exp_u,var_u,exp_udot,var_udot,exp_qdot,var_qdot,exp_wdot,var_wdot," +
  "cov_qdot_wdot,comm_qdot_wdot,bound_qdot_wdot,bound_qdot_wdot_cf," +
  "bound_udot_lower,bound_udot_upper,bound_u_udot,bound_u_qdot,bound_u_wdot";

export const BATTERY_HEADER =
  "t,exp_beta_1,exp_beta_2,exp_beta_3,exp_e_b,exp_p_b,var_e_b,var_p_b," +
  "cov_e_b_p_b,comm_e_b_p_b,bound_e_b_p_b,comm_e_b_p_b_cf";

export const DEPHASING_HEADER =
  "t,exp_beta_1,exp_beta_2,exp_beta_3,exp_e_b,exp_p_b,var_e_b,var_p_b," +
  "cov_e_b_p_b,comm_e_b_p_b,bound_e_b_p_b,bound_e_b_p_b_cf," +
  "exp_entropy_rate,comm_qdot_sdot,comm_qdot_sdot_cf";

export const PROBE_HEADER = `${BATTERY_HEADER},exp_probe_v_cf`;

export const PRESET_HEADERS: Record<string, string> = {
  fig3_left: FLOW_HEADER,
  fig3_right: FLOW_HEADER,
  fig4_left: FLOW_HEADER,
  fig4_right: FLOW_HEADER,
  fig5_plain: BATTERY_HEADER,
  fig5_measured: BATTERY_HEADER,
  fig6: DEPHASING_HEADER,
  fig7_probe: PROBE_HEADER,
};

/** CSV text with deterministic cells formatted like the run artifacts. */
export function syntheticCsv(header: string, rows: number): string {
  const names = header.split(",");
  const lines = [header];
  for (let i = 0; i < rows; i += 1) {
    const cells = names.map((_, j) => (((i + 1) * (j + 2)) / 7).toExponential(16));
    lines.push(cells.join(","));
  }
  return `${lines.join("\n")}\n`;
}

export function makeTempDir(): string {
  return mkdtempSync(join(tmpdir(), "qflows-plots-"));
}

export function removeDir(dir: string): void {
  rmSync(dir, { recursive: true, force: true });
}

/** Write synthetic <name>.csv files for every preset into dir. */
export function writePresetArtifacts(dir: string, rows = 5): void {
  for (const [name, header] of Object.entries(PRESET_HEADERS)) {
    writeFileSync(join(dir, `${name}.csv`), syntheticCsv(header, rows), "utf8");
  }
}
