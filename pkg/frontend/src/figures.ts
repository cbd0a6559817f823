/**
 * Figure specifications: which CSV columns become which curves, and how
 * the panels are arranged. One builder per scenario preset, plus a loader
 * for standalone JSON specs.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { SchemaError } from "./schema.js";

export interface CurveSpec {
  /** CSV column plotted against t. */
  readonly column: string;
  readonly label: string;
  readonly color: string;
  /** SVG dash pattern; solid when omitted. */
  readonly dash?: string;
}

export interface PanelSpec {
  readonly title: string;
  readonly yLabel: string;
  readonly curves: readonly CurveSpec[];
}

export interface FigureSpec {
  readonly name: string;
  readonly csvPath: string;
  readonly outPath: string;
  readonly xLabel: string;
  readonly panels: readonly PanelSpec[];
}

const BLUE = "#1f77b4";
const ORANGE = "#ff7f0e";
const GREEN = "#2ca02c";
const RED = "#d62728";
const PURPLE = "#9467bd";
const GREY = "#555555";

function flowPanels(): PanelSpec[] {
  return [
    {
      title: "heat and work flow spreads vs commutator bound (variance scale)",
      yLabel: "variance",
      curves: [
        { column: "var_qdot", label: "var(Qdot)", color: BLUE },
        { column: "var_wdot", label: "var(Wdot)", color: ORANGE },
        { column: "bound_qdot_wdot", label: "operator bound", color: RED },
        { column: "bound_qdot_wdot_cf", label: "closed form", color: GREY, dash: "6 3" },
      ],
    },
    {
      title: "internal-energy variance and its flow-route bounds",
      yLabel: "variance",
      curves: [
        { column: "var_u", label: "var(U)", color: BLUE },
        { column: "bound_u_udot", label: "via Udot", color: GREEN },
        { column: "bound_u_qdot", label: "via Qdot", color: PURPLE },
        { column: "bound_u_wdot", label: "via Wdot", color: RED, dash: "6 3" },
      ],
    },
  ];
}

function batteryPanels(): PanelSpec[] {
  return [
    {
      title: "battery energy and power",
      yLabel: "expectation",
      curves: [
        { column: "exp_e_b", label: "<E_B>", color: BLUE },
        { column: "exp_p_b", label: "<P_B>", color: ORANGE },
      ],
    },
    {
      title: "energy-power commutator term and bound",
      yLabel: "variance scale",
      curves: [
        { column: "comm_e_b_p_b", label: "commutator term", color: BLUE },
        { column: "comm_e_b_p_b_cf", label: "closed form", color: GREY, dash: "6 3" },
        { column: "bound_e_b_p_b", label: "full bound", color: RED },
      ],
    },
  ];
}

function dephasingPanels(): PanelSpec[] {
  return [
    {
      title: "Bloch trajectory",
      yLabel: "component",
      curves: [
        { column: "exp_beta_1", label: "beta_1", color: BLUE },
        { column: "exp_beta_2", label: "beta_2", color: ORANGE },
        { column: "exp_beta_3", label: "beta_3", color: GREEN },
      ],
    },
    {
      title: "energy and power variances vs bound",
      yLabel: "variance",
      curves: [
        { column: "var_e_b", label: "var(E_B)", color: BLUE },
        { column: "var_p_b", label: "var(P_B)", color: ORANGE },
        { column: "bound_e_b_p_b", label: "operator bound", color: RED },
        { column: "bound_e_b_p_b_cf", label: "closed form", color: GREY, dash: "6 3" },
      ],
    },
  ];
}

function probePanels(): PanelSpec[] {
  return [
    {
      title: "trajectory commutator term vs unitary-averaged probe",
      yLabel: "variance scale",
      curves: [
        { column: "comm_e_b_p_b", label: "commutator term", color: BLUE },
        { column: "comm_e_b_p_b_cf", label: "closed form", color: GREY, dash: "6 3" },
        { column: "exp_probe_v_cf", label: "drive-averaged probe", color: RED },
      ],
    },
  ];
}

const PRESET_PANELS: Record<string, () => PanelSpec[]> = {
  fig3_left: flowPanels,
  fig3_right: flowPanels,
  fig4_left: flowPanels,
  fig4_right: flowPanels,
  fig5_plain: batteryPanels,
  fig5_measured: batteryPanels,
  fig6: dephasingPanels,
  fig7_probe: probePanels,
};

export function presetNames(): string[] {
  return Object.keys(PRESET_PANELS);
}

export function figurePreset(name: string, inDir: string, outDir: string): FigureSpec {
  const builder = PRESET_PANELS[name];
  if (builder === undefined) {
    throw new SchemaError(`unknown preset "${name}"; available: ${presetNames().join(", ")}`);
  }
  return {
    name,
    csvPath: join(inDir, `${name}.csv`),
    outPath: join(outDir, `${name}.svg`),
    xLabel: "t",
    panels: builder(),
  };
}

interface RawCurve {
  column?: unknown;
  label?: unknown;
  color?: unknown;
  dash?: unknown;
}

interface RawPanel {
  title?: unknown;
  yLabel?: unknown;
  curves?: unknown;
}

/** Load a standalone figure spec from JSON, validating shape and types. */
export function loadFigureSpec(path: string): FigureSpec {
  let data: unknown;
  try {
    data = JSON.parse(readFileSync(path, "utf8"));
  } catch (error) {
    throw new SchemaError(`cannot load spec ${path}: ${(error as Error).message}`);
  }
  if (typeof data !== "object" || data === null) {
    throw new SchemaError(`${path}: spec must be a JSON object`);
  }
  const spec = data as Record<string, unknown>;
  const name = requireString(spec.name, "name", path);
  const csvPath = requireString(spec.csv, "csv", path);
  const outPath = requireString(spec.out, "out", path);
  const xLabel = spec.xLabel === undefined ? "t" : requireString(spec.xLabel, "xLabel", path);
  if (!Array.isArray(spec.panels) || spec.panels.length === 0) {
    throw new SchemaError(`${path}: "panels" must be a nonempty array`);
  }
  const palette = [BLUE, ORANGE, GREEN, RED, PURPLE, GREY];
  const panels = spec.panels.map((rawPanel: RawPanel, i: number): PanelSpec => {
    const title = requireString(rawPanel.title, `panels[${i}].title`, path);
    const yLabel = rawPanel.yLabel === undefined
      ? ""
      : requireString(rawPanel.yLabel, `panels[${i}].yLabel`, path);
    if (!Array.isArray(rawPanel.curves) || rawPanel.curves.length === 0) {
      throw new SchemaError(`${path}: panels[${i}].curves must be a nonempty array`);
    }
    const curves = rawPanel.curves.map((rawCurve: RawCurve, j: number): CurveSpec => {
      const column = requireString(rawCurve.column, `panels[${i}].curves[${j}].column`, path);
      const label = rawCurve.label === undefined
        ? column
        : requireString(rawCurve.label, `panels[${i}].curves[${j}].label`, path);
      const color = rawCurve.color === undefined
        ? palette[j % palette.length]!
        : requireString(rawCurve.color, `panels[${i}].curves[${j}].color`, path);
      const curve: { column: string; label: string; color: string; dash?: string } = {
        column,
        label,
        color,
      };
      if (rawCurve.dash !== undefined) {
        curve.dash = requireString(rawCurve.dash, `panels[${i}].curves[${j}].dash`, path);
      }
      return curve;
    });
    return { title, yLabel, curves };
  });
  return { name, csvPath, outPath, xLabel, panels };
}

function requireString(value: unknown, field: string, source: string): string {
  if (typeof value !== "string" || value === "") {
    throw new SchemaError(`${source}: "${field}" must be a nonempty string`);
  }
  return value;
}
