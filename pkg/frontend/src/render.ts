/**
 * Deterministic SVG rendering of figure specs.
 *
 * The renderer never transforms the data numerically: coordinates are an
 * affine map of the parsed values, and every curve embeds its source
 * column verbatim in a <metadata> element, so the plotted series can be
 * compared byte-for-byte against the CSV.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import type { CurveSpec, FigureSpec, PanelSpec } from "./figures.js";
import { numericColumn, readCsv, requireColumns, type CsvTable } from "./schema.js";

const WIDTH = 840;
const PANEL_HEIGHT = 280;
const PANEL_GAP = 34;
const MARGIN = { top: 46, right: 24, bottom: 52, left: 82 } as const;
const TICKS = 5;

interface Range {
  readonly lo: number;
  readonly hi: number;
}

function padRange(lo: number, hi: number): Range {
  if (lo === hi) {
    return { lo: lo - 1, hi: hi + 1 };
  }
  const pad = 0.05 * (hi - lo);
  return { lo: lo - pad, hi: hi + pad };
}

function scale(value: number, domain: Range, outLo: number, outHi: number): number {
  const fraction = (value - domain.lo) / (domain.hi - domain.lo);
  return outLo + fraction * (outHi - outLo);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function tickLabel(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(2);
  }
  return String(Number(value.toPrecision(4)));
}

function renderPanel(
  table: CsvTable,
  panel: PanelSpec,
  panelIndex: number,
  x: number[],
  xRange: Range,
  source: string,
): string {
  const top = MARGIN.top + panelIndex * (PANEL_HEIGHT + PANEL_GAP);
  const bottom = top + PANEL_HEIGHT - 40;
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;

  const series = panel.curves.map((curve) => numericColumn(table, curve.column, source));
  let lo = Infinity;
  let hi = -Infinity;
  for (const values of series) {
    for (const v of values) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  const yRange = padRange(lo, hi);

  const parts: string[] = [];
  parts.push(`<g class="panel" data-panel="${panelIndex}">`);
  parts.push(
    `<text class="title" x="${left}" y="${top - 10}" font-size="13">` +
      `${escapeXml(panel.title)}</text>`,
  );
  parts.push(
    `<rect class="frame" x="${left}" y="${top}" width="${right - left}" ` +
      `height="${bottom - top}" fill="none" stroke="#333333"/>`,
  );

  for (let k = 0; k < TICKS; k += 1) {
    const fraction = k / (TICKS - 1);
    const xPix = (left + fraction * (right - left)).toFixed(2);
    const yPix = (bottom - fraction * (bottom - top)).toFixed(2);
    const xVal = xRange.lo + fraction * (xRange.hi - xRange.lo);
    const yVal = yRange.lo + fraction * (yRange.hi - yRange.lo);
    parts.push(
      `<line x1="${xPix}" y1="${top}" x2="${xPix}" y2="${bottom}" ` +
        `stroke="#dddddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<line x1="${left}" y1="${yPix}" x2="${right}" y2="${yPix}" ` +
        `stroke="#dddddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${xPix}" y="${bottom + 16}" font-size="10" text-anchor="middle">` +
        `${escapeXml(tickLabel(xVal))}</text>`,
    );
    parts.push(
      `<text x="${left - 6}" y="${yPix}" font-size="10" text-anchor="end" ` +
        `dominant-baseline="middle">${escapeXml(tickLabel(yVal))}</text>`,
    );
  }
  parts.push(
    `<text x="${left - 64}" y="${(top + bottom) / 2}" font-size="11" ` +
      `text-anchor="middle" transform="rotate(-90 ${left - 64} ${(top + bottom) / 2})">` +
      `${escapeXml(panel.yLabel)}</text>`,
  );

  panel.curves.forEach((curve: CurveSpec, j: number) => {
    const values = series[j]!;
    const points = values
      .map((v, i) => `${scale(x[i]!, xRange, left, right).toFixed(2)},` +
        `${scale(v, yRange, bottom, top).toFixed(2)}`)
      .join(" ");
    const dash = curve.dash === undefined ? "" : ` stroke-dasharray="${curve.dash}"`;
    parts.push(
      `<g class="series" data-column="${escapeXml(curve.column)}">` +
        `<metadata class="source" data-column="${escapeXml(curve.column)}">` +
        `${table.columns.get(curve.column)!.join(",")}</metadata>` +
        `<polyline fill="none" stroke="${curve.color}" stroke-width="1.4"${dash} ` +
        `points="${points}"/></g>`,
    );
    const legendY = top + 16 + 15 * j;
    parts.push(
      `<line x1="${right - 150}" y1="${legendY - 4}" x2="${right - 126}" ` +
        `y2="${legendY - 4}" stroke="${curve.color}" stroke-width="1.4"${dash}/>`,
    );
    parts.push(
      `<text x="${right - 120}" y="${legendY}" font-size="11">` +
        `${escapeXml(curve.label)}</text>`,
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}

/** Render the figure to SVG text. Throws SchemaError before any output on bad input. */
export function renderFigure(spec: FigureSpec): string {
  const table = readCsv(spec.csvPath);
  for (const panel of spec.panels) {
    requireColumns(table, panel.curves.map((c) => c.column), spec.csvPath);
  }
  const x = numericColumn(table, "t", spec.csvPath);
  const xRange = padRange(Math.min(...x), Math.max(...x));
  const height = MARGIN.top + spec.panels.length * (PANEL_HEIGHT + PANEL_GAP) -
    PANEL_GAP + MARGIN.bottom - 40;

  const body = spec.panels
    .map((panel, i) => renderPanel(table, panel, i, x, xRange, spec.csvPath))
    .join("\n");
  const lastBottom = MARGIN.top + spec.panels.length * (PANEL_HEIGHT + PANEL_GAP) -
    PANEL_GAP - 40;
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
      `viewBox="0 0 ${WIDTH} ${height}" font-family="Helvetica, Arial, sans-serif" ` +
      `data-name="${escapeXml(spec.name)}">`,
    `<title>${escapeXml(spec.name)}</title>`,
    `<rect width="${WIDTH}" height="${height}" fill="#ffffff"/>`,
    body,
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${lastBottom + 34}" ` +
      `font-size="12" text-anchor="middle">${escapeXml(spec.xLabel)}</text>`,
    "</svg>",
    "",
  ].join("\n");
}

export interface RenderResult {
  readonly outPath: string;
  readonly svg: string;
}

/** Render and write the figure; nothing is written when rendering fails. */
export function writeFigure(spec: FigureSpec): RenderResult {
  const svg = renderFigure(spec);
  mkdirSync(dirname(spec.outPath), { recursive: true });
  writeFileSync(spec.outPath, svg, "utf8");
  return { outPath: spec.outPath, svg };
}
