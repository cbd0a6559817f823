export { figurePreset, loadFigureSpec, presetNames } from "./figures.js";
export type { CurveSpec, FigureSpec, PanelSpec } from "./figures.js";
export { renderFigure, writeFigure } from "./render.js";
export type { RenderResult } from "./render.js";
export { numericColumn, parseCsv, readCsv, requireColumns, SchemaError } from "./schema.js";
export type { CsvTable } from "./schema.js";
