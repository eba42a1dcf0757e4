/** CSV access for the experiment outputs (no quoting in that schema). */

import * as fs from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty CSV`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  return { header, rows };
}

/** Column accessor that reports missing columns by name. */
export function column(table: Table, name: string, path = "input"): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${path}: missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string, path = "input"): number[] {
  return column(table, name, path).map((v) => {
    const x = Number(v);
    if (Number.isNaN(x)) {
      throw new Error(`${path}: non-numeric value '${v}' in column '${name}'`);
    }
    return x;
  });
}
