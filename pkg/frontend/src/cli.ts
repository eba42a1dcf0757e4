/**
 * Standalone figure renderer.
 *
 * Usage:
 *   node dist/src/cli.js --kind heatmap   --in sweep.csv --out fig.png
 *                        [--method altmin] [--cell 16]
 *   node dist/src/cli.js --kind recon1d   --in x_true.csv,x_hat.csv --out fig.png
 *   node dist/src/cli.js --kind errcurve  --in linearized_curve.csv --out fig.png
 *   node dist/src/cli.js --kind tomo_panel --in true.csv,base.csv,alt.csv --out fig.png
 *
 * Same inputs always produce byte-identical PNG output.
 */

import * as fs from "node:fs";

import { readCsv } from "./csv";
import { renderHeatmap } from "./heatmap";
import { renderErrCurve, renderRecon1d } from "./series";
import { renderTomoPanel } from "./tomo";

interface Args {
  kind: string;
  inputs: string[];
  out: string;
  method?: string;
  cell?: number;
}

export function parseArgs(argv: string[]): Args {
  const out: Partial<Args> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--kind":
        out.kind = value;
        i++;
        break;
      case "--in":
        out.inputs = value.split(",");
        i++;
        break;
      case "--out":
        out.out = value;
        i++;
        break;
      case "--method":
        out.method = value;
        i++;
        break;
      case "--cell":
        out.cell = Number(value);
        i++;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!out.kind || !out.inputs || !out.out) {
    throw new Error("required flags: --kind, --in, --out");
  }
  return out as Args;
}

export function render(args: Args): Buffer {
  const tables = args.inputs.map((p) => readCsv(p));
  switch (args.kind) {
    case "heatmap":
      return renderHeatmap(tables[0], args.inputs[0],
                           { method: args.method, cellSize: args.cell })
        .encode();
    case "recon1d":
      return renderRecon1d(tables, args.inputs).encode();
    case "errcurve":
      return renderErrCurve(tables[0], args.inputs[0]).encode();
    case "tomo_panel":
      return renderTomoPanel(tables, args.inputs).encode();
    default:
      throw new Error(`unknown figure kind '${args.kind}'`);
  }
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    fs.writeFileSync(args.out, render(args));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
