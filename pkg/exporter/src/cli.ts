#!/usr/bin/env node
/**
 * qtns-export export --model <model.json> --out <dir> [--include <glob>]...
 */
import { parseArgs } from 'node:util';

import { EmptyExport, exportModel } from './export.js';
import { UnreadableModel } from './tfjs.js';

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== 'export') {
    console.error('usage: qtns-export export --model <model.json> --out <dir> [--include <glob>]...');
    return 2;
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: rest,
      options: {
        model: { type: 'string' },
        out: { type: 'string' },
        include: { type: 'string', multiple: true },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  const { model, out, include } = parsed.values;
  if (!model || !out) {
    console.error('error: --model and --out are required');
    return 2;
  }
  try {
    const result = exportModel({
      modelSource: model,
      outDir: out,
      includePatterns: include && include.length ? include : undefined,
    });
    console.log(
      `exported ${result.entries.length} tensors from ${result.modelName} -> ${result.manifestPath}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof EmptyExport || err instanceof UnreadableModel) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exitCode = main(process.argv.slice(2));
