/**
 * Export float weight tensors from a model artifact into QTNS files plus
 * a manifest the quantization harness consumes directly.
 */
import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { sha256File, writeQtns } from './qtns.js';
import { loadTfjsModel, WeightEntry } from './tfjs.js';

export class EmptyExport extends Error {}

export interface ExportConfig {
  /** path to a model.json (TFJS-style artifact) */
  modelSource: string;
  /** name globs; a tensor is exported if it matches any (default: all) */
  includePatterns?: string[];
  outDir: string;
}

export interface ManifestEntry {
  name: string;
  shape: number[];
  file: string;
  sha256: string;
  tags?: string[];
  warnings?: string[];
}

export interface ExportResult {
  manifestPath: string;
  modelName: string;
  entries: ManifestEntry[];
}

function globToRegex(pattern: string): RegExp {
  const escaped = pattern.replace(/[.+^${}()|[\]\\]/g, '\\$&');
  return new RegExp(`^${escaped.replace(/\*/g, '.*').replace(/\?/g, '.')}$`);
}

/** batch-norm style running statistics are estimates, not weights */
const RUNNING_STAT = /(^|\/)moving_(mean|variance)$/;
/** normalization scale/shift: exported but tagged so runs can exclude them */
const NORM_PARAM = /(^|\/)(gamma|beta)$/;

function sanitize(name: string): string {
  return name.replace(/[/\\]/g, '__');
}

export function selectWeights(
  weights: WeightEntry[],
  includePatterns: string[] = ['*'],
): WeightEntry[] {
  const regexes = includePatterns.map(globToRegex);
  return weights.filter(
    (w) =>
      w.values !== null &&
      !RUNNING_STAT.test(w.name) &&
      regexes.some((r) => r.test(w.name)),
  );
}

export function exportModel(config: ExportConfig): ExportResult {
  const model = loadTfjsModel(config.modelSource);
  const selected = selectWeights(model.weights, config.includePatterns);
  if (selected.length === 0) {
    throw new EmptyExport(
      `no float weight tensors match ${JSON.stringify(config.includePatterns ?? ['*'])}`,
    );
  }
  selected.sort((a, b) => (a.name < b.name ? -1 : a.name > b.name ? 1 : 0));

  mkdirSync(config.outDir, { recursive: true });
  const entries: ManifestEntry[] = [];
  for (const weight of selected) {
    const file = `${sanitize(weight.name)}.qtns`;
    const path = join(config.outDir, file);
    writeQtns(path, {
      name: weight.name,
      shape: weight.shape,
      values: weight.values as Float32Array,
    });
    const entry: ManifestEntry = {
      name: weight.name,
      shape: weight.shape,
      file,
      sha256: sha256File(path),
    };
    if (NORM_PARAM.test(weight.name)) {
      entry.tags = ['normalization'];
    }
    if (weight.castFrom) {
      entry.warnings = [`cast from ${weight.castFrom} to float32`];
    }
    entries.push(entry);
  }

  const manifestPath = join(config.outDir, 'manifest.json');
  const doc = { model_name: model.name, tensors: entries };
  writeFileSync(manifestPath, JSON.stringify(doc, null, 2) + '\n');
  return { manifestPath, modelName: model.name, entries };
}
