/**
 * Reader for TensorFlow.js model artifacts: a model.json whose
 * weightsManifest lists weight specs (name, shape, dtype) packed
 * sequentially into binary shard files.
 */
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';

export class UnreadableModel extends Error {}

export interface WeightEntry {
  name: string;
  shape: number[];
  dtype: string;
  /** float32 payload; null for non-float dtypes (skipped by the exporter) */
  values: Float32Array | null;
  /** set when the source dtype was wider and got cast down */
  castFrom?: string;
}

interface WeightSpec {
  name: string;
  shape: number[];
  dtype: string;
}

interface WeightsGroup {
  paths: string[];
  weights: WeightSpec[];
}

const DTYPE_BYTES: Record<string, number> = {
  float32: 4,
  float64: 8,
  int32: 4,
  bool: 1,
};

function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export interface LoadedModel {
  name: string;
  weights: WeightEntry[];
}

export function loadTfjsModel(modelJsonPath: string): LoadedModel {
  let doc: { weightsManifest?: WeightsGroup[]; modelTopology?: unknown; name?: string };
  try {
    doc = JSON.parse(readFileSync(modelJsonPath, 'utf8'));
  } catch (err) {
    throw new UnreadableModel(`cannot parse ${modelJsonPath}: ${err}`);
  }
  if (!Array.isArray(doc.weightsManifest)) {
    throw new UnreadableModel(`${modelJsonPath}: missing weightsManifest`);
  }
  const dir = dirname(modelJsonPath);
  const weights: WeightEntry[] = [];
  for (const group of doc.weightsManifest) {
    let shard: Buffer;
    try {
      shard = Buffer.concat(group.paths.map((p) => readFileSync(join(dir, p))));
    } catch (err) {
      throw new UnreadableModel(`cannot read weight shards: ${err}`);
    }
    let offset = 0;
    for (const spec of group.weights) {
      const bytes = DTYPE_BYTES[spec.dtype];
      if (bytes === undefined) {
        throw new UnreadableModel(
          `${spec.name}: unsupported dtype ${spec.dtype}`,
        );
      }
      const count = numel(spec.shape);
      const end = offset + bytes * count;
      if (end > shard.length) {
        throw new UnreadableModel(`${spec.name}: shard data truncated`);
      }
      let values: Float32Array | null = null;
      let castFrom: string | undefined;
      if (spec.dtype === 'float32') {
        values = new Float32Array(count);
        for (let i = 0; i < count; i++) {
          values[i] = shard.readFloatLE(offset + 4 * i);
        }
      } else if (spec.dtype === 'float64') {
        values = new Float32Array(count);
        for (let i = 0; i < count; i++) {
          values[i] = Math.fround(shard.readDoubleLE(offset + 8 * i));
        }
        castFrom = 'float64';
      }
      weights.push({ name: spec.name, shape: spec.shape, dtype: spec.dtype, values, castFrom });
      offset = end;
    }
  }
  const name =
    typeof doc.name === 'string' ? doc.name : 'tfjs-model';
  return { name, weights };
}
