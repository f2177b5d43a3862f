/** Deterministic TFJS-style model fixtures for tests. */
import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** roughly normal via sum of uniforms; plenty for fitting tests */
export function gaussianish(rng: () => number, scale: number): number {
  let s = 0;
  for (let i = 0; i < 12; i++) s += rng();
  return (s - 6) * scale;
}

export interface FixtureSpec {
  name: string;
  shape: number[];
  dtype: 'float32' | 'float64' | 'int32' | 'bool';
  fill?: (i: number) => number;
}

/** Write model.json + a single shard holding the given weight specs. */
export function buildModel(
  dir: string,
  modelName: string,
  specs: FixtureSpec[],
  seed = 1234,
): string {
  mkdirSync(dir, { recursive: true });
  const rng = mulberry32(seed);
  const buffers: Buffer[] = [];
  for (const spec of specs) {
    const count = spec.shape.reduce((a, b) => a * b, 1);
    const fill = spec.fill ?? (() => gaussianish(rng, 0.05));
    if (spec.dtype === 'float32') {
      const buf = Buffer.alloc(4 * count);
      for (let i = 0; i < count; i++) buf.writeFloatLE(Math.fround(fill(i)), 4 * i);
      buffers.push(buf);
    } else if (spec.dtype === 'float64') {
      const buf = Buffer.alloc(8 * count);
      for (let i = 0; i < count; i++) buf.writeDoubleLE(fill(i), 8 * i);
      buffers.push(buf);
    } else if (spec.dtype === 'int32') {
      const buf = Buffer.alloc(4 * count);
      for (let i = 0; i < count; i++) buf.writeInt32LE(Math.floor(fill(i)), 4 * i);
      buffers.push(buf);
    } else {
      const buf = Buffer.alloc(count);
      for (let i = 0; i < count; i++) buf.writeUInt8(fill(i) ? 1 : 0, i);
      buffers.push(buf);
    }
  }
  writeFileSync(join(dir, 'weights.bin'), Buffer.concat(buffers));
  const modelJson = {
    name: modelName,
    modelTopology: {},
    weightsManifest: [
      {
        paths: ['weights.bin'],
        weights: specs.map(({ name, shape, dtype }) => ({ name, shape, dtype })),
      },
    ],
  };
  const path = join(dir, 'model.json');
  writeFileSync(path, JSON.stringify(modelJson, null, 2));
  return path;
}

/** Two dense layers: 2 kernels + 2 biases, all float32. */
export function buildMlpFixture(
  dir: string,
  inDim = 16,
  hidden = 32,
  outDim = 4,
): string {
  return buildModel(dir, 'tiny-mlp', [
    { name: 'dense1/kernel', shape: [inDim, hidden], dtype: 'float32' },
    { name: 'dense1/bias', shape: [hidden], dtype: 'float32' },
    { name: 'dense2/kernel', shape: [hidden, outDim], dtype: 'float32' },
    { name: 'dense2/bias', shape: [outDim], dtype: 'float32' },
  ]);
}
