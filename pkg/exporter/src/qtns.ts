/**
 * QTNS tensor files: magic "QTNS", version byte, u32 LE header length,
 * JSON header {name, dtype: "f32", shape}, raw little-endian float32 data.
 * This is the wire contract with the quantization harness; values must
 * round-trip bit-exactly.
 */
import { createHash } from 'node:crypto';
import { readFileSync, writeFileSync } from 'node:fs';

export const QTNS_MAGIC = 'QTNS';
export const QTNS_VERSION = 1;

export interface TensorData {
  name: string;
  shape: number[];
  values: Float32Array;
}

export function encodeQtns(tensor: TensorData): Buffer {
  const count = tensor.shape.reduce((a, b) => a * b, 1);
  if (count !== tensor.values.length) {
    throw new Error(
      `tensor ${tensor.name}: ${tensor.values.length} values vs shape [${tensor.shape}]`,
    );
  }
  const header = Buffer.from(
    JSON.stringify({ name: tensor.name, dtype: 'f32', shape: tensor.shape }),
    'utf8',
  );
  const out = Buffer.alloc(4 + 1 + 4 + header.length + 4 * count);
  let off = out.write(QTNS_MAGIC, 0, 'ascii');
  off = out.writeUInt8(QTNS_VERSION, off);
  off = out.writeUInt32LE(header.length, off);
  off += header.copy(out, off);
  for (let i = 0; i < count; i++) {
    off = out.writeFloatLE(tensor.values[i], off);
  }
  return out;
}

export function writeQtns(path: string, tensor: TensorData): void {
  writeFileSync(path, encodeQtns(tensor));
}

export function readQtns(path: string): TensorData {
  const buf = readFileSync(path);
  if (buf.toString('ascii', 0, 4) !== QTNS_MAGIC) {
    throw new Error(`${path}: bad magic`);
  }
  if (buf.readUInt8(4) !== QTNS_VERSION) {
    throw new Error(`${path}: unsupported version`);
  }
  const headerLen = buf.readUInt32LE(5);
  const header = JSON.parse(buf.toString('utf8', 9, 9 + headerLen));
  const shape: number[] = header.shape;
  const count = shape.reduce((a: number, b: number) => a * b, 1);
  const values = new Float32Array(count);
  let off = 9 + headerLen;
  for (let i = 0; i < count; i++) {
    values[i] = buf.readFloatLE(off);
    off += 4;
  }
  return { name: header.name, shape, values };
}

export function sha256File(path: string): string {
  return createHash('sha256').update(readFileSync(path)).digest('hex');
}
