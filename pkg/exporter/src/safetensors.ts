/**
 * Minimal safetensors reader: u64 LE header length, JSON header mapping
 * tensor names to {dtype, shape, data_offsets}, then the raw data block.
 * Only F32 tensors are needed here.
 */

import { readFileSync } from 'node:fs';

export interface Tensor {
  shape: number[];
  data: Float32Array;
}

export function readSafetensors(path: string): Map<string, Tensor> {
  const buf = readFileSync(path);
  if (buf.length < 8) throw new Error(`${path}: not a safetensors file`);
  const headerLen = Number(buf.readBigUInt64LE(0));
  if (headerLen <= 0 || 8 + headerLen > buf.length) {
    throw new Error(`${path}: corrupt safetensors header`);
  }
  const header = JSON.parse(buf.toString('utf8', 8, 8 + headerLen)) as Record<
    string,
    { dtype: string; shape: number[]; data_offsets: [number, number] }
  >;
  const dataStart = 8 + headerLen;
  const tensors = new Map<string, Tensor>();
  for (const [name, meta] of Object.entries(header)) {
    if (name === '__metadata__') continue;
    if (meta.dtype !== 'F32') {
      throw new Error(`${path}: tensor ${name} has dtype ${meta.dtype}, only F32 is supported`);
    }
    const [start, end] = meta.data_offsets;
    const bytes = buf.subarray(dataStart + start, dataStart + end);
    // copy into a fresh, aligned buffer before viewing as f32
    const aligned = new ArrayBuffer(bytes.length);
    new Uint8Array(aligned).set(bytes);
    tensors.set(name, { shape: meta.shape, data: new Float32Array(aligned) });
  }
  return tensors;
}
