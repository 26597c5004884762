/**
 * Writer (and reader, used by tests) for the binary embedding container
 * consumed by the scoring toolkit.
 *
 * Layout, all little-endian: "DQDE" magic, u16 version (1), u16 flags
 * (bit 0 = labels present), u32 dim, u64 count, count*dim float32 rows,
 * then one label byte per row when flagged.
 */

import { writeFileSync, readFileSync } from 'node:fs';

const MAGIC = 'DQDE';
const VERSION = 1;
const FLAG_LABELS = 0x0001;
const HEADER_SIZE = 20;

export interface EmbeddingFile {
  dim: number;
  count: number;
  vectors: Float32Array; // row-major, count * dim
  labels: Uint8Array | null;
}

export function writeDqde(path: string, file: EmbeddingFile): number {
  const { dim, count, vectors, labels } = file;
  if (vectors.length !== count * dim) {
    throw new Error(`vector buffer has ${vectors.length} floats, expected ${count * dim}`);
  }
  if (labels !== null && labels.length !== count) {
    throw new Error(`label buffer has ${labels.length} entries, expected ${count}`);
  }
  for (let row = 0; row < count; row++) {
    let sq = 0;
    for (let c = 0; c < dim; c++) {
      const v = vectors[row * dim + c];
      if (!Number.isFinite(v)) throw new Error(`non-finite value at row ${row}, col ${c}`);
      sq += v * v;
    }
    if (sq === 0) throw new Error(`row ${row} has zero norm`);
    if (labels !== null && labels[row] > 1) throw new Error(`label at row ${row} is not 0 or 1`);
  }

  const total = HEADER_SIZE + 4 * count * dim + (labels !== null ? count : 0);
  const buf = Buffer.alloc(total);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt16LE(labels !== null ? FLAG_LABELS : 0, 6);
  buf.writeUInt32LE(dim, 8);
  buf.writeBigUInt64LE(BigInt(count), 12);
  for (let i = 0; i < vectors.length; i++) {
    buf.writeFloatLE(vectors[i], HEADER_SIZE + 4 * i);
  }
  if (labels !== null) {
    buf.set(labels, HEADER_SIZE + 4 * count * dim);
  }
  writeFileSync(path, buf);
  return total;
}

export function readDqde(path: string): EmbeddingFile {
  const buf = readFileSync(path);
  if (buf.length < HEADER_SIZE) throw new Error(`file too short for header: ${buf.length} bytes`);
  if (buf.toString('ascii', 0, 4) !== MAGIC) throw new Error('bad magic');
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) throw new Error(`unsupported version ${version}`);
  const flags = buf.readUInt16LE(6);
  const dim = buf.readUInt32LE(8);
  const count = Number(buf.readBigUInt64LE(12));
  const labeled = (flags & FLAG_LABELS) !== 0;
  const expected = HEADER_SIZE + 4 * count * dim + (labeled ? count : 0);
  if (buf.length !== expected) {
    throw new Error(`truncated payload: expected ${expected} bytes, got ${buf.length}`);
  }
  const vectors = new Float32Array(count * dim);
  for (let i = 0; i < vectors.length; i++) {
    vectors[i] = buf.readFloatLE(HEADER_SIZE + 4 * i);
  }
  const labels = labeled
    ? new Uint8Array(buf.subarray(HEADER_SIZE + 4 * count * dim, expected))
    : null;
  return { dim, count, vectors, labels };
}
