import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { describe, expect, it } from 'vitest';

import { readSafetensors } from '../src/safetensors.js';

function writeFixture(tensors: Record<string, { shape: number[]; values: number[] }>): string {
  let offset = 0;
  const header: Record<string, unknown> = {};
  const blobs: Buffer[] = [];
  for (const [name, t] of Object.entries(tensors)) {
    const data = Buffer.from(Float32Array.from(t.values).buffer);
    header[name] = { dtype: 'F32', shape: t.shape, data_offsets: [offset, offset + data.length] };
    offset += data.length;
    blobs.push(data);
  }
  const headerBuf = Buffer.from(JSON.stringify(header), 'utf8');
  const lenBuf = Buffer.alloc(8);
  lenBuf.writeBigUInt64LE(BigInt(headerBuf.length));
  const path = join(mkdtempSync(join(tmpdir(), 'st-')), 'model.safetensors');
  writeFileSync(path, Buffer.concat([lenBuf, headerBuf, ...blobs]));
  return path;
}

describe('readSafetensors', () => {
  it('reads shapes and values written by hand', () => {
    const path = writeFixture({
      'a.weight': { shape: [2, 2], values: [1, 2, 3, 4] },
      'a.bias': { shape: [2], values: [0.5, -0.5] },
    });
    const tensors = readSafetensors(path);
    expect(tensors.get('a.weight')!.shape).toEqual([2, 2]);
    expect(Array.from(tensors.get('a.weight')!.data)).toEqual([1, 2, 3, 4]);
    expect(Array.from(tensors.get('a.bias')!.data)).toEqual([0.5, -0.5]);
  });

  it('rejects non-f32 dtypes', () => {
    const path = writeFixture({ x: { shape: [1], values: [1] } });
    // rewrite the header with a bogus dtype
    const buf = readFileSync(path);
    const len = Number(buf.readBigUInt64LE(0));
    const header = buf.toString('utf8', 8, 8 + len).replace('F32', 'F16');
    const headerBuf = Buffer.from(header, 'utf8');
    const lenBuf = Buffer.alloc(8);
    lenBuf.writeBigUInt64LE(BigInt(headerBuf.length));
    writeFileSync(path, Buffer.concat([lenBuf, headerBuf, buf.subarray(8 + len)]));
    expect(() => readSafetensors(path)).toThrow(/F16/);
  });

  it('rejects truncated files', () => {
    const dir = mkdtempSync(join(tmpdir(), 'st-'));
    const path = join(dir, 'short.safetensors');
    writeFileSync(path, Buffer.from([1, 2, 3]));
    expect(() => readSafetensors(path)).toThrow(/safetensors/);
  });
});
