import { execFileSync } from 'node:child_process';
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { readDqde } from '../src/dqde.js';
import { exportPairs } from '../src/export.js';
import { main } from '../src/cli.js';

const FIXTURES = fileURLToPath(new URL('./fixtures', import.meta.url));
const TINY = join(FIXTURES, 'tiny-bert');
const BASE_WIDTH = join(FIXTURES, 'base-width');

function workdir(): string {
  return mkdtempSync(join(tmpdir(), 'dqde-export-'));
}

function toySpec(out: string) {
  return {
    checkpoint: TINY,
    corpus: join(FIXTURES, 'toy_corpus.tsv'),
    pairs: join(FIXTURES, 'toy_pairs.tsv'),
    out,
    batchSize: 32,
    device: 'cpu' as const,
  };
}

describe('exportPairs', () => {
  it('writes the toy pairs in file order with labels', () => {
    const out = join(workdir(), 'toy.dqde');
    const result = exportPairs(toySpec(out));
    expect(result.count).toBe(3);
    expect(result.dim).toBe(32);
    expect(result.truncatedPairs).toBe(0);

    const file = readDqde(out);
    expect(file.count).toBe(3);
    expect(file.dim).toBe(32);
    expect(Array.from(file.labels!)).toEqual([1, 0, 0]);

    const manifest = JSON.parse(readFileSync(`${out}.manifest.json`, 'utf8'));
    expect(manifest.checkpoint).toBe(TINY);
    expect(manifest.truncated_pairs).toBe(0);
  });

  it('is validated by the scoring toolkit inspect command', () => {
    const out = join(workdir(), 'toy.dqde');
    exportPairs(toySpec(out));
    const stdout = execFileSync('python3', ['-m', 'dqde', 'inspect', out], {
      encoding: 'utf8',
    });
    const report = new Map(stdout.trim().split('\n').map((l) => l.split('\t') as [string, string]));
    expect(report.get('count')).toBe('3');
    expect(report.get('dim')).toBe('32');
    expect(report.get('labeled')).toBe('yes');
    expect(report.get('positives')).toBe('1');
    expect(report.get('negatives')).toBe('2');
  });

  it('reproduces byte-identical output on rerun', () => {
    const dir = workdir();
    const a = join(dir, 'a.dqde');
    const b = join(dir, 'b.dqde');
    exportPairs(toySpec(a));
    exportPairs(toySpec(b));
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });

  it('counts truncated pairs when the budget is tight', () => {
    const out = join(workdir(), 'short.dqde');
    const result = exportPairs({ ...toySpec(out), maxSeqLen: 12 });
    expect(result.truncatedPairs).toBeGreaterThan(0);
    expect(readDqde(out).count).toBe(3);
  });

  it('rejects unresolvable pair ids with the pair row', () => {
    const dir = workdir();
    const badPairs = join(dir, 'bad.tsv');
    writeFileSync(badPairs, 'q1\tq99\t1\n');
    expect(() => exportPairs({ ...toySpec(join(dir, 'x.dqde')), pairs: badPairs })).toThrow(
      /q99/
    );
  });

  it.skipIf(!existsSync(BASE_WIDTH))(
    'base-width checkpoint yields dim 768',
    () => {
      const out = join(workdir(), 'wide.dqde');
      const result = exportPairs({ ...toySpec(out), checkpoint: BASE_WIDTH });
      expect(result.dim).toBe(768);
      expect(readDqde(out).dim).toBe(768);
    }
  );
});

describe('cli', () => {
  it('runs end to end and exits 0', () => {
    const out = join(workdir(), 'cli.dqde');
    const code = main([
      '--checkpoint', TINY,
      '--corpus', join(FIXTURES, 'toy_corpus.tsv'),
      '--pairs', join(FIXTURES, 'toy_pairs.tsv'),
      '--out', out,
    ]);
    expect(code).toBe(0);
    expect(readDqde(out).count).toBe(3);
  });

  it('returns 1 on usage errors', () => {
    expect(main(['--corpus', 'x'])).toBe(1);
    expect(main(['--bogus', '1'])).toBe(1);
    expect(main(['--device', 'gpu'])).toBe(1);
  });

  it('returns 2 on data errors', () => {
    const out = join(workdir(), 'x.dqde');
    const code = main([
      '--checkpoint', join(FIXTURES, 'nope'),
      '--corpus', join(FIXTURES, 'toy_corpus.tsv'),
      '--pairs', join(FIXTURES, 'toy_pairs.tsv'),
      '--out', out,
    ]);
    expect(code).toBe(2);
  });
});
