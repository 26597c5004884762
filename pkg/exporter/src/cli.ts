#!/usr/bin/env node
/**
 * dqde-export: encode question pairs with a local transformer checkpoint
 * into the .dqde container the scoring toolkit consumes.
 *
 * Exit codes: 0 success, 1 usage error, 2 data/model error.
 */

import { exportPairs, ExportSpec } from './export.js';

const USAGE = `usage: dqde-export --checkpoint DIR --corpus corpus.tsv --pairs pairs.tsv --out file.dqde
                   [--max-seq-len N] [--batch-size N] [--device cpu]`;

class UsageError extends Error {}

function parseArgs(argv: string[]): ExportSpec {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (!flag.startsWith('--')) throw new UsageError(`unexpected argument ${flag}`);
    if (flag === '--help') throw new UsageError('');
    const value = argv[++i];
    if (value === undefined) throw new UsageError(`missing value for ${flag}`);
    values.set(flag.slice(2), value);
  }
  const known = ['checkpoint', 'corpus', 'pairs', 'out', 'max-seq-len', 'batch-size', 'device'];
  for (const key of values.keys()) {
    if (!known.includes(key)) throw new UsageError(`unknown flag --${key}`);
  }
  const required = (key: string): string => {
    const v = values.get(key);
    if (v === undefined) throw new UsageError(`--${key} is required`);
    return v;
  };
  const numeric = (key: string, fallback: number): number => {
    const v = values.get(key);
    if (v === undefined) return fallback;
    const n = Number(v);
    if (!Number.isInteger(n) || n < 1) throw new UsageError(`--${key} must be a positive integer`);
    return n;
  };
  const device = values.get('device') ?? 'cpu';
  if (device !== 'cpu') throw new UsageError(`--device must be cpu, got ${device}`);
  return {
    checkpoint: required('checkpoint'),
    corpus: required('corpus'),
    pairs: required('pairs'),
    out: required('out'),
    maxSeqLen: values.has('max-seq-len') ? numeric('max-seq-len', 0) : undefined,
    batchSize: numeric('batch-size', 32),
    device,
  };
}

export function main(argv: string[]): number {
  let spec: ExportSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      if (err.message) console.error(`usage error: ${err.message}`);
      console.error(USAGE);
      return err.message ? 1 : 0;
    }
    throw err;
  }
  try {
    const result = exportPairs(spec, (msg) => console.log(msg));
    console.log(
      `wrote ${spec.out}: ${result.count} rows, dim ${result.dim}, ` +
        `${result.truncatedPairs} truncated, ${result.bytesWritten} bytes`
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
