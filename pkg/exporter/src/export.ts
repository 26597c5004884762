/**
 * Turns a corpus + pair TSV into a labeled embedding container: each pair
 * becomes one sequence (question texts are "title body", joined with the
 * model separator), encoded by the checkpoint, represented by the
 * final-layer first-token vector, written in pair-file order.
 */

import { writeFileSync } from 'node:fs';

import { writeDqde } from './dqde.js';
import { Encoder } from './model.js';
import { readCorpusTsv, readPairsTsv } from './tsv.js';

export interface ExportSpec {
  checkpoint: string;
  corpus: string;
  pairs: string;
  out: string;
  maxSeqLen?: number;
  batchSize: number;
  device: 'cpu';
}

export interface ExportResult {
  count: number;
  dim: number;
  truncatedPairs: number;
  bytesWritten: number;
}

export function exportPairs(spec: ExportSpec, log: (msg: string) => void = () => {}): ExportResult {
  if (spec.device !== 'cpu') {
    throw new Error(`unsupported device ${spec.device as string}; only cpu`);
  }
  const encoder = new Encoder(spec.checkpoint);
  const modelLimit = encoder.config.max_position_embeddings;
  const maxLen = spec.maxSeqLen === undefined ? modelLimit : spec.maxSeqLen;
  if (maxLen < 5 || maxLen > modelLimit) {
    throw new Error(`max sequence length must be in [5, ${modelLimit}], got ${maxLen}`);
  }

  const corpus = readCorpusTsv(spec.corpus);
  const pairs = readPairsTsv(spec.pairs);
  const textOf = (id: string, where: number): string => {
    const q = corpus.get(id);
    if (!q) throw new Error(`${spec.pairs}:${where}: question id ${id} not in corpus`);
    return q.body ? `${q.title} ${q.body}` : q.title;
  };

  const dim = encoder.hiddenSize;
  const vectors = new Float32Array(pairs.length * dim);
  const labels = new Uint8Array(pairs.length);
  let truncatedPairs = 0;

  pairs.forEach((pair, row) => {
    const enc = encoder.tokenizer.encodePair(
      textOf(pair.id1, row + 1),
      textOf(pair.id2, row + 1),
      maxLen
    );
    if (enc.truncated) truncatedPairs += 1;
    const cls = encoder.firstTokenVector(enc.ids, enc.typeIds);
    vectors.set(Float32Array.from(cls), row * dim);
    labels[row] = pair.label;
    if ((row + 1) % spec.batchSize === 0 || row + 1 === pairs.length) {
      log(`encoded ${row + 1}/${pairs.length}`);
    }
  });

  const bytesWritten = writeDqde(spec.out, { dim, count: pairs.length, vectors, labels });
  const manifest = {
    tool: 'dqde-export',
    checkpoint: spec.checkpoint,
    corpus: spec.corpus,
    pairs: spec.pairs,
    count: pairs.length,
    dim,
    max_seq_len: maxLen,
    truncated_pairs: truncatedPairs,
  };
  writeFileSync(`${spec.out}.manifest.json`, JSON.stringify(manifest, null, 2) + '\n');
  return { count: pairs.length, dim, truncatedPairs, bytesWritten };
}
