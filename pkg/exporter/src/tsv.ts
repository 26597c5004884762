/** Readers for the normalized corpus and pair TSVs. */

import { readFileSync } from 'node:fs';

export interface Question {
  id: string;
  title: string;
  body: string;
}

export interface Pair {
  id1: string;
  id2: string;
  label: 0 | 1;
}

export function readCorpusTsv(path: string): Map<string, Question> {
  const questions = new Map<string, Question>();
  const lines = readFileSync(path, 'utf8').split('\n');
  lines.forEach((line, index) => {
    if (line.trim() === '') return;
    const parts = line.split('\t');
    if (parts.length < 2) {
      throw new Error(`${path}:${index + 1}: expected id<TAB>title[<TAB>body]`);
    }
    const id = parts[0];
    if (questions.has(id)) throw new Error(`${path}:${index + 1}: duplicate question id ${id}`);
    questions.set(id, { id, title: parts[1], body: parts.slice(2).join(' ') });
  });
  return questions;
}

export function readPairsTsv(path: string): Pair[] {
  const pairs: Pair[] = [];
  const lines = readFileSync(path, 'utf8').split('\n');
  lines.forEach((line, index) => {
    if (line.trim() === '') return;
    const parts = line.split('\t');
    if (parts.length !== 3 || (parts[2] !== '0' && parts[2] !== '1')) {
      throw new Error(`${path}:${index + 1}: expected id1<TAB>id2<TAB>label(0|1)`);
    }
    pairs.push({ id1: parts[0], id2: parts[1], label: parts[2] === '1' ? 1 : 0 });
  });
  return pairs;
}
