/**
 * WordPiece tokenizer compatible with the standard vocab.txt layout:
 * whitespace and punctuation splitting, then greedy longest-match
 * subwords with the "##" continuation prefix.
 */

import { readFileSync } from 'node:fs';

const MAX_WORD_CHARS = 100;
const PUNCT = /\p{P}/u;

function isPunctuation(ch: string): boolean {
  const cp = ch.codePointAt(0)!;
  if (
    (cp >= 33 && cp <= 47) ||
    (cp >= 58 && cp <= 64) ||
    (cp >= 91 && cp <= 96) ||
    (cp >= 123 && cp <= 126)
  ) {
    return true;
  }
  return PUNCT.test(ch);
}

function cleanText(text: string): string {
  let out = '';
  for (const ch of text) {
    const cp = ch.codePointAt(0)!;
    if (cp === 0 || cp === 0xfffd || (cp < 32 && ch !== '\t' && ch !== '\n' && ch !== '\r')) {
      continue;
    }
    out += /\s/.test(ch) ? ' ' : ch;
  }
  return out;
}

export class WordPieceTokenizer {
  private readonly vocab: Map<string, number>;
  readonly clsId: number;
  readonly sepId: number;
  readonly unkId: number;
  readonly doLowerCase: boolean;

  constructor(vocab: string[], doLowerCase = false) {
    this.vocab = new Map(vocab.map((token, id) => [token, id]));
    this.doLowerCase = doLowerCase;
    const need = (token: string): number => {
      const id = this.vocab.get(token);
      if (id === undefined) throw new Error(`vocab is missing the ${token} token`);
      return id;
    };
    this.clsId = need('[CLS]');
    this.sepId = need('[SEP]');
    this.unkId = need('[UNK]');
  }

  static fromCheckpoint(dir: string, doLowerCase: boolean): WordPieceTokenizer {
    const vocab = readFileSync(`${dir}/vocab.txt`, 'utf8')
      .split('\n')
      .filter((line) => line.length > 0);
    return new WordPieceTokenizer(vocab, doLowerCase);
  }

  /** Whitespace words with punctuation split out as single-char tokens. */
  basicTokenize(text: string): string[] {
    let cleaned = cleanText(text);
    if (this.doLowerCase) cleaned = cleaned.toLowerCase();
    const words = cleaned.split(' ').filter((w) => w.length > 0);
    const out: string[] = [];
    for (const word of words) {
      let current = '';
      for (const ch of word) {
        if (isPunctuation(ch)) {
          if (current) out.push(current);
          out.push(ch);
          current = '';
        } else {
          current += ch;
        }
      }
      if (current) out.push(current);
    }
    return out;
  }

  /** Greedy longest-match subword ids for one basic token. */
  wordPiece(token: string): number[] {
    if ([...token].length > MAX_WORD_CHARS) return [this.unkId];
    const ids: number[] = [];
    let start = 0;
    while (start < token.length) {
      let end = token.length;
      let found = -1;
      while (end > start) {
        const piece = (start > 0 ? '##' : '') + token.slice(start, end);
        const id = this.vocab.get(piece);
        if (id !== undefined) {
          found = id;
          break;
        }
        end -= 1;
      }
      if (found < 0) return [this.unkId];
      ids.push(found);
      start = end;
    }
    return ids;
  }

  tokenToIds(text: string): number[] {
    const ids: number[] = [];
    for (const word of this.basicTokenize(text)) {
      ids.push(...this.wordPiece(word));
    }
    return ids;
  }

  /**
   * Encode a question pair as one sequence:
   * [CLS] a... [SEP] b... [SEP] with segment ids 0 / 1.
   * Over-budget pairs lose tokens from the end of the longer question
   * first (the tail of its body), alternating once the lengths match.
   */
  encodePair(
    textA: string,
    textB: string,
    maxLen: number
  ): { ids: number[]; typeIds: number[]; truncated: boolean } {
    const a = this.tokenToIds(textA);
    const b = this.tokenToIds(textB);
    const budget = maxLen - 3;
    if (budget < 2) throw new Error(`max sequence length ${maxLen} leaves no room for the pair`);
    let truncated = false;
    while (a.length + b.length > budget) {
      truncated = true;
      if (a.length > b.length) a.pop();
      else b.pop();
    }
    const ids = [this.clsId, ...a, this.sepId, ...b, this.sepId];
    const typeIds = new Array(a.length + 2).fill(0).concat(new Array(b.length + 1).fill(1));
    return { ids, typeIds, truncated };
  }
}
