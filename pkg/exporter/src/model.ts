/**
 * Self-contained forward pass of a BERT-architecture encoder, checkpoint-
 * compatible with the standard directory layout (config.json + vocab.txt +
 * model.safetensors, tensor names with or without a "bert." prefix).
 *
 * Inference only, one sequence at a time, accumulating in float64.  The
 * pair representation downstream is the final-layer hidden state of the
 * first token; the pooler head, if present in the checkpoint, is ignored.
 */

import { readFileSync, existsSync } from 'node:fs';
import { join } from 'node:path';

import { readSafetensors, Tensor } from './safetensors.js';
import { WordPieceTokenizer } from './tokenizer.js';

export interface EncoderConfig {
  vocab_size: number;
  hidden_size: number;
  num_hidden_layers: number;
  num_attention_heads: number;
  intermediate_size: number;
  max_position_embeddings: number;
  type_vocab_size: number;
  layer_norm_eps: number;
  hidden_act: string;
}

interface Linear {
  weight: Float32Array; // [out, in], torch layout
  bias: Float32Array;
  outDim: number;
  inDim: number;
}

interface LayerNormParams {
  gamma: Float32Array;
  beta: Float32Array;
}

interface EncoderLayer {
  query: Linear;
  key: Linear;
  value: Linear;
  attnOut: Linear;
  attnNorm: LayerNormParams;
  intermediate: Linear;
  output: Linear;
  outNorm: LayerNormParams;
}

// Abramowitz & Stegun 7.1.26, |error| < 1.5e-7; ample next to f32 weights
function erf(x: number): number {
  const sign = x < 0 ? -1 : 1;
  const ax = Math.abs(x);
  const t = 1 / (1 + 0.3275911 * ax);
  const y =
    1 -
    ((((1.061405429 * t - 1.453152027) * t + 1.421413741) * t - 0.284496736) * t + 0.254829592) *
      t *
      Math.exp(-ax * ax);
  return sign * y;
}

function gelu(x: number): number {
  return 0.5 * x * (1 + erf(x / Math.SQRT2));
}

/** y = x W^T + b for a row-major [rows, inDim] input. */
function applyLinear(x: Float64Array, rows: number, lin: Linear): Float64Array {
  const { weight, bias, outDim, inDim } = lin;
  const y = new Float64Array(rows * outDim);
  for (let r = 0; r < rows; r++) {
    const xOff = r * inDim;
    const yOff = r * outDim;
    for (let o = 0; o < outDim; o++) {
      let acc = bias[o];
      const wOff = o * inDim;
      for (let c = 0; c < inDim; c++) {
        acc += x[xOff + c] * weight[wOff + c];
      }
      y[yOff + o] = acc;
    }
  }
  return y;
}

function layerNorm(x: Float64Array, rows: number, dim: number, p: LayerNormParams, eps: number): void {
  for (let r = 0; r < rows; r++) {
    const off = r * dim;
    let mean = 0;
    for (let c = 0; c < dim; c++) mean += x[off + c];
    mean /= dim;
    let variance = 0;
    for (let c = 0; c < dim; c++) {
      const d = x[off + c] - mean;
      variance += d * d;
    }
    variance /= dim;
    const inv = 1 / Math.sqrt(variance + eps);
    for (let c = 0; c < dim; c++) {
      x[off + c] = (x[off + c] - mean) * inv * p.gamma[c] + p.beta[c];
    }
  }
}

function addInPlace(x: Float64Array, y: Float64Array): void {
  for (let i = 0; i < x.length; i++) x[i] += y[i];
}

export class Encoder {
  readonly config: EncoderConfig;
  readonly tokenizer: WordPieceTokenizer;
  private readonly wordEmb: Tensor;
  private readonly posEmb: Tensor;
  private readonly typeEmb: Tensor;
  private readonly embNorm: LayerNormParams;
  private readonly layers: EncoderLayer[];

  constructor(checkpointDir: string) {
    const configPath = join(checkpointDir, 'config.json');
    if (!existsSync(configPath)) {
      throw new Error(`checkpoint not found: no config.json under ${checkpointDir}`);
    }
    this.config = JSON.parse(readFileSync(configPath, 'utf8')) as EncoderConfig;
    if (this.config.hidden_size % this.config.num_attention_heads !== 0) {
      throw new Error('hidden_size must be divisible by num_attention_heads');
    }
    if (this.config.hidden_act !== 'gelu') {
      throw new Error(`unsupported hidden_act ${this.config.hidden_act}; only gelu`);
    }

    let doLowerCase = false;
    const tokConfigPath = join(checkpointDir, 'tokenizer_config.json');
    if (existsSync(tokConfigPath)) {
      const tokConfig = JSON.parse(readFileSync(tokConfigPath, 'utf8'));
      doLowerCase = Boolean(tokConfig.do_lower_case);
    }
    this.tokenizer = WordPieceTokenizer.fromCheckpoint(checkpointDir, doLowerCase);

    const raw = readSafetensors(join(checkpointDir, 'model.safetensors'));
    const tensors = new Map<string, Tensor>();
    for (const [name, tensor] of raw) {
      tensors.set(name.startsWith('bert.') ? name.slice(5) : name, tensor);
    }
    const get = (name: string): Tensor => {
      const t = tensors.get(name);
      if (!t) throw new Error(`checkpoint is missing tensor ${name}`);
      return t;
    };
    const linear = (prefix: string): Linear => {
      const w = get(`${prefix}.weight`);
      const b = get(`${prefix}.bias`);
      return { weight: w.data, bias: b.data, outDim: w.shape[0], inDim: w.shape[1] };
    };
    const norm = (prefix: string): LayerNormParams => ({
      gamma: get(`${prefix}.weight`).data,
      beta: get(`${prefix}.bias`).data,
    });

    this.wordEmb = get('embeddings.word_embeddings.weight');
    this.posEmb = get('embeddings.position_embeddings.weight');
    this.typeEmb = get('embeddings.token_type_embeddings.weight');
    this.embNorm = norm('embeddings.LayerNorm');
    this.layers = [];
    for (let i = 0; i < this.config.num_hidden_layers; i++) {
      const p = `encoder.layer.${i}`;
      this.layers.push({
        query: linear(`${p}.attention.self.query`),
        key: linear(`${p}.attention.self.key`),
        value: linear(`${p}.attention.self.value`),
        attnOut: linear(`${p}.attention.output.dense`),
        attnNorm: norm(`${p}.attention.output.LayerNorm`),
        intermediate: linear(`${p}.intermediate.dense`),
        output: linear(`${p}.output.dense`),
        outNorm: norm(`${p}.output.LayerNorm`),
      });
    }
  }

  get hiddenSize(): number {
    return this.config.hidden_size;
  }

  /** Final-layer hidden state of the first token for one token sequence. */
  firstTokenVector(ids: number[], typeIds: number[]): Float64Array {
    const L = ids.length;
    const H = this.config.hidden_size;
    const eps = this.config.layer_norm_eps;
    if (L > this.config.max_position_embeddings) {
      throw new Error(`sequence length ${L} exceeds model limit`);
    }

    const hidden = new Float64Array(L * H);
    for (let t = 0; t < L; t++) {
      const word = ids[t] * H;
      const pos = t * H;
      const type = typeIds[t] * H;
      for (let c = 0; c < H; c++) {
        hidden[t * H + c] =
          this.wordEmb.data[word + c] + this.posEmb.data[pos + c] + this.typeEmb.data[type + c];
      }
    }
    layerNorm(hidden, L, H, this.embNorm, eps);

    const heads = this.config.num_attention_heads;
    const headDim = H / heads;
    const scale = 1 / Math.sqrt(headDim);

    for (const layer of this.layers) {
      const q = applyLinear(hidden, L, layer.query);
      const k = applyLinear(hidden, L, layer.key);
      const v = applyLinear(hidden, L, layer.value);

      const context = new Float64Array(L * H);
      const scores = new Float64Array(L);
      for (let h = 0; h < heads; h++) {
        const off = h * headDim;
        for (let i = 0; i < L; i++) {
          let max = -Infinity;
          for (let j = 0; j < L; j++) {
            let dot = 0;
            for (let c = 0; c < headDim; c++) {
              dot += q[i * H + off + c] * k[j * H + off + c];
            }
            scores[j] = dot * scale;
            if (scores[j] > max) max = scores[j];
          }
          let denom = 0;
          for (let j = 0; j < L; j++) {
            scores[j] = Math.exp(scores[j] - max);
            denom += scores[j];
          }
          for (let j = 0; j < L; j++) {
            const p = scores[j] / denom;
            for (let c = 0; c < headDim; c++) {
              context[i * H + off + c] += p * v[j * H + off + c];
            }
          }
        }
      }

      const attnOut = applyLinear(context, L, layer.attnOut);
      addInPlace(hidden, attnOut);
      layerNorm(hidden, L, H, layer.attnNorm, eps);

      const inter = applyLinear(hidden, L, layer.intermediate);
      for (let i = 0; i < inter.length; i++) inter[i] = gelu(inter[i]);
      const ffnOut = applyLinear(inter, L, layer.output);
      addInPlace(hidden, ffnOut);
      layerNorm(hidden, L, H, layer.outNorm, eps);
    }

    return hidden.slice(0, H);
  }
}
