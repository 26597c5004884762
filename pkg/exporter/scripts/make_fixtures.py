#!/usr/bin/env python3
"""Generate the exporter's test checkpoints and reference outputs.

Creates two random-weight BERT-architecture checkpoints in the HuggingFace
directory layout (config.json + vocab.txt + model.safetensors):

* ``tiny-bert``  - hidden 32, 2 layers; committed, small enough for git.
* ``base-width`` - hidden 768, 1 layer; regenerated on demand (~10 MB).

For tiny-bert it also freezes reference token ids and final-layer
first-token vectors computed with torch/transformers into
``expected_cls.json``; the TypeScript encoder is asserted against those.

Usage: python3 scripts/make_fixtures.py [--base-width]
"""

import argparse
import json
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "how", "do", "i", "install", "ubuntu", "on", "a", "laptop",
    "boot", "fails", "after", "update", "the", "wifi", "drops",
    "suspend", "grub", "error", "screen", "is", "black", "my",
    "can", "not", "what", "to", "fix", "usb", "stick", "live",
    "##ing", "##s", "##ed", "##er", "partition", "disk", "space",
    "windows", "dual", ",", ".", "?", "!", "-",
]

TOY_QUESTIONS = [
    ("q1", "how do i install ubuntu", "boot fails after update"),
    ("q2", "installing ubuntu on a laptop", "the live usb stick fails"),
    ("q3", "wifi drops after suspend", "what to fix"),
    ("q4", "grub error on boot", "screen is black"),
]
TOY_PAIRS = [("q1", "q2", 1), ("q1", "q3", 0), ("q4", "q3", 0)]


def bert_config(hidden, layers, heads, intermediate, max_pos=64):
    return {
        "model_type": "bert",
        "vocab_size": len(VOCAB),
        "hidden_size": hidden,
        "num_hidden_layers": layers,
        "num_attention_heads": heads,
        "intermediate_size": intermediate,
        "max_position_embeddings": max_pos,
        "type_vocab_size": 2,
        "layer_norm_eps": 1e-12,
        "hidden_act": "gelu",
        "pad_token_id": 0,
    }


def random_weights(config, seed):
    rng = np.random.default_rng(seed)
    h = config["hidden_size"]
    inter = config["intermediate_size"]

    def w(*shape, scale=0.05):
        return (scale * rng.standard_normal(shape)).astype(np.float32)

    tensors = {
        "embeddings.word_embeddings.weight": w(config["vocab_size"], h),
        "embeddings.position_embeddings.weight": w(config["max_position_embeddings"], h),
        "embeddings.token_type_embeddings.weight": w(config["type_vocab_size"], h),
        "embeddings.LayerNorm.weight": np.ones(h, dtype=np.float32),
        "embeddings.LayerNorm.bias": w(h),
    }
    for i in range(config["num_hidden_layers"]):
        p = f"encoder.layer.{i}."
        tensors |= {
            p + "attention.self.query.weight": w(h, h),
            p + "attention.self.query.bias": w(h),
            p + "attention.self.key.weight": w(h, h),
            p + "attention.self.key.bias": w(h),
            p + "attention.self.value.weight": w(h, h),
            p + "attention.self.value.bias": w(h),
            p + "attention.output.dense.weight": w(h, h),
            p + "attention.output.dense.bias": w(h),
            p + "attention.output.LayerNorm.weight": np.ones(h, dtype=np.float32),
            p + "attention.output.LayerNorm.bias": w(h),
            p + "intermediate.dense.weight": w(inter, h),
            p + "intermediate.dense.bias": w(inter),
            p + "output.dense.weight": w(h, inter),
            p + "output.dense.bias": w(h),
            p + "output.LayerNorm.weight": np.ones(h, dtype=np.float32),
            p + "output.LayerNorm.bias": w(h),
        }
    return tensors


def write_checkpoint(name, config, seed):
    from safetensors.numpy import save_file

    out = FIXTURES / name
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(config, indent=2))
    (out / "vocab.txt").write_text("\n".join(VOCAB) + "\n")
    (out / "tokenizer_config.json").write_text(json.dumps({"do_lower_case": False}))
    save_file(random_weights(config, seed), out / "model.safetensors")
    return out


def write_toy_corpus():
    corpus = FIXTURES / "toy_corpus.tsv"
    corpus.write_text("".join(f"{q}\t{t}\t{b}\n" for q, t, b in TOY_QUESTIONS))
    pairs = FIXTURES / "toy_pairs.tsv"
    pairs.write_text("".join(f"{a}\t{b}\t{l}\n" for a, b, l in TOY_PAIRS))


def freeze_reference(checkpoint_dir):
    import torch
    from transformers import BertModel, BertTokenizer

    tokenizer = BertTokenizer.from_pretrained(checkpoint_dir)
    model = BertModel.from_pretrained(checkpoint_dir)
    model.eval()

    texts = {q: f"{t} {b}" for q, t, b in TOY_QUESTIONS}
    cases = []
    for a, b, label in TOY_PAIRS:
        enc = tokenizer(texts[a], texts[b], return_tensors="pt")
        with torch.no_grad():
            hidden = model(**enc).last_hidden_state
        cases.append(
            {
                "pair": [a, b],
                "label": label,
                "token_ids": enc["input_ids"][0].tolist(),
                "token_type_ids": enc["token_type_ids"][0].tolist(),
                "cls": hidden[0, 0].tolist(),
            }
        )
    (FIXTURES / "expected_cls.json").write_text(json.dumps(cases, indent=2))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--base-width", action="store_true",
                        help="also generate the 768-wide checkpoint (~10 MB, not committed)")
    args = parser.parse_args()

    write_toy_corpus()
    tiny = write_checkpoint("tiny-bert", bert_config(32, 2, 2, 64), seed=11)
    freeze_reference(tiny)
    print(f"wrote {tiny}")
    if args.base_width:
        base = write_checkpoint("base-width", bert_config(768, 1, 12, 128), seed=13)
        print(f"wrote {base}")


if __name__ == "__main__":
    main()
