#!/usr/bin/env python3
"""Classifier worker: seven-label emotion classification over a line protocol.

Reads one JSON object per line from stdin ({"text": ...}) and writes one JSON
object per line to stdout ({"labels": {label: prob, ...}}). Loads a
transformers sequence-classification model from --model-dir (for example the
published DistilRoBERTa emotion classifier).
"""

import argparse
import json
import sys

LABELS = ["anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral"]


def load_pipeline(model_dir: str):
    from transformers import (  # deferred: torch import is slow
        AutoModelForSequenceClassification,
        AutoTokenizer,
    )
    import torch

    tokenizer = AutoTokenizer.from_pretrained(model_dir)
    model = AutoModelForSequenceClassification.from_pretrained(model_dir)
    model.eval()

    id2label = {i: label.lower() for i, label in model.config.id2label.items()}
    unknown = set(id2label.values()) - set(LABELS)
    if unknown:
        raise ValueError(f"model emits labels outside the expected set: {sorted(unknown)}")

    def classify(text: str) -> dict:
        inputs = tokenizer(text, return_tensors="pt", truncation=True, max_length=512)
        with torch.no_grad():
            logits = model(**inputs).logits[0]
        probs = torch.softmax(logits, dim=-1).tolist()
        labels = {label: 0.0 for label in LABELS}
        for i, p in enumerate(probs):
            labels[id2label[i]] = p
        return labels

    return classify


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model-dir", required=True)
    args = parser.parse_args()

    try:
        classify = load_pipeline(args.model_dir)
    except Exception as exc:  # startup failure is reported per request
        classify = None
        startup_error = str(exc)

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            if classify is None:
                raise RuntimeError(f"classifier failed to load: {startup_error}")
            request = json.loads(line)
            labels = classify(request["text"])
            print(json.dumps({"labels": labels}), flush=True)
        except Exception as exc:
            print(json.dumps({"error": str(exc)}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
