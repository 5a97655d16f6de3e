#!/usr/bin/env python3
"""Deterministic stand-in for the transformer classifier worker.

Speaks the same line protocol: {"text": ...} in, {"labels": {...}} out.
Scores 0.9 for the first emotion whose cue word occurs in the text, spreading
the rest uniformly; texts without cues are neutral.
"""

import json
import sys

LABELS = ["anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral"]
CUES = {
    "anger": "furious",
    "disgust": "revolting",
    "fear": "terrified",
    "joy": "delighted",
    "sadness": "mournful",
    "surprise": "astonished",
}


def classify(text: str) -> dict:
    lowered = text.lower()
    hit = next((label for label, cue in CUES.items() if cue in lowered), "neutral")
    labels = {label: 0.1 / 6 for label in LABELS}
    labels[hit] = 0.9
    total = sum(labels.values())
    return {label: p / total for label, p in labels.items()}


for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    try:
        request = json.loads(line)
        print(json.dumps({"labels": classify(request["text"])}), flush=True)
    except Exception as exc:
        print(json.dumps({"error": str(exc)}), flush=True)
