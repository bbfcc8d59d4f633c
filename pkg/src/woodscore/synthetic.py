"""Synthetic score/prediction generators for tests and demos.

Correctness follows Bernoulli(logistic(alpha * s)) where s is the sample's
mean top-b similarity, so easier (higher-similarity) samples are more
likely to be answered correctly. With alpha > 0 this reproduces the
falling chunk error curve that real classifiers show.
"""

from __future__ import annotations

import math

import numpy as np

from .corpus import PredictionRecord
from .scoring import SampleScore, normalize_hardness, rank_and_chunk


def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def synthetic_scores(
    n: int,
    rng: np.random.Generator,
    chunk_count: int = 7,
    id_prefix: str = "s",
) -> list[SampleScore]:
    """n samples with mean_topb drawn uniformly from (0, 1), ranked,
    chunked, and minmax-normalized."""
    means = rng.random(n)
    scores = [
        SampleScore(
            id=f"{id_prefix}{i:05d}",
            mean_topb=float(means[i]),
            sum_topb=float(means[i]),
            p_raw=1.0 / float(means[i]) if means[i] > 0 else None,
        )
        for i in range(n)
    ]
    return normalize_hardness(rank_and_chunk(scores, chunk_count))


def bernoulli_predictions(
    scores: list[SampleScore],
    alpha: float,
    rng: np.random.Generator,
    with_confidence: bool = False,
) -> list[PredictionRecord]:
    """Correctness ~ Bernoulli(logistic(alpha * mean_topb)) per sample.

    With confidence enabled, confidence = logistic(alpha * mean_topb) plus
    small uniform noise, clipped to [0, 1] — a crude MaxProb stand-in that
    rises with similarity.
    """
    records = []
    for s in scores:
        p = logistic(alpha * s.mean_topb)
        correct = bool(rng.random() < p)
        confidence = None
        if with_confidence:
            confidence = float(np.clip(p + rng.uniform(-0.05, 0.05), 0.0, 1.0))
        records.append(PredictionRecord(id=s.id, correct=correct, confidence=confidence))
    return records
