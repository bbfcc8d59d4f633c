"""WOOD score: similarity-weighted signed accuracy.

W = sum(E_i * w_i) / sum(w_i) where E_i is the per-sample evaluation value
(+1 correct / -1 incorrect by default) and w_i the sample weight.  The
default ``chunk-integer`` scheme weights chunk c of C chunks as C - c + 1,
so the hardest chunk (chunk 1) counts most; the ``p-raw`` scheme uses the
continuous raw OOD degree instead.  Errors on hard samples therefore pull
the score down harder than plain accuracy does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import PredictionRecord
from .errors import ValidationError
from .scoring import SampleScore


@dataclass(frozen=True)
class EvalConfig:
    """Per-sample evaluation values and the weighting scheme."""

    reward_correct: float = 1.0
    penalty_incorrect: float = -1.0
    weight_scheme: str = "chunk-integer"

    def __post_init__(self):
        if not self.reward_correct > self.penalty_incorrect:
            raise ValidationError(
                f"reward_correct ({self.reward_correct}) must exceed "
                f"penalty_incorrect ({self.penalty_incorrect})"
            )
        if self.weight_scheme not in ("chunk-integer", "p-raw"):
            raise ValidationError(f"unknown weight scheme {self.weight_scheme!r}")


@dataclass(frozen=True)
class ChunkStats:
    """Per-chunk aggregates; confidence means are present only when every
    member of the relevant correctness class carries a confidence value."""

    chunk_index: int
    size: int
    weight: int
    mean_sts: float | None
    n_correct: int
    error_rate: float | None
    mean_conf_correct: float | None = None
    mean_conf_incorrect: float | None = None


@dataclass(frozen=True)
class WeightSummary:
    scheme: str
    chunk_count: int
    chunk_weights: tuple[int, ...]


@dataclass(frozen=True)
class WoodResult:
    model_name: str
    W: float
    W_rescaled: float
    accuracy: float
    weights_used: WeightSummary
    per_chunk: tuple[ChunkStats, ...]


def chunk_weight(chunk_index: int, chunk_count: int) -> int:
    """Integer weight of a chunk: chunk_count - chunk_index + 1 (hardest largest)."""
    if chunk_count < 1:
        raise ValidationError(f"chunk_count must be >= 1, got {chunk_count}")
    if not (1 <= chunk_index <= chunk_count):
        raise ValidationError(
            f"chunk index {chunk_index} outside [1, {chunk_count}]"
        )
    return chunk_count - chunk_index + 1


def _match_predictions(
    scores: list[SampleScore], predictions: list[PredictionRecord]
) -> dict[str, PredictionRecord]:
    by_id = {}
    for pred in predictions:
        if pred.id in by_id:
            raise ValidationError(f"duplicate prediction for '{pred.id}'")
        by_id[pred.id] = pred
    score_ids = {s.id for s in scores}
    if len(score_ids) != len(scores):
        raise ValidationError("duplicate score ids")
    missing = score_ids - set(by_id)
    extra = set(by_id) - score_ids
    if missing or extra:
        detail = []
        if missing:
            detail.append(f"missing prediction for '{sorted(missing)[0]}'")
        if extra:
            detail.append(f"prediction for unscored id '{sorted(extra)[0]}'")
        raise ValidationError("; ".join(detail))
    return by_id


def per_chunk_stats(
    scores: list[SampleScore], predictions: list[PredictionRecord]
) -> tuple[ChunkStats, ...]:
    """Aggregate correctness and confidence per assigned chunk, hardest first."""
    by_id = _match_predictions(scores, predictions)
    if any(s.chunk_index is None for s in scores):
        raise ValidationError("scores have no chunk assignment")
    chunk_count = max(s.chunk_index for s in scores)
    members: dict[int, list[SampleScore]] = {i: [] for i in range(1, chunk_count + 1)}
    for s in scores:
        members[s.chunk_index].append(s)
    stats = []
    for index in range(1, chunk_count + 1):
        group = members[index]
        size = len(group)
        weight = chunk_weight(index, chunk_count)
        if size == 0:
            stats.append(
                ChunkStats(index, 0, weight, None, 0, None)
            )
            continue
        n_correct = sum(1 for s in group if by_id[s.id].correct)
        mean_sts = math.fsum(s.mean_topb for s in group) / size
        error_rate = (size - n_correct) / size
        conf_correct = [by_id[s.id].confidence for s in group if by_id[s.id].correct]
        conf_incorrect = [by_id[s.id].confidence for s in group if not by_id[s.id].correct]
        stats.append(
            ChunkStats(
                chunk_index=index,
                size=size,
                weight=weight,
                mean_sts=mean_sts,
                n_correct=n_correct,
                error_rate=error_rate,
                mean_conf_correct=_full_mean(conf_correct),
                mean_conf_incorrect=_full_mean(conf_incorrect),
            )
        )
    return tuple(stats)


def _full_mean(values: list[float | None]) -> float | None:
    if not values or any(v is None for v in values):
        return None
    return math.fsum(values) / len(values)


def wood_score(
    scores: list[SampleScore],
    predictions: list[PredictionRecord],
    eval_cfg: EvalConfig | None = None,
    model_name: str = "model",
) -> WoodResult:
    """Evaluate one model's predictions over scored, chunked test samples.

    Predictions must cover the scored ids exactly.  The ``p-raw`` scheme
    requires p_raw on every sample.
    """
    eval_cfg = eval_cfg or EvalConfig()
    by_id = _match_predictions(scores, predictions)
    if any(s.chunk_index is None for s in scores):
        raise ValidationError("scores have no chunk assignment")
    chunk_count = max(s.chunk_index for s in scores)

    if eval_cfg.weight_scheme == "chunk-integer":
        weights = [float(chunk_weight(s.chunk_index, chunk_count)) for s in scores]
        chunk_weights = tuple(chunk_weight(i, chunk_count) for i in range(1, chunk_count + 1))
    else:
        absent = [s.id for s in scores if s.p_raw is None]
        if absent:
            raise ValidationError(
                f"p-raw weighting needs p_raw on every sample; absent for '{absent[0]}'"
            )
        weights = [s.p_raw for s in scores]
        chunk_weights = ()

    values = [
        eval_cfg.reward_correct if by_id[s.id].correct else eval_cfg.penalty_incorrect
        for s in scores
    ]
    numerator = math.fsum(v * w for v, w in zip(values, weights))
    denominator = math.fsum(weights)
    w = numerator / denominator
    rescaled = (w - eval_cfg.penalty_incorrect) / (
        eval_cfg.reward_correct - eval_cfg.penalty_incorrect
    )
    return WoodResult(
        model_name=model_name,
        W=w,
        W_rescaled=rescaled,
        accuracy=accuracy(predictions),
        weights_used=WeightSummary(eval_cfg.weight_scheme, chunk_count, chunk_weights),
        per_chunk=per_chunk_stats(scores, predictions),
    )


def accuracy(predictions: list[PredictionRecord]) -> float:
    """Plain fraction of correct predictions."""
    if not predictions:
        raise ValidationError("no predictions")
    return sum(1 for p in predictions if p.correct) / len(predictions)


@dataclass(frozen=True)
class RankingComparison:
    """How model orderings differ between plain accuracy and WOOD."""

    by_accuracy: tuple[str, ...]
    by_wood: tuple[str, ...]
    rank_changes: int
    kendall_tau_distance: int


def compare_rankings(results: list[WoodResult]) -> RankingComparison:
    """Orderings by accuracy and by W (ties broken by model name), with the
    count of models whose position changed and the Kendall-tau distance."""
    if len(results) < 2:
        raise ValidationError("need at least 2 results to compare rankings")
    names = [r.model_name for r in results]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate model names")
    by_acc = tuple(r.model_name for r in sorted(results, key=lambda r: (-r.accuracy, r.model_name)))
    by_w = tuple(r.model_name for r in sorted(results, key=lambda r: (-r.W, r.model_name)))
    pos_acc = {name: i for i, name in enumerate(by_acc)}
    pos_w = {name: i for i, name in enumerate(by_w)}
    changes = sum(1 for name in names if pos_acc[name] != pos_w[name])
    distance = 0
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            if (pos_acc[a] - pos_acc[b]) * (pos_w[a] - pos_w[b]) < 0:
                distance += 1
    return RankingComparison(by_acc, by_w, changes, distance)


def _fmt(x: float) -> str:
    return format(x, ".10g")


def format_wood_report(
    results: list[WoodResult],
    comparison: RankingComparison | None = None,
    manifest_digest: str | None = None,
) -> str:
    """Human-readable, byte-deterministic WOOD report."""
    lines = []
    if manifest_digest:
        lines.append(f"# manifest {manifest_digest}")
    for r in results:
        lines.append(f"model: {r.model_name}")
        lines.append(f"weight_scheme: {r.weights_used.scheme}")
        lines.append(f"chunk_count: {r.weights_used.chunk_count}")
        lines.append(f"W: {_fmt(r.W)}")
        lines.append(f"W_rescaled: {_fmt(r.W_rescaled)}")
        lines.append(f"accuracy: {_fmt(r.accuracy)}")
        lines.append("chunk,size,weight,n_correct,rate")
        for c in r.per_chunk:
            rate = _fmt(c.n_correct / c.size) if c.size else ""
            lines.append(f"{c.chunk_index},{c.size},{c.weight},{c.n_correct},{rate}")
        lines.append("")
    if comparison is not None:
        lines.append("ranking_by_accuracy: " + " ".join(comparison.by_accuracy))
        lines.append("ranking_by_wood: " + " ".join(comparison.by_wood))
        lines.append(f"rank_changes: {comparison.rank_changes}")
        lines.append(f"kendall_tau_distance: {comparison.kendall_tau_distance}")
        lines.append("")
    return "\n".join(lines)
