"""Diagnostic analyses over scored test sets.

Chunk error and confidence curves, monotonicity of per-chunk statistics,
STS histogram bins that double as graded testbeds, separation of an IID
from an OOD test set, annotation budgeting, and the similarity/confidence
correlation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from scipy.stats import spearmanr

from .corpus import Corpus, PredictionRecord, format_corpus_record
from .errors import ValidationError
from .scoring import SampleScore, rank_and_chunk
from .wood import ChunkStats, per_chunk_stats

MONOTONICITY_FIELDS = ("error_rate", "mean_sts", "mean_conf_correct")

CHUNK_CSV_HEADER = (
    "chunk",
    "size",
    "mean_sts",
    "error_rate",
    "mean_conf_correct",
    "mean_conf_incorrect",
)


def chunk_error_curve(
    scores: list[SampleScore],
    predictions: list[PredictionRecord],
    chunk_count: int = 7,
) -> tuple[ChunkStats, ...]:
    """Per-chunk error rates, hardest chunk first.

    Samples are re-chunked with the given chunk_count using the same
    ranking rules as scoring, so curves at 7 chunks can be drawn from
    scores originally chunked at 3.
    """
    rechunked = rank_and_chunk(scores, chunk_count)
    return per_chunk_stats(rechunked, predictions)


def confidence_curve(
    scores: list[SampleScore],
    predictions: list[PredictionRecord],
    chunk_count: int = 7,
) -> tuple[ChunkStats, ...]:
    """Per-chunk mean confidence split by correctness.

    Chunks lacking members of a correctness class, or whose members lack
    confidence values, leave the corresponding mean absent.
    """
    if all(p.confidence is None for p in predictions):
        raise ValidationError("no confidence data in predictions")
    return chunk_error_curve(scores, predictions, chunk_count)


def monotonicity(stats: list[ChunkStats], field: str = "error_rate") -> float:
    """Spearman correlation between chunk index (1 = hardest) and a per-chunk
    field, with mid-rank tie handling; constant fields give 0 by convention."""
    if field not in MONOTONICITY_FIELDS:
        raise ValidationError(f"unknown monotonicity field {field!r}")
    pairs = [
        (s.chunk_index, getattr(s, field))
        for s in stats
        if getattr(s, field) is not None
    ]
    if len(pairs) < 3:
        raise ValidationError(
            f"need >= 3 chunks with {field} present, got {len(pairs)}"
        )
    values = [v for _, v in pairs]
    if min(values) == max(values):
        return 0.0
    rho = spearmanr([i for i, _ in pairs], values).statistic
    if math.isnan(rho):
        return 0.0
    return float(rho)


@dataclass(frozen=True)
class TestbedBin:
    """One difficulty bin: B1 = easiest (highest similarity)."""

    label: str
    lower_edge: float
    upper_edge: float
    sample_ids: tuple[str, ...]
    share: float


def sts_bins(
    scores: list[SampleScore],
    bin_count: int = 7,
    edges: list[float] | None = None,
) -> tuple[TestbedBin, ...]:
    """Partition samples into similarity bins B1 (highest) .. Bk (lowest).

    Default edges split [min mean_topb, max mean_topb] into bin_count
    equal-width intervals.  Intervals are right-open except the topmost,
    which is closed.  A degenerate (zero-width) range puts every sample
    in B1.  With explicit edges, values outside [first, last] are clamped
    to the nearest bin.
    """
    if not scores:
        raise ValidationError("no scores to bin")
    means = [s.mean_topb for s in scores]
    if edges is not None:
        edges = [float(e) for e in edges]
        if len(edges) < 2:
            raise ValidationError("need at least 2 edges")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValidationError("edges must be strictly increasing")
        bin_count = len(edges) - 1
    else:
        if bin_count < 1:
            raise ValidationError(f"bin_count must be >= 1, got {bin_count}")
        lo, hi = min(means), max(means)
        if lo == hi:
            # degenerate range: everything is B1, lower bins stay empty
            edges = [lo - float(i) for i in range(bin_count, -1, -1)]
            edges[-1] = hi
        else:
            width = (hi - lo) / bin_count
            edges = [lo + width * i for i in range(bin_count)] + [hi]

    members: list[list[str]] = [[] for _ in range(bin_count)]
    for s in scores:
        idx = _interval_index(s.mean_topb, edges)
        members[idx].append(s.id)

    total = len(scores)
    bins = []
    for label_pos in range(bin_count):
        # B1 is the topmost interval
        interval = bin_count - 1 - label_pos
        ids = tuple(members[interval])
        bins.append(
            TestbedBin(
                label=f"B{label_pos + 1}",
                lower_edge=edges[interval],
                upper_edge=edges[interval + 1],
                sample_ids=ids,
                share=len(ids) / total,
            )
        )
    return tuple(bins)


def _interval_index(value: float, edges: list[float]) -> int:
    last = len(edges) - 2
    if value >= edges[-2]:
        # topmost interval is closed on the right; clamp above
        return last
    if value < edges[0]:
        return 0
    for i in range(last):
        if edges[i] <= value < edges[i + 1]:
            return i
    return last


@dataclass(frozen=True)
class BoundaryReport:
    """Side-by-side chunk means for an IID and an OOD test set."""

    chunk_count: int
    iid_chunk_means: tuple[float | None, ...]
    ood_chunk_means: tuple[float | None, ...]
    iid_mean: float
    ood_mean: float
    iid_exceeds_count: int
    gap: float
    boundary: float


def iid_ood_boundary(
    scores_iid: list[SampleScore],
    scores_ood: list[SampleScore],
    chunk_count: int = 7,
    config_iid: dict | None = None,
    config_ood: dict | None = None,
) -> BoundaryReport:
    """Compare per-chunk mean similarity of an IID and an OOD test set
    scored against the same train corpus, and suggest a boundary value
    (midpoint of the two overall means).

    When per-score-set config metadata is available (for example from a
    scores CSV), pass both; mismatched backend or parameters error out.
    """
    if (config_iid is None) != (config_ood is None):
        raise ValidationError("config metadata given for only one score set")
    if config_iid is not None and config_iid != config_ood:
        keys = sorted(
            k
            for k in set(config_iid) | set(config_ood)
            if config_iid.get(k) != config_ood.get(k)
        )
        raise ValidationError(
            f"score sets come from different configurations ({', '.join(keys)})"
        )
    if not scores_iid or not scores_ood:
        raise ValidationError("both score sets must be non-empty")

    iid_means = _chunk_means(scores_iid, chunk_count)
    ood_means = _chunk_means(scores_ood, chunk_count)
    iid_mean = math.fsum(s.mean_topb for s in scores_iid) / len(scores_iid)
    ood_mean = math.fsum(s.mean_topb for s in scores_ood) / len(scores_ood)
    exceeds = sum(
        1
        for a, b in zip(iid_means, ood_means)
        if a is not None and b is not None and a > b
    )
    return BoundaryReport(
        chunk_count=chunk_count,
        iid_chunk_means=iid_means,
        ood_chunk_means=ood_means,
        iid_mean=iid_mean,
        ood_mean=ood_mean,
        iid_exceeds_count=exceeds,
        gap=iid_mean - ood_mean,
        boundary=(iid_mean + ood_mean) / 2.0,
    )


def _chunk_means(scores: list[SampleScore], chunk_count: int) -> tuple[float | None, ...]:
    rechunked = rank_and_chunk(scores, chunk_count)
    groups: dict[int, list[float]] = {i: [] for i in range(1, chunk_count + 1)}
    for s in rechunked:
        groups[s.chunk_index].append(s.mean_topb)
    return tuple(
        math.fsum(groups[i]) / len(groups[i]) if groups[i] else None
        for i in range(1, chunk_count + 1)
    )


@dataclass(frozen=True)
class AnnotationPlan:
    """Which samples deserve human labels, and how many hard samples are
    missing relative to a target."""

    annotate_threshold: float
    create_threshold: float
    annotate_ids: tuple[str, ...]
    create_deficit: int


def annotation_plan(
    scores: list[SampleScore],
    annotate_threshold: float = 0.7,
    create_threshold: float = 0.5,
    target_hard_count: int | None = None,
) -> AnnotationPlan:
    """Select samples with mean_topb strictly below annotate_threshold and,
    given a target, count how many below create_threshold are missing."""
    if create_threshold > annotate_threshold:
        raise ValidationError(
            f"create_threshold ({create_threshold}) must not exceed "
            f"annotate_threshold ({annotate_threshold})"
        )
    if target_hard_count is not None and target_hard_count < 0:
        raise ValidationError("target_hard_count must be >= 0")
    annotate_ids = tuple(s.id for s in scores if s.mean_topb < annotate_threshold)
    deficit = 0
    if target_hard_count is not None:
        hard = sum(1 for s in scores if s.mean_topb < create_threshold)
        deficit = max(0, target_hard_count - hard)
    return AnnotationPlan(
        annotate_threshold=annotate_threshold,
        create_threshold=create_threshold,
        annotate_ids=annotate_ids,
        create_deficit=deficit,
    )


def sts_maxprob_correlation(
    scores: list[SampleScore], predictions: list[PredictionRecord]
) -> float:
    """Spearman correlation between mean_topb and prediction confidence over
    all test samples; constant inputs give 0 by convention."""
    by_id = {p.id: p for p in predictions}
    missing = [s.id for s in scores if s.id not in by_id]
    if missing:
        raise ValidationError(f"missing prediction for '{missing[0]}'")
    absent = [s.id for s in scores if by_id[s.id].confidence is None]
    if absent:
        raise ValidationError(f"missing confidence for '{absent[0]}'")
    if len(scores) < 2:
        raise ValidationError("need >= 2 samples to correlate")
    means = [s.mean_topb for s in scores]
    confs = [by_id[s.id].confidence for s in scores]
    if min(means) == max(means) or min(confs) == max(confs):
        return 0.0
    rho = spearmanr(means, confs).statistic
    if math.isnan(rho):
        return 0.0
    return float(rho)


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".10g")


def write_chunk_csv(
    stats: list[ChunkStats] | tuple[ChunkStats, ...],
    path: str,
    manifest_digest: str | None = None,
) -> None:
    """Flat per-chunk rows for plotting; absent fields stay empty."""
    lines = []
    if manifest_digest:
        lines.append(f"# manifest {manifest_digest}")
    lines.append(",".join(CHUNK_CSV_HEADER))
    for s in stats:
        lines.append(
            ",".join(
                [
                    str(s.chunk_index),
                    str(s.size),
                    _fmt(s.mean_sts),
                    _fmt(s.error_rate),
                    _fmt(s.mean_conf_correct),
                    _fmt(s.mean_conf_incorrect),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def format_boundary_report(
    report: BoundaryReport, manifest_digest: str | None = None
) -> str:
    lines = []
    if manifest_digest:
        lines.append(f"# manifest {manifest_digest}")
    lines.append(f"chunk_count: {report.chunk_count}")
    lines.append("chunk,iid_mean_sts,ood_mean_sts")
    for i, (a, b) in enumerate(
        zip(report.iid_chunk_means, report.ood_chunk_means), start=1
    ):
        lines.append(f"{i},{_fmt(a)},{_fmt(b)}")
    lines.append(f"iid_mean: {_fmt(report.iid_mean)}")
    lines.append(f"ood_mean: {_fmt(report.ood_mean)}")
    lines.append(f"iid_exceeds_ood_chunks: {report.iid_exceeds_count}")
    lines.append(f"gap: {_fmt(report.gap)}")
    lines.append(f"boundary: {_fmt(report.boundary)}")
    lines.append("")
    return "\n".join(lines)


def format_testbed_summary(
    bins: tuple[TestbedBin, ...], manifest_digest: str | None = None
) -> str:
    lines = []
    if manifest_digest:
        lines.append(f"# manifest {manifest_digest}")
    lines.append("bin,lower_edge,upper_edge,size,share")
    for b in bins:
        lines.append(
            f"{b.label},{_fmt(b.lower_edge)},{_fmt(b.upper_edge)},"
            f"{len(b.sample_ids)},{_fmt(b.share)}"
        )
    lines.append("")
    return "\n".join(lines)


def export_testbed(
    bins: tuple[TestbedBin, ...],
    corpus: Corpus,
    prefix: str,
    manifest_json: str | None = None,
) -> list[str]:
    """Write one corpus file per bin at ``<prefix>_B<k>``, preserving the
    original record fields in corpus order; empty bins give empty files.

    The corpus record format has no comment channel, so the manifest (when
    given, as a JSON string) goes to a ``<prefix>_manifest.json`` sidecar
    along with the bin metadata.
    """
    for b in bins:
        for sample_id in b.sample_ids:
            if sample_id not in corpus:
                raise ValidationError(
                    f"testbed corpus missing id '{sample_id}'"
                )
    paths = []
    for b in bins:
        wanted = set(b.sample_ids)
        path = f"{prefix}_{b.label}"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for sample in corpus:
                if sample.id in wanted:
                    fh.write(format_corpus_record(sample) + "\n")
        paths.append(path)
    sidecar = {
        "bins": [
            {
                "label": b.label,
                "file": f"{prefix}_{b.label}",
                "lower_edge": b.lower_edge,
                "upper_edge": b.upper_edge,
                "size": len(b.sample_ids),
                "share": b.share,
            }
            for b in bins
        ],
    }
    if manifest_json is not None:
        sidecar["manifest"] = json.loads(manifest_json)
    sidecar_path = f"{prefix}_manifest.json"
    with open(sidecar_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(sidecar_path)
    return paths
