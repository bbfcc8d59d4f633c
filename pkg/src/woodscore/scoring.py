"""Per-sample hardness scoring.

Turns top-b similarity statistics into a raw OOD degree ``p = a / sum_topb``
(absent when the top-b sum is not positive), a normalized hardness in [0, 1]
(0 = easy, 1 = hard), a rank (1 = highest mean similarity = easiest) and a
chunk assignment (chunk 1 = lowest similarity = hardest).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import rankdata

from .corpus import Corpus
from .errors import ValidationError
from .similarity import similarity_matrix, top_b_stats

# The nine-step b sweep: 1%..100% of the train set.
DEFAULT_B_SWEEP = (0.01, 0.05, 0.10, 0.25, 0.30, 0.40, 0.50, 0.75, 1.00)

NORMALIZATION_MODES = ("minmax", "affine", "rank")

SCORES_CSV_HEADER = ("id", "mean_topb", "sum_topb", "p_raw", "hardness", "rank", "chunk")


@dataclass(frozen=True)
class ScoringConfig:
    """Hyperparameters: a scales p, b is the top-similarity fraction."""

    a: float = 1.0
    b: float = 0.1
    chunk_count: int = 3
    normalization: str = "minmax"

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError(f"a must be positive, got {self.a}")
        if not (0.0 < self.b <= 1.0):
            raise ValidationError(f"b must be in (0, 1], got {self.b}")
        if self.chunk_count < 1:
            raise ValidationError(f"chunk_count must be >= 1, got {self.chunk_count}")
        if self.normalization not in NORMALIZATION_MODES:
            raise ValidationError(f"unknown normalization mode {self.normalization!r}")


@dataclass(frozen=True)
class SampleScore:
    """Hardness record for one test sample.

    ``hardness``, ``rank`` and ``chunk_index`` are filled by
    :func:`normalize_hardness` and :func:`rank_and_chunk`.
    """

    id: str
    mean_topb: float
    sum_topb: float
    p_raw: float | None = None
    hardness: float | None = None
    rank: int | None = None
    chunk_index: int | None = None


def chunk_sizes(n: int, chunk_count: int) -> list[int]:
    """Size of each chunk, index 1 (hardest) first; remainder goes hardest-first."""
    if chunk_count < 1:
        raise ValidationError(f"chunk_count must be >= 1, got {chunk_count}")
    if chunk_count > n:
        raise ValidationError(f"chunk_count {chunk_count} exceeds sample count {n}")
    base, rem = divmod(n, chunk_count)
    return [base + (1 if i <= rem else 0) for i in range(1, chunk_count + 1)]


def rank_and_chunk(scores: list[SampleScore], chunk_count: int) -> list[SampleScore]:
    """Sort by mean_topb descending (ties by id ascending), rank and chunk.

    Returns a new list in rank order.  Chunks are contiguous blocks of the
    sorted order; chunk 1 is the lowest-similarity (hardest) block and takes
    the remainder samples first.
    """
    if not scores:
        raise ValidationError("no scores to rank")
    sizes = chunk_sizes(len(scores), chunk_count)
    ordered = sorted(scores, key=lambda s: (-s.mean_topb, s.id))
    chunk_of_pos = np.empty(len(scores), dtype=np.int64)
    start = 0
    for index in range(chunk_count, 0, -1):
        size = sizes[index - 1]
        chunk_of_pos[start:start + size] = index
        start += size
    return [
        replace(score, rank=pos + 1, chunk_index=int(chunk_of_pos[pos]))
        for pos, score in enumerate(ordered)
    ]


def normalize_hardness(
    scores: list[SampleScore],
    mode: str = "minmax",
    value_range: tuple[float, float] | None = None,
) -> list[SampleScore]:
    """Fill ``hardness`` in [0, 1]; preserves list order.

    minmax rescales the observed mean_topb spread (all-equal degenerates to
    0.5 everywhere); affine maps the backend's declared ``value_range``
    linearly; rank uses descending mid-ranks so ties share hardness.
    """
    if not scores:
        raise ValidationError("no scores to normalize")
    means = np.array([s.mean_topb for s in scores], dtype=np.float64)
    n = len(scores)
    if mode == "minmax":
        lo, hi = float(means.min()), float(means.max())
        if hi == lo:
            hardness = np.full(n, 0.5)
        else:
            hardness = (hi - means) / (hi - lo)
    elif mode == "affine":
        if value_range is None:
            raise ValidationError("affine normalization needs the backend range")
        lo, hi = value_range
        if not hi > lo:
            raise ValidationError(f"invalid range {value_range}")
        hardness = (hi - means) / (hi - lo)
    elif mode == "rank":
        if n == 1:
            hardness = np.full(1, 0.5)
        else:
            midranks = rankdata(-means, method="average")
            hardness = (midranks - 1.0) / (n - 1.0)
    else:
        raise ValidationError(f"unknown normalization mode {mode!r}")
    return [replace(s, hardness=float(h)) for s, h in zip(scores, hardness)]


def scores_from_matrix(
    matrix: np.ndarray,
    test: Corpus,
    cfg: ScoringConfig,
    value_range: tuple[float, float],
) -> list[SampleScore]:
    """Score every test sample from a precomputed similarity matrix."""
    partial = []
    zero_sum = 0
    for i, sample in enumerate(test):
        stats = top_b_stats(matrix[i], cfg.b, sample.id)
        if stats.sum_topb > 0.0:
            p_raw = cfg.a / stats.sum_topb
        else:
            p_raw = None
            zero_sum += 1
        partial.append(
            SampleScore(
                id=sample.id,
                mean_topb=stats.mean_topb,
                sum_topb=stats.sum_topb,
                p_raw=p_raw,
            )
        )
    if zero_sum:
        warnings.warn(
            f"{zero_sum} test sample(s) have non-positive top-b similarity sum; "
            "p_raw omitted for them",
            stacklevel=2,
        )
    ranked = rank_and_chunk(partial, cfg.chunk_count)
    return normalize_hardness(ranked, cfg.normalization, value_range=value_range)


def score_samples(
    train: Corpus,
    test: Corpus,
    backend,
    cfg: ScoringConfig | None = None,
    threads: int | None = None,
) -> list[SampleScore]:
    """Full scoring pipeline; returns one SampleScore per test sample, rank order."""
    cfg = cfg or ScoringConfig()
    matrix = similarity_matrix(backend, test, train, threads=threads)
    return scores_from_matrix(matrix, test, cfg, backend.range)


def sweep_b(
    train: Corpus,
    test: Corpus,
    backend,
    a: float = 1.0,
    b_values=DEFAULT_B_SWEEP,
    chunk_count: int = 3,
    normalization: str = "minmax",
    threads: int | None = None,
) -> dict[float, list[SampleScore]]:
    """Score the same cached similarity matrix at each b of the sweep."""
    if not b_values:
        raise ValidationError("b_values must be non-empty")
    matrix = similarity_matrix(backend, test, train, threads=threads)
    out: dict[float, list[SampleScore]] = {}
    for b in b_values:
        cfg = ScoringConfig(a=a, b=b, chunk_count=chunk_count, normalization=normalization)
        out[b] = scores_from_matrix(matrix, test, cfg, backend.range)
    return out


def _fmt(x: float) -> str:
    return format(x, ".10g")


def write_scores_csv(
    scores: list[SampleScore],
    path,
    manifest_digest: str | None = None,
    config: dict | None = None,
) -> None:
    """Write scores in rank order; floats carry 10 significant digits.

    Optional leading comment lines record the producing manifest digest and
    the scoring configuration; readers skip ``#`` lines.
    """
    rows = sorted(scores, key=lambda s: s.rank)
    with open(str(path), "w", encoding="utf-8", newline="") as fh:
        if manifest_digest:
            fh.write(f"# manifest {manifest_digest}\n")
        if config:
            pairs = " ".join(f"{k}={v}" for k, v in config.items())
            fh.write(f"# config {pairs}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORES_CSV_HEADER)
        for s in rows:
            if s.hardness is None or s.rank is None or s.chunk_index is None:
                raise ValidationError(f"score '{s.id}' is not fully computed")
            writer.writerow(
                [
                    s.id,
                    _fmt(s.mean_topb),
                    _fmt(s.sum_topb),
                    _fmt(s.p_raw) if s.p_raw is not None else "",
                    _fmt(s.hardness),
                    s.rank,
                    s.chunk_index,
                ]
            )


def read_scores_csv(path) -> tuple[list[SampleScore], dict]:
    """Read a scores CSV; returns (scores in file order, comment metadata)."""
    path = str(path)
    meta: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("manifest "):
                    meta["manifest"] = body[len("manifest "):]
                elif body.startswith("config "):
                    cfg = {}
                    for pair in body[len("config "):].split():
                        key, _, value = pair.partition("=")
                        cfg[key] = value
                    meta["config"] = cfg
                continue
            data_lines.append(line)
    reader = csv.reader(data_lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{path}: empty scores file") from None
    if tuple(header) != SCORES_CSV_HEADER:
        raise ValidationError(f"{path}: unexpected header {header}")
    scores = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(SCORES_CSV_HEADER):
            raise ValidationError(f"{path}: row {lineno}: expected {len(SCORES_CSV_HEADER)} fields")
        try:
            scores.append(
                SampleScore(
                    id=row[0],
                    mean_topb=float(row[1]),
                    sum_topb=float(row[2]),
                    p_raw=float(row[3]) if row[3] != "" else None,
                    hardness=float(row[4]),
                    rank=int(row[5]),
                    chunk_index=int(row[6]),
                )
            )
        except ValueError as exc:
            raise ValidationError(f"{path}: row {lineno}: {exc}") from None
    if not scores:
        raise ValidationError(f"{path}: no score rows")
    return scores, meta
