"""Hardness scoring and similarity-weighted evaluation for text test sets.

Scores each test sample by its semantic similarity to the train corpus
(hard = dissimilar), chunks the test set by difficulty, and evaluates
models with the WOOD score, a weighted signed accuracy that punishes
errors on hard samples more than plain accuracy does.
"""

__version__ = "0.1.0"

from .analysis import (
    AnnotationPlan,
    BoundaryReport,
    TestbedBin,
    annotation_plan,
    chunk_error_curve,
    confidence_curve,
    export_testbed,
    iid_ood_boundary,
    monotonicity,
    sts_bins,
    sts_maxprob_correlation,
    write_chunk_csv,
)
from .corpus import (
    Corpus,
    EmbeddingTable,
    PredictionRecord,
    Sample,
    format_corpus_record,
    load_corpus,
    load_embeddings,
    load_predictions,
    save_corpus,
)
from .errors import ValidationError
from .manifest import RunManifest, build_manifest, file_sha256
from .scoring import (
    DEFAULT_B_SWEEP,
    SampleScore,
    ScoringConfig,
    chunk_sizes,
    normalize_hardness,
    rank_and_chunk,
    read_scores_csv,
    score_samples,
    scores_from_matrix,
    sweep_b,
    write_scores_csv,
)
from .similarity import (
    EmbedCosineBackend,
    JaccardBackend,
    TfidfBackend,
    TopBStats,
    fit_embed,
    fit_tfidf,
    similarity,
    similarity_matrix,
    similarity_row,
    thread_count,
    tokenize,
    top_b_count,
    top_b_stats,
)
from .synthetic import bernoulli_predictions, logistic, synthetic_scores
from .wood import (
    ChunkStats,
    EvalConfig,
    RankingComparison,
    WeightSummary,
    WoodResult,
    accuracy,
    chunk_weight,
    compare_rankings,
    format_wood_report,
    per_chunk_stats,
    wood_score,
)

__all__ = [
    "AnnotationPlan",
    "BoundaryReport",
    "ChunkStats",
    "Corpus",
    "DEFAULT_B_SWEEP",
    "EmbedCosineBackend",
    "EmbeddingTable",
    "EvalConfig",
    "JaccardBackend",
    "PredictionRecord",
    "RankingComparison",
    "RunManifest",
    "Sample",
    "SampleScore",
    "ScoringConfig",
    "TestbedBin",
    "TfidfBackend",
    "TopBStats",
    "ValidationError",
    "WeightSummary",
    "WoodResult",
    "accuracy",
    "annotation_plan",
    "bernoulli_predictions",
    "build_manifest",
    "chunk_error_curve",
    "chunk_sizes",
    "chunk_weight",
    "compare_rankings",
    "confidence_curve",
    "export_testbed",
    "file_sha256",
    "fit_embed",
    "fit_tfidf",
    "format_corpus_record",
    "format_wood_report",
    "iid_ood_boundary",
    "load_corpus",
    "load_embeddings",
    "load_predictions",
    "logistic",
    "monotonicity",
    "normalize_hardness",
    "per_chunk_stats",
    "rank_and_chunk",
    "read_scores_csv",
    "save_corpus",
    "score_samples",
    "scores_from_matrix",
    "similarity",
    "similarity_matrix",
    "similarity_row",
    "sts_bins",
    "sts_maxprob_correlation",
    "sweep_b",
    "synthetic_scores",
    "thread_count",
    "tokenize",
    "top_b_count",
    "top_b_stats",
    "wood_score",
    "write_chunk_csv",
    "write_scores_csv",
]
