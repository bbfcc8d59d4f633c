"""Train-test similarity backends and top-b statistics.

Three backends produce a similarity value for any (train sample, test sample)
pair: ``jaccard`` (token-set overlap, range [0, 1]), ``tfidf-cosine``
(document-frequency weighted cosine fitted on train + test, range [0, 1]) and
``embed-cosine`` (cosine over externally produced vectors, range [-1, 1]).
All are symmetric, deterministic, and immutable once constructed; pairwise
matrices are computed in fixed 256-row tiles so results are bit-identical
regardless of the worker-thread count (``WOODSCORE_THREADS``).

Top-b statistics take the k largest values of a similarity row where
k = min(n, max(1, ceil(b*n))); k is computed in exact rational arithmetic and
sums use ``math.fsum``, so results match a full-sort oracle exactly.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, EmbeddingTable, Sample
from .errors import ValidationError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_TILE_ROWS = 256


def tokenize(text: str) -> list[str]:
    """Unicode-lowercase, split on non-alphanumeric runs, drop empties."""
    return _TOKEN_RE.findall(text.lower())


def thread_count(threads: int | None = None) -> int:
    """Worker threads for pairwise computation (WOODSCORE_THREADS override)."""
    if threads is None:
        raw = os.environ.get("WOODSCORE_THREADS")
        if raw is None:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"WOODSCORE_THREADS must be an integer, got {raw!r}") from None
    if threads < 1:
        raise ValidationError(f"thread count must be >= 1, got {threads}")
    return threads


def top_b_count(n: int, b: float) -> int:
    """Number of train samples in the top-b set: min(n, max(1, ceil(b*n))).

    The ceiling is evaluated on the exact decimal value of ``b`` so that e.g.
    b=0.07, n=100 yields 7 rather than the float artifact 8.
    """
    if n < 1:
        raise ValidationError("empty similarity row")
    if not (0.0 < b <= 1.0):
        raise ValidationError(f"b must be in (0, 1], got {b}")
    k = math.ceil(Fraction(str(b)) * n)
    return min(n, max(1, k))


@dataclass(frozen=True)
class TopBStats:
    """Sum and mean of the b-fraction largest train similarities for one test id."""

    test_id: str
    k: int
    sum_topb: float
    mean_topb: float


def top_b_stats(row, b: float, test_id: str) -> TopBStats:
    """Top-b statistics of a similarity row.

    Selection is partial (``np.partition``), never a full sort; the sum is an
    exactly rounded ``math.fsum`` so it is independent of selection order and
    equals a full-sort brute force bit for bit.
    """
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise ValidationError(f"similarity row must be 1-d, got shape {row.shape}")
    n = row.size
    k = top_b_count(n, b)
    if k == n:
        vals = row
    else:
        vals = np.partition(row, n - k)[n - k:]
    total = math.fsum(vals)
    return TopBStats(test_id=test_id, k=k, sum_topb=total, mean_topb=total / k)


class JaccardBackend:
    """Token-set Jaccard similarity |A & B| / |A | B|; empty union -> 0."""

    kind = "jaccard"
    range = (0.0, 1.0)

    def similarity(self, a: Sample, b: Sample) -> float:
        sa, sb = set(tokenize(a.text)), set(tokenize(b.text))
        union = len(sa | sb)
        if union == 0:
            return 0.0
        return len(sa & sb) / union

    def prepare_pair(self, test: Corpus, train: Corpus):
        test_sets = [set(tokenize(s.text)) for s in test]
        train_sets = [set(tokenize(s.text)) for s in train]
        vocab = {tok: i for i, tok in enumerate(sorted(set().union(*test_sets, *train_sets)))}
        return (
            (_binary_matrix(test_sets, vocab), np.array([len(s) for s in test_sets], dtype=np.float64)),
            (_binary_matrix(train_sets, vocab), np.array([len(s) for s in train_sets], dtype=np.float64)),
        )

    def block(self, test_rep, train_rep, i0: int, i1: int) -> np.ndarray:
        test_mat, test_sizes = test_rep
        train_mat, train_sizes = train_rep
        inter = (test_mat[i0:i1] @ train_mat.T).toarray()
        union = test_sizes[i0:i1, None] + train_sizes[None, :] - inter
        out = np.zeros_like(inter)
        np.divide(inter, union, out=out, where=union > 0)
        return out


def _binary_matrix(token_sets, vocab: dict) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    for toks in token_sets:
        cols = sorted(vocab[t] for t in toks)
        indices.extend(cols)
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix(
        (data, np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(token_sets), max(len(vocab), 1)),
    )


class TfidfBackend:
    """Cosine over tf-idf vectors with the weighting fixed for determinism.

    Term weight is raw count * (ln((1+N)/(1+df)) + 1) with N the number of
    fitted documents (train + test), then L2 normalization.  Tokens outside
    the fitted vocabulary are ignored; a document with no in-vocab tokens has
    a zero vector and similarity 0 to everything (including itself).
    Construct via :func:`fit_tfidf`.
    """

    kind = "tfidf-cosine"
    range = (0.0, 1.0)

    def __init__(self, vocab: dict[str, int], idf: np.ndarray, n_docs: int):
        self._vocab = vocab
        self._idf = idf
        self.n_docs = n_docs

    def similarity(self, a: Sample, b: Sample) -> float:
        wa = self._unit_weights(a.text)
        wb = self._unit_weights(b.text)
        if not wa or not wb:
            return 0.0
        common = sorted(set(wa) & set(wb))
        dot = math.fsum(wa[i] * wb[i] for i in common)
        return min(1.0, max(0.0, dot))

    def _unit_weights(self, text: str) -> dict[int, float]:
        counts: dict[int, int] = {}
        for tok in tokenize(text):
            idx = self._vocab.get(tok)
            if idx is not None:
                counts[idx] = counts.get(idx, 0) + 1
        if not counts:
            return {}
        weights = {i: c * self._idf[i] for i, c in counts.items()}
        norm = math.sqrt(math.fsum(w * w for w in weights.values()))
        if norm == 0.0:
            return {}
        return {i: w / norm for i, w in weights.items()}

    def prepare_pair(self, test: Corpus, train: Corpus):
        return self._doc_matrix(test), self._doc_matrix(train)

    def _doc_matrix(self, corpus: Corpus) -> sp.csr_matrix:
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for sample in corpus:
            counts: dict[int, int] = {}
            for tok in tokenize(sample.text):
                idx = self._vocab.get(tok)
                if idx is not None:
                    counts[idx] = counts.get(idx, 0) + 1
            for idx in sorted(counts):
                indices.append(idx)
                data.append(counts[idx] * self._idf[idx])
            indptr.append(len(indices))
        mat = sp.csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(corpus), max(len(self._vocab), 1)),
        )
        norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sp.diags(inv) @ mat

    def block(self, test_rep, train_rep, i0: int, i1: int) -> np.ndarray:
        sims = (test_rep[i0:i1] @ train_rep.T).toarray()
        return np.clip(sims, 0.0, 1.0)


def fit_tfidf(train: Corpus, test: Corpus) -> TfidfBackend:
    """Fit document-frequency statistics over train + test.

    Raises :class:`ValidationError` if every document of either corpus
    tokenizes to empty.
    """
    df: dict[str, int] = {}
    for corpus in (train, test):
        any_tokens = False
        for sample in corpus:
            toks = set(tokenize(sample.text))
            if toks:
                any_tokens = True
            for tok in toks:
                df[tok] = df.get(tok, 0) + 1
        if not any_tokens:
            raise ValidationError(
                f"every document in the {corpus.role} corpus tokenizes to empty"
            )
    n_docs = len(train) + len(test)
    vocab = {tok: i for i, tok in enumerate(sorted(df))}
    idf = np.empty(len(vocab), dtype=np.float64)
    for tok, idx in vocab.items():
        idf[idx] = math.log((1.0 + n_docs) / (1.0 + df[tok])) + 1.0
    return TfidfBackend(vocab=vocab, idf=idf, n_docs=n_docs)


class EmbedCosineBackend:
    """Cosine over externally produced unit vectors, looked up by sample id.

    Tables for the two corpora are merged; the same id appearing with two
    different vectors is rejected at fit time.  All-zero vectors stay zero
    and have similarity 0 to everything.  Construct via :func:`fit_embed`.
    """

    kind = "embed-cosine"
    range = (-1.0, 1.0)

    def __init__(self, dim: int, units: dict[str, np.ndarray]):
        self.dim = dim
        self._units = units

    def _unit(self, sample_id: str) -> np.ndarray:
        try:
            return self._units[sample_id]
        except KeyError:
            raise ValidationError(f"no embedding for id '{sample_id}'") from None

    def similarity(self, a: Sample, b: Sample) -> float:
        dot = float(np.dot(self._unit(a.id), self._unit(b.id)))
        return min(1.0, max(-1.0, dot))

    def prepare_pair(self, test: Corpus, train: Corpus):
        return self._unit_matrix(test), self._unit_matrix(train)

    def _unit_matrix(self, corpus: Corpus) -> np.ndarray:
        return np.stack([self._unit(s.id) for s in corpus])

    def block(self, test_rep, train_rep, i0: int, i1: int) -> np.ndarray:
        return np.clip(test_rep[i0:i1] @ train_rep.T, -1.0, 1.0)


def fit_embed(
    train: Corpus,
    test: Corpus,
    train_table: EmbeddingTable,
    test_table: EmbeddingTable | None = None,
) -> EmbedCosineBackend:
    """Pair embedding tables with their corpora and build a cosine backend.

    With a single table it must cover both corpora.  Raises on dimension
    mismatch, an id mapped to two different vectors, or corpus ids missing
    from the tables.
    """
    if test_table is None:
        test_table = train_table
    if train_table.dim != test_table.dim:
        raise ValidationError(
            f"embedding dim mismatch: train {train_table.dim} vs test {test_table.dim}"
        )
    merged: dict[str, np.ndarray] = dict(train_table.entries)
    for sample_id, vec in test_table.entries.items():
        known = merged.get(sample_id)
        if known is not None and not np.array_equal(known, vec):
            raise ValidationError(
                f"id '{sample_id}' has conflicting vectors in the two embedding tables"
            )
        merged[sample_id] = vec
    missing = [s.id for c in (train, test) for s in c if s.id not in merged]
    if missing:
        raise ValidationError(
            f"missing embeddings for {len(missing)} corpus id(s), first: '{missing[0]}'"
        )
    units: dict[str, np.ndarray] = {}
    for sample_id, vec in merged.items():
        norm = float(np.linalg.norm(vec))
        unit = vec / norm if norm > 0.0 else np.zeros_like(vec)
        unit.setflags(write=False)
        units[sample_id] = unit
    return EmbedCosineBackend(dim=train_table.dim, units=units)


def similarity(backend, a: Sample, b: Sample) -> float:
    """Similarity of one sample pair, within the backend's declared range."""
    return backend.similarity(a, b)


def similarity_matrix(backend, test: Corpus, train: Corpus, threads: int | None = None) -> np.ndarray:
    """Full |test| x |train| similarity matrix in corpus order.

    Rows are computed in fixed 256-row tiles; with more than one worker
    thread the tiles run in parallel and are merged by position, so the
    result is byte-identical for any thread count.
    """
    test_rep, train_rep = backend.prepare_pair(test, train)
    out = np.empty((len(test), len(train)), dtype=np.float64)
    tiles = [(i, min(i + _TILE_ROWS, len(test))) for i in range(0, len(test), _TILE_ROWS)]

    def run(tile):
        i0, i1 = tile
        out[i0:i1] = backend.block(test_rep, train_rep, i0, i1)

    workers = thread_count(threads)
    if workers > 1 and len(tiles) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, tiles))
    else:
        for tile in tiles:
            run(tile)
    return out


def similarity_row(backend, test_sample: Sample, train: Corpus) -> np.ndarray:
    """Similarities of one test sample against every train sample, train order."""
    mini = Corpus(role="test", samples=(test_sample,))
    return similarity_matrix(backend, mini, train, threads=1)[0]
