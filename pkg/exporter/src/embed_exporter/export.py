"""Corpus -> vector file export.

The output is the tab-separated text vector format: a ``#dim <d>`` header,
a ``# encoder <name>`` provenance comment (readers skip ``#`` lines after
the header), then one ``id<TAB>floats`` row per corpus sample in corpus
order.  The file is written to a temporary sibling path and renamed into
place only on success, so a crash or an unencodable sample never leaves a
torn file at the final path.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .encoders import resolve_encoder
from .errors import ExportError


@dataclass(frozen=True)
class ExportJob:
    corpus_path: str
    encoder: str
    out_path: str
    batch_size: int = 32
    normalize: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ExportError(f"batch_size must be >= 1, got {self.batch_size}")


def read_corpus(path: str) -> list[tuple[str, str]]:
    """(id, text) pairs in file order from a JSON-lines corpus."""
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ExportError(f"cannot read corpus: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                raise ExportError(f"{path}: line {lineno}: blank line")
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"{path}: line {lineno}: {exc}") from None
            sample_id = record.get("id")
            text = record.get("text")
            if not isinstance(sample_id, str) or not sample_id:
                raise ExportError(f"{path}: line {lineno}: missing or empty 'id'")
            if not isinstance(text, str) or not text:
                raise ExportError(f"{path}: line {lineno}: missing or empty 'text'")
            if sample_id in seen:
                raise ExportError(f"{path}: duplicate id '{sample_id}' at line {lineno}")
            seen.add(sample_id)
            pairs.append((sample_id, text))
    if not pairs:
        raise ExportError(f"{path}: empty corpus")
    return pairs


def _batches(items: list, size: int):
    for start in range(0, len(items), size):
        yield items[start:start + size]


def export(job: ExportJob) -> str:
    """Run the job; returns the output path on success."""
    pairs = read_corpus(job.corpus_path)
    encoder = resolve_encoder(job.encoder)

    out_dir = os.path.dirname(os.path.abspath(job.out_path)) or "."
    fd, tmp_path = tempfile.mkstemp(prefix=".export-", dir=out_dir)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"#dim {encoder.dim}\n")
            fh.write(f"# encoder {job.encoder}\n")
            for batch in _batches(pairs, job.batch_size):
                vectors = encoder.encode([text for _, text in batch])
                vectors = np.asarray(vectors, dtype=np.float64)
                if vectors.shape != (len(batch), encoder.dim):
                    raise ExportError(
                        f"encoder '{job.encoder}' returned shape {vectors.shape}, "
                        f"expected {(len(batch), encoder.dim)}"
                    )
                if not np.isfinite(vectors).all():
                    raise ExportError(
                        f"encoder '{job.encoder}' produced non-finite values"
                    )
                if job.normalize:
                    norms = np.linalg.norm(vectors, axis=1)
                    flat = norms == 0.0
                    if flat.any():
                        bad = batch[int(np.argmax(flat))][0]
                        raise ExportError(
                            f"cannot normalize zero vector for id '{bad}'"
                        )
                    vectors = vectors / norms[:, None]
                for (sample_id, _), row in zip(batch, vectors):
                    fh.write(
                        sample_id + "\t" + " ".join(repr(float(v)) for v in row) + "\n"
                    )
        os.replace(tmp_path, job.out_path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
    return job.out_path
