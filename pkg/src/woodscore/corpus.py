"""Corpus, prediction, and embedding-table ingestion.

All on-disk formats are UTF-8 and line-delimited:

* corpus file: one JSON object per line with keys ``id``, ``text`` and an
  optional ``label``;
* predictions file: one JSON object per line with keys ``id`` and either an
  explicit ``correct`` boolean or a ``prediction`` string (gold resolved from
  the record's ``gold`` field or the corpus label), plus optional
  ``confidence`` in [0, 1];
* embedding file: header line ``#dim <d>``, then ``id<TAB>f1 f2 ... fd`` with
  decimal floats separated by single spaces.  Lines after the header that
  start with ``#`` are comments (e.g. ``# encoder <name>``) and are skipped.

Loaded objects are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

_CORPUS_KEYS = {"id", "text", "label"}
_PREDICTION_KEYS = {"id", "correct", "prediction", "gold", "confidence"}
_DIM_HEADER = re.compile(r"^#dim ([1-9][0-9]*)$")


@dataclass(frozen=True)
class Sample:
    """One text record. ``id`` must be unique within its corpus."""

    id: str
    text: str
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("sample id must be a non-empty string")
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValidationError(f"sample '{self.id}': text is empty")
        if self.label is not None and not isinstance(self.label, str):
            raise ValidationError(f"sample '{self.id}': label must be a string")


@dataclass(frozen=True)
class Corpus:
    """An ordered, id-indexed collection of samples (role: train or test)."""

    role: str
    samples: tuple[Sample, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.role not in ("train", "test"):
            raise ValidationError(f"corpus role must be 'train' or 'test', got {self.role!r}")
        if not isinstance(self.samples, tuple):
            object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.samples) == 0:
            raise ValidationError("empty corpus")
        index = {}
        for pos, sample in enumerate(self.samples):
            if sample.id in index:
                raise ValidationError(f"duplicate id '{sample.id}'")
            index[sample.id] = pos
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, pos: int) -> Sample:
        return self.samples[pos]

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.samples)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._index

    def by_id(self, sample_id: str) -> Sample:
        try:
            return self.samples[self._index[sample_id]]
        except KeyError:
            raise ValidationError(f"unknown sample id '{sample_id}'") from None


@dataclass(frozen=True)
class PredictionRecord:
    """Per-test-sample correctness flag plus optional confidence (MaxProb)."""

    id: str
    correct: bool
    confidence: float | None = None

    def __post_init__(self):
        if self.confidence is not None and not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(
                f"prediction '{self.id}': confidence {self.confidence} outside [0, 1]"
            )


class EmbeddingTable:
    """Maps sample ids to fixed-dimension real vectors.

    Every vector has exactly ``dim`` finite float64 components.  The table
    must cover (be a superset of) the ids of any corpus it is paired with;
    that pairing check happens when a backend is fitted.
    """

    def __init__(self, dim: int, entries: dict[str, np.ndarray]):
        if dim < 1:
            raise ValidationError(f"embedding dim must be positive, got {dim}")
        self.dim = int(dim)
        checked: dict[str, np.ndarray] = {}
        for sample_id, vec in entries.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ValidationError(
                    f"embedding '{sample_id}': expected {self.dim} components, got {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"embedding '{sample_id}': non-finite component")
            arr.setflags(write=False)
            checked[sample_id] = arr
        self.entries = checked

    def __len__(self):
        return len(self.entries)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self.entries

    def __getitem__(self, sample_id: str) -> np.ndarray:
        try:
            return self.entries[sample_id]
        except KeyError:
            raise ValidationError(f"no embedding for id '{sample_id}'") from None

    def covers(self, corpus: Corpus) -> bool:
        return all(s.id in self.entries for s in corpus)


def _parse_json_line(line: str, lineno: int, path: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed line {lineno}: {exc.msg}") from None
    if not isinstance(record, dict):
        raise ValidationError(f"{path}: malformed line {lineno}: expected an object")
    return record


def load_corpus(path, role: str) -> Corpus:
    """Load a line-delimited corpus file, preserving file order.

    Raises :class:`ValidationError` on duplicate ids, empty text, malformed
    or unknown-keyed lines (with the line number), or an empty file.
    """
    path = str(path)
    samples: list[Sample] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                raise ValidationError(f"{path}: malformed line {lineno}: blank line")
            record = _parse_json_line(line, lineno, path)
            unknown = set(record) - _CORPUS_KEYS
            if unknown:
                raise ValidationError(
                    f"{path}: malformed line {lineno}: unknown keys {sorted(unknown)}"
                )
            if "id" not in record or "text" not in record:
                raise ValidationError(f"{path}: malformed line {lineno}: needs id and text")
            try:
                sample = Sample(record["id"], record["text"], record.get("label"))
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
            if sample.id in seen:
                raise ValidationError(f"{path}: duplicate id '{sample.id}' at line {lineno}")
            seen.add(sample.id)
            samples.append(sample)
    if not samples:
        raise ValidationError(f"{path}: empty corpus")
    return Corpus(role=role, samples=tuple(samples))


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus in the line-delimited format ``load_corpus`` reads."""
    with open(str(path), "w", encoding="utf-8") as fh:
        for sample in corpus:
            fh.write(format_corpus_record(sample) + "\n")


def format_corpus_record(sample: Sample) -> str:
    record: dict = {"id": sample.id, "text": sample.text}
    if sample.label is not None:
        record["label"] = sample.label
    return json.dumps(record, ensure_ascii=False)


def load_predictions(path, test: Corpus | None = None) -> list[PredictionRecord]:
    """Load prediction records, one JSON object per line.

    Correctness resolution, most specific wins: an explicit ``correct`` flag,
    else ``prediction`` compared against the record's ``gold`` field, else
    ``prediction`` compared against the corpus label.  With a test corpus the
    result covers it exactly, in corpus order, or the call fails; without one
    every record must resolve correctness on its own and file order is kept.
    """
    path = str(path)
    by_id: dict[str, PredictionRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                raise ValidationError(f"{path}: malformed line {lineno}: blank line")
            record = _parse_json_line(line, lineno, path)
            unknown = set(record) - _PREDICTION_KEYS
            if unknown:
                raise ValidationError(
                    f"{path}: malformed line {lineno}: unknown keys {sorted(unknown)}"
                )
            sample_id = record.get("id")
            if not isinstance(sample_id, str) or not sample_id:
                raise ValidationError(f"{path}: malformed line {lineno}: needs a string id")
            if test is not None and sample_id not in test:
                raise ValidationError(
                    f"{path}: line {lineno}: id '{sample_id}' not in the test corpus"
                )
            if sample_id in by_id:
                raise ValidationError(
                    f"{path}: line {lineno}: duplicate prediction for '{sample_id}'"
                )
            sample = test.by_id(sample_id) if test is not None else None
            correct = _resolve_correct(record, sample_id, sample, path, lineno)
            confidence = record.get("confidence")
            if confidence is not None:
                if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
                    raise ValidationError(
                        f"{path}: line {lineno}: confidence must be a number"
                    )
                confidence = float(confidence)
            try:
                by_id[sample_id] = PredictionRecord(sample_id, correct, confidence)
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
    if test is None:
        if not by_id:
            raise ValidationError(f"{path}: no prediction records")
        return list(by_id.values())
    missing = [s.id for s in test if s.id not in by_id]
    if missing:
        raise ValidationError(f"{path}: missing prediction for '{missing[0]}'")
    return [by_id[s.id] for s in test]


def _resolve_correct(
    record: dict, sample_id: str, sample: Sample | None, path: str, lineno: int
) -> bool:
    flag = record.get("correct")
    if flag is not None:
        if not isinstance(flag, bool):
            raise ValidationError(f"{path}: line {lineno}: correct must be a boolean")
        return flag
    prediction = record.get("prediction")
    gold = record.get("gold", sample.label if sample is not None else None)
    if prediction is None or gold is None:
        raise ValidationError(
            f"{path}: line {lineno}: correctness underivable for '{sample_id}' "
            "(no correct flag and no prediction+gold pair)"
        )
    return prediction == gold


def load_embeddings(path) -> EmbeddingTable:
    """Load an embedding file (strict parse of the ``#dim`` vector format)."""
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        match = _DIM_HEADER.match(header)
        if not match:
            raise ValidationError(f"{path}: line 1: expected '#dim <d>' header")
        dim = int(match.group(1))
        entries: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if line.startswith("#"):
                continue
            if not line:
                raise ValidationError(f"{path}: malformed line {lineno}: blank line")
            left, sep, right = line.partition("\t")
            if not sep or not left:
                raise ValidationError(
                    f"{path}: malformed line {lineno}: expected 'id<TAB>floats'"
                )
            if left in entries:
                raise ValidationError(f"{path}: duplicate id '{left}' at line {lineno}")
            parts = right.split(" ")
            values = []
            for token in parts:
                try:
                    value = float(token)
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {lineno}: non-numeric token {token!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ValidationError(
                        f"{path}: line {lineno}: non-finite value {token!r}"
                    )
                values.append(value)
            if len(values) != dim:
                raise ValidationError(
                    f"{path}: row '{left}': expected {dim} floats, got {len(values)}"
                )
            entries[left] = np.array(values, dtype=np.float64)
    return EmbeddingTable(dim=dim, entries=entries)
