"""Sentence encoders resolvable by name.

``hash-<dim>`` is a deterministic, dependency-free feature hasher: every
token maps to a fixed pseudo-random direction derived from its blake2b
digest, and a sentence is the sum of its token directions.  It is not a
semantic model, but it is stable across machines and runs, which makes it
the right default for format tests and plumbing.  Any other name is treated
as a sentence-transformers model and loaded lazily.
"""

from __future__ import annotations

import hashlib
import re
import struct

import numpy as np

from .errors import ExportError

_HASH_NAME = re.compile(r"^hash-(\d+)$")
_WORD = re.compile(r"[^\W_]+", re.UNICODE)

# one blake2b digest yields 8 float64 lanes
_LANES_PER_BLOCK = 8


def _token_direction(token: str, dim: int) -> np.ndarray:
    values = np.empty(dim, dtype=np.float64)
    blocks = -(-dim // _LANES_PER_BLOCK)
    pos = 0
    for block in range(blocks):
        digest = hashlib.blake2b(
            token.encode("utf-8") + b"\x00" + block.to_bytes(4, "big"),
            digest_size=64,
        ).digest()
        lanes = struct.unpack(">8Q", digest[:64])
        for lane in lanes:
            if pos == dim:
                break
            # uint64 -> [-1, 1)
            values[pos] = lane / 2.0**63 - 1.0
            pos += 1
    return values


class HashEncoder:
    """Deterministic token-hashing encoder with a fixed output dimension."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ExportError(f"hash encoder dimension must be >= 1, got {dim}")
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = _WORD.findall(text.lower())
            if not tokens:
                raise ExportError(f"cannot encode text with no tokens: {text!r}")
            for token in tokens:
                direction = self._cache.get(token)
                if direction is None:
                    direction = _token_direction(token, self.dim)
                    self._cache[token] = direction
                out[row] += direction
        return out


class TransformerEncoder:
    """Thin wrapper over a sentence-transformers model, imported on demand."""

    def __init__(self, name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError:
            raise ExportError(
                f"unknown encoder '{name}': not a hash-<dim> name and the "
                "sentence-transformers package is not installed"
            ) from None
        try:
            self._model = SentenceTransformer(name)
        except Exception as exc:
            raise ExportError(f"cannot load encoder '{name}': {exc}") from exc
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(texts, convert_to_numpy=True)
        return np.asarray(vectors, dtype=np.float64)


def resolve_encoder(name: str):
    """Return an encoder with ``dim`` and ``encode(texts) -> (n, dim)``."""
    match = _HASH_NAME.match(name)
    if match:
        return HashEncoder(int(match.group(1)))
    return TransformerEncoder(name)
