"""Sentence-embedding export to the tab-separated text vector format."""

__version__ = "0.1.0"

from .encoders import HashEncoder, TransformerEncoder, resolve_encoder
from .errors import ExportError
from .export import ExportJob, export, read_corpus

__all__ = [
    "ExportError",
    "ExportJob",
    "HashEncoder",
    "TransformerEncoder",
    "export",
    "read_corpus",
    "resolve_encoder",
]
