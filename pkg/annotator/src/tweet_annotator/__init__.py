"""Deterministic tweet annotator: tokens, POS tags, dependency arcs and
entity spans, emitted as JSONL for the matching engine to consume."""

__version__ = "0.1.0"

from .pipeline import annotate, annotate_text, export_similarity_table  # noqa: F401
