"""Extraction and matching engine for disaster-period resource needs and
availabilities posted on microblogs."""

__version__ = "0.1.0"

from .corpus import Tweet, preprocess, deduplicate  # noqa: F401
from .extraction import ExtractedRecord, extract_record  # noqa: F401
from .lexicons import load_lexicons  # noqa: F401
from .matching import MethodConfig, rank  # noqa: F401
