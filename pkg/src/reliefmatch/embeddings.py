"""Word-vector tables in the plain word2vec text format, with averaged
bag-of-token vectors and cosine similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "EmbeddingTable",
    "FLAVORS",
    "load_vectors",
    "save_vectors",
    "average_vector",
    "cosine",
]

FLAVORS = ("local", "pretrained_crisis", "pretrained_general", "paraphrase")


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, list[float]] = field(default_factory=dict)
    flavor: str = "local"

    def __contains__(self, token: str) -> bool:
        return self.get(token) is not None

    def get(self, token: str) -> list[float] | None:
        """Case-sensitive lookup with a lowercase fallback."""
        v = self.vectors.get(token)
        if v is None:
            v = self.vectors.get(token.lower())
        return v


def load_vectors(path, flavor: str = "local") -> EmbeddingTable:
    """Load a "V D" header plus one "token f1 .. fD" row per line.

    Dimension mismatches and non-finite components are fatal (with the
    line number); duplicate tokens keep their first occurrence.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown embedding flavor {flavor!r}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}:1: expected 'vocab_size dimension' header")
        _, dim = int(header[0]), int(header[1])
        if dim <= 0:
            raise ValueError(f"{path}:1: dimension must be positive")
        vectors: dict[str, list[float]] = {}
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) <= 1:
                continue
            token = parts[0]
            comps = [float(x) for x in parts[1:] if x]
            if len(comps) != dim:
                raise ValueError(
                    f"{path}:{lineno}: expected {dim} components, found {len(comps)}"
                )
            if any(not math.isfinite(x) for x in comps):
                raise ValueError(f"{path}:{lineno}: non-finite vector component")
            vectors.setdefault(token, comps)
    if not vectors:
        raise ValueError(f"{path}: no vectors loaded")
    return EmbeddingTable(dimension=dim, vectors=vectors, flavor=flavor)


def save_vectors(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vectors)} {table.dimension}\n")
        for token, comps in table.vectors.items():
            fh.write(token + " " + " ".join(f"{x:.6f}" for x in comps) + "\n")


def average_vector(tokens, table: EmbeddingTable) -> list[float] | None:
    """Arithmetic mean over the in-vocabulary tokens; None when nothing
    is in vocabulary."""
    acc = None
    n = 0
    for tok in tokens:
        v = table.get(tok)
        if v is None:
            continue
        if acc is None:
            acc = [0.0] * table.dimension
        for i, x in enumerate(v):
            acc[i] += x
        n += 1
    if acc is None:
        return None
    return [x / n for x in acc]


def cosine(a, b) -> float:
    """dot(a,b)/(|a||b|); zero-norm inputs score 0 by definition."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)
