"""Rank availability records against need records.

Methods P1/P2a/P2b work on extracted records (shared resources or
resource-vector cosine); baselines B1-B4 work on the annotated tweets
(noun overlap, TF-IDF cosine, averaged tweet-vectors); "combined" mixes
the P2b resource score with geographical proximity.  All rankings are
deterministic: ties break on ascending availability id.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .annotations import AnnotationBundle
from .embeddings import EmbeddingTable, average_vector, cosine
from .extraction import ExtractedRecord
from .geo import BoundingBox, haversine_km, proximity_score

__all__ = [
    "METHODS",
    "MethodConfig",
    "MatchResult",
    "MatchContext",
    "CorpusStats",
    "score_p1",
    "score_resource_embedding",
    "score_b1",
    "score_tfidf",
    "score_tweet_embedding",
    "score_combined",
    "rank",
    "rank_all",
]

METHODS = ("P1", "P2a", "P2b", "B1", "B2", "B3", "B4a", "B4b", "B4c", "combined")

# method -> embedding flavor it scores with
_METHOD_FLAVOR = {
    "P2a": "local",
    "P2b": "pretrained_crisis",
    "B3": "local",
    "B4a": "pretrained_general",
    "B4b": "paraphrase",
    "B4c": "pretrained_crisis",
    "combined": "pretrained_crisis",
}


@dataclass(frozen=True)
class MethodConfig:
    method: str = "P2b"
    k: int = 5
    resource_weight: float = 0.5
    proximity_weight: float = 0.5

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown matching method {self.method!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if abs(self.resource_weight + self.proximity_weight - 1.0) > 1e-9:
            raise ValueError("resource and proximity weights must sum to 1")


@dataclass
class MatchResult:
    need_id: str
    method: str
    ranked: list[tuple[str, float, float, float | None]] = field(default_factory=list)
    note: str = ""

    def avail_ids(self) -> list[str]:
        return [r[0] for r in self.ranked]


@dataclass
class CorpusStats:
    """Document frequencies over the need+availability tweet union."""

    n_docs: int = 0
    df: Counter = field(default_factory=Counter)

    @classmethod
    def from_bundles(cls, bundles, stopwords=frozenset()) -> "CorpusStats":
        stats = cls()
        for b in bundles:
            stats.n_docs += 1
            stats.df.update(set(_terms(b, stopwords)))
        return stats

    def idf(self, term: str) -> float:
        d = self.df.get(term, 0)
        if d == 0 or self.n_docs == 0:
            return 0.0
        return math.log(self.n_docs / d)


@dataclass
class MatchContext:
    """Everything scoring may need, shared and immutable during ranking."""

    tables: dict[str, EmbeddingTable] = field(default_factory=dict)
    bundles: dict[str, AnnotationBundle] = field(default_factory=dict)
    stats: CorpusStats | None = None
    box: BoundingBox | None = None
    stopwords: frozenset[str] = frozenset()

    def table_for(self, method: str) -> EmbeddingTable | None:
        flavor = _METHOD_FLAVOR.get(method)
        if flavor is None:
            return None
        return self.tables.get(flavor)


def _terms(bundle: AnnotationBundle, stopwords) -> list[str]:
    return [
        t.surface.lower()
        for t in bundle.tokens
        if t.pos != "PUNCT" and t.surface.lower() not in stopwords
    ]


def _nouns(bundle: AnnotationBundle) -> set[str]:
    return {t.surface.lower() for t in bundle.tokens if t.is_noun}


def score_p1(need: ExtractedRecord, avail: ExtractedRecord) -> float:
    """Fraction of the need's resources also present in the availability
    (canonical terms)."""
    need_terms = set(need.resource_terms())
    if not need_terms:
        raise ValueError(f"need {need.tweet_id} has no resources")
    return len(need_terms & set(avail.resource_terms())) / len(need_terms)


def _resource_vector(rec: ExtractedRecord, table: EmbeddingTable):
    tokens: list[str] = []
    for term in rec.resource_terms():
        tokens.extend(term.split())
    return average_vector(tokens, table)


def score_resource_embedding(
    need: ExtractedRecord, avail: ExtractedRecord, table: EmbeddingTable
) -> tuple[float, bool]:
    """Cosine of averaged resource-term vectors; (0, flagged) when either
    side has no in-vocabulary resource."""
    v_need = _resource_vector(need, table)
    v_avail = _resource_vector(avail, table)
    if v_need is None or v_avail is None:
        return 0.0, True
    return cosine(v_need, v_avail), False


def score_b1(need_tweet: AnnotationBundle, avail_tweet: AnnotationBundle) -> float:
    """Fraction of the need-tweet's nouns shared with the availability."""
    need_nouns = _nouns(need_tweet)
    if not need_nouns:
        return 0.0
    return len(need_nouns & _nouns(avail_tweet)) / len(need_nouns)


def _tfidf_vector(bundle: AnnotationBundle, stats: CorpusStats, stopwords) -> dict[str, float]:
    counts = Counter(_terms(bundle, stopwords))
    return {t: c * stats.idf(t) for t, c in counts.items()}


def _sparse_cosine(a: dict[str, float], b: dict[str, float]) -> float:
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def score_tfidf(
    need_tweet: AnnotationBundle,
    avail_tweet: AnnotationBundle,
    stats: CorpusStats,
    stopwords=frozenset(),
) -> float:
    """Cosine of raw-count x ln(N/df) TF-IDF vectors, stopwords excluded."""
    return _sparse_cosine(
        _tfidf_vector(need_tweet, stats, stopwords),
        _tfidf_vector(avail_tweet, stats, stopwords),
    )


def score_tweet_embedding(
    need_tweet: AnnotationBundle,
    avail_tweet: AnnotationBundle,
    table: EmbeddingTable,
    stopwords=frozenset(),
) -> tuple[float, bool]:
    """Cosine of all-token averaged vectors (bag semantics)."""
    v_need = average_vector(_terms(need_tweet, stopwords), table)
    v_avail = average_vector(_terms(avail_tweet, stopwords), table)
    if v_need is None or v_avail is None:
        return 0.0, True
    return cosine(v_need, v_avail), False


def min_location_distance_km(
    need: ExtractedRecord, avail: ExtractedRecord
) -> float | None:
    """Smallest great-circle distance over all located location pairs."""
    n_coords = need.located_coordinates()
    a_coords = avail.located_coordinates()
    if not n_coords or not a_coords:
        return None
    return min(haversine_km(p, q) for p in n_coords for q in a_coords)


def score_combined(
    need: ExtractedRecord,
    avail: ExtractedRecord,
    table: EmbeddingTable,
    box: BoundingBox,
    cfg: MethodConfig,
) -> tuple[float, float, float] | None:
    """Weighted sum of the P2b resource score and the proximity score;
    None when either record lacks a located location (the pair is then
    excluded from the ranking entirely)."""
    d = min_location_distance_km(need, avail)
    if d is None:
        return None
    resource, _flagged = score_resource_embedding(need, avail, table)
    proximity = proximity_score(d, box)
    total = cfg.resource_weight * resource + cfg.proximity_weight * proximity
    return total, resource, proximity


def _pair_score(need, avail, cfg: MethodConfig, ctx: MatchContext):
    """(total, resource_score, proximity) for one pair, or None to
    exclude the pair."""
    m = cfg.method
    if m == "P1":
        s = score_p1(need, avail)
        return s, s, None
    if m in ("P2a", "P2b"):
        table = ctx.table_for(m)
        if table is None:
            raise ValueError(f"method {m} needs a {_METHOD_FLAVOR[m]} vector table")
        s, _ = score_resource_embedding(need, avail, table)
        return s, s, None
    if m == "B1":
        s = score_b1(ctx.bundles[need.tweet_id], ctx.bundles[avail.tweet_id])
        return s, s, None
    if m == "B2":
        if ctx.stats is None:
            raise ValueError("method B2 needs corpus statistics")
        s = score_tfidf(
            ctx.bundles[need.tweet_id], ctx.bundles[avail.tweet_id], ctx.stats, ctx.stopwords
        )
        return s, s, None
    if m in ("B3", "B4a", "B4b", "B4c"):
        table = ctx.table_for(m)
        if table is None:
            raise ValueError(f"method {m} needs a {_METHOD_FLAVOR[m]} vector table")
        s, _ = score_tweet_embedding(
            ctx.bundles[need.tweet_id], ctx.bundles[avail.tweet_id], table, ctx.stopwords
        )
        return s, s, None
    if m == "combined":
        table = ctx.table_for(m)
        if table is None or ctx.box is None:
            raise ValueError("combined method needs crisis vectors and a bounding box")
        return score_combined(need, avail, table, ctx.box, cfg)
    raise ValueError(f"unknown method {m!r}")


def rank(
    need: ExtractedRecord,
    avails,
    cfg: MethodConfig,
    ctx: MatchContext,
) -> MatchResult:
    """Top-k availability records for one need, deterministically.

    Pairs a method excludes never appear; an empty ranked list is a
    valid result.  Needs a method cannot score at all (P1 with no
    resources) yield an empty result with a diagnostic note instead of
    an exception.
    """
    need_id = need.tweet_id
    if cfg.method == "P1" and not need.resource_terms():
        return MatchResult(need_id, cfg.method, [], note="skipped: need has no resources")
    scored: list[tuple[str, float, float, float | None]] = []
    for avail in avails:
        got = _pair_score(need, avail, cfg, ctx)
        if got is None:
            continue
        total, resource, proximity = got
        scored.append((avail.tweet_id, total, resource, proximity))
    scored.sort(key=lambda r: (-r[1], r[0]))
    return MatchResult(need_id, cfg.method, scored[: cfg.k])


def rank_all(needs, avails, cfg: MethodConfig, ctx: MatchContext) -> list[MatchResult]:
    return [rank(n, avails, cfg, ctx) for n in needs]
