"""Location inference and geometric utilities.

Candidate generation walks several cues over an annotated tweet (hashtag
segments, proper-noun runs, affix and preposition cues, regex matches,
dependency distance to trigger words, entity spans); the gazetteer then
keeps only candidates that resolve to real places.  Geometry helpers
cover great-circle distance and bounding-box-normalized proximity.
"""

from __future__ import annotations

import logging
import math
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .annotations import GEO_ENTITY_LABELS, AnnotationBundle
from .lexicons import LexiconSet

__all__ = [
    "EARTH_RADIUS_KM",
    "BoundingBox",
    "LocationCandidate",
    "GazetteerEntry",
    "VerifiedLocation",
    "Gazetteer",
    "segment_hashtag",
    "jaro_winkler",
    "haversine_km",
    "proximity_score",
    "propose_candidates",
    "verify",
]

_logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0

# Probability assigned to out-of-vocabulary words when segmenting; the
# steep length penalty makes keeping a rare name in one piece optimal.
_UNSEEN_EXPONENT = 10

_HASHTAG_RE = re.compile(r"#(\w+)")

CANDIDATE_ORIGINS = ("hashtag", "proper_noun", "regex", "dependency", "entity")


@dataclass(frozen=True)
class LocationCandidate:
    surface: str
    origin: str
    token_span: tuple[int, int] = (-1, -1)

    def __post_init__(self):
        if not self.surface:
            raise ValueError("candidate surface must be non-empty")


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    lat: float
    lon: float
    granularity: str = "coarse"  # coarse | fine
    provider: str = "primary_gazetteer"
    outside_box: bool = False

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0 or not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"invalid coordinates for {self.name!r}")


@dataclass(frozen=True)
class VerifiedLocation:
    candidate: LocationCandidate
    entry: GazetteerEntry

    @property
    def surface(self) -> str:
        return self.candidate.surface


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self):
        if not (self.min_lat < self.max_lat and self.min_lon < self.max_lon):
            raise ValueError("bounding box must have min < max on both axes")

    @property
    def center(self) -> tuple[float, float]:
        return ((self.min_lat + self.max_lat) / 2, (self.min_lon + self.max_lon) / 2)

    def diagonal_km(self) -> float:
        return haversine_km((self.min_lat, self.min_lon), (self.max_lat, self.max_lon))

    def contains(self, lat: float, lon: float) -> bool:
        return self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in kilometres (spherical Earth, R=6371 km)."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def proximity_score(distance_km: float, box: BoundingBox) -> float:
    """1 at zero distance, falling linearly to 0 at the box diagonal;
    clipped so far-apart pairs score 0 rather than negative."""
    if distance_km < 0:
        raise ValueError("distance must be non-negative")
    return 1.0 - min(1.0, distance_km / box.diagonal_km())


def jaro_winkler(a: str, b: str) -> float:
    """Jaro similarity with the Winkler common-prefix boost
    (prefix capped at 4 characters, scaling factor 0.1)."""
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    match_a = [False] * la
    match_b = [False] * lb
    matches = 0
    for i in range(la):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for j in range(lo, hi):
            if not match_b[j] and a[i] == b[j]:
                match_a[i] = match_b[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    sa = [a[i] for i in range(la) if match_a[i]]
    sb = [b[j] for j in range(lb) if match_b[j]]
    transpositions = sum(1 for x, y in zip(sa, sb) if x != y) / 2
    jaro = (matches / la + matches / lb + (matches - transpositions) / matches) / 3
    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1 - jaro)


def segment_hashtag(tag: str, unigrams: dict[str, int]) -> list[str]:
    """Most-likely word segmentation of a hashtag under a unigram model.

    Dynamic program maximizing the sum of log-probabilities; unknown
    words get probability 10**(-10*len), and ties prefer fewer words.
    The unsegmented original is always appended as a fallback candidate.
    """
    tag = tag.lstrip("#")
    if not tag:
        return []
    total = sum(unigrams.values()) or 1

    def logp(word: str) -> float:
        count = unigrams.get(word.lower())
        if count:
            return math.log10(count / total)
        return -_UNSEEN_EXPONENT * len(word)

    n = len(tag)
    # best[i] = (score, word_count, segmentation of tag[:i])
    best: list[tuple[float, int, list[str]]] = [(0.0, 0, [])]
    for i in range(1, n + 1):
        candidates = []
        for j in range(max(0, i - 24), i):
            piece = tag[j:i]
            score, words, seg = best[j]
            candidates.append((score + logp(piece), -(words + 1), seg + [piece]))
        candidates.sort(key=lambda c: (c[0], c[1]), reverse=True)
        top = candidates[0]
        best.append((top[0], -top[1], top[2]))
    segments = best[n][2]
    out = [s for s in segments]
    if len(out) != 1 or out[0] != tag:
        out.append(tag)
    return out


def http_fetcher(url_template: str, timeout_s: float = 10.0, opener=None):
    """Live geocoding callable for one provider.

    ``url_template`` carries a ``{name}`` placeholder (API keys go right
    into the template).  The endpoint must answer with a JSON list of
    objects exposing lat/lon (nominatim-style "lat"/"lon" strings work).
    Returns a list of {"lat": float, "lon": float} dicts or [].
    """
    import json as _json
    import urllib.parse
    import urllib.request

    def fetch(name: str):
        url = url_template.format(name=urllib.parse.quote(name))
        open_fn = opener or urllib.request.urlopen
        with open_fn(url, timeout=timeout_s) as resp:
            payload = _json.loads(resp.read().decode("utf-8"))
        if isinstance(payload, dict):
            payload = payload.get("results", [])
        out = []
        for row in payload:
            lat = row.get("lat") or row.get("latitude")
            lon = row.get("lon") or row.get("lng") or row.get("longitude")
            if lat is None or lon is None:
                continue
            out.append({"lat": float(lat), "lon": float(lon)})
        return out

    return fetch


class Gazetteer:
    """Place-name resolver with three stacked backends.

    Lookups consult the committed fixture first, then the on-disk cache,
    then (when configured) a live geocoding endpoint whose calls are
    rate-limited and serialized; live hits are appended to the cache.
    Names match case-insensitively.  Among several hits for one name the
    entry nearest the event bounding-box center wins; hits outside the
    box are kept but flagged.
    """

    def __init__(
        self,
        fixture_path=None,
        cache_path=None,
        box: BoundingBox | None = None,
        coarse_fetch=None,
        fine_fetch=None,
        min_interval_s: float = 1.0,
    ):
        self.box = box
        self._entries: dict[str, list[GazetteerEntry]] = {}
        self._cache_path = Path(cache_path) if cache_path else None
        self._coarse_fetch = coarse_fetch
        self._fine_fetch = fine_fetch
        self._min_interval_s = min_interval_s
        self._last_call = 0.0
        self._lock = threading.Lock()
        self._misses: set[str] = set()
        if fixture_path:
            self._load_tsv(Path(fixture_path))
        if self._cache_path and self._cache_path.is_file():
            self._load_tsv(self._cache_path)

    def _load_tsv(self, path: Path) -> None:
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 5:
                raise ValueError(f"{path.name}: bad gazetteer row {line!r}")
            name, lat, lon, granularity, provider = parts[:5]
            self._add(GazetteerEntry(name, float(lat), float(lon), granularity, provider))

    def _add(self, entry: GazetteerEntry) -> None:
        self._entries.setdefault(entry.name.lower(), []).append(entry)

    def lookup(self, name: str, fine: bool = False) -> GazetteerEntry | None:
        """Resolve one name; ``fine`` routes unknown names to the
        fine-granularity provider (buildings/roads level)."""
        key = name.strip().lower()
        if not key:
            return None
        hits = self._entries.get(key)
        if hits is None and key not in self._misses:
            hits = self._fetch_live(key, fine)
        if not hits:
            return None
        return self._pick(hits)

    def _pick(self, hits: list[GazetteerEntry]) -> GazetteerEntry:
        if self.box is None or len(hits) == 1:
            best = hits[0]
            if self.box is not None and not self.box.contains(best.lat, best.lon):
                return GazetteerEntry(
                    best.name, best.lat, best.lon, best.granularity, best.provider, True
                )
            return best
        center = self.box.center
        best = min(hits, key=lambda e: haversine_km(center, (e.lat, e.lon)))
        if not self.box.contains(best.lat, best.lon):
            return GazetteerEntry(
                best.name, best.lat, best.lon, best.granularity, best.provider, True
            )
        return best

    def _fetch_live(self, key: str, fine: bool) -> list[GazetteerEntry] | None:
        fetch = self._fine_fetch if fine else self._coarse_fetch
        if fetch is None:
            return None
        with self._lock:
            wait = self._min_interval_s - (time.monotonic() - self._last_call)
            if wait > 0:
                time.sleep(wait)
            try:
                raw = fetch(key)
            except Exception as exc:
                # Lookup failures are never fatal; remember the miss so a
                # flaky provider cannot trigger a retry storm.
                _logger.warning("gazetteer lookup failed for %r: %s", key, exc)
                self._misses.add(key)
                return None
            finally:
                self._last_call = time.monotonic()
        if not raw:
            self._misses.add(key)
            return None
        provider = "fine_gazetteer" if fine else "primary_gazetteer"
        granularity = "fine" if fine else "coarse"
        entries = [
            GazetteerEntry(key, float(r["lat"]), float(r["lon"]), granularity, provider)
            for r in raw
        ]
        for e in entries:
            self._add(e)
            self._append_cache(e)
        return entries

    def _append_cache(self, entry: GazetteerEntry) -> None:
        if not self._cache_path:
            return
        with open(self._cache_path, "a", encoding="utf-8") as fh:
            fh.write(
                f"{entry.name}\t{entry.lat}\t{entry.lon}\t{entry.granularity}\t{entry.provider}\n"
            )


def _hashtag_candidates(bundle: AnnotationBundle, lex: LexiconSet) -> list[LocationCandidate]:
    out = []
    surfaces = [t.surface for t in bundle.tokens]
    for tag in _HASHTAG_RE.findall(bundle.text or ""):
        span = (-1, -1)
        for i, s in enumerate(surfaces):
            if s.lower() == tag.lower():
                span = (i, i + 1)
                break
        for piece in segment_hashtag(tag, lex.unigram_counts):
            out.append(LocationCandidate(piece, "hashtag", span))
    return out


def _proper_noun_runs(bundle: AnnotationBundle) -> list[tuple[int, int]]:
    """Maximal runs starting at a proper noun, extended across trailing
    proper nouns, adjectives and joining delimiters."""
    runs = []
    toks = bundle.tokens
    i = 0
    while i < len(toks):
        if toks[i].pos != "PROPN":
            i += 1
            continue
        j = i + 1
        while j < len(toks):
            t = toks[j]
            if t.pos in ("PROPN", "ADJ"):
                j += 1
            elif t.surface in (";", ")") or t.surface.lower() in ("and", "or"):
                # Delimiters may only join two proper-noun stretches.
                if j + 1 < len(toks) and toks[j + 1].pos == "PROPN":
                    j += 1
                else:
                    break
            else:
                break
        runs.append((i, j))
        i = j
    return runs


def propose_candidates(
    bundle: AnnotationBundle,
    lex: LexiconSet,
    head_words=None,
    dependency_distance_max: int = 4,
    jw_threshold: float = 0.75,
) -> list[LocationCandidate]:
    """All location candidates for one tweet, provenance attached.

    Cues: hashtag segments, proper-noun runs, affix-cued proper nouns
    (literal or Jaro-Winkler >= threshold), preposition/direction-cued
    proper nouns, affix-bearing regex phrases, tokens within the
    dependency-distance bound of a trigger word, and geo entity spans.
    """
    toks = bundle.tokens
    out: list[LocationCandidate] = list(_hashtag_candidates(bundle, lex))
    affixes = lex.affix_words("landforms", "roads", "buildings", "towns")
    directions = lex.location_affixes.get("directions", frozenset())

    for start, end in _proper_noun_runs(bundle):
        out.append(LocationCandidate(bundle.surface(range(start, end)), "proper_noun", (start, end)))

    for i, tok in enumerate(toks):
        if tok.pos != "PROPN":
            continue
        nxt = toks[i + 1] if i + 1 < len(toks) else None
        if nxt is not None and nxt.pos == "NOUN":
            word = nxt.surface.lower()
            if word in affixes or any(jaro_winkler(word, a) >= jw_threshold for a in affixes):
                out.append(LocationCandidate(tok.surface, "proper_noun", (i, i + 1)))
                out.append(
                    LocationCandidate(f"{tok.surface} {nxt.surface}", "proper_noun", (i, i + 2))
                )
        prev = toks[i - 1] if i > 0 else None
        if prev is not None and (
            prev.surface.lower() in lex.location_prepositions
            or prev.surface.lower() in directions
        ):
            out.append(LocationCandidate(tok.surface, "proper_noun", (i, i + 1)))

    # Regex pass over the clean text: Capitalized word(s) + affix term.
    # The capitalization requirement keeps phrases like "taking place" out.
    affix_alt = "|".join(sorted(map(re.escape, affixes), key=len, reverse=True))
    if affix_alt:
        pattern = re.compile(
            rf"\b((?:[A-Z][\w'-]*\s+)+(?i:{affix_alt}))\b|\b((?i:{affix_alt})\s+[A-Z][\w'-]*)\b"
        )
        for m in pattern.finditer(bundle.clean_text):
            phrase = (m.group(1) or m.group(2)).strip()
            out.append(LocationCandidate(phrase, "regex"))

    triggers = [
        i for i, t in enumerate(toks) if lex.is_trigger(t.surface, t.lemma) is not None
    ]
    if triggers:
        for i, tok in enumerate(toks):
            if tok.pos not in ("NOUN", "PROPN", "ADJ"):
                continue
            for h in triggers:
                d = bundle.dependency_distance(i, h)
                if d is not None and 0 < d <= dependency_distance_max:
                    out.append(LocationCandidate(tok.surface, "dependency", (i, i + 1)))
                    break

    for span in bundle.entities:
        if span.label in GEO_ENTITY_LABELS:
            out.append(
                LocationCandidate(bundle.surface(span.indices()), "entity", (span.start, span.end))
            )

    deduped: list[LocationCandidate] = []
    seen: set[str] = set()
    for cand in out:
        key = cand.surface.lower()
        if key and key not in seen:
            seen.add(key)
            deduped.append(cand)
    return deduped


def verify(
    candidates, gaz: Gazetteer, lex: LexiconSet | None = None
) -> tuple[list[VerifiedLocation], list[LocationCandidate]]:
    """Split candidates into gazetteer-verified locations and the rest.

    Candidates whose last word is a building/road affix go to the
    fine-granularity provider; everything else uses the coarse one.  The
    unverified list is returned for the source-extraction exclusion rule.
    """
    fine_affixes = lex.affix_words("buildings", "roads") if lex is not None else frozenset()
    verified: list[VerifiedLocation] = []
    unverified: list[LocationCandidate] = []
    for cand in candidates:
        last = cand.surface.split()[-1].lower()
        entry = gaz.lookup(cand.surface, fine=last in fine_affixes)
        if entry is None:
            unverified.append(cand)
        else:
            verified.append(VerifiedLocation(cand, entry))
    return verified, unverified
