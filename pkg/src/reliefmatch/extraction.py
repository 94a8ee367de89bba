"""Field extraction from annotated tweets.

The proposed method walks the dependency tree outward from head words
(sentence roots plus need/availability trigger words), harvesting noun
arguments as potential resources, then filters them against the resource
ontology.  Quantities, locations, sources and contacts hang off the same
walk.  A baseline method uses only POS tags and entity spans.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .annotations import GEO_ENTITY_LABELS, AnnotationBundle, Token
from .lexicons import LexiconSet, SimilarityOracle, is_numeric_token
from . import geo

__all__ = [
    "HeadWordSet",
    "ResourceMention",
    "LocationField",
    "ExtractedRecord",
    "head_word_set",
    "extract_potential_resources",
    "extract_resources",
    "extract_quantities",
    "extract_sources",
    "extract_contacts",
    "extract_record",
    "load_records",
    "write_records",
]

# Child relations whose noun endpoints become potential resources
# (objects, subjects, conjuncts and prepositional nominals).
COLLECT_RELS = frozenset(
    {"obj", "iobj", "obl", "nmod", "nsubj", "nsubj:pass", "csubj", "csubj:pass", "conj"}
)
# Child relations that extend the walk itself (modifier clauses,
# complements, adpositions, punctuation).
RECURSE_RELS = frozenset(
    {"prep", "advcl", "acl", "acl:relcl", "ccomp", "xcomp", "acomp", "punct"}
)
SUBJECT_RELS = frozenset({"nsubj", "nsubj:pass", "csubj", "csubj:pass"})
SOURCE_ENTITY_LABELS = frozenset({"PERSON", "NORP", "ORG"})

_QUANTITY_SKIP_POS = frozenset({"DET", "ADJ"})

_EMAIL_RE = re.compile(r"[A-Za-z0-9]?[A-Za-z0-9_.]+@[A-Za-z0-9_.]+\.(?:com|net|edu|in|org|en)\b")
_PHONE_RE = re.compile(r"[+]?0?[1-9][0-9\s]*[-]?[0-9\s]+")
_MIN_PHONE_DIGITS = 7


@dataclass(frozen=True)
class HeadWordSet:
    indices: frozenset[int]

    def __contains__(self, i: int) -> bool:
        return i in self.indices


@dataclass
class ResourceMention:
    surface: str
    canonical: str
    cls: str
    span: tuple[int, int]
    quantity: int | None = None


@dataclass
class LocationField:
    surface: str
    lat: float | None = None
    lon: float | None = None
    granularity: str = "coarse"

    @property
    def coordinates(self) -> tuple[float, float] | None:
        if self.lat is None or self.lon is None:
            return None
        return (self.lat, self.lon)


@dataclass
class ExtractedRecord:
    tweet_id: str
    kind: str
    resources: list[ResourceMention] = field(default_factory=list)
    locations: list[LocationField] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)
    contacts: list[tuple[str, str]] = field(default_factory=list)
    method: str = "proposed"
    dual_cue: bool = False

    def resource_terms(self) -> list[str]:
        return [m.canonical for m in self.resources]

    def located_coordinates(self) -> list[tuple[float, float]]:
        return [loc.coordinates for loc in self.locations if loc.coordinates is not None]


def head_word_set(bundle: AnnotationBundle, lex: LexiconSet) -> HeadWordSet:
    """Sentence roots plus every need/availability trigger token."""
    idx = set(bundle.roots())
    for i, tok in enumerate(bundle.tokens):
        if lex.is_trigger(tok.surface, tok.lemma):
            idx.add(i)
    return HeadWordSet(frozenset(idx))


def _noun_run(bundle: AnnotationBundle, i: int) -> tuple[int, int]:
    """Phrase span for a collected noun: proper nouns stand alone, common
    nouns absorb contiguous common-noun neighbours."""
    toks = bundle.tokens
    if toks[i].pos == "PROPN":
        return (i, i + 1)
    lo = i
    while lo > 0 and toks[lo - 1].pos == "NOUN":
        lo -= 1
    hi = i + 1
    while hi < len(toks) and toks[hi].pos == "NOUN":
        hi += 1
    return (lo, hi)


def _dependency_walk(
    bundle: AnnotationBundle, lex: LexiconSet
) -> tuple[list[tuple[int, int]], HeadWordSet]:
    """Walk outward from roots and trigger words.

    Children of examined nodes that are objects, subjects, prepositional
    nominals or conjuncts are collected when they are nouns; modifier
    clauses, complements and adpositions are admitted as further head
    words.  Collected nodes and conjunct chains are examined too, so
    "Team of doctors" also yields "doctors".  Every token is examined at
    most once, which bounds the recursion.
    """
    seeds = head_word_set(bundle, lex)
    if bundle.degraded or not bundle.tokens:
        return [], seeds
    admitted: set[int] = set(seeds.indices)
    worklist = sorted(seeds.indices)
    examined: set[int] = set()
    collected: list[int] = []
    collected_set: set[int] = set()
    while worklist:
        i = worklist.pop(0)
        if i in examined:
            continue
        examined.add(i)
        for c in bundle.children(i):
            rel = bundle.tokens[c].deprel
            if rel in COLLECT_RELS:
                if bundle.tokens[c].is_noun and c not in collected_set:
                    collected.append(c)
                    collected_set.add(c)
                worklist.append(c)
            elif rel in RECURSE_RELS:
                admitted.add(c)
                worklist.append(c)
    spans: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for c in sorted(collected):
        span = _noun_run(bundle, c)
        if span not in seen:
            seen.add(span)
            spans.append(span)
    return spans, HeadWordSet(frozenset(admitted))


def extract_potential_resources(
    bundle: AnnotationBundle, lex: LexiconSet
) -> list[tuple[int, int]]:
    """Noun-phrase spans reachable from the head words; empty when the
    annotation is degraded (callers fall back to the baseline mode)."""
    return _dependency_walk(bundle, lex)[0]


def _token_keys(tok: Token) -> tuple[str, str]:
    return (tok.surface.lower(), tok.lemma.lower())


def _match_span_terms(
    bundle: AnnotationBundle, span: tuple[int, int], lex: LexiconSet
) -> list[ResourceMention]:
    """Longest non-overlapping resource-term matches inside one span,
    tried on surfaces first and lemmas second."""
    out: list[ResourceMention] = []
    toks = bundle.tokens
    i = span[0]
    max_len = max((len(k) for k in lex._term_index), default=1)
    while i < span[1]:
        hit = None
        for length in range(min(max_len, span[1] - i), 0, -1):
            window = toks[i : i + length]
            for key in (
                tuple(t.surface.lower() for t in window),
                tuple(t.lemma.lower() for t in window),
            ):
                found = lex._term_index.get(key)
                if found:
                    hit = (length, found)
                    break
            if hit:
                break
        if hit:
            length, (canonical, cls) = hit
            out.append(
                ResourceMention(
                    surface=bundle.surface(range(i, i + length)),
                    canonical=canonical,
                    cls=cls,
                    span=(i, i + length),
                )
            )
            i += length
        else:
            i += 1
    return out


def extract_resources(
    bundle: AnnotationBundle,
    lex: LexiconSet,
    oracle: SimilarityOracle,
    spans: list[tuple[int, int]] | None = None,
) -> list[ResourceMention]:
    """Filter potential resources through the ontology.

    Exact (sub-phrase) list matches win; a single-word phrase with no
    list match may still qualify through the similarity oracle.  First
    mention order is preserved and duplicate canonical terms collapse.
    """
    if spans is None:
        spans = extract_potential_resources(bundle, lex)
    mentions: list[ResourceMention] = []
    seen: set[str] = set()
    for span in spans:
        found = _match_span_terms(bundle, span, lex)
        if not found and span[1] - span[0] == 1:
            tok = bundle.tokens[span[0]]
            for key in _token_keys(tok):
                best = oracle.best_match(key, lex.all_terms())
                if best:
                    canonical, cls = lex.canonical(best[0]) or (best[0], "")
                    cls = cls or lex.class_of(canonical) or ""
                    found = [ResourceMention(tok.surface, canonical, cls, span)]
                    break
        for m in found:
            if m.canonical not in seen:
                seen.add(m.canonical)
                mentions.append(m)
    mentions.sort(key=lambda m: m.span)
    return mentions


def extract_quantities(
    bundle: AnnotationBundle,
    mentions: list[ResourceMention],
    lex: LexiconSet | None = None,
    window: int = 3,
) -> list[tuple[str, int]]:
    """Attach a quantity to each resource mention preceded by a numeric
    token.

    Scans backwards from the mention, at most ``window`` tokens, skipping
    determiners and adjectives; anything else non-numeric blocks the
    scan (so "95 Tons food packets" yields no quantity for the food).
    """
    out: list[tuple[str, int]] = []
    toks = bundle.tokens
    for m in mentions:
        i = m.span[0] - 1
        steps = 0
        while i >= 0 and steps < window:
            tok = toks[i]
            value = is_numeric_token(tok.surface)
            if value is not None:
                # "two thousand" style pairs: fold a preceding multiplier in.
                if tok.surface.lower() in ("hundred", "thousand", "lakh", "million") and i > 0:
                    base = is_numeric_token(toks[i - 1].surface)
                    if base is not None:
                        value = base * value
                m.quantity = value
                out.append((m.canonical, value))
                break
            if tok.pos in _QUANTITY_SKIP_POS or tok.deprel in ("det", "amod"):
                i -= 1
                steps += 1
                continue
            break
    return out


def extract_contacts(clean_text: str) -> list[tuple[str, str]]:
    """Phone numbers and email addresses via the fixed regexes; email
    matches are carved out first so digits inside them cannot double as
    phone numbers, and phone matches need at least 7 digits."""
    contacts: list[tuple[str, str]] = []
    masked = clean_text
    for m in _EMAIL_RE.finditer(clean_text):
        contacts.append(("email", m.group(0)))
        masked = masked.replace(m.group(0), " " * len(m.group(0)))
    for m in _PHONE_RE.finditer(masked):
        value = m.group(0).strip().strip("-").strip()
        digits = sum(ch.isdigit() for ch in value)
        if digits >= _MIN_PHONE_DIGITS:
            contacts.append(("phone", value))
    return contacts


def _compound_span(bundle: AnnotationBundle, i: int) -> tuple[int, int]:
    """Expand a proper noun across its contiguous proper-noun compounds."""
    indices = {i}
    stack = [i]
    while stack:
        cur = stack.pop()
        for c in bundle.children(cur):
            tok = bundle.tokens[c]
            if tok.deprel in ("compound", "flat", "flat:name") and tok.pos == "PROPN":
                indices.add(c)
                stack.append(c)
    lo = i
    while lo - 1 in indices:
        lo -= 1
    hi = i
    while hi + 1 in indices:
        hi += 1
    return (lo, hi + 1)


def extract_sources(
    bundle: AnnotationBundle,
    heads: HeadWordSet,
    resource_spans: list[tuple[int, int]],
    verified_spans: list[tuple[int, int]],
    unverified_entity_spans: list[tuple[int, int]] | None = None,
) -> list[str]:
    """Sources: proper-noun subjects of head words (compound-expanded),
    person/group/organization entities, and geo entities the gazetteer
    rejected.  A candidate overlapping an extracted resource or a
    verified location is dropped whole."""
    candidates: list[tuple[int, int]] = []
    for h in sorted(heads.indices):
        for c in bundle.children(h):
            tok = bundle.tokens[c]
            if tok.deprel in SUBJECT_RELS and tok.pos == "PROPN":
                candidates.append(_compound_span(bundle, c))
    for span in bundle.entities:
        if span.label in SOURCE_ENTITY_LABELS:
            candidates.append((span.start, span.end))
    for span in unverified_entity_spans or []:
        candidates.append(span)

    excluded: set[int] = set()
    for lo, hi in resource_spans:
        excluded.update(range(lo, hi))
    for lo, hi in verified_spans:
        if lo >= 0:
            excluded.update(range(lo, hi))

    out: list[str] = []
    seen: set[str] = set()
    for lo, hi in sorted(candidates):
        if any(i in excluded for i in range(lo, hi)):
            continue
        surface = bundle.surface(range(lo, hi))
        key = surface.lower()
        if key and key not in seen:
            seen.add(key)
            out.append(surface)
    return out


def _baseline_spans(bundle: AnnotationBundle) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for i, tok in enumerate(bundle.tokens):
        if not tok.is_noun:
            continue
        span = _noun_run(bundle, i)
        if span not in seen:
            seen.add(span)
            spans.append(span)
    return spans


def _entity_candidates(bundle: AnnotationBundle) -> list[geo.LocationCandidate]:
    out = []
    for span in bundle.entities:
        if span.label in GEO_ENTITY_LABELS:
            out.append(
                geo.LocationCandidate(
                    bundle.surface(span.indices()), "entity", (span.start, span.end)
                )
            )
    return out


def extract_record(
    bundle: AnnotationBundle,
    lex: LexiconSet,
    oracle: SimilarityOracle,
    gaz: geo.Gazetteer,
    mode: str = "proposed",
    dependency_distance_max: int = 4,
    jw_threshold: float = 0.75,
    quantity_window: int = 3,
) -> ExtractedRecord:
    """Extract the five fields from one annotated tweet.

    ``mode="proposed"`` runs the dependency walk; ``mode="baseline"``
    uses POS tags and entity spans only.  Degraded annotations fall back
    to the baseline automatically, recorded in ``method``.
    """
    if mode not in ("proposed", "baseline"):
        raise ValueError(f"unknown extraction mode {mode!r}")
    method = mode
    if mode == "proposed" and bundle.degraded:
        method = "baseline"

    if method == "proposed":
        spans, heads = _dependency_walk(bundle, lex)
        candidates = geo.propose_candidates(
            bundle,
            lex,
            heads,
            dependency_distance_max=dependency_distance_max,
            jw_threshold=jw_threshold,
        )
    else:
        heads = head_word_set(bundle, lex)
        spans = _baseline_spans(bundle)
        candidates = _entity_candidates(bundle)

    mentions = extract_resources(bundle, lex, oracle, spans)
    extract_quantities(bundle, mentions, lex, window=quantity_window)

    verified, unverified = geo.verify(candidates, gaz, lex)
    locations: list[LocationField] = []
    seen_locs: set[str] = set()
    verified_spans: list[tuple[int, int]] = []
    for v in verified:
        verified_spans.append(v.candidate.token_span)
        key = v.surface.lower()
        if key not in seen_locs:
            seen_locs.add(key)
            locations.append(
                LocationField(v.surface, v.entry.lat, v.entry.lon, v.entry.granularity)
            )

    # Geo entities the gazetteer rejected feed the source rule; a candidate
    # counts as entity-backed by its span, whatever cue proposed it first.
    geo_spans = {
        (s.start, s.end) for s in bundle.entities if s.label in GEO_ENTITY_LABELS
    }
    unverified_entities = [
        c.token_span for c in unverified if c.token_span in geo_spans
    ]
    sources = extract_sources(
        bundle, heads, [m.span for m in mentions], verified_spans, unverified_entities
    )
    # Invariant guard: a string never doubles as source and location/resource.
    taken = {loc.surface.lower() for loc in locations}
    taken.update(m.surface.lower() for m in mentions)
    sources = [s for s in sources if s.lower() not in taken]

    contacts = extract_contacts(bundle.clean_text)

    cues = {lex.is_trigger(t.surface, t.lemma) for t in bundle.tokens}
    return ExtractedRecord(
        tweet_id=bundle.tweet_id,
        kind=bundle.kind,
        resources=mentions,
        locations=locations,
        sources=sources,
        contacts=contacts,
        method=method,
        dual_cue={"need", "availability"} <= cues,
    )


def record_to_obj(rec: ExtractedRecord) -> dict:
    return {
        "tweet_id": rec.tweet_id,
        "kind": rec.kind,
        "method": rec.method,
        "dual_cue": rec.dual_cue,
        "resources": [
            {
                "term": m.surface,
                "canonical": m.canonical,
                "class": m.cls,
                "quantity": m.quantity,
            }
            for m in rec.resources
        ],
        "locations": [
            {
                "surface": loc.surface,
                "lat": loc.lat,
                "lon": loc.lon,
                "granularity": loc.granularity,
            }
            for loc in rec.locations
        ],
        "sources": list(rec.sources),
        "contacts": [{"type": t, "value": v} for t, v in rec.contacts],
    }


def record_from_obj(obj: dict) -> ExtractedRecord:
    return ExtractedRecord(
        tweet_id=str(obj["tweet_id"]),
        kind=obj.get("kind", "unlabeled"),
        resources=[
            ResourceMention(
                surface=r["term"],
                canonical=r.get("canonical", r["term"].lower()),
                cls=r.get("class", ""),
                span=(-1, -1),
                quantity=r.get("quantity"),
            )
            for r in obj.get("resources", [])
        ],
        locations=[
            LocationField(
                loc["surface"], loc.get("lat"), loc.get("lon"), loc.get("granularity", "coarse")
            )
            for loc in obj.get("locations", [])
        ],
        sources=list(obj.get("sources", [])),
        contacts=[(c["type"], c["value"]) for c in obj.get("contacts", [])],
        method=obj.get("method", "proposed"),
        dual_cue=bool(obj.get("dual_cue", False)),
    )


def load_records(path) -> list[ExtractedRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_obj(json.loads(line)))
    return records


def write_records(records, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_obj(rec), ensure_ascii=False) + "\n")
            n += 1
    return n
